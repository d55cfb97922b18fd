#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace ecokg {

/// Square, symmetric similarity matrix over a labelled index (species or compounds).
class NeighborMatrix {
public:
    NeighborMatrix() = default;
    explicit NeighborMatrix(std::vector<std::string> labels);

    std::size_t size() const noexcept { return labels_.size(); }
    double operator()(std::size_t i, std::size_t j) const { return values_[i * size() + j]; }
    double& operator()(std::size_t i, std::size_t j) { return values_[i * size() + j]; }

    const std::vector<std::string>& labels() const noexcept { return labels_; }
    std::optional<std::size_t> index_of(const std::string& label) const;

private:
    std::vector<std::string> labels_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<double> values_;
};

/// Most similar unvisited index k != row, ties to the lowest index.
/// `visited` must have one flag per index. Returns nullopt when every candidate is visited.
std::optional<std::size_t> nearest_neighbor(const NeighborMatrix& m, std::size_t row,
                                            const std::vector<bool>& visited);

}  // namespace ecokg
