#include "ecokg/neighbor_matrix.hpp"

#include <stdexcept>

namespace ecokg {

NeighborMatrix::NeighborMatrix(std::vector<std::string> labels)
    : labels_(std::move(labels)), values_(labels_.size() * labels_.size(), 0.0) {
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        if (!index_.emplace(labels_[i], i).second) {
            throw std::invalid_argument("duplicate matrix label: " + labels_[i]);
        }
    }
}

std::optional<std::size_t> NeighborMatrix::index_of(const std::string& label) const {
    if (auto it = index_.find(label); it != index_.end()) return it->second;
    return std::nullopt;
}

std::optional<std::size_t> nearest_neighbor(const NeighborMatrix& m, std::size_t row,
                                            const std::vector<bool>& visited) {
    if (row >= m.size()) throw std::out_of_range("neighbor row out of range");
    if (visited.size() != m.size()) throw std::invalid_argument("visited mask has wrong size");
    std::optional<std::size_t> best;
    double best_value = 0.0;
    for (std::size_t k = 0; k < m.size(); ++k) {
        if (k == row || visited[k]) continue;
        const double v = m(row, k);
        if (!best || v > best_value) {
            best = k;
            best_value = v;
        }
    }
    return best;
}

}  // namespace ecokg
