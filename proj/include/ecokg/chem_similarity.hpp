#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ecokg/graph_store.hpp"
#include "ecokg/neighbor_matrix.hpp"

namespace ecokg {

inline constexpr std::size_t kDefaultFingerprintWidth = 128;
inline constexpr std::string_view kSimilarityPredicate = "sameAsChemical";

/// Fixed-width structural fingerprint of one compound.
///
/// Hex digit `d` at position `k` encodes bits 4k..4k+3, most significant bit first.
class Fingerprint {
public:
    Fingerprint(std::string compound, std::size_t width);
    static Fingerprint from_hex(std::string compound, std::string_view hex);

    const std::string& compound() const noexcept { return compound_; }
    std::size_t width() const noexcept { return width_; }
    std::size_t count() const noexcept;
    bool test(std::size_t bit) const;
    void set(std::size_t bit, bool value = true);
    std::string to_hex() const;

    /// |a & b| and |a | b|; widths must match.
    friend std::size_t intersection_count(const Fingerprint& a, const Fingerprint& b);
    friend std::size_t union_count(const Fingerprint& a, const Fingerprint& b);

private:
    std::string compound_;
    std::size_t width_ = 0;
    std::vector<std::uint64_t> words_;
};

/// Jaccard index of two fingerprints; two empty fingerprints score 0.
/// Throws std::invalid_argument on width mismatch.
double jaccard(const Fingerprint& a, const Fingerprint& b);

/// Reads `<compound_id>\t<hex>` lines. Every row must have the same width
/// (and equal `expected_width` when given).
std::vector<Fingerprint> load_fingerprints_tsv(const std::filesystem::path& path,
                                               std::optional<std::size_t> expected_width = std::nullopt);

NeighborMatrix similarity_matrix(const std::vector<Fingerprint>& fingerprints);

/// Similarity matrix over `compounds`; compounds without a fingerprint get an empty one.
NeighborMatrix similarity_matrix(const std::vector<Fingerprint>& fingerprints,
                                 const std::vector<std::string>& compounds);

/// Adds `<c_i> sameAsChemical <c_j>` for every i < j with S(i,j) > phi and returns the added triples.
std::vector<Triple> emit_similarity_triples(const NeighborMatrix& similarity, double phi, GraphStore& store);

/// Compound indices sorted by the similarity to their nearest neighbour, most similar first.
/// Ties keep index order.
std::vector<std::size_t> order_by_nearest_similarity(const NeighborMatrix& similarity);

}  // namespace ecokg
