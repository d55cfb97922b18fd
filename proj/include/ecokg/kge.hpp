#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "ecokg/graph_store.hpp"

namespace ecokg {

enum class ScoreKind { transe, distmult, hole };

std::string_view to_string(ScoreKind kind);

/// Entity and relation vectors, row-major, one row of `dim` values per id.
class EmbeddingTable {
public:
    EmbeddingTable() = default;
    EmbeddingTable(std::size_t entities, std::size_t relations, std::size_t dim);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t entity_count() const noexcept { return entities_; }
    std::size_t relation_count() const noexcept { return relations_; }

    std::span<double> entity(std::size_t e);
    std::span<const double> entity(std::size_t e) const;
    std::span<double> relation(std::size_t r);
    std::span<const double> relation(std::size_t r) const;

    /// All entity rows followed by all relation rows.
    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }

    friend bool operator==(const EmbeddingTable&, const EmbeddingTable&) = default;

private:
    std::size_t entities_ = 0;
    std::size_t relations_ = 0;
    std::size_t dim_ = 0;
    std::vector<double> values_;
};

/// Values i.i.d. uniform on [-6/sqrt(k), 6/sqrt(k)]. Throws std::invalid_argument on zero sizes.
EmbeddingTable init_embeddings(std::size_t entities, std::size_t relations, std::size_t dim, std::uint64_t seed);

/// c_k = sum_i a_i * b_{(i+k) mod d}. FFT-based for d >= 16, direct below.
std::vector<double> circ_correlation(std::span<const double> a, std::span<const double> b);
/// c_k = sum_i a_i * b_{(k-i) mod d}. FFT-based for d >= 16, direct below.
std::vector<double> circ_convolution(std::span<const double> a, std::span<const double> b);

/// Direct O(d^2) forms of the above, used below the FFT cut-over.
std::vector<double> circ_correlation_direct(std::span<const double> a, std::span<const double> b);
std::vector<double> circ_convolution_direct(std::span<const double> a, std::span<const double> b);

/// Norms below this take the TransE limit branch (score 1, zero gradient).
inline constexpr double kTransENormFloor = 1e-12;

/// Score of raw vectors. DistMult: sigmoid(sum s*p*o). HolE: sigmoid(<p, s corr o>).
/// TransE: tanh(1 / ||s + p - o||_2).
double score(ScoreKind kind, std::span<const double> s, std::span<const double> p, std::span<const double> o);
double score(ScoreKind kind, const EmbeddingTable& table, const Triple& t);

struct ScoreGradients {
    double score = 0.0;
    std::vector<double> subject;
    std::vector<double> predicate;
    std::vector<double> object;
};

/// Score together with its partial derivatives with respect to the three vectors.
ScoreGradients score_gradients(ScoreKind kind, std::span<const double> s, std::span<const double> p,
                               std::span<const double> o);
ScoreGradients score_gradients(ScoreKind kind, const EmbeddingTable& table, const Triple& t);

/// Checkpoint section: "KGE1", then dim, entity count, relation count as u64 little-endian,
/// then row-major f64 little-endian values (entities, then relations).
void write_embeddings(std::ostream& out, const EmbeddingTable& table);
EmbeddingTable read_embeddings(std::istream& in);

/// Little-endian helpers shared by checkpoint writers.
void write_u64(std::ostream& out, std::uint64_t v);
void write_f64(std::ostream& out, double v);
std::uint64_t read_u64(std::istream& in);
double read_f64(std::istream& in);

}  // namespace ecokg
