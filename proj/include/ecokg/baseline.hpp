#pragma once

#include <cstddef>

#include "ecokg/effects.hpp"
#include "ecokg/neighbor_matrix.hpp"

namespace ecokg {

struct M1Config {
    std::size_t t_max = 30;
};

/// Nearest-neighbour effect prediction.
///
/// Returns true iff E is positive at the query cell or at any cell of the neighbour grid:
/// the t_max compounds most similar to `compound` (by S, query excluded) crossed with the
/// t_max species nearest to `species` (by A, the query species itself first). The search
/// stops at the first positive cell. Matrices are never modified; visited sets track seen
/// indices. `similarity` must be indexed like E's rows and `adjacency` like E's columns.
bool predict_m1(const EffectMatrix& effects, const NeighborMatrix& adjacency, const NeighborMatrix& similarity,
                std::size_t compound, std::size_t species, const M1Config& cfg);

}  // namespace ecokg
