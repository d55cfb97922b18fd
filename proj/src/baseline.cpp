#include "ecokg/baseline.hpp"

#include <stdexcept>
#include <vector>

namespace ecokg {

bool predict_m1(const EffectMatrix& effects, const NeighborMatrix& adjacency, const NeighborMatrix& similarity,
                std::size_t compound, std::size_t species, const M1Config& cfg) {
    if (cfg.t_max < 1) throw std::invalid_argument("t_max must be at least 1");
    if (similarity.size() != effects.rows() || adjacency.size() != effects.cols()) {
        throw std::invalid_argument("similarity matrices are not aligned with the effect matrix");
    }
    if (compound >= effects.rows() || species >= effects.cols()) throw std::out_of_range("M1 query index out of range");

    if (effects(compound, species)) return true;

    std::vector<bool> seen_compounds(effects.rows(), false);
    seen_compounds[compound] = true;
    for (std::size_t t1 = 0; t1 < cfg.t_max; ++t1) {
        const auto neighbor = nearest_neighbor(similarity, compound, seen_compounds);
        if (!neighbor) break;
        seen_compounds[*neighbor] = true;

        // Species cursor resets to the query species for every compound.
        if (effects(*neighbor, species)) return true;
        std::vector<bool> seen_species(effects.cols(), false);
        seen_species[species] = true;
        for (std::size_t t2 = 1; t2 < cfg.t_max; ++t2) {
            const auto sp = nearest_neighbor(adjacency, species, seen_species);
            if (!sp) break;
            seen_species[*sp] = true;
            if (effects(*neighbor, *sp)) return true;
        }
    }
    return false;
}

}  // namespace ecokg
