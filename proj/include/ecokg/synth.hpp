#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ecokg/effects.hpp"

namespace ecokg {

/// Parameters of the block-structured toy world: chemical classes x species clades, where every
/// (class, clade) block is either toxic or not and record labels are flipped with `label_noise`.
struct SyntheticSpec {
    std::size_t n_chemical_classes = 5;
    std::size_t chemicals_per_class = 10;
    std::size_t n_species_clades = 5;
    std::size_t genera_per_clade = 2;
    std::size_t species_per_clade = 10;
    /// Fraction of toxic blocks; derived from `positive_rate` and `label_noise` when unset.
    std::optional<double> toxicity_block_probability;
    double label_noise = 0.1;
    double positive_rate = 0.41;

    std::size_t fingerprint_width = 128;
    double prototype_density = 0.3;
    double bit_flip = 0.08;

    /// Expected fraction of (chemical, species) pairs with any test.
    double observation_rate = 0.7;
    /// Spread of per-entity testing intensity (log-normal sigma); makes some entities rarely tested.
    double coverage_spread = 0.5;
    double mean_records_per_pair = 4.0;
    /// Share of extra records with outcome codes that carry no label (BCF, NOEC, ...).
    double excluded_record_rate = 0.05;

    /// Throws InputError for out-of-range values or a target rate the noise level cannot reach.
    void validate() const;
    double block_probability() const;
    std::size_t chemical_count() const { return n_chemical_classes * chemicals_per_class; }
    std::size_t species_count() const { return n_species_clades * species_per_clade; }
};

struct SyntheticData {
    std::vector<std::pair<std::string, std::string>> taxonomy_edges;  // child, parent
    std::vector<std::pair<std::string, std::string>> fingerprints;    // compound, hex
    std::vector<EffectRecord> effects;
    std::vector<std::vector<std::string>> triples;
    std::vector<std::pair<std::string, std::string>> mappings;
    std::vector<std::string> chemicals;
    std::vector<std::string> species;
    /// Ground truth per (class, clade) block, row-major by class.
    std::vector<std::uint8_t> toxic_blocks;
    /// Positive share of labelled records.
    double realized_positive_rate = 0.0;
};

SyntheticData generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed);

/// Writes taxonomy.tsv, fingerprints.tsv, effects.csv, triples.tsv and mappings.tsv into `dir`.
void write_synthetic(const SyntheticData& data, const std::filesystem::path& dir);

}  // namespace ecokg
