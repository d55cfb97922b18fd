#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ecokg/chem_similarity.hpp"
#include "ecokg/effects.hpp"
#include "ecokg/graph_store.hpp"
#include "ecokg/metrics.hpp"
#include "ecokg/predictor.hpp"
#include "ecokg/taxonomy.hpp"

namespace ecokg {

inline constexpr std::string_view kAffects = "ecotox:affects";
inline constexpr std::string_view kEffectSpecies = "ecotox:species";
inline constexpr std::string_view kEndpoint = "ecotox:endpoint";
inline constexpr std::string_view kSubClassOf = "rdfs:subClassOf";
inline constexpr std::string_view kSameAs = "owl:sameAs";

struct DataPaths {
    std::filesystem::path triples;
    std::filesystem::path taxonomy;
    std::filesystem::path fingerprints;
    std::filesystem::path effects;
    std::filesystem::path mappings;

    /// The five standard file names inside `dir`.
    static DataPaths in_dir(const std::filesystem::path& dir);
    /// Throws InputError naming the first missing file.
    void require_exist() const;
};

/// Flat `key = value` experiment file. Path keys (triples, taxonomy, fingerprints, effects,
/// mappings, data), `model`, `output`, `t_max` and `step` are consumed here; everything else is kept
/// as a TrainConfig override.
struct ExperimentConfig {
    DataPaths paths;
    std::string model = "m2star-hole";
    std::filesystem::path output = "out";
    std::size_t t_max = 30;
    double step = 0.01;
    std::vector<std::pair<std::string, std::string>> overrides;

    static ExperimentConfig load(const std::filesystem::path& path);
    /// Applies one setting. Unknown keys land in `overrides` and are checked by `train_config`.
    void set(const std::string& key, const std::string& value);
    /// Model defaults, then overrides in order. Throws InputError for unknown keys or bad values.
    TrainConfig train_config(ModelKind kind) const;
};

/// Everything read from the five input files.
struct Dataset {
    Taxonomy taxonomy;
    std::vector<Fingerprint> fingerprints;
    std::vector<EffectRecord> records;
    /// triples.tsv plus taxonomy subClassOf edges plus sameAs mappings.
    GraphStore background;
    /// Matrix axes: compounds with fingerprints, then other effect chemicals; taxonomy leaves,
    /// then effect species that are inner taxonomy nodes.
    std::vector<std::string> chemicals;
    std::vector<std::string> species;
};

/// Throws InputError (with file and line where known) on parse failures, and when an effect
/// species is absent from the taxonomy.
Dataset load_dataset(const DataPaths& paths);

/// Background graph plus chemical-similarity triples above `phi` and the effect reification
/// <chemical affects effect>, <effect species taxon>, <effect endpoint code> of `effect_records`.
GraphStore build_kg(const Dataset& data, const std::vector<EffectRecord>& effect_records, double phi);

/// Records with a label (excluded outcome codes dropped).
std::vector<EffectRecord> labelled_records(const std::vector<EffectRecord>& records);

struct PreparedSplit {
    std::vector<EffectRecord> train_records;
    std::vector<LabeledPair> train;  // aggregated pairs
    std::vector<LabeledPair> test;   // aggregated pairs
};

PreparedSplit prepare(const BasicSplit<EffectRecord>& split);
PreparedSplit prepare_split(const Dataset& data, std::uint64_t seed);
std::vector<PreparedSplit> prepare_folds(const std::vector<EffectRecord>& train_records, std::size_t folds,
                                         std::uint64_t seed);

struct Evaluation {
    Metrics at_threshold;  // f_beta holds F1
    double f2 = 0.0;
    std::optional<double> auc;
    std::vector<std::uint8_t> labels;
    std::vector<double> scores;
};

Evaluation evaluate_scores(std::vector<std::uint8_t> labels, std::vector<double> scores, double threshold,
                           bool with_auc, double step = 0.01);

/// Nearest-neighbour baseline scores (0 or 1) with E built from `observed`; nullopt for pairs
/// naming an unknown chemical or species.
std::vector<std::optional<double>> m1_predict(const Dataset& data, const std::vector<LabeledPair>& observed,
                                              const std::vector<std::pair<std::string, std::string>>& queries,
                                              std::size_t t_max);

/// Nearest-neighbour baseline on `split.test`, with E built from `split.train`.
Evaluation evaluate_m1(const Dataset& data, const PreparedSplit& split, std::size_t t_max);

/// Trains `members` models with seeds derived from cfg.seed (member 0 uses cfg.seed itself).
std::vector<EffectModel> train_members(ModelKind kind, const PreparedSplit& split, const GraphStore& kg,
                                       const TrainConfig& cfg, std::size_t members);

Evaluation evaluate_models(const std::vector<EffectModel>& members, const std::vector<LabeledPair>& test,
                           double threshold, double step = 0.01);

/// One column of the metrics table: mean values and, for cross validation, standard deviations.
struct ReportColumn {
    std::string name;
    std::vector<Evaluation> runs;
};

/// Rows accuracy, precision, recall, f1, f2, auc; one column per model. AUC prints "-" when a
/// model emits binary predictions; several runs print "mean ± sd".
void write_report(std::ostream& out, const std::vector<ReportColumn>& columns);

/// Pairs file: `chemical_id,species_id` per line, optional header.
std::vector<std::pair<std::string, std::string>> load_pairs_csv(const std::filesystem::path& path);

}  // namespace ecokg
