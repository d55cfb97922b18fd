#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ecokg/effects.hpp"
#include "ecokg/graph_store.hpp"
#include "ecokg/kge.hpp"
#include "ecokg/mlp.hpp"

namespace ecokg {

/// M2 is the plain classifier; the m2star kinds feed it jointly trained KG embeddings.
enum class ModelKind { m2, m2star_transe, m2star_distmult, m2star_hole };

std::string_view to_string(ModelKind kind);
std::optional<ModelKind> parse_model_kind(std::string_view name);
std::optional<ScoreKind> score_kind(ModelKind kind);

struct TrainConfig {
    std::size_t embedding_dim = 16;
    double dropout_rate = 0.2;
    double loss_weight_kg = 1.0;
    double loss_weight_effect = 1.0;
    double learning_rate = 0.1;
    std::size_t batch_size = 128;
    std::size_t patience = 5;
    double min_delta = 1e-4;
    unsigned negative_ratio = 4;
    double phi = 0.5;
    std::size_t ensemble_size = 10;
    std::size_t max_epochs = 200;
    std::vector<std::size_t> hidden_sizes{128, 64};
    double threshold = 0.5;
    std::uint64_t seed = 0;

    /// k = 16 for M2, 128 for M2*; KG/effect loss weights 0.5/1.0 for DistMult and HolE, 1/1 for TransE.
    static TrainConfig defaults_for(ModelKind kind);

    /// Throws InputError on out-of-range values.
    void validate() const;

    /// Assigns one `key = value` setting. Returns false for unknown keys; throws InputError on bad values.
    bool set(std::string_view key, std::string_view value);
    std::vector<std::pair<std::string, std::string>> entries() const;
};

/// A trained (or initialised) effect classifier with its entity vocabulary.
class EffectModel {
public:
    ModelKind kind = ModelKind::m2;
    TrainConfig config;
    EmbeddingTable embeddings;
    MlpParams mlp;
    std::vector<std::string> entities;
    std::vector<std::string> relations;

    /// Fresh parameters over the entities/predicates of `graph`.
    static EffectModel initialise(ModelKind kind, const GraphStore& graph, const TrainConfig& cfg);

    std::optional<std::size_t> entity_row(const std::string& label) const;

    /// Inference-mode score for one (chemical, species) row pair.
    double predict(std::size_t chemical_row, std::size_t species_row) const;
    /// Throws InputError naming the first unknown entity.
    double predict(const std::string& chemical, const std::string& species) const;
    std::vector<double> predict(const std::vector<std::pair<std::string, std::string>>& pairs) const;

    /// Binary checkpoint at `path` plus `path.cfg` (settings) and `path.vocab` (entity/relation labels).
    void save(const std::filesystem::path& path) const;
    static EffectModel load(const std::filesystem::path& path);

    void rebuild_index();

private:
    std::unordered_map<std::string, std::size_t> index_;
};

struct EffectExample {
    std::size_t chemical_row = 0;
    std::size_t species_row = 0;
    double label = 0.0;
};

struct KgExample {
    Triple triple;
    double label = 0.0;
};

/// One optimiser step's worth of data: an effect sub-batch and a KG sub-batch (may be empty).
struct StepBatch {
    std::vector<EffectExample> effects;
    std::vector<KgExample> kg;
};

struct StepLoss {
    double total = 0.0;
    double effect = 0.0;
    double kg = 0.0;
};

struct ModelGradients {
    std::vector<double> embeddings;  // same layout as EmbeddingTable::values()
    MlpParams mlp;
};

/// w_kg * L_kg + w_effect * L_effect.
double joint_loss(double kg_loss, double effect_loss, const TrainConfig& cfg);

/// Joint loss of one step and, if `grads` is non-null, its gradient (added into `grads`, which
/// must be shaped like the model). `masks` enables dropout on the effect sub-batch.
StepLoss joint_objective(const EffectModel& model, const StepBatch& batch, const TrainConfig& cfg,
                         const DropoutMasks* masks, ModelGradients* grads);

struct EpochLog {
    std::size_t epoch = 0;
    double loss = 0.0;
    double effect_loss = 0.0;
    double kg_loss = 0.0;
};

struct TrainResult {
    EffectModel model;
    std::vector<EpochLog> log;
    std::size_t best_epoch = 0;
};

/// Trains `kind` on aggregated training pairs. `graph` supplies the entity vocabulary and, for the
/// m2star kinds, the KG triples (literal-free). Every step pairs an effect sub-batch with a KG
/// sub-batch of positives plus `negative_ratio` fresh corruptions each. Stops when the epoch loss
/// fails to improve by min_delta for `patience` epochs, or at max_epochs.
/// Throws NumericalError on a non-finite epoch loss.
TrainResult train(ModelKind kind, const std::vector<LabeledPair>& train_pairs, const GraphStore& graph,
                  const TrainConfig& cfg);

/// Mean member score per pair. Throws InputError for an empty ensemble.
std::vector<double> ensemble_predict(const std::vector<EffectModel>& members,
                                     const std::vector<std::pair<std::string, std::string>>& pairs);

}  // namespace ecokg
