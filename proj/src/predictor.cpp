#include "ecokg/predictor.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "ecokg/errors.hpp"
#include "ecokg/io.hpp"

namespace ecokg {

namespace {

std::mt19937_64 seeded_stream(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream)};
    return std::mt19937_64(seq);
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

template <class T>
T parse_value(std::string_view key, std::string_view text) {
    text = trim(text);
    T v{};
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (text.empty() || ec != std::errc{} || ptr != end) {
        throw InputError("invalid value '" + std::string(text) + "' for " + std::string(key));
    }
    return v;
}

std::vector<std::size_t> parse_sizes(std::string_view key, std::string_view text) {
    std::vector<std::size_t> out;
    text = trim(text);
    if (text.empty() || text == "none") return out;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto comma = text.find(',', start);
        if (comma == std::string_view::npos) comma = text.size();
        out.push_back(parse_value<std::size_t>(key, text.substr(start, comma - start)));
        start = comma + 1;
    }
    return out;
}

GraphStore literal_free(const GraphStore& graph, bool keep_triples) {
    GraphStore out;
    for (std::uint32_t e = 0; e < graph.entity_count(); ++e) {
        if (!graph.is_literal(EntityId{e})) out.intern(graph.label(EntityId{e}));
    }
    if (!keep_triples) return out;
    for (const auto& t : graph.triples()) {
        if (graph.is_literal(t.subject) || graph.is_literal(t.object)) continue;
        out.add_triple(graph.label(t.subject), graph.label(t.predicate), graph.label(t.object));
    }
    return out;
}

void add_into(std::vector<double>& grads, std::size_t offset, std::span<const double> g, double scale) {
    for (std::size_t d = 0; d < g.size(); ++d) grads[offset + d] += scale * g[d];
}

}  // namespace

std::string_view to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::m2:
            return "m2";
        case ModelKind::m2star_transe:
            return "m2star-transe";
        case ModelKind::m2star_distmult:
            return "m2star-distmult";
        case ModelKind::m2star_hole:
            return "m2star-hole";
    }
    return "?";
}

std::optional<ModelKind> parse_model_kind(std::string_view name) {
    for (auto k : {ModelKind::m2, ModelKind::m2star_transe, ModelKind::m2star_distmult, ModelKind::m2star_hole}) {
        if (to_string(k) == name) return k;
    }
    return std::nullopt;
}

std::optional<ScoreKind> score_kind(ModelKind kind) {
    switch (kind) {
        case ModelKind::m2:
            return std::nullopt;
        case ModelKind::m2star_transe:
            return ScoreKind::transe;
        case ModelKind::m2star_distmult:
            return ScoreKind::distmult;
        case ModelKind::m2star_hole:
            return ScoreKind::hole;
    }
    return std::nullopt;
}

TrainConfig TrainConfig::defaults_for(ModelKind kind) {
    TrainConfig cfg;
    switch (kind) {
        case ModelKind::m2:
            cfg.embedding_dim = 16;
            break;
        case ModelKind::m2star_transe:
            cfg.embedding_dim = 128;
            cfg.loss_weight_kg = 1.0;
            cfg.loss_weight_effect = 1.0;
            break;
        case ModelKind::m2star_distmult:
        case ModelKind::m2star_hole:
            cfg.embedding_dim = 128;
            cfg.loss_weight_kg = 0.5;
            cfg.loss_weight_effect = 1.0;
            break;
    }
    return cfg;
}

void TrainConfig::validate() const {
    if (embedding_dim < 1) throw InputError("embedding_dim must be at least 1");
    if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) throw InputError("dropout_rate must lie in [0, 1)");
    if (!(loss_weight_kg >= 0.0) || !(loss_weight_effect > 0.0)) {
        throw InputError("loss weights must be positive (loss_weight_kg may be 0)");
    }
    if (!(learning_rate > 0.0)) throw InputError("learning_rate must be positive");
    if (batch_size < 1) throw InputError("batch_size must be at least 1");
    if (negative_ratio < 1) throw InputError("negative_ratio must be at least 1");
    if (!(phi >= 0.0 && phi <= 1.0)) throw InputError("phi must lie in [0, 1]");
    if (ensemble_size < 1) throw InputError("ensemble_size must be at least 1");
    if (max_epochs < 1) throw InputError("max_epochs must be at least 1");
    if (!(threshold >= 0.0 && threshold <= 1.0)) throw InputError("threshold must lie in [0, 1]");
    for (auto h : hidden_sizes) {
        if (h < 1) throw InputError("hidden layer widths must be positive");
    }
}

bool TrainConfig::set(std::string_view key, std::string_view value) {
    if (key == "embedding_dim") {
        embedding_dim = parse_value<std::size_t>(key, value);
    } else if (key == "dropout_rate") {
        dropout_rate = parse_value<double>(key, value);
    } else if (key == "loss_weight_kg") {
        loss_weight_kg = parse_value<double>(key, value);
    } else if (key == "loss_weight_effect") {
        loss_weight_effect = parse_value<double>(key, value);
    } else if (key == "learning_rate") {
        learning_rate = parse_value<double>(key, value);
    } else if (key == "batch_size") {
        batch_size = parse_value<std::size_t>(key, value);
    } else if (key == "patience") {
        patience = parse_value<std::size_t>(key, value);
    } else if (key == "min_delta") {
        min_delta = parse_value<double>(key, value);
    } else if (key == "negative_ratio") {
        negative_ratio = parse_value<unsigned>(key, value);
    } else if (key == "phi") {
        phi = parse_value<double>(key, value);
    } else if (key == "ensemble_size") {
        ensemble_size = parse_value<std::size_t>(key, value);
    } else if (key == "max_epochs") {
        max_epochs = parse_value<std::size_t>(key, value);
    } else if (key == "hidden_sizes") {
        hidden_sizes = parse_sizes(key, value);
    } else if (key == "threshold") {
        threshold = parse_value<double>(key, value);
    } else if (key == "seed") {
        seed = parse_value<std::uint64_t>(key, value);
    } else {
        return false;
    }
    return true;
}

std::vector<std::pair<std::string, std::string>> TrainConfig::entries() const {
    std::string hidden;
    for (std::size_t i = 0; i < hidden_sizes.size(); ++i) hidden += (i ? "," : "") + std::to_string(hidden_sizes[i]);
    return {
        {"embedding_dim", std::to_string(embedding_dim)},
        {"dropout_rate", format_double(dropout_rate)},
        {"loss_weight_kg", format_double(loss_weight_kg)},
        {"loss_weight_effect", format_double(loss_weight_effect)},
        {"learning_rate", format_double(learning_rate)},
        {"batch_size", std::to_string(batch_size)},
        {"patience", std::to_string(patience)},
        {"min_delta", format_double(min_delta)},
        {"negative_ratio", std::to_string(negative_ratio)},
        {"phi", format_double(phi)},
        {"ensemble_size", std::to_string(ensemble_size)},
        {"max_epochs", std::to_string(max_epochs)},
        {"hidden_sizes", hidden.empty() ? "none" : hidden},
        {"threshold", format_double(threshold)},
        {"seed", std::to_string(seed)},
    };
}

EffectModel EffectModel::initialise(ModelKind kind, const GraphStore& graph, const TrainConfig& cfg) {
    cfg.validate();
    if (graph.entity_count() == 0) throw InputError("model vocabulary is empty");
    EffectModel m;
    m.kind = kind;
    m.config = cfg;
    for (std::uint32_t e = 0; e < graph.entity_count(); ++e) m.entities.push_back(graph.label(EntityId{e}));
    for (std::uint32_t p = 0; p < graph.predicate_count(); ++p) m.relations.push_back(graph.label(PredicateId{p}));
    // A vocabulary without predicates (plain M2) still gets one unused relation row.
    m.embeddings = init_embeddings(m.entities.size(), std::max<std::size_t>(1, m.relations.size()), cfg.embedding_dim,
                                   cfg.seed);
    auto rng = seeded_stream(cfg.seed, 4);
    m.mlp = init_mlp(2 * cfg.embedding_dim, cfg.hidden_sizes, rng);
    m.rebuild_index();
    return m;
}

void EffectModel::rebuild_index() {
    index_.clear();
    for (std::size_t i = 0; i < entities.size(); ++i) index_.emplace(entities[i], i);
}

std::optional<std::size_t> EffectModel::entity_row(const std::string& label) const {
    if (auto it = index_.find(label); it != index_.end()) return it->second;
    return std::nullopt;
}

double EffectModel::predict(std::size_t chemical_row, std::size_t species_row) const {
    return mlp_forward(mlp, embeddings.entity(chemical_row), embeddings.entity(species_row));
}

double EffectModel::predict(const std::string& chemical, const std::string& species) const {
    const auto c = entity_row(chemical);
    if (!c) throw InputError("unknown chemical: " + chemical);
    const auto s = entity_row(species);
    if (!s) throw InputError("unknown species: " + species);
    return predict(*c, *s);
}

std::vector<double> EffectModel::predict(const std::vector<std::pair<std::string, std::string>>& pairs) const {
    if (pairs.empty()) return {};
    const std::size_t k = embeddings.dim();
    Eigen::MatrixXd x(static_cast<Eigen::Index>(pairs.size()), static_cast<Eigen::Index>(2 * k));
    for (std::size_t b = 0; b < pairs.size(); ++b) {
        const auto c = entity_row(pairs[b].first);
        if (!c) throw InputError("unknown chemical: " + pairs[b].first);
        const auto s = entity_row(pairs[b].second);
        if (!s) throw InputError("unknown species: " + pairs[b].second);
        const auto ec = embeddings.entity(*c);
        const auto es = embeddings.entity(*s);
        for (std::size_t d = 0; d < k; ++d) {
            x(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(d)) = ec[d];
            x(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(k + d)) = es[d];
        }
    }
    const Eigen::VectorXd y = mlp_forward(mlp, x);
    return {y.data(), y.data() + y.size()};
}

void EffectModel::save(const std::filesystem::path& path) const {
    write_atomic(
        path,
        [&](std::ostream& out) {
            write_embeddings(out, embeddings);
            write_mlp(out, mlp);
        },
        true);
    write_atomic(path.string() + ".cfg", [&](std::ostream& cfg) {
        cfg << "model = " << to_string(kind) << '\n';
        for (const auto& [k, v] : config.entries()) cfg << k << " = " << v << '\n';
    });
    write_atomic(path.string() + ".vocab", [&](std::ostream& vocab) {
        for (const auto& e : entities) vocab << "e\t" << e << '\n';
        for (const auto& r : relations) vocab << "r\t" << r << '\n';
    });
}

EffectModel EffectModel::load(const std::filesystem::path& path) {
    EffectModel m;
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError(path.string() + ": cannot open checkpoint");
    m.embeddings = read_embeddings(in);
    m.mlp = read_mlp(in);

    std::ifstream cfg(path.string() + ".cfg");
    if (!cfg) throw InputError(path.string() + ".cfg: cannot open checkpoint settings");
    std::string line;
    bool have_kind = false;
    while (std::getline(cfg, line)) {
        if (trim(line).empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw InputError(path.string() + ".cfg: expected key = value");
        const auto key = trim(std::string_view(line).substr(0, eq));
        const auto value = trim(std::string_view(line).substr(eq + 1));
        if (key == "model") {
            const auto k = parse_model_kind(value);
            if (!k) throw InputError(path.string() + ".cfg: unknown model '" + std::string(value) + "'");
            m.kind = *k;
            have_kind = true;
        } else if (!m.config.set(key, value)) {
            throw InputError(path.string() + ".cfg: unknown key '" + std::string(key) + "'");
        }
    }
    if (!have_kind) throw InputError(path.string() + ".cfg: missing model");

    std::ifstream vocab(path.string() + ".vocab");
    if (!vocab) throw InputError(path.string() + ".vocab: cannot open vocabulary");
    while (std::getline(vocab, line)) {
        if (line.size() < 2 || line[1] != '\t') continue;
        (line[0] == 'e' ? m.entities : m.relations).push_back(line.substr(2));
    }
    if (m.entities.size() != m.embeddings.entity_count()) throw InputError(path.string() + ": vocabulary does not match checkpoint");
    if (m.mlp.input_width() != 2 * m.embeddings.dim()) throw InputError(path.string() + ": MLP input width does not match embeddings");
    m.rebuild_index();
    return m;
}

double joint_loss(double kg_loss, double effect_loss, const TrainConfig& cfg) {
    return cfg.loss_weight_kg * kg_loss + cfg.loss_weight_effect * effect_loss;
}

StepLoss joint_objective(const EffectModel& model, const StepBatch& batch, const TrainConfig& cfg,
                         const DropoutMasks* masks, ModelGradients* grads) {
    StepLoss loss;
    const auto& table = model.embeddings;
    const std::size_t k = table.dim();

    if (!batch.effects.empty()) {
        const auto n = static_cast<Eigen::Index>(batch.effects.size());
        Eigen::MatrixXd x(n, static_cast<Eigen::Index>(2 * k));
        std::vector<double> labels(batch.effects.size());
        for (Eigen::Index b = 0; b < n; ++b) {
            const auto& ex = batch.effects[static_cast<std::size_t>(b)];
            const auto ec = table.entity(ex.chemical_row);
            const auto es = table.entity(ex.species_row);
            for (std::size_t d = 0; d < k; ++d) {
                x(b, static_cast<Eigen::Index>(d)) = ec[d];
                x(b, static_cast<Eigen::Index>(k + d)) = es[d];
            }
            labels[static_cast<std::size_t>(b)] = ex.label;
        }
        MlpTape tape;
        const Eigen::VectorXd y = mlp_forward(model.mlp, x, masks, grads ? &tape : nullptr);
        const std::span<const double> preds(y.data(), static_cast<std::size_t>(y.size()));
        loss.effect = log_loss(labels, preds);
        if (grads) {
            const auto g = log_loss_gradient(labels, preds);
            Eigen::VectorXd out_grad(n);
            for (Eigen::Index b = 0; b < n; ++b) out_grad(b) = cfg.loss_weight_effect * g[static_cast<std::size_t>(b)];
            const Eigen::MatrixXd dx = mlp_backward(model.mlp, tape, masks, out_grad, grads->mlp);
            for (Eigen::Index b = 0; b < n; ++b) {
                const auto& ex = batch.effects[static_cast<std::size_t>(b)];
                for (std::size_t d = 0; d < k; ++d) {
                    grads->embeddings[ex.chemical_row * k + d] += dx(b, static_cast<Eigen::Index>(d));
                    grads->embeddings[ex.species_row * k + d] += dx(b, static_cast<Eigen::Index>(k + d));
                }
            }
        }
    }

    if (!batch.kg.empty()) {
        const auto kind = score_kind(model.kind);
        if (!kind) throw InputError("KG batch given to a model without a score function");
        std::vector<double> labels(batch.kg.size());
        std::vector<double> scores(batch.kg.size());
        std::vector<ScoreGradients> partials;
        if (grads) partials.reserve(batch.kg.size());
        for (std::size_t i = 0; i < batch.kg.size(); ++i) {
            labels[i] = batch.kg[i].label;
            if (grads) {
                partials.push_back(score_gradients(*kind, table, batch.kg[i].triple));
                scores[i] = partials.back().score;
            } else {
                scores[i] = score(*kind, table, batch.kg[i].triple);
            }
        }
        loss.kg = log_loss(labels, scores);
        if (grads) {
            const auto g = log_loss_gradient(labels, scores);
            const std::size_t relation_base = table.entity_count() * k;
            for (std::size_t i = 0; i < batch.kg.size(); ++i) {
                const double scale = cfg.loss_weight_kg * g[i];
                const auto& t = batch.kg[i].triple;
                add_into(grads->embeddings, t.subject.index * k, partials[i].subject, scale);
                add_into(grads->embeddings, relation_base + t.predicate.index * k, partials[i].predicate, scale);
                add_into(grads->embeddings, t.object.index * k, partials[i].object, scale);
            }
        }
    }

    loss.total = (batch.kg.empty() ? 0.0 : cfg.loss_weight_kg * loss.kg) +
                 (batch.effects.empty() ? 0.0 : cfg.loss_weight_effect * loss.effect);
    return loss;
}

TrainResult train(ModelKind kind, const std::vector<LabeledPair>& train_pairs, const GraphStore& graph,
                  const TrainConfig& cfg) {
    cfg.validate();
    if (train_pairs.empty()) throw InputError("no training pairs");
    const auto scorer = score_kind(kind);
    const GraphStore kg = literal_free(graph, scorer.has_value());

    TrainResult result{EffectModel::initialise(kind, kg, cfg), {}, 0};
    EffectModel& model = result.model;

    std::vector<EffectExample> examples;
    examples.reserve(train_pairs.size());
    for (const auto& p : train_pairs) {
        const auto c = model.entity_row(p.chemical);
        if (!c) throw InputError("training chemical missing from the graph vocabulary: " + p.chemical);
        const auto s = model.entity_row(p.species);
        if (!s) throw InputError("training species missing from the graph vocabulary: " + p.species);
        examples.push_back({*c, *s, static_cast<double>(p.label)});
    }
    std::vector<Triple> triples = kg.triples();

    auto shuffle_rng = seeded_stream(cfg.seed, 1);
    auto dropout_rng = seeded_stream(cfg.seed, 2);
    auto negative_rng = seeded_stream(cfg.seed, 3);
    const NegativeSampler sampler(kg);

    ModelGradients grads{std::vector<double>(model.embeddings.values().size(), 0.0), model.mlp.zeros_like()};
    AdagradState embedding_state;
    std::vector<AdagradState> mlp_states(2 * model.mlp.weights.size());

    const std::size_t steps = (examples.size() + cfg.batch_size - 1) / cfg.batch_size;
    const std::size_t kg_per_step = triples.empty() ? 0 : (triples.size() + steps - 1) / steps;

    double best = std::numeric_limits<double>::infinity();
    std::size_t since_best = 0;
    for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        std::shuffle(examples.begin(), examples.end(), shuffle_rng);
        if (!triples.empty()) std::shuffle(triples.begin(), triples.end(), shuffle_rng);

        EpochLog entry{epoch, 0.0, 0.0, 0.0};
        for (std::size_t step = 0; step < steps; ++step) {
            StepBatch batch;
            const std::size_t lo = step * cfg.batch_size;
            const std::size_t hi = std::min(examples.size(), lo + cfg.batch_size);
            batch.effects.assign(examples.begin() + static_cast<std::ptrdiff_t>(lo),
                                 examples.begin() + static_cast<std::ptrdiff_t>(hi));
            const std::size_t klo = std::min(triples.size(), step * kg_per_step);
            const std::size_t khi = std::min(triples.size(), klo + kg_per_step);
            for (std::size_t i = klo; i < khi; ++i) {
                batch.kg.push_back({triples[i], 1.0});
                for (unsigned r = 0; r < cfg.negative_ratio; ++r) {
                    batch.kg.push_back({sampler.corrupt(triples[i], negative_rng), 0.0});
                }
            }

            DropoutMasks masks;
            if (cfg.dropout_rate > 0.0) masks = sample_dropout_masks(model.mlp, batch.effects.size(), cfg.dropout_rate, dropout_rng);

            std::fill(grads.embeddings.begin(), grads.embeddings.end(), 0.0);
            grads.mlp.for_each_block([](std::span<double> b) { std::fill(b.begin(), b.end(), 0.0); });
            const StepLoss loss = joint_objective(model, batch, cfg, cfg.dropout_rate > 0.0 ? &masks : nullptr, &grads);

            adagrad_step(embedding_state, model.embeddings.values(), grads.embeddings, cfg.learning_rate);
            std::vector<std::span<double>> grad_blocks;
            grads.mlp.for_each_block([&](std::span<double> b) { grad_blocks.push_back(b); });
            std::size_t block = 0;
            model.mlp.for_each_block([&](std::span<double> params) {
                adagrad_step(mlp_states[block], params, grad_blocks[block], cfg.learning_rate);
                ++block;
            });

            entry.loss += loss.total;
            entry.effect_loss += loss.effect;
            entry.kg_loss += loss.kg;
        }
        entry.loss /= static_cast<double>(steps);
        entry.effect_loss /= static_cast<double>(steps);
        entry.kg_loss /= static_cast<double>(steps);
        if (!std::isfinite(entry.loss)) throw NumericalError("non-finite training loss at epoch " + std::to_string(epoch));
        result.log.push_back(entry);

        if (entry.loss < best - cfg.min_delta) {
            best = entry.loss;
            result.best_epoch = epoch;
            since_best = 0;
        } else if (++since_best >= cfg.patience) {
            break;
        }
    }
    return result;
}

std::vector<double> ensemble_predict(const std::vector<EffectModel>& members,
                                     const std::vector<std::pair<std::string, std::string>>& pairs) {
    if (members.empty()) throw InputError("empty ensemble");
    std::vector<double> mean(pairs.size(), 0.0);
    for (const auto& m : members) {
        const auto scores = m.predict(pairs);
        for (std::size_t i = 0; i < pairs.size(); ++i) mean[i] += scores[i];
    }
    for (auto& v : mean) v /= static_cast<double>(members.size());
    return mean;
}

}  // namespace ecokg
