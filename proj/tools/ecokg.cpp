#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ecokg/errors.hpp"
#include "ecokg/experiment.hpp"
#include "ecokg/io.hpp"
#include "ecokg/metrics.hpp"
#include "ecokg/predictor.hpp"
#include "ecokg/synth.hpp"

namespace fs = std::filesystem;
using namespace ecokg;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

// Options shared by the data-consuming subcommands. Flags override the config file.
struct Common {
    std::string config;
    std::string data;
    std::vector<std::string> settings;
    std::optional<std::uint64_t> seed;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config, "key = value experiment file");
        cmd->add_option("--data", data, "directory holding the five input files");
        cmd->add_option("--set", settings, "override one setting, key=value (repeatable)");
        cmd->add_option("--seed", seed, "split and training seed");
    }

    ExperimentConfig resolve() const {
        ExperimentConfig cfg = config.empty() ? ExperimentConfig{} : ExperimentConfig::load(config);
        if (!data.empty()) cfg.paths = DataPaths::in_dir(data);
        for (const auto& s : settings) {
            const auto eq = s.find('=');
            if (eq == std::string::npos) throw InputError("--set expects key=value, got '" + s + "'");
            cfg.set(std::string(trim(std::string_view(s).substr(0, eq))),
                    std::string(trim(std::string_view(s).substr(eq + 1))));
        }
        if (seed) cfg.set("seed", std::to_string(*seed));
        return cfg;
    }
};

ModelKind require_model(const std::string& name) {
    const auto kind = parse_model_kind(name);
    if (!kind) throw CLI::ValidationError("--model", "unknown model '" + name + "' (m1, m2, m2star-transe, m2star-distmult, m2star-hole)");
    return *kind;
}

std::uint64_t split_seed(const ExperimentConfig& cfg) {
    TrainConfig probe;
    for (const auto& [k, v] : cfg.overrides) {
        if (k == "seed") probe.set(k, v);
    }
    return probe.seed;
}

void emit(const std::string& out_path, const std::string& content) {
    if (out_path.empty() || out_path == "-") {
        std::cout << content;
    } else {
        write_atomic(out_path, content);
    }
}

std::string to_tsv(const GraphStore& g) {
    std::ostringstream out;
    for (const auto& t : g.triples()) out << g.label(t.subject) << '\t' << g.label(t.predicate) << '\t' << g.label(t.object) << '\n';
    return out.str();
}

int cmd_synth(const SyntheticSpec& spec, std::uint64_t seed, const std::string& out) {
    const auto data = generate_synthetic(spec, seed);
    write_synthetic(data, out);
    std::printf("chemicals %zu\nspecies %zu\nrecords %zu\npositive_rate %.4f\n", data.chemicals.size(),
                data.species.size(), data.effects.size(), data.realized_positive_rate);
    return kExitOk;
}

int cmd_build_kg(const Common& common, std::optional<double> phi, const std::string& out) {
    auto cfg = common.resolve();
    if (phi) cfg.set("phi", std::to_string(*phi));
    const auto train = cfg.train_config(ModelKind::m2);
    const auto data = load_dataset(cfg.paths);
    const auto kg = build_kg(data, data.records, train.phi);
    std::printf("entities %zu\ntriples %zu\npredicates %zu\n", kg.entity_count(), kg.size(), kg.predicate_count());
    for (std::uint32_t p = 0; p < kg.predicate_count(); ++p) {
        std::printf("  %s %zu\n", kg.label(PredicateId{p}).c_str(), kg.predicate_count_of(PredicateId{p}));
    }
    if (!out.empty()) write_atomic(out, to_tsv(kg));
    return kExitOk;
}

int cmd_train(const Common& common, const std::string& model, const std::string& out) {
    auto cfg = common.resolve();
    if (!model.empty()) cfg.model = model;
    const auto kind = require_model(cfg.model);
    const auto train_cfg = cfg.train_config(kind);
    const auto data = load_dataset(cfg.paths);
    const auto split = prepare_split(data, train_cfg.seed);
    const auto kg = build_kg(data, split.train_records, train_cfg.phi);
    const auto result = train(kind, split.train, kg, train_cfg);

    const fs::path path = out.empty() ? cfg.output / (std::string(to_string(kind)) + ".ckpt") : fs::path(out);
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    result.model.save(path);
    std::ostringstream log;
    log << "epoch,loss,effect_loss,kg_loss\n";
    char buf[128];
    for (const auto& e : result.log) {
        std::snprintf(buf, sizeof buf, "%zu,%.10g,%.10g,%.10g\n", e.epoch, e.loss, e.effect_loss, e.kg_loss);
        log << buf;
    }
    write_atomic(path.string() + ".log.csv", log.str());
    std::printf("model %s\nepochs %zu\nbest_epoch %zu\nfinal_loss %.6f\ncheckpoint %s\n",
                std::string(to_string(kind)).c_str(), result.log.size(), result.best_epoch, result.log.back().loss,
                path.string().c_str());
    return kExitOk;
}

int cmd_evaluate(const Common& common, const std::string& model, const std::string& checkpoint,
                 std::optional<std::size_t> t_max, std::size_t ensemble, std::size_t cv, const std::string& report) {
    auto cfg = common.resolve();
    if (!model.empty()) cfg.model = model;
    if (t_max) cfg.set("t_max", std::to_string(*t_max));
    if (!checkpoint.empty() && !fs::exists(checkpoint)) throw InputError(checkpoint + ": no such checkpoint");

    const bool m1 = cfg.model == "m1";
    const auto kind = m1 ? ModelKind::m2 : require_model(cfg.model);
    const auto data = load_dataset(cfg.paths);

    std::optional<EffectModel> loaded;
    TrainConfig train_cfg;
    if (!checkpoint.empty()) {
        if (m1) throw InputError("m1 takes no checkpoint");
        loaded = EffectModel::load(checkpoint);
        train_cfg = loaded->config;
        cfg.model = std::string(to_string(loaded->kind));
    } else if (!m1) {
        train_cfg = cfg.train_config(kind);
    }
    const std::uint64_t seed = loaded ? train_cfg.seed : m1 ? split_seed(cfg) : train_cfg.seed;
    const auto split = prepare_split(data, seed);

    std::vector<PreparedSplit> runs;
    if (cv > 0) {
        if (loaded) throw InputError("--cv retrains models and takes no checkpoint");
        runs = prepare_folds(split.train_records, cv, seed);
    } else {
        runs.push_back(split);
    }

    ReportColumn column{cfg.model, {}};
    for (const auto& run : runs) {
        if (m1) {
            column.runs.push_back(evaluate_m1(data, run, cfg.t_max));
        } else if (loaded) {
            column.runs.push_back(evaluate_models({*loaded}, run.test, train_cfg.threshold, cfg.step));
        } else {
            const auto kg = build_kg(data, run.train_records, train_cfg.phi);
            const auto members = train_members(kind, run, kg, train_cfg, std::max<std::size_t>(1, ensemble));
            column.runs.push_back(evaluate_models(members, run.test, train_cfg.threshold, cfg.step));
        }
    }
    std::ostringstream out;
    write_report(out, {column});
    std::cout << out.str();
    if (!report.empty()) write_atomic(report, out.str());
    return kExitOk;
}

// m1 scores against every labelled record of the dataset; other models need a checkpoint.
int cmd_predict(const Common& common, const std::string& model_name, const std::string& checkpoint,
                std::optional<std::size_t> t_max, const std::string& pairs_path, const std::string& out) {
    const auto pairs = load_pairs_csv(pairs_path);
    std::vector<std::optional<double>> scores;
    std::function<bool(const std::string&)> known;
    if (model_name == "m1") {
        if (!checkpoint.empty()) throw InputError("m1 takes no checkpoint");
        auto cfg = common.resolve();
        if (t_max) cfg.set("t_max", std::to_string(*t_max));
        const auto data = load_dataset(cfg.paths);
        scores = m1_predict(data, aggregate_pairs(labeled_records(data.records)), pairs, cfg.t_max);
        known = [&data](const std::string& c) {
            return std::find(data.chemicals.begin(), data.chemicals.end(), c) != data.chemicals.end();
        };
    } else {
        if (!model_name.empty()) require_model(model_name);
        if (checkpoint.empty()) throw InputError("predict needs --checkpoint (or --model m1)");
        if (!fs::exists(checkpoint)) throw InputError(checkpoint + ": no such checkpoint");
        const auto model = EffectModel::load(checkpoint);
        for (const auto& [c, s] : pairs) {
            scores.push_back(model.entity_row(c) && model.entity_row(s) ? std::optional(model.predict(c, s))
                                                                        : std::nullopt);
        }
        known = [model](const std::string& c) { return model.entity_row(c).has_value(); };
    }

    struct Row {
        std::string chemical, species;
        double score;
    };
    std::vector<Row> rows;
    std::size_t skipped = 0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto& [c, s] = pairs[i];
        if (!scores[i]) {
            const bool chemical_known = known(c);
            std::fprintf(stderr, "warning: unknown %s '%s', row skipped\n", chemical_known ? "species" : "chemical",
                         (chemical_known ? s : c).c_str());
            ++skipped;
            continue;
        }
        rows.push_back({c, s, *scores[i]});
    }
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.score > b.score; });
    std::ostringstream csv;
    csv << "chemical_id,species_id,score\n";
    char buf[64];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.6f", r.score);
        csv << r.chemical << ',' << r.species << ',' << buf << '\n';
    }
    emit(out, csv.str());
    std::fprintf(stderr, "scored %zu, skipped %zu\n", rows.size(), skipped);
    return kExitOk;
}

int cmd_sweep(const Common& common, const std::string& checkpoint, double step, const std::string& out) {
    threshold_grid(step);
    if (!fs::exists(checkpoint)) throw InputError(checkpoint + ": no such checkpoint");
    const auto model = EffectModel::load(checkpoint);
    auto cfg = common.resolve();
    const auto data = load_dataset(cfg.paths);
    const auto split = prepare_split(data, common.seed ? *common.seed : model.config.seed);
    const auto eval = evaluate_models({model}, split.test, model.config.threshold, step);
    const auto rows = threshold_sweep(eval.labels, eval.scores, step);
    std::ostringstream csv;
    write_sweep_csv(csv, rows);
    emit(out, csv.str());
    std::fprintf(stderr, "best F2 %.4f at threshold %.2f\n", best_f2(rows).f2, best_f2(rows).threshold);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Chemical-species effect prediction with knowledge graph embeddings"};
    app.require_subcommand(1);

    SyntheticSpec spec;
    std::uint64_t synth_seed = 0;
    std::string synth_out;
    double block_probability = -1.0;
    auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
    synth->add_option("--out", synth_out, "output directory")->required();
    synth->add_option("--seed", synth_seed);
    synth->add_option("--classes", spec.n_chemical_classes);
    synth->add_option("--chemicals-per-class", spec.chemicals_per_class);
    synth->add_option("--clades", spec.n_species_clades);
    synth->add_option("--species-per-clade", spec.species_per_clade);
    synth->add_option("--noise", spec.label_noise);
    synth->add_option("--positive-rate", spec.positive_rate);
    synth->add_option("--block-probability", block_probability, "fraction of toxic blocks (derived when omitted)");
    synth->add_option("--observation-rate", spec.observation_rate);
    synth->add_option("--records-per-pair", spec.mean_records_per_pair);

    Common kg_common;
    std::optional<double> phi;
    std::string kg_out;
    auto* build = app.add_subcommand("build-kg", "merge the inputs into one graph and print its size");
    kg_common.attach(build);
    build->add_option("--phi", phi, "chemical similarity threshold");
    build->add_option("--out", kg_out, "write the merged triples as TSV");

    Common train_common;
    std::string train_model, train_out;
    auto* train_cmd = app.add_subcommand("train", "train one model on the training split");
    train_common.attach(train_cmd);
    train_cmd->add_option("--model", train_model, "m2, m2star-transe, m2star-distmult or m2star-hole");
    train_cmd->add_option("--out", train_out, "checkpoint path");

    Common eval_common;
    std::string eval_model, eval_checkpoint, eval_report;
    std::optional<std::size_t> t_max;
    std::size_t ensemble = 1, cv = 0;
    auto* evaluate = app.add_subcommand("evaluate", "metrics on the held-out split");
    eval_common.attach(evaluate);
    evaluate->add_option("--model", eval_model, "m1 or a trainable model");
    evaluate->add_option("--checkpoint", eval_checkpoint, "evaluate a saved model instead of training");
    evaluate->add_option("--t-max", t_max, "neighbour budget for m1");
    evaluate->add_option("--ensemble", ensemble, "members averaged per prediction");
    evaluate->add_option("--cv", cv, "cross-validation folds over the training split");
    evaluate->add_option("--report", eval_report, "also write the report here");

    Common predict_common;
    std::string predict_model, predict_checkpoint, predict_pairs, predict_out;
    std::optional<std::size_t> predict_t_max;
    auto* predict = app.add_subcommand("predict", "score chemical,species pairs, highest first");
    predict_common.attach(predict);
    predict->add_option("--model", predict_model, "m1 scores from the dataset; other models load --checkpoint");
    predict->add_option("--checkpoint", predict_checkpoint);
    predict->add_option("--t-max", predict_t_max, "neighbour budget for m1");
    predict->add_option("--pairs", predict_pairs, "CSV of chemical_id,species_id")->required();
    predict->add_option("--out", predict_out);

    Common sweep_common;
    std::string sweep_checkpoint, sweep_out;
    double step = 0.01;
    auto* sweep = app.add_subcommand("sweep", "metrics across decision thresholds");
    sweep_common.attach(sweep);
    sweep->add_option("--checkpoint", sweep_checkpoint)->required();
    sweep->add_option("--step", step);
    sweep->add_option("--out", sweep_out);

    try {
        app.parse(argc, argv);
        if (*synth) {
            if (block_probability >= 0.0) spec.toxicity_block_probability = block_probability;
            return cmd_synth(spec, synth_seed, synth_out);
        }
        if (*build) return cmd_build_kg(kg_common, phi, kg_out);
        if (*train_cmd) return cmd_train(train_common, train_model, train_out);
        if (*evaluate) return cmd_evaluate(eval_common, eval_model, eval_checkpoint, t_max, ensemble, cv, eval_report);
        if (*predict) return cmd_predict(predict_common, predict_model, predict_checkpoint, predict_t_max, predict_pairs,
                                            predict_out);
        if (*sweep) return cmd_sweep(sweep_common, sweep_checkpoint, step, sweep_out);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        for (const auto* sub : app.get_subcommands()) std::cerr << '\n' << sub->help();
        return kExitInput;
    } catch (const NumericalError& e) {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        return kExitNumerical;
    } catch (const InputError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInput;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInput;
    } catch (const std::out_of_range& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInput;
    }
    return kExitInput;
}
