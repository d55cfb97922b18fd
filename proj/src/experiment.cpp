#include "ecokg/experiment.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <unordered_set>

#include "ecokg/baseline.hpp"
#include "ecokg/errors.hpp"

namespace ecokg {

namespace {

std::vector<std::pair<std::string, std::string>> read_pairs_tsv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError(path.string() + ": cannot open file");
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty() || line.front() == '#') continue;
        const auto fields = split_tabs(line);
        if (fields.size() != 2 || trim(fields[0]).empty() || trim(fields[1]).empty()) {
            throw InputError(path.string(), line_no, "expected two tab-separated identifiers");
        }
        out.emplace_back(std::string(trim(fields[0])), std::string(trim(fields[1])));
    }
    return out;
}

std::vector<std::pair<std::string, std::string>> as_queries(const std::vector<LabeledPair>& pairs) {
    std::vector<std::pair<std::string, std::string>> out;
    out.reserve(pairs.size());
    for (const auto& p : pairs) out.emplace_back(p.chemical, p.species);
    return out;
}

std::vector<std::uint8_t> labels_of(const std::vector<LabeledPair>& pairs) {
    std::vector<std::uint8_t> out;
    out.reserve(pairs.size());
    for (const auto& p : pairs) out.push_back(p.label);
    return out;
}

std::string format_cell(const std::vector<double>& values) {
    char buf[64];
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    if (values.size() == 1) {
        std::snprintf(buf, sizeof buf, "%.4f", mean);
        return buf;
    }
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    const double sd = std::sqrt(var / static_cast<double>(values.size() - 1));
    std::snprintf(buf, sizeof buf, "%.4f ± %.4f", mean, sd);
    return buf;
}

}  // namespace

DataPaths DataPaths::in_dir(const std::filesystem::path& dir) {
    return {dir / "triples.tsv", dir / "taxonomy.tsv", dir / "fingerprints.tsv", dir / "effects.csv",
            dir / "mappings.tsv"};
}

void DataPaths::require_exist() const {
    for (const auto* p : {&triples, &taxonomy, &fingerprints, &effects, &mappings}) {
        if (p->empty()) throw InputError("input path not configured");
        if (!std::filesystem::exists(*p)) throw InputError(p->string() + ": no such file");
    }
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError(path.string() + ": cannot open config");
    ExperimentConfig cfg;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto text = trim(line);
        if (text.empty() || text.front() == '#') continue;
        const auto eq = text.find('=');
        if (eq == std::string_view::npos) throw InputError(path.string(), line_no, "expected key = value");
        try {
            cfg.set(std::string(trim(text.substr(0, eq))), std::string(trim(text.substr(eq + 1))));
        } catch (const InputError& e) {
            throw InputError(path.string(), line_no, e.what());
        }
    }
    return cfg;
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
    if (key == "data") {
        paths = DataPaths::in_dir(value);
    } else if (key == "triples") {
        paths.triples = value;
    } else if (key == "taxonomy") {
        paths.taxonomy = value;
    } else if (key == "fingerprints") {
        paths.fingerprints = value;
    } else if (key == "effects") {
        paths.effects = value;
    } else if (key == "mappings") {
        paths.mappings = value;
    } else if (key == "model") {
        model = value;
    } else if (key == "output") {
        output = value;
    } else if (key == "t_max") {
        std::size_t v = 0;
        const auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
        if (ec != std::errc() || end != value.data() + value.size() || v < 1) {
            throw InputError("t_max must be a positive integer, got '" + value + "'");
        }
        t_max = v;
    } else if (key == "step") {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(value, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != value.size() || !(v > 0.0 && v <= 1.0)) {
            throw InputError("step must lie in (0, 1], got '" + value + "'");
        }
        step = v;
    } else {
        overrides.emplace_back(key, value);
    }
}

TrainConfig ExperimentConfig::train_config(ModelKind kind) const {
    auto cfg = TrainConfig::defaults_for(kind);
    for (const auto& [k, v] : overrides) {
        if (!cfg.set(k, v)) throw InputError("unknown setting '" + k + "'");
    }
    cfg.validate();
    return cfg;
}

Dataset load_dataset(const DataPaths& paths) {
    paths.require_exist();
    Dataset d;
    d.taxonomy = Taxonomy::load_tsv(paths.taxonomy);
    d.fingerprints = load_fingerprints_tsv(paths.fingerprints);
    d.records = load_effects_csv(paths.effects);

    d.background.ingest_triples_tsv(paths.triples);
    for (const auto& [child, parent] : d.taxonomy.edges()) d.background.add_triple(child, kSubClassOf, parent);
    for (const auto& [a, b] : read_pairs_tsv(paths.mappings)) d.background.add_triple(a, kSameAs, b);

    std::unordered_set<std::string> seen;
    for (const auto& fp : d.fingerprints) {
        if (seen.insert(fp.compound()).second) d.chemicals.push_back(fp.compound());
    }
    for (const auto& r : d.records) {
        if (seen.insert(r.chemical).second) d.chemicals.push_back(r.chemical);
    }
    seen.clear();
    for (const auto& s : d.taxonomy.leaf_labels()) {
        if (seen.insert(s).second) d.species.push_back(s);
    }
    for (const auto& r : d.records) {
        if (!d.taxonomy.contains(r.species)) {
            throw InputError(paths.effects.string() + ": test " + r.test_id + ": species '" + r.species +
                             "' is not in the taxonomy");
        }
        if (seen.insert(r.species).second) d.species.push_back(r.species);
    }
    return d;
}

GraphStore build_kg(const Dataset& data, const std::vector<EffectRecord>& effect_records, double phi) {
    GraphStore kg = data.background;
    for (const auto& c : data.chemicals) kg.intern(c);
    for (const auto& s : data.species) kg.intern(s);
    emit_similarity_triples(similarity_matrix(data.fingerprints, data.chemicals), phi, kg);
    for (const auto& r : effect_records) {
        const auto effect = "effect/" + r.test_id;
        kg.add_triple(r.chemical, kAffects, effect);
        kg.add_triple(effect, kEffectSpecies, r.species);
        kg.add_triple(effect, kEndpoint, "endpoint/" + r.outcome.text);
    }
    return kg;
}

std::vector<EffectRecord> labelled_records(const std::vector<EffectRecord>& records) {
    std::vector<EffectRecord> out;
    for (const auto& r : records) {
        if (label_outcome(r.outcome) != EffectLabel::excluded) out.push_back(r);
    }
    return out;
}

PreparedSplit prepare(const BasicSplit<EffectRecord>& split) {
    PreparedSplit out;
    out.train_records = split.train;
    out.train = aggregate_pairs(labeled_records(split.train));
    out.test = aggregate_pairs(labeled_records(split.test));
    return out;
}

PreparedSplit prepare_split(const Dataset& data, std::uint64_t seed) {
    return prepare(split_effects(labelled_records(data.records), seed));
}

std::vector<PreparedSplit> prepare_folds(const std::vector<EffectRecord>& train_records, std::size_t folds,
                                         std::uint64_t seed) {
    std::vector<PreparedSplit> out;
    for (const auto& f : cross_validation_folds(labelled_records(train_records), folds, seed)) out.push_back(prepare(f));
    return out;
}

Evaluation evaluate_scores(std::vector<std::uint8_t> labels, std::vector<double> scores, double threshold,
                           bool with_auc, double step) {
    if (labels.empty()) throw InputError("evaluation set is empty");
    Evaluation e;
    e.at_threshold = metrics(confusion(labels, scores, threshold), 1.0);
    e.f2 = f_beta_score(e.at_threshold.precision, e.at_threshold.recall, 2.0);
    if (with_auc) e.auc = roc_auc(labels, scores, step).auc;
    e.labels = std::move(labels);
    e.scores = std::move(scores);
    return e;
}

std::vector<std::optional<double>> m1_predict(const Dataset& data, const std::vector<LabeledPair>& observed,
                                              const std::vector<std::pair<std::string, std::string>>& queries,
                                              std::size_t t_max) {
    const auto e = build_effect_matrix(observed, data.chemicals, data.species);
    const auto a = data.taxonomy.adjacency(data.species);
    const auto s = similarity_matrix(data.fingerprints, data.chemicals);
    std::vector<std::optional<double>> out;
    out.reserve(queries.size());
    for (const auto& [chemical, species] : queries) {
        const auto c = e.compound_index(chemical);
        const auto sp = e.species_index(species);
        if (!c || !sp) {
            out.emplace_back();
        } else {
            out.emplace_back(predict_m1(e, a, s, *c, *sp, {t_max}) ? 1.0 : 0.0);
        }
    }
    return out;
}

Evaluation evaluate_m1(const Dataset& data, const PreparedSplit& split, std::size_t t_max) {
    const auto predicted = m1_predict(data, split.train, as_queries(split.test), t_max);
    std::vector<double> scores;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        if (!predicted[i]) {
            throw InputError("test pair outside the effect matrix: " + split.test[i].chemical + ", " +
                             split.test[i].species);
        }
        scores.push_back(*predicted[i]);
    }
    return evaluate_scores(labels_of(split.test), std::move(scores), 0.5, false);
}

std::vector<EffectModel> train_members(ModelKind kind, const PreparedSplit& split, const GraphStore& kg,
                                       const TrainConfig& cfg, std::size_t members) {
    std::vector<EffectModel> out;
    for (std::size_t m = 0; m < members; ++m) {
        auto member_cfg = cfg;
        member_cfg.seed = cfg.seed + 0x9E3779B97F4A7C15ULL * m;
        out.push_back(train(kind, split.train, kg, member_cfg).model);
    }
    return out;
}

Evaluation evaluate_models(const std::vector<EffectModel>& members, const std::vector<LabeledPair>& test,
                           double threshold, double step) {
    return evaluate_scores(labels_of(test), ensemble_predict(members, as_queries(test)), threshold, true, step);
}

void write_report(std::ostream& out, const std::vector<ReportColumn>& columns) {
    struct Row {
        const char* name;
        double (*get)(const Evaluation&);
    };
    const Row rows[] = {
        {"accuracy", [](const Evaluation& e) { return e.at_threshold.accuracy; }},
        {"precision", [](const Evaluation& e) { return e.at_threshold.precision; }},
        {"recall", [](const Evaluation& e) { return e.at_threshold.recall; }},
        {"f1", [](const Evaluation& e) { return e.at_threshold.f_beta; }},
        {"f2", [](const Evaluation& e) { return e.f2; }},
    };
    out << "metric";
    for (const auto& c : columns) out << '\t' << c.name;
    out << '\n';
    for (const auto& row : rows) {
        out << row.name;
        for (const auto& c : columns) {
            std::vector<double> v;
            for (const auto& r : c.runs) v.push_back(row.get(r));
            out << '\t' << format_cell(v);
        }
        out << '\n';
    }
    out << "auc";
    for (const auto& c : columns) {
        std::vector<double> v;
        for (const auto& r : c.runs) {
            if (r.auc) v.push_back(*r.auc);
        }
        out << '\t' << (v.empty() ? std::string("-") : format_cell(v));
    }
    out << '\n';
}

std::vector<std::pair<std::string, std::string>> load_pairs_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError(path.string() + ": cannot open file");
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty() || line.front() == '#') continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
            throw InputError(path.string(), line_no, "expected chemical_id,species_id");
        }
        std::string c(trim(std::string_view(line).substr(0, comma)));
        std::string s(trim(std::string_view(line).substr(comma + 1)));
        if (line_no == 1 && c == "chemical_id" && s == "species_id") continue;
        if (c.empty() || s.empty()) throw InputError(path.string(), line_no, "empty identifier");
        out.emplace_back(std::move(c), std::move(s));
    }
    return out;
}

}  // namespace ecokg
