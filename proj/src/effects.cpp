#include "ecokg/effects.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>

#include "ecokg/io.hpp"

namespace ecokg {

namespace {

using PairKey = std::pair<std::string, std::string>;

std::string upper(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

std::optional<double> parse_number(std::string_view s) {
    s = trim(s);
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || ptr != end) return std::nullopt;
    return v;
}

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

}  // namespace

OutcomeCode parse_outcome(std::string_view raw) {
    const auto code = trim(raw);
    if (code.empty()) throw InputError("empty outcome code");
    for (char c : code) {
        const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '/' || c == '*' || c == '.';
        if (!ok) throw InputError("unparseable outcome code '" + std::string(code) + "'");
    }
    OutcomeCode out;
    out.text = upper(code);
    const std::string_view text = out.text;

    if (text == "NR-LETH") {
        out.family = OutcomeCode::Family::nr_leth;
        out.percent = 100.0;
        return out;
    }
    if (text == "NOEL") {
        out.family = OutcomeCode::Family::noel;
        return out;
    }
    if (text == "NR-ZERO") {
        out.family = OutcomeCode::Family::nr_zero;
        return out;
    }
    if (text.size() > 2 && (text.starts_with("LC") || text.starts_with("LD"))) {
        const auto tail = text.substr(2);
        if (std::isdigit(static_cast<unsigned char>(tail.front()))) {
            const auto p = parse_number(tail);
            if (!p || *p < 0.0 || *p > 100.0) {
                throw InputError("unparseable outcome code '" + out.text + "': percentile must lie in [0, 100]");
            }
            out.family = text[1] == 'C' ? OutcomeCode::Family::lethal_concentration : OutcomeCode::Family::lethal_dose;
            out.percent = *p;
            return out;
        }
    }
    out.family = OutcomeCode::Family::other;
    return out;
}

EffectLabel label_outcome(const OutcomeCode& code) {
    switch (code.family) {
        case OutcomeCode::Family::lethal_concentration:
        case OutcomeCode::Family::lethal_dose:
        case OutcomeCode::Family::nr_leth:
            return EffectLabel::positive;
        case OutcomeCode::Family::noel:
        case OutcomeCode::Family::nr_zero:
            return EffectLabel::negative;
        case OutcomeCode::Family::other:
            break;
    }
    return EffectLabel::excluded;
}

std::vector<EffectRecord> load_effects_csv(const std::filesystem::path& path) {
    static constexpr std::string_view kHeader = "test_id,chemical_id,species_id,endpoint,conc1_mean,conc1_unit";
    std::ifstream in(path);
    if (!in) throw InputError(path.string() + ": cannot open file");
    std::vector<EffectRecord> records;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        if (!header_seen) {
            if (trim(line) != kHeader) throw InputError(path.string(), line_no, "expected header '" + std::string(kHeader) + "'");
            header_seen = true;
            continue;
        }
        const auto f = split_commas(line);
        if (f.size() != 6) {
            throw InputError(path.string(), line_no, "expected 6 comma-separated fields, got " + std::to_string(f.size()));
        }
        EffectRecord r;
        r.test_id = std::string(trim(f[0]));
        r.chemical = std::string(trim(f[1]));
        r.species = std::string(trim(f[2]));
        if (r.chemical.empty() || r.species.empty()) throw InputError(path.string(), line_no, "empty chemical or species id");
        try {
            r.outcome = parse_outcome(f[3]);
        } catch (const InputError& e) {
            throw InputError(path.string(), line_no, std::string(e.what()) + " (test " + r.test_id + ")");
        }
        r.concentration = parse_number(f[4]);
        r.unit = std::string(trim(f[5]));
        records.push_back(std::move(r));
    }
    if (!header_seen) throw InputError(path.string() + ": missing header");
    return records;
}

void write_effects_csv(const std::filesystem::path& path, const std::vector<EffectRecord>& records) {
    write_atomic(path, [&](std::ostream& out) {
        out << "test_id,chemical_id,species_id,endpoint,conc1_mean,conc1_unit\n";
        for (const auto& r : records) {
            out << r.test_id << ',' << r.chemical << ',' << r.species << ',' << r.outcome.text << ',';
            if (r.concentration) {
                std::ostringstream num;
                num.precision(6);
                num << *r.concentration;
                out << num.str();
            }
            out << ',' << r.unit << '\n';
        }
    });
}

std::vector<LabeledPair> labeled_records(const std::vector<EffectRecord>& records) {
    std::vector<LabeledPair> out;
    for (const auto& r : records) {
        const auto label = label_outcome(r.outcome);
        if (label == EffectLabel::excluded) continue;
        out.push_back({r.chemical, r.species, static_cast<std::uint8_t>(label == EffectLabel::positive)});
    }
    return out;
}

std::vector<LabeledPair> aggregate_pairs(const std::vector<LabeledPair>& records) {
    std::map<PairKey, std::pair<std::size_t, std::size_t>> votes;  // (positives, total)
    std::vector<PairKey> order;
    for (const auto& r : records) {
        auto [it, inserted] = votes.try_emplace({r.chemical, r.species}, 0, 0);
        if (inserted) order.push_back(it->first);
        it->second.first += r.label;
        it->second.second += 1;
    }
    std::vector<LabeledPair> out;
    out.reserve(order.size());
    for (const auto& key : order) {
        const auto [pos, total] = votes.at(key);
        out.push_back({key.first, key.second, static_cast<std::uint8_t>(2 * pos >= total)});
    }
    return out;
}

EffectMatrix::EffectMatrix(std::vector<std::string> compounds, std::vector<std::string> species)
    : compounds_(std::move(compounds)), species_(std::move(species)), values_(rows() * cols(), 0) {
    for (std::size_t i = 0; i < compounds_.size(); ++i) compound_index_.emplace(compounds_[i], i);
    for (std::size_t j = 0; j < species_.size(); ++j) species_index_.emplace(species_[j], j);
}

std::optional<std::size_t> EffectMatrix::compound_index(const std::string& c) const {
    if (auto it = compound_index_.find(c); it != compound_index_.end()) return it->second;
    return std::nullopt;
}

std::optional<std::size_t> EffectMatrix::species_index(const std::string& s) const {
    if (auto it = species_index_.find(s); it != species_index_.end()) return it->second;
    return std::nullopt;
}

std::size_t EffectMatrix::positives() const noexcept {
    return static_cast<std::size_t>(std::count(values_.begin(), values_.end(), std::uint8_t{1}));
}

EffectMatrix build_effect_matrix(const std::vector<LabeledPair>& train, const std::vector<std::string>& compounds,
                                 const std::vector<std::string>& species) {
    EffectMatrix e(compounds, species);
    for (const auto& p : aggregate_pairs(train)) {
        const auto i = e.compound_index(p.chemical);
        const auto j = e.species_index(p.species);
        if (!i || !j) throw InputError("effect pair (" + p.chemical + ", " + p.species + ") outside the matrix index");
        if (p.label) e.set(*i, *j, true);
    }
    return e;
}

NegativeSampler::NegativeSampler(const GraphStore& store) : store_(&store) {
    for (std::uint32_t e = 0; e < store.entity_count(); ++e) {
        if (!store.is_literal(EntityId{e})) pool_.push_back(EntityId{e});
    }
}

std::vector<Triple> sample_negative_triples(const GraphStore& store, unsigned ratio, std::uint64_t seed) {
    if (ratio < 1) throw InputError("negative ratio must be at least 1");
    if (store.empty()) throw InputError("negative sampling from an empty graph");
    const NegativeSampler sampler(store);
    std::mt19937_64 rng(seed);
    std::vector<Triple> out;
    out.reserve(store.size() * ratio);
    for (const auto& t : store.triples()) {
        for (unsigned r = 0; r < ratio; ++r) out.push_back(sampler.corrupt(t, rng));
    }
    return out;
}

}  // namespace ecokg
