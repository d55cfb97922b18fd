#include "ecokg/graph_store.hpp"

#include <fstream>

#include "ecokg/errors.hpp"

namespace ecokg {

std::string_view trim(std::string_view s) {
    constexpr std::string_view ws = " \t\r\n\v\f";
    const auto first = s.find_first_not_of(ws);
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(ws);
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto tab = line.find('\t', start);
        if (tab == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
    return fields;
}

std::uint32_t Interner::intern(std::string_view label) {
    const auto key = trim(label);
    if (key.empty()) throw InputError("empty label");
    std::string owned(key);
    if (auto it = ids_.find(owned); it != ids_.end()) return it->second;
    const auto id = static_cast<std::uint32_t>(labels_.size());
    labels_.push_back(owned);
    ids_.emplace(std::move(owned), id);
    return id;
}

std::optional<std::uint32_t> Interner::find(std::string_view label) const {
    if (auto it = ids_.find(std::string(trim(label))); it != ids_.end()) return it->second;
    return std::nullopt;
}

EntityId GraphStore::intern(std::string_view label) {
    const auto before = entities_.size();
    const EntityId id{entities_.intern(label)};
    if (entities_.size() != before) {
        const auto& l = entities_.label(id.index);
        literal_.push_back(l.size() >= 2 && l.front() == '"' && l.back() == '"');
    }
    return id;
}

PredicateId GraphStore::intern_predicate(std::string_view label) {
    const PredicateId id{predicates_.intern(label)};
    if (predicate_counts_.size() < predicates_.size()) predicate_counts_.resize(predicates_.size(), 0);
    return id;
}

Triple GraphStore::add_triple(std::string_view s, std::string_view p, std::string_view o) {
    const Triple t{intern(s), intern_predicate(p), intern(o)};
    insert(t);
    return t;
}

bool GraphStore::insert(const Triple& t) {
    if (t.subject.index >= entity_count() || t.object.index >= entity_count() ||
        t.predicate.index >= predicate_count()) {
        throw std::out_of_range("triple refers to an id outside this store");
    }
    if (!index_.insert(t).second) return false;
    triples_.push_back(t);
    ++predicate_counts_[t.predicate.index];
    return true;
}

std::size_t GraphStore::ingest_triples_tsv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError(path.string() + ": cannot open file");
    std::size_t added = 0;
    std::size_t line_no = 0;
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty() || line.front() == '#') continue;
        const auto fields = split_tabs(line);
        if (fields.size() != 3) {
            throw InputError(path.string(), line_no,
                             "expected 3 tab-separated fields, got " + std::to_string(fields.size()));
        }
        try {
            const Triple t{intern(fields[0]), intern_predicate(fields[1]), intern(fields[2])};
            if (insert(t)) ++added;
        } catch (const InputError& e) {
            throw InputError(path.string(), line_no, e.what());
        }
    }
    return added;
}

std::map<PredicateId, double> GraphStore::predicate_distribution() const {
    if (triples_.empty()) throw InputError("predicate distribution of an empty graph");
    std::map<PredicateId, double> dist;
    const auto total = static_cast<double>(triples_.size());
    for (std::size_t p = 0; p < predicate_counts_.size(); ++p) {
        if (predicate_counts_[p] == 0) continue;
        dist[PredicateId{static_cast<std::uint32_t>(p)}] = static_cast<double>(predicate_counts_[p]) / total;
    }
    return dist;
}

std::optional<EntityId> GraphStore::find_entity(std::string_view label) const {
    if (auto id = entities_.find(label)) return EntityId{*id};
    return std::nullopt;
}

std::optional<PredicateId> GraphStore::find_predicate(std::string_view label) const {
    if (auto id = predicates_.find(label)) return PredicateId{*id};
    return std::nullopt;
}

}  // namespace ecokg
