#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace ecokg {

struct EntityId {
    std::uint32_t index = 0;
    friend auto operator<=>(EntityId, EntityId) = default;
};

struct PredicateId {
    std::uint32_t index = 0;
    friend auto operator<=>(PredicateId, PredicateId) = default;
};

struct Triple {
    EntityId subject;
    PredicateId predicate;
    EntityId object;
    friend auto operator<=>(const Triple&, const Triple&) = default;
};

struct TripleHash {
    std::size_t operator()(const Triple& t) const noexcept {
        std::uint64_t h = (static_cast<std::uint64_t>(t.subject.index) << 32) ^ t.object.index;
        h ^= static_cast<std::uint64_t>(t.predicate.index) * 0x9E3779B97F4A7C15ULL;
        return std::hash<std::uint64_t>{}(h);
    }
};

/// Dense string interning table. Ids are assigned in first-seen order.
class Interner {
public:
    /// Returns the id for `label` (whitespace-trimmed), assigning the next dense id on first sight.
    /// Throws InputError if the trimmed label is empty.
    std::uint32_t intern(std::string_view label);
    std::optional<std::uint32_t> find(std::string_view label) const;
    const std::string& label(std::uint32_t id) const { return labels_.at(id); }
    std::size_t size() const noexcept { return labels_.size(); }
    const std::vector<std::string>& labels() const noexcept { return labels_; }

private:
    std::unordered_map<std::string, std::uint32_t> ids_;
    std::vector<std::string> labels_;
};

/// Interned knowledge graph with set semantics over triples.
///
/// Entities whose label is wrapped in double quotes (`"C7H6O6S"`) are flagged as literals.
/// They are stored like any other entity; embedding training skips them.
class GraphStore {
public:
    EntityId intern(std::string_view label);
    PredicateId intern_predicate(std::string_view label);

    /// Interns all three labels and stores the triple if it is new.
    Triple add_triple(std::string_view s, std::string_view p, std::string_view o);
    /// Returns true if the triple was not already present.
    bool insert(const Triple& t);

    /// Reads `<subject>\t<predicate>\t<object>` lines; `#` lines and blank lines are skipped.
    /// Returns the number of newly added triples.
    std::size_t ingest_triples_tsv(const std::filesystem::path& path);

    /// Probability of each predicate among stored triples. Throws on an empty store.
    std::map<PredicateId, double> predicate_distribution() const;

    bool contains(const Triple& t) const { return index_.contains(t); }
    std::optional<EntityId> find_entity(std::string_view label) const;
    std::optional<PredicateId> find_predicate(std::string_view label) const;

    const std::string& label(EntityId e) const { return entities_.label(e.index); }
    const std::string& label(PredicateId p) const { return predicates_.label(p.index); }
    bool is_literal(EntityId e) const { return literal_.at(e.index); }

    std::size_t entity_count() const noexcept { return entities_.size(); }
    std::size_t predicate_count() const noexcept { return predicates_.size(); }
    std::size_t size() const noexcept { return triples_.size(); }
    bool empty() const noexcept { return triples_.empty(); }

    const std::vector<Triple>& triples() const noexcept { return triples_; }
    const std::vector<std::size_t>& predicate_counts() const noexcept { return predicate_counts_; }
    std::size_t predicate_count_of(PredicateId p) const { return predicate_counts_.at(p.index); }

private:
    Interner entities_;
    Interner predicates_;
    std::vector<bool> literal_;
    std::vector<Triple> triples_;
    std::unordered_set<Triple, TripleHash> index_;
    std::vector<std::size_t> predicate_counts_;
};

/// Splits `line` on tabs. No escaping is recognised.
std::vector<std::string_view> split_tabs(std::string_view line);
std::string_view trim(std::string_view s);

}  // namespace ecokg
