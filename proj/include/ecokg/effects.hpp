#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ecokg/graph_store.hpp"

namespace ecokg {

/// Parsed ECOTOX outcome (endpoint) code.
struct OutcomeCode {
    enum class Family {
        lethal_concentration,  // LCp
        lethal_dose,           // LDp
        nr_leth,               // NR-LETH, lethal to 100%
        noel,
        nr_zero,
        other,  // recognised syntax, not used for labelling (NOEC, BCF, EC50, ...)
    };
    Family family = Family::other;
    /// Percent of the population for LCp / LDp; 100 for NR-LETH.
    std::optional<double> percent;
    std::string text;
};

/// Throws InputError for empty codes, characters outside [A-Za-z0-9-/*], or LCp/LDp with p outside [0, 100].
OutcomeCode parse_outcome(std::string_view code);

enum class EffectLabel : std::uint8_t { negative = 0, positive = 1, excluded = 2 };

/// 1 for LCp, LDp and NR-LETH; 0 for NOEL and NR-ZERO; excluded otherwise.
EffectLabel label_outcome(const OutcomeCode& code);

struct EffectRecord {
    std::string test_id;
    std::string chemical;
    std::string species;
    OutcomeCode outcome;
    std::optional<double> concentration;
    std::string unit;
};

/// Reads the effects CSV (header `test_id,chemical_id,species_id,endpoint,conc1_mean,conc1_unit`).
std::vector<EffectRecord> load_effects_csv(const std::filesystem::path& path);
void write_effects_csv(const std::filesystem::path& path, const std::vector<EffectRecord>& records);

struct LabeledPair {
    std::string chemical;
    std::string species;
    std::uint8_t label = 0;
    friend bool operator==(const LabeledPair&, const LabeledPair&) = default;
};

/// One labelled pair per record whose outcome is not excluded.
std::vector<LabeledPair> labeled_records(const std::vector<EffectRecord>& records);

/// Collapses records to unique (chemical, species) pairs by majority vote, ties resolved as positive.
/// Pairs keep first-appearance order.
std::vector<LabeledPair> aggregate_pairs(const std::vector<LabeledPair>& records);

/// Record-level train/test split. No (chemical, species) pair occurs on both sides.
/// `Record` is anything with `chemical` and `species` members (LabeledPair, EffectRecord).
template <class Record>
struct BasicSplit {
    std::vector<Record> train;
    std::vector<Record> test;
};
using Split = BasicSplit<LabeledPair>;

/// Seeded shuffle, 50/50 record split (train takes the odd record), then test records whose pair
/// also occurs in train are dropped. The permutation depends only on the record count and seed.
template <class Record>
BasicSplit<Record> split_effects(const std::vector<Record>& records, std::uint64_t seed);

/// `folds` record-level cross-validation splits of `records`; each fold's held-out side is made
/// pair-disjoint from its training side the same way as `split_effects`.
template <class Record>
std::vector<BasicSplit<Record>> cross_validation_folds(const std::vector<Record>& records, std::size_t folds,
                                                       std::uint64_t seed);

/// Binary compound x species matrix of observed positive training effects.
class EffectMatrix {
public:
    EffectMatrix(std::vector<std::string> compounds, std::vector<std::string> species);

    std::size_t rows() const noexcept { return compounds_.size(); }
    std::size_t cols() const noexcept { return species_.size(); }
    bool operator()(std::size_t i, std::size_t j) const { return values_[i * cols() + j] != 0; }
    void set(std::size_t i, std::size_t j, bool v) { values_.at(i * cols() + j) = v ? 1 : 0; }
    std::size_t positives() const noexcept;

    const std::vector<std::string>& compounds() const noexcept { return compounds_; }
    const std::vector<std::string>& species() const noexcept { return species_; }
    std::optional<std::size_t> compound_index(const std::string& c) const;
    std::optional<std::size_t> species_index(const std::string& s) const;

private:
    std::vector<std::string> compounds_;
    std::vector<std::string> species_;
    std::unordered_map<std::string, std::size_t> compound_index_;
    std::unordered_map<std::string, std::size_t> species_index_;
    std::vector<std::uint8_t> values_;
};

/// E(i,j) = 1 iff the aggregated training label of (c_i, s_j) is positive.
/// Throws InputError if a training pair names a compound or species outside the index.
EffectMatrix build_effect_matrix(const std::vector<LabeledPair>& train, const std::vector<std::string>& compounds,
                                 const std::vector<std::string>& species);

/// Corrupts true triples by redrawing subject and object uniformly from the non-literal entities
/// of a store, rejecting corruptions that are themselves true triples.
class NegativeSampler {
public:
    static constexpr int kMaxRetries = 100;

    explicit NegativeSampler(const GraphStore& store);
    /// Throws InputError when no non-colliding corruption is found within kMaxRetries draws.
    template <class Rng>
    Triple corrupt(const Triple& positive, Rng& rng) const;

private:
    const GraphStore* store_;
    std::vector<EntityId> pool_;
};

/// `ratio` corruptions of every stored triple, in store order.
std::vector<Triple> sample_negative_triples(const GraphStore& store, unsigned ratio, std::uint64_t seed);

}  // namespace ecokg

#include "ecokg/effects_impl.hpp"
