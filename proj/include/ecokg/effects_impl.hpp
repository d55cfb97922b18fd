#pragma once

#include <algorithm>
#include <random>
#include <set>
#include <string>
#include <utility>

#include "ecokg/errors.hpp"

namespace ecokg {

namespace detail {

template <class Record>
std::vector<Record> remove_overlap(const std::vector<Record>& train, std::vector<Record> test) {
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& r : train) seen.emplace(r.chemical, r.species);
    std::erase_if(test, [&](const Record& r) { return seen.contains({r.chemical, r.species}); });
    return test;
}

}  // namespace detail

template <class Record>
BasicSplit<Record> split_effects(const std::vector<Record>& records, std::uint64_t seed) {
    if (records.empty()) throw InputError("cannot split an empty effect set");
    std::vector<Record> shuffled = records;
    std::mt19937_64 rng(seed);
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const auto half = static_cast<std::ptrdiff_t>((shuffled.size() + 1) / 2);
    BasicSplit<Record> split;
    split.train.assign(shuffled.begin(), shuffled.begin() + half);
    split.test = detail::remove_overlap(split.train, {shuffled.begin() + half, shuffled.end()});
    return split;
}

template <class Record>
std::vector<BasicSplit<Record>> cross_validation_folds(const std::vector<Record>& records, std::size_t folds,
                                                       std::uint64_t seed) {
    if (folds < 2) throw InputError("cross validation needs at least 2 folds");
    if (records.size() < folds) throw InputError("fewer records than folds");
    std::vector<Record> shuffled = records;
    std::mt19937_64 rng(seed);
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    std::vector<BasicSplit<Record>> out(folds);
    for (std::size_t i = 0; i < shuffled.size(); ++i) {
        for (std::size_t f = 0; f < folds; ++f) {
            (i % folds == f ? out[f].test : out[f].train).push_back(shuffled[i]);
        }
    }
    for (auto& s : out) s.test = detail::remove_overlap(s.train, std::move(s.test));
    return out;
}

inline Split split_effects(const std::vector<LabeledPair>& records, std::uint64_t seed) {
    return split_effects<LabeledPair>(records, seed);
}

inline std::vector<Split> cross_validation_folds(const std::vector<LabeledPair>& records, std::size_t folds,
                                                 std::uint64_t seed) {
    return cross_validation_folds<LabeledPair>(records, folds, seed);
}

template <class Rng>
Triple NegativeSampler::corrupt(const Triple& positive, Rng& rng) const {
    if (pool_.empty()) throw InputError("negative sampling: no non-literal entities");
    std::uniform_int_distribution<std::size_t> pick(0, pool_.size() - 1);
    for (int attempt = 0; attempt < kMaxRetries; ++attempt) {
        const Triple t{pool_[pick(rng)], positive.predicate, pool_[pick(rng)]};
        if (!store_->contains(t)) return t;
    }
    throw InputError("negative sampling: entity pool too small to avoid true triples for predicate '" +
                     store_->label(positive.predicate) + "'");
}

}  // namespace ecokg
