#include <map>
#include <random>
#include <set>

#include "doctest.h"
#include "ecokg/effects.hpp"
#include "ecokg/errors.hpp"
#include "temp_dir.hpp"

using namespace ecokg;

namespace {

EffectLabel label_of(const char* code) { return label_outcome(parse_outcome(code)); }

std::set<std::pair<std::string, std::string>> pair_set(const std::vector<LabeledPair>& v) {
    std::set<std::pair<std::string, std::string>> out;
    for (const auto& p : v) out.emplace(p.chemical, p.species);
    return out;
}

}  // namespace

TEST_CASE("label_outcome follows the lethal / no-effect categories") {
    CHECK(label_of("LC50") == EffectLabel::positive);
    CHECK(label_of("LD50") == EffectLabel::positive);
    CHECK(label_of("LC0") == EffectLabel::positive);
    CHECK(label_of("lc100") == EffectLabel::positive);
    CHECK(label_of("LC12.5") == EffectLabel::positive);
    CHECK(label_of("NR-LETH") == EffectLabel::positive);
    CHECK(label_of("NOEL") == EffectLabel::negative);
    CHECK(label_of("NR-ZERO") == EffectLabel::negative);
    for (const char* code : {"BCF", "NOEC", "LOEL", "LOEC", "EC50", "NR", "LCX"}) {
        CHECK(label_of(code) == EffectLabel::excluded);
    }
    CHECK(parse_outcome("NR-LETH").percent == 100.0);
}

TEST_CASE("parse_outcome rejects malformed codes") {
    CHECK_THROWS_AS(parse_outcome(""), InputError);
    CHECK_THROWS_AS(parse_outcome("LC 50"), InputError);
    CHECK_THROWS_AS(parse_outcome("LC150"), InputError);
    CHECK_THROWS_AS(parse_outcome("LC5x"), InputError);
    CHECK_THROWS_AS(parse_outcome("L$50"), InputError);
}

TEST_CASE("property: label_outcome is a function of the code") {
    for (const char* code : {"LC50", "NOEL", "NR-ZERO", "NR-LETH", "BCF", "LD10"}) {
        const auto first = label_of(code);
        for (int i = 0; i < 5; ++i) CHECK(label_of(code) == first);
    }
}

TEST_CASE("effects CSV") {
    TempDir dir;
    const auto p = dir.write("e.csv",
                             "test_id,chemical_id,species_id,endpoint,conc1_mean,conc1_unit\n"
                             "1,c1,s1,LC50,400,mg/kg diet\n"
                             "2,c2,s1,NOEL,,mg/L\n"
                             "3,c2,s2,BCF,3.5,\n");
    const auto records = load_effects_csv(p);
    REQUIRE(records.size() == 3);
    CHECK(records[0].concentration == 400.0);
    CHECK_FALSE(records[1].concentration.has_value());
    const auto labeled = labeled_records(records);
    REQUIRE(labeled.size() == 2);
    CHECK(labeled[0] == LabeledPair{"c1", "s1", 1});
    CHECK(labeled[1] == LabeledPair{"c2", "s1", 0});

    write_effects_csv(dir / "copy.csv", records);
    const auto again = load_effects_csv(dir / "copy.csv");
    REQUIRE(again.size() == 3);
    CHECK(again[2].outcome.text == "BCF");

    CHECK_THROWS_AS(load_effects_csv(dir.write("h.csv", "a,b\n")), InputError);
    CHECK_THROWS_AS(load_effects_csv(dir.write("f.csv",
                                               "test_id,chemical_id,species_id,endpoint,conc1_mean,conc1_unit\n"
                                               "1,c1,s1,LC50\n")),
                    InputError);
    try {
        load_effects_csv(dir.write("o.csv",
                                   "test_id,chemical_id,species_id,endpoint,conc1_mean,conc1_unit\n"
                                   "77,c1,s1,L#,1,mg/L\n"));
        FAIL("expected an error");
    } catch (const InputError& e) {
        const std::string what = e.what();
        CHECK(what.find(":2:") != std::string::npos);
        CHECK(what.find("77") != std::string::npos);
    }
}

TEST_CASE("aggregate_pairs uses majority vote with ties to positive") {
    const std::vector<LabeledPair> records{{"c", "s", 0}, {"c", "s", 1}, {"d", "s", 0}, {"d", "s", 0}, {"d", "s", 1},
                                           {"e", "s", 1}};
    const auto pairs = aggregate_pairs(records);
    REQUIRE(pairs.size() == 3);
    CHECK(pairs[0] == LabeledPair{"c", "s", 1});
    CHECK(pairs[1] == LabeledPair{"d", "s", 0});
    CHECK(pairs[2] == LabeledPair{"e", "s", 1});
}

TEST_CASE("split_effects") {
    SUBCASE("two distinct records") {
        const auto s = split_effects({{"c1", "s1", 1}, {"c2", "s2", 0}}, 42);
        CHECK(s.train.size() == 1);
        CHECK(s.test.size() == 1);
        CHECK(pair_set(s.train) != pair_set(s.test));
    }
    SUBCASE("all records share a pair") {
        const std::vector<LabeledPair> records(6, LabeledPair{"c", "s", 1});
        const auto s = split_effects(records, 1);
        CHECK(s.train.size() == 3);
        CHECK(s.test.empty());
    }
    SUBCASE("deterministic per seed") {
        std::vector<LabeledPair> records;
        for (int i = 0; i < 40; ++i) records.push_back({"c" + std::to_string(i % 7), "s" + std::to_string(i % 5), static_cast<std::uint8_t>(i % 2)});
        const auto a = split_effects(records, 9);
        const auto b = split_effects(records, 9);
        CHECK(a.train == b.train);
        CHECK(a.test == b.test);
    }
    CHECK_THROWS_AS(split_effects({}, 0), InputError);
}

TEST_CASE("property: train and test pairs are disjoint over 100 seeds") {
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<int> c(0, 9), s(0, 9), l(0, 1);
    std::vector<LabeledPair> records;
    for (int i = 0; i < 300; ++i) {
        records.push_back({"c" + std::to_string(c(rng)), "s" + std::to_string(s(rng)), static_cast<std::uint8_t>(l(rng))});
    }
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto split = split_effects(records, seed);
        const auto train = pair_set(split.train);
        for (const auto& r : split.test) CHECK_FALSE(train.contains({r.chemical, r.species}));
        CHECK(split.train.size() == records.size() / 2);
    }
}

TEST_CASE("cross validation folds are pair-disjoint and cover every record once") {
    std::vector<LabeledPair> records;
    for (int i = 0; i < 200; ++i) records.push_back({"c" + std::to_string(i % 13), "s" + std::to_string(i % 11), 1});
    const auto folds = cross_validation_folds(records, 10, 3);
    REQUIRE(folds.size() == 10);
    for (const auto& f : folds) {
        const auto train = pair_set(f.train);
        for (const auto& r : f.test) CHECK_FALSE(train.contains({r.chemical, r.species}));
        CHECK(f.train.size() == 180);
    }
    CHECK_THROWS_AS(cross_validation_folds(records, 1, 0), InputError);
}

TEST_CASE("build_effect_matrix") {
    const std::vector<std::string> cs{"c0", "c1"}, ss{"s0", "s1"};
    auto e = build_effect_matrix({{"c0", "s0", 1}}, cs, ss);
    CHECK(e(0, 0));
    CHECK(e.positives() == 1);
    e = build_effect_matrix({{"c0", "s0", 0}}, cs, ss);
    CHECK(e.positives() == 0);
    e = build_effect_matrix({}, cs, ss);
    CHECK(e.positives() == 0);
    CHECK_THROWS_AS(build_effect_matrix({{"cX", "s0", 1}}, cs, ss), InputError);
}

TEST_CASE("sample_negative_triples") {
    SUBCASE("one triple, ratio 4") {
        GraphStore g;
        for (int i = 0; i < 10; ++i) g.intern("e" + std::to_string(i));
        g.add_triple("e0", "p", "e1");
        const auto neg = sample_negative_triples(g, 4, 1);
        REQUIRE(neg.size() == 4);
        for (const auto& t : neg) {
            CHECK(t.predicate == g.triples()[0].predicate);
            CHECK_FALSE(g.contains(t));
        }
    }
    SUBCASE("ratio 1 keeps per-predicate counts") {
        GraphStore g;
        for (int i = 0; i < 10; ++i) g.add_triple("e" + std::to_string(i), i < 7 ? "p" : "q", "e" + std::to_string((i + 1) % 10));
        const auto neg = sample_negative_triples(g, 1, 2);
        std::map<PredicateId, std::size_t> counts;
        for (const auto& t : neg) ++counts[t.predicate];
        CHECK(counts[*g.find_predicate("p")] == 7);
        CHECK(counts[*g.find_predicate("q")] == 3);
    }
    SUBCASE("literals are never drawn") {
        GraphStore g;
        g.add_triple("a", "p", "b");
        g.add_triple("a", "formula", "\"C2H6O\"");
        g.add_triple("c", "p", "d");
        const auto literal = *g.find_entity("\"C2H6O\"");
        for (const auto& t : sample_negative_triples(g, 8, 3)) {
            CHECK(t.subject != literal);
            CHECK(t.object != literal);
        }
    }
    SUBCASE("exhausted entity pool") {
        GraphStore g;
        for (const char* s : {"a", "b"}) {
            for (const char* o : {"a", "b"}) g.add_triple(s, "p", o);
        }
        CHECK_THROWS_AS(sample_negative_triples(g, 1, 0), InputError);
    }
    SUBCASE("invalid arguments") {
        GraphStore g;
        CHECK_THROWS_AS(sample_negative_triples(g, 4, 0), InputError);
        g.add_triple("a", "p", "b");
        CHECK_THROWS_AS(sample_negative_triples(g, 0, 0), InputError);
    }
}
