#include <sstream>

#include "doctest.h"
#include "ecokg/errors.hpp"
#include "ecokg/experiment.hpp"
#include "ecokg/synth.hpp"
#include "temp_dir.hpp"

using namespace ecokg;

namespace {

// Two species under one genus, two chemicals with identical fingerprints, one effect.
DataPaths minimal_fixture(const TempDir& dir) {
    dir.write("taxonomy.tsv", "sp/a\tgenus/g\nsp/b\tgenus/g\n");
    dir.write("fingerprints.tsv", "chem/1\tF0\nchem/2\tF0\n");
    dir.write("effects.csv",
              "test_id,chemical_id,species_id,endpoint,conc1_mean,conc1_unit\n"
              "7,chem/1,sp/a,LC50,1.5,mg/L\n");
    dir.write("triples.tsv", "chem/1\tpubchem:formula\t\"CH4\"\n");
    dir.write("mappings.tsv", "ecotox:taxon/9\tsp/a\n");
    return DataPaths::in_dir(dir.path());
}

std::size_t count_predicate(const GraphStore& g, std::string_view p) {
    const auto id = g.find_predicate(p);
    return id ? g.predicate_count_of(*id) : 0;
}

}  // namespace

TEST_CASE("build_kg on a minimal fixture") {
    TempDir dir;
    const auto data = load_dataset(minimal_fixture(dir));
    CHECK(data.chemicals == std::vector<std::string>{"chem/1", "chem/2"});
    CHECK(data.species == std::vector<std::string>{"sp/a", "sp/b"});

    const auto kg = build_kg(data, data.records, 0.5);
    CHECK(count_predicate(kg, kAffects) == 1);
    CHECK(count_predicate(kg, kEffectSpecies) == 1);
    CHECK(count_predicate(kg, kEndpoint) == 1);
    CHECK(count_predicate(kg, kSameAs) == 1);
    CHECK(count_predicate(kg, kSubClassOf) == 2);
    CHECK(count_predicate(kg, kSimilarityPredicate) == 1);
    CHECK(count_predicate(build_kg(data, data.records, 1.0), kSimilarityPredicate) == 0);
    CHECK(kg.is_literal(*kg.find_entity("\"CH4\"")));
}

TEST_CASE("load_dataset errors") {
    TempDir dir;
    auto paths = minimal_fixture(dir);
    paths.effects = dir / "missing.csv";
    CHECK_THROWS_AS(load_dataset(paths), InputError);

    TempDir other;
    const auto p = minimal_fixture(other);
    other.write("effects.csv",
                "test_id,chemical_id,species_id,endpoint,conc1_mean,conc1_unit\n"
                "1,chem/1,sp/zzz,LC50,1,mg/L\n");
    CHECK_THROWS_AS(load_dataset(p), InputError);

    other.write("triples.tsv", "only two\tfields\n");
    try {
        load_dataset(p);
        FAIL("expected an error");
    } catch (const InputError& e) {
        CHECK(std::string(e.what()).find("triples.tsv:1") != std::string::npos);
    }
}

TEST_CASE("experiment config file") {
    TempDir dir;
    const auto path = dir.write("exp.cfg",
                                "# comment\n"
                                "data = /tmp/somewhere\n"
                                "model = m2star-distmult\n"
                                "t_max = 12\n"
                                "learning_rate = 0.05\n"
                                "embedding_dim = 32\n");
    auto cfg = ExperimentConfig::load(path);
    CHECK(cfg.model == "m2star-distmult");
    CHECK(cfg.t_max == 12);
    CHECK(cfg.paths.effects == std::filesystem::path("/tmp/somewhere/effects.csv"));
    const auto train = cfg.train_config(ModelKind::m2star_distmult);
    CHECK(train.learning_rate == 0.05);
    CHECK(train.embedding_dim == 32);
    CHECK(train.loss_weight_kg == 0.5);

    cfg.set("colour", "blue");
    CHECK_THROWS_AS(cfg.train_config(ModelKind::m2), InputError);
    CHECK_THROWS_AS(cfg.set("t_max", "0"), InputError);
    CHECK_THROWS_AS(cfg.set("step", "0"), InputError);
    CHECK_THROWS_AS(ExperimentConfig::load(dir.write("bad.cfg", "no equals sign\n")), InputError);
}

TEST_CASE("prepared splits aggregate pairs and stay pair-disjoint") {
    TempDir dir;
    write_synthetic(generate_synthetic(SyntheticSpec{}, 2), dir.path());
    const auto data = load_dataset(DataPaths::in_dir(dir.path()));
    const auto split = prepare_split(data, 2);
    std::set<std::pair<std::string, std::string>> train;
    for (const auto& p : split.train) CHECK(train.emplace(p.chemical, p.species).second);
    for (const auto& p : split.test) CHECK_FALSE(train.contains({p.chemical, p.species}));
    for (const auto& r : split.train_records) CHECK(label_outcome(r.outcome) != EffectLabel::excluded);

    const auto folds = prepare_folds(split.train_records, 3, 2);
    CHECK(folds.size() == 3);

    const auto m1 = evaluate_m1(data, split, 30);
    CHECK_FALSE(m1.auc.has_value());
    for (double s : m1.scores) CHECK((s == 0.0 || s == 1.0));
}

TEST_CASE("report layout") {
    const auto a = evaluate_scores({1, 0, 1, 0}, {1, 0, 0, 0}, 0.5, false);
    const auto b = evaluate_scores({1, 0, 1, 0}, {0.9, 0.2, 0.6, 0.7}, 0.5, true);
    std::ostringstream out;
    write_report(out, {{"m1", {a}}, {"m2", {b, b}}});
    const auto text = out.str();
    CHECK(text.rfind("metric\tm1\tm2\n", 0) == 0);
    CHECK(text.find("auc\t-\t0.7500 ± 0.0000\n") != std::string::npos);
    CHECK(text.find("recall\t0.5000\t1.0000 ± 0.0000\n") != std::string::npos);
}

TEST_CASE("pairs CSV") {
    TempDir dir;
    const auto pairs = load_pairs_csv(dir.write("p.csv", "chemical_id,species_id\nc1,s1\n c2 , s2\n"));
    REQUIRE(pairs.size() == 2);
    CHECK(pairs[1] == std::pair<std::string, std::string>{"c2", "s2"});
    CHECK_THROWS_AS(load_pairs_csv(dir.write("q.csv", "c1,s1,x\n")), InputError);
}
