#include <map>
#include <set>

#include "doctest.h"
#include "ecokg/errors.hpp"
#include "ecokg/synth.hpp"
#include "ecokg/taxonomy.hpp"
#include "temp_dir.hpp"

using namespace ecokg;

TEST_CASE("synthetic data is deterministic per seed") {
    SyntheticSpec spec;
    TempDir a, b, c;
    write_synthetic(generate_synthetic(spec, 3), a.path());
    write_synthetic(generate_synthetic(spec, 3), b.path());
    write_synthetic(generate_synthetic(spec, 4), c.path());
    for (const char* f : {"taxonomy.tsv", "fingerprints.tsv", "effects.csv", "triples.tsv", "mappings.tsv"}) {
        CAPTURE(f);
        CHECK(slurp(a / f) == slurp(b / f));
    }
    CHECK(slurp(a / "effects.csv") != slurp(c / "effects.csv"));
}

TEST_CASE("default spec hits the target positive rate") {
    SyntheticSpec spec;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto data = generate_synthetic(spec, seed);
        CHECK(data.chemicals.size() == 50);
        CHECK(data.species.size() == 50);
        CHECK(data.realized_positive_rate >= 0.36);
        CHECK(data.realized_positive_rate <= 0.46);
        CHECK(std::abs(data.realized_positive_rate - spec.positive_rate) <= 0.05);
    }
}

TEST_CASE("noise-free world with one toxic block") {
    SyntheticSpec spec;
    spec.n_chemical_classes = 1;
    spec.n_species_clades = 1;
    spec.chemicals_per_class = 4;
    spec.species_per_clade = 4;
    spec.genera_per_clade = 2;
    spec.label_noise = 0.0;
    spec.toxicity_block_probability = 1.0;
    spec.observation_rate = 1.0;
    spec.coverage_spread = 0.0;
    spec.excluded_record_rate = 0.0;
    const auto data = generate_synthetic(spec, 0);
    std::set<std::pair<std::string, std::string>> pairs;
    for (const auto& r : data.effects) {
        CHECK(r.outcome.text == "LC50");
        pairs.emplace(r.chemical, r.species);
    }
    CHECK(pairs.size() == 16);
    CHECK(data.realized_positive_rate == 1.0);
}

TEST_CASE("synthetic taxonomy and fingerprints load back") {
    SyntheticSpec spec;
    TempDir dir;
    const auto data = generate_synthetic(spec, 1);
    write_synthetic(data, dir.path());
    const auto tax = Taxonomy::load_tsv(dir / "taxonomy.tsv");
    CHECK(tax.leaf_labels() == data.species);
    // Species in one genus: path lengths 4 and 4 sharing 3 nodes.
    CHECK(tax.similarity(data.species[0], data.species[2]) == doctest::Approx(1.0 / 3.0));
    CHECK(load_effects_csv(dir / "effects.csv").size() == data.effects.size());
}

TEST_CASE("infeasible specs are rejected") {
    SyntheticSpec spec;
    spec.label_noise = 0.45;
    spec.positive_rate = 0.9;
    CHECK_THROWS_AS(generate_synthetic(spec, 0), InputError);
    spec = {};
    spec.chemicals_per_class = 0;
    CHECK_THROWS_AS(generate_synthetic(spec, 0), InputError);
    spec = {};
    spec.observation_rate = 1.5;
    CHECK_THROWS_AS(generate_synthetic(spec, 0), InputError);
}
