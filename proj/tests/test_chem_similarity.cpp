#include <random>

#include "doctest.h"
#include "ecokg/chem_similarity.hpp"
#include "ecokg/errors.hpp"
#include "temp_dir.hpp"

using namespace ecokg;

namespace {

Fingerprint with_bits(std::string id, std::initializer_list<std::size_t> bits, std::size_t width = 16) {
    Fingerprint fp(std::move(id), width);
    for (auto b : bits) fp.set(b);
    return fp;
}

Fingerprint random_fp(std::string id, std::mt19937_64& rng, double density, std::size_t width = 64) {
    Fingerprint fp(std::move(id), width);
    std::bernoulli_distribution bit(density);
    for (std::size_t b = 0; b < width; ++b) fp.set(b, bit(rng));
    return fp;
}

}  // namespace

TEST_CASE("jaccard reference values") {
    const auto a = with_bits("a", {1, 2, 3});
    const auto b = with_bits("b", {2, 3, 4});
    CHECK(jaccard(a, a) == 1.0);
    CHECK(jaccard(a, with_bits("c", {7, 8})) == 0.0);
    CHECK(jaccard(a, b) == doctest::Approx(0.5));
    CHECK(jaccard(Fingerprint("e", 16), Fingerprint("f", 16)) == 0.0);
    CHECK_THROWS_AS(jaccard(a, with_bits("w", {1}, 32)), std::invalid_argument);
}

TEST_CASE("hex round trip and bit order") {
    const auto fp = Fingerprint::from_hex("c", "8001");
    CHECK(fp.width() == 16);
    CHECK(fp.test(0));
    CHECK(fp.test(15));
    CHECK(fp.count() == 2);
    CHECK(fp.to_hex() == "8001");
    CHECK_THROWS_AS(Fingerprint::from_hex("c", "zz"), InputError);
}

TEST_CASE("load_fingerprints_tsv enforces a common width") {
    TempDir dir;
    const auto fps = load_fingerprints_tsv(dir.write("fp.tsv", "c1\tff00\nc2\t0ff0\n"));
    REQUIRE(fps.size() == 2);
    CHECK(jaccard(fps[0], fps[1]) == doctest::Approx(4.0 / 12.0));
    CHECK_THROWS_AS(load_fingerprints_tsv(dir.write("bad.tsv", "c1\tff00\nc2\tff\n")), InputError);
    CHECK_THROWS_AS(load_fingerprints_tsv(dir.write("w.tsv", "c1\tff00\n"), 128), InputError);
}

TEST_CASE("nearest_compound") {
    NeighborMatrix s({"c0", "c1", "c2"});
    s(0, 1) = 0.9;
    s(0, 2) = 0.1;
    CHECK(nearest_neighbor(s, 0, {false, false, false}) == 1u);
    s(0, 1) = s(0, 2) = 0.4;
    CHECK(nearest_neighbor(s, 0, {false, false, false}) == 1u);
    CHECK_FALSE(nearest_neighbor(s, 0, {true, true, true}).has_value());
}

TEST_CASE("emit_similarity_triples uses a strict threshold") {
    NeighborMatrix s({"c1", "c2"});
    s(0, 0) = s(1, 1) = 1.0;
    s(0, 1) = s(1, 0) = 0.6;
    {
        GraphStore g;
        const auto t = emit_similarity_triples(s, 0.5, g);
        REQUIRE(t.size() == 1);
        CHECK(g.label(t[0].subject) == "c1");
        CHECK(g.label(t[0].predicate) == kSimilarityPredicate);
        CHECK(g.label(t[0].object) == "c2");
    }
    s(0, 1) = s(1, 0) = 0.5;
    GraphStore g;
    CHECK(emit_similarity_triples(s, 0.5, g).empty());
    CHECK(emit_similarity_triples(s, 1.0, g).empty());
    CHECK_THROWS_AS(emit_similarity_triples(s, 1.5, g), std::invalid_argument);
}

TEST_CASE("property: jaccard identities and monotone triple count") {
    std::mt19937_64 rng(3);
    std::vector<Fingerprint> fps;
    for (int i = 0; i < 30; ++i) fps.push_back(random_fp("c" + std::to_string(i), rng, 0.1 + 0.02 * (i % 10)));
    const Fingerprint empty("empty", 64);
    for (const auto& a : fps) {
        if (a.count() > 0) CHECK(jaccard(a, a) == 1.0);
        CHECK(jaccard(a, empty) == 0.0);
        for (const auto& b : fps) CHECK(jaccard(a, b) == jaccard(b, a));
    }
    const auto s = similarity_matrix(fps);
    std::size_t previous = std::numeric_limits<std::size_t>::max();
    for (double phi = 0.0; phi <= 1.0; phi += 0.05) {
        GraphStore g;
        const auto n = emit_similarity_triples(s, phi, g).size();
        CHECK(n <= previous);
        previous = n;
    }
}

TEST_CASE("similarity_matrix over a compound list fills missing fingerprints with empty ones") {
    const std::vector<Fingerprint> fps{with_bits("a", {1, 2}), with_bits("b", {2})};
    const auto s = similarity_matrix(fps, {"b", "zzz", "a"});
    CHECK(s.labels() == std::vector<std::string>{"b", "zzz", "a"});
    CHECK(s(0, 2) == doctest::Approx(0.5));
    CHECK(s(1, 1) == 0.0);
    CHECK(s(0, 1) == 0.0);
}

TEST_CASE("property: ordering by nearest-neighbour similarity is non-increasing") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Fingerprint> fps;
        for (int i = 0; i < 25; ++i) fps.push_back(random_fp("c" + std::to_string(i), rng, 0.3));
        const auto s = similarity_matrix(fps);
        const auto order = order_by_nearest_similarity(s);
        REQUIRE(order.size() == fps.size());
        auto nearest = [&](std::size_t i) {
            double best = 0.0;
            for (std::size_t j = 0; j < s.size(); ++j) {
                if (j != i) best = std::max(best, s(i, j));
            }
            return best;
        };
        for (std::size_t k = 1; k < order.size(); ++k) CHECK(nearest(order[k - 1]) >= nearest(order[k]));
    }
}
