#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "ecokg/kge.hpp"
#include "oracles.hpp"

using namespace ecokg;

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

std::vector<double> random_vector(std::size_t d, std::mt19937_64& rng, double scale = 1.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    std::vector<double> v(d);
    for (auto& x : v) x = u(rng);
    return v;
}

// c_k = sum_i a_i b_{(i+k) mod d}, written independently of the library.
std::vector<double> brute_correlation(const std::vector<double>& a, const std::vector<double>& b) {
    const auto d = a.size();
    std::vector<double> c(d, 0.0);
    for (std::size_t k = 0; k < d; ++k) {
        for (std::size_t i = 0; i < d; ++i) c[k] += a[i] * b[(i + k) % d];
    }
    return c;
}

constexpr ScoreKind kAllKinds[] = {ScoreKind::transe, ScoreKind::distmult, ScoreKind::hole};

}  // namespace

TEST_CASE("init_embeddings") {
    const auto a = init_embeddings(10, 3, 128, 7);
    CHECK(a == init_embeddings(10, 3, 128, 7));
    CHECK_FALSE(a == init_embeddings(10, 3, 128, 8));
    const double bound = 6.0 / std::sqrt(128.0);
    CHECK(bound == doctest::Approx(0.5303).epsilon(1e-4));
    for (double v : a.values()) CHECK(std::abs(v) <= bound);
    CHECK(a.values().size() == 13 * 128);
    CHECK_THROWS(init_embeddings(0, 1, 4, 0));
    CHECK_THROWS(init_embeddings(1, 1, 0, 0));
}

TEST_CASE("circular correlation examples") {
    CHECK(circ_correlation(std::vector<double>{1, 0}, std::vector<double>{0, 1}) == std::vector<double>{0, 1});
    std::vector<double> delta(32, 0.0);
    delta[0] = 1.0;
    const auto c = circ_correlation(delta, delta);
    for (std::size_t k = 0; k < c.size(); ++k) CHECK(c[k] == doctest::Approx(k == 0 ? 1.0 : 0.0));
    std::mt19937_64 rng(1);
    const std::vector<double> zeros(20, 0.0);
    for (double v : circ_correlation(zeros, random_vector(20, rng))) CHECK(v == 0.0);
    CHECK_THROWS(circ_correlation(std::vector<double>{1, 2}, std::vector<double>{1, 2, 3}));
}

TEST_CASE("property: FFT correlation and convolution match the direct sums") {
    std::mt19937_64 rng(3);
    for (std::size_t d : {2, 4, 8, 16, 64, 128, 17}) {
        for (int n = 0; n < 100; ++n) {
            const auto a = random_vector(d, rng);
            const auto b = random_vector(d, rng);
            const auto fast = circ_correlation(a, b);
            const auto brute = brute_correlation(a, b);
            const auto conv = circ_convolution(a, b);
            const auto conv_direct = circ_convolution_direct(a, b);
            for (std::size_t k = 0; k < d; ++k) {
                REQUIRE(std::abs(fast[k] - brute[k]) < 1e-9);
                REQUIRE(std::abs(conv[k] - conv_direct[k]) < 1e-9);
            }
        }
    }
}

TEST_CASE("score examples") {
    const std::vector<double> one{1.0};
    CHECK(score(ScoreKind::distmult, one, one, one) == doctest::Approx(0.731059).epsilon(1e-6));
    CHECK(score(ScoreKind::hole, std::vector<double>{1, 0}, std::vector<double>{0, 1}, std::vector<double>{0, 1}) ==
          doctest::Approx(0.731059).epsilon(1e-6));
    CHECK(score(ScoreKind::transe, std::vector<double>{0.5, 1}, std::vector<double>{0.5, 0},
                std::vector<double>{1, 1}) == 1.0);
    CHECK(score(ScoreKind::transe, std::vector<double>{0, 0}, std::vector<double>{0, 0}, std::vector<double>{0.6, 0.8}) ==
          doctest::Approx(0.761594).epsilon(1e-6));

    const auto g = score_gradients(ScoreKind::distmult, one, one, one);
    CHECK(g.subject[0] == doctest::Approx(0.196612).epsilon(1e-6));

    const auto z = score_gradients(ScoreKind::transe, std::vector<double>{1, 2}, std::vector<double>{0, 0},
                                   std::vector<double>{1, 2});
    CHECK(z.score == 1.0);
    for (double v : z.subject) CHECK(v == 0.0);
    for (double v : z.object) CHECK(v == 0.0);
}

TEST_CASE("table scoring checks bounds") {
    auto table = init_embeddings(3, 1, 4, 0);
    CHECK_NOTHROW(score(ScoreKind::hole, table, Triple{EntityId{0}, PredicateId{0}, EntityId{2}}));
    CHECK_THROWS(score(ScoreKind::hole, table, Triple{EntityId{3}, PredicateId{0}, EntityId{2}}));
    CHECK_THROWS(score(ScoreKind::hole, table, Triple{EntityId{0}, PredicateId{1}, EntityId{2}}));
}

TEST_CASE("property: scores stay in [0, 1], including near-zero TransE norms") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> tiny(-1e-13, 1e-13);
    for (int n = 0; n < 2000; ++n) {
        const auto s = random_vector(8, rng, 5.0);
        const auto p = random_vector(8, rng, 5.0);
        auto o = random_vector(8, rng, 5.0);
        for (auto kind : kAllKinds) {
            const double v = score(kind, s, p, o);
            CHECK((v >= 0.0 && v <= 1.0));
        }
        for (std::size_t d = 0; d < 8; ++d) o[d] = s[d] + p[d] + tiny(rng);
        const double v = score(ScoreKind::transe, s, p, o);
        CHECK((v >= 0.0 && v <= 1.0));
    }
}

TEST_CASE("DistMult is symmetric in subject and object; HolE is not") {
    std::mt19937_64 rng(5);
    bool asymmetric = false;
    for (int n = 0; n < 100; ++n) {
        const auto s = random_vector(8, rng);
        const auto p = random_vector(8, rng);
        const auto o = random_vector(8, rng);
        CHECK(score(ScoreKind::distmult, s, p, o) == doctest::Approx(score(ScoreKind::distmult, o, p, s)));
        asymmetric |= std::abs(score(ScoreKind::hole, s, p, o) - score(ScoreKind::hole, o, p, s)) > 0.01;
    }
    CHECK(asymmetric);
}

TEST_CASE("property: score gradients match central differences") {
    std::mt19937_64 rng(6);
    for (auto kind : kAllKinds) {
        CAPTURE(to_string(kind));
        double worst = 0.0;
        for (int n = 0; n < 100; ++n) {
            const std::size_t d = n % 2 ? 8 : 20;  // 20 exercises the FFT path
            auto s = random_vector(d, rng);
            auto p = random_vector(d, rng);
            auto o = random_vector(d, rng);
            const auto g = score_gradients(kind, s, p, o);
            CHECK(g.score == doctest::Approx(score(kind, s, p, o)).epsilon(1e-12));
            const auto f = [&] { return score(kind, s, p, o); };
            for (std::size_t i = 0; i < d; ++i) {
                worst = std::max(worst, oracle::relative_error(g.subject[i], oracle::central_difference(f, s[i])));
                worst = std::max(worst, oracle::relative_error(g.predicate[i], oracle::central_difference(f, p[i])));
                worst = std::max(worst, oracle::relative_error(g.object[i], oracle::central_difference(f, o[i])));
            }
        }
        CHECK(worst < 1e-4);
    }
}

TEST_CASE("embedding checkpoint round trip") {
    const auto table = init_embeddings(5, 2, 3, 11);
    std::stringstream buf;
    write_embeddings(buf, table);
    const auto bytes = buf.str();
    CHECK(bytes.substr(0, 4) == "KGE1");
    CHECK(bytes.size() == 4 + 3 * 8 + 7 * 3 * 8);
    CHECK(static_cast<unsigned char>(bytes[4]) == 3);  // little-endian dim
    CHECK(read_embeddings(buf) == table);

    std::stringstream bad("KGE2");
    CHECK_THROWS(read_embeddings(bad));
    std::stringstream truncated(bytes.substr(0, bytes.size() - 1));
    CHECK_THROWS(read_embeddings(truncated));
}
