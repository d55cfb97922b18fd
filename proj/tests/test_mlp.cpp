#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "ecokg/mlp.hpp"
#include "oracles.hpp"

using namespace ecokg;

namespace {

Eigen::MatrixXd random_inputs(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::MatrixXd x(rows, cols);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = u(rng);
    return x;
}

MlpParams perturbed_biases(MlpParams p, std::mt19937_64& rng) {
    // Non-zero biases keep ReLU units away from exact kinks in the gradient check.
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (auto& b : p.biases) {
        for (Eigen::Index i = 0; i < b.size(); ++i) b[i] = u(rng);
    }
    return p;
}

}  // namespace

TEST_CASE("mlp_forward examples") {
    std::mt19937_64 rng(0);
    auto p = init_mlp(4, {3}, rng);
    for (auto& w : p.weights) w.setZero();
    const std::vector<double> e{1, 2};
    CHECK(mlp_forward(p, e, e) == 0.5);

    auto linear = init_mlp(4, {}, rng);
    linear.weights[0].setZero();
    linear.weights[0](0, 0) = 1.0;
    CHECK(mlp_forward(linear, std::vector<double>{1, 0}, std::vector<double>{0, 0}) ==
          doctest::Approx(0.731059).epsilon(1e-6));

    CHECK_THROWS(mlp_forward(linear, std::vector<double>{1}, std::vector<double>{0, 0}));
}

TEST_CASE("init_mlp shapes") {
    std::mt19937_64 rng(1);
    const auto p = init_mlp(32, {128, 64}, rng);
    CHECK(p.hidden_layers() == 2);
    CHECK(p.input_width() == 32);
    CHECK(p.hidden_sizes() == std::vector<std::size_t>{128, 64});
    CHECK(p.parameter_count() == 32 * 128 + 128 + 128 * 64 + 64 + 64 + 1);
    const double bound = std::sqrt(6.0 / (32 + 128));
    CHECK(p.weights[0].cwiseAbs().maxCoeff() <= bound);
    CHECK(p.biases[0].isZero());
}

TEST_CASE("log_loss") {
    CHECK(log_loss(std::vector<double>{1}, std::vector<double>{1 - kLogLossEpsilon}) == doctest::Approx(0.0));
    CHECK(log_loss(std::vector<double>{1}, std::vector<double>{0.5}) == doctest::Approx(0.693147).epsilon(1e-6));
    CHECK(log_loss(std::vector<double>{1, 0}, std::vector<double>{0.5, 0.5}) ==
          doctest::Approx(0.693147).epsilon(1e-6));
    CHECK(std::isfinite(log_loss(std::vector<double>{1}, std::vector<double>{0.0})));
    CHECK_THROWS(log_loss(std::vector<double>{}, std::vector<double>{}));
    CHECK_THROWS(log_loss(std::vector<double>{1}, std::vector<double>{0.5, 0.5}));
}

TEST_CASE("adagrad_step") {
    AdagradState state;
    std::vector<double> theta{0.0};
    adagrad_step(state, theta, std::vector<double>{1.0}, 0.1);
    CHECK(theta[0] == doctest::Approx(-0.1 / std::sqrt(1 + 1e-8)));
    const double before = theta[0];
    adagrad_step(state, theta, std::vector<double>{1.0}, 0.1);
    CHECK(theta[0] - before == doctest::Approx(-0.070711).epsilon(1e-5));
    const auto acc = state.accumulators;
    adagrad_step(state, theta, std::vector<double>{0.0}, 0.1);
    CHECK(theta[0] == before - 0.1 / std::sqrt(2.0 + 1e-8));
    CHECK(state.accumulators == acc);
    CHECK_THROWS(adagrad_step(state, theta, std::vector<double>{1.0, 2.0}, 0.1));
}

TEST_CASE("property: MLP log-loss gradients match central differences") {
    std::mt19937_64 rng(2);
    double worst = 0.0;
    for (int n = 0; n < 100; ++n) {
        const std::vector<std::vector<std::size_t>> shapes{{}, {5}, {6, 3}};
        auto p = perturbed_biases(init_mlp(4, shapes[n % 3], rng), rng);
        const auto x = random_inputs(3, 4, rng);
        const std::vector<double> y{1, 0, 1};

        const auto loss = [&] {
            const Eigen::VectorXd out = mlp_forward(p, x);
            return log_loss(y, std::span<const double>(out.data(), out.size()));
        };
        MlpTape tape;
        const Eigen::VectorXd out = mlp_forward(p, x, nullptr, &tape);
        const auto dl = log_loss_gradient(y, std::span<const double>(out.data(), out.size()));
        auto grads = p.zeros_like();
        const auto dx = mlp_backward(p, tape, nullptr, Eigen::Map<const Eigen::VectorXd>(dl.data(), dl.size()), grads);

        std::vector<std::span<double>> param_blocks, grad_blocks;
        p.for_each_block([&](std::span<double> b) { param_blocks.push_back(b); });
        grads.for_each_block([&](std::span<double> b) { grad_blocks.push_back(b); });
        for (std::size_t b = 0; b < param_blocks.size(); ++b) {
            for (std::size_t i = 0; i < param_blocks[b].size(); ++i) {
                worst = std::max(worst, oracle::relative_error(grad_blocks[b][i],
                                                               oracle::central_difference(loss, param_blocks[b][i])));
            }
        }
        auto x_mut = x;
        const auto loss_x = [&] {
            const Eigen::VectorXd o = mlp_forward(p, x_mut);
            return log_loss(y, std::span<const double>(o.data(), o.size()));
        };
        for (Eigen::Index i = 0; i < x_mut.size(); ++i) {
            worst = std::max(worst, oracle::relative_error(dx.data()[i], oracle::central_difference(loss_x, x_mut.data()[i])));
        }
    }
    CHECK(worst < 1e-4);
}

TEST_CASE("dropout") {
    std::mt19937_64 rng(3);
    const auto p = init_mlp(4, {8}, rng);
    const std::vector<double> e{0.3, -0.2};
    CHECK(mlp_forward(p, e, e) == mlp_forward(p, e, e));

    const auto masks = sample_dropout_masks(p, 1000, 0.2, rng);
    REQUIRE(masks.size() == 1);
    for (Eigen::Index i = 0; i < masks[0].size(); ++i) {
        const double v = masks[0].data()[i];
        CHECK((v == 0.0 || v == doctest::Approx(1.25)));
    }
}

TEST_CASE("property: inverted dropout preserves the expected hidden activation") {
    // One hidden layer, identity-like path, linear read-out of the pre-sigmoid value.
    std::mt19937_64 rng(4);
    auto p = init_mlp(2, {4}, rng);
    p.weights[0] = Eigen::MatrixXd::Constant(2, 4, 0.5);
    p.weights[1] = Eigen::MatrixXd::Constant(4, 1, 0.25);
    Eigen::MatrixXd x(1, 2);
    x << 1.0, 2.0;
    MlpTape clean;
    mlp_forward(p, x, nullptr, &clean);
    const double expected = clean.logits[0];

    const int n = 10000;
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto masks = sample_dropout_masks(p, 1, 0.2, rng);
        MlpTape tape;
        mlp_forward(p, x, &masks, &tape);
        sum += tape.logits[0];
        sum_sq += tape.logits[0] * tape.logits[0];
    }
    const double mean = sum / n;
    const double se = std::sqrt((sum_sq / n - mean * mean) / n);
    CHECK(std::abs(mean - expected) < 3.0 * se);
}

TEST_CASE("MLP serialisation round trip") {
    std::mt19937_64 rng(5);
    const auto p = init_mlp(6, {4, 3}, rng);
    std::stringstream buf;
    write_mlp(buf, p);
    CHECK(buf.str().substr(0, 4) == "MLP1");
    CHECK(read_mlp(buf) == p);
}
