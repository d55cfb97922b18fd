#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace ecokg {

/// Weights of the effect classifier: ReLU hidden layers followed by a single sigmoid unit.
/// weights[t] is (in x out); the last entry is the output layer with one column.
struct MlpParams {
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;

    std::size_t hidden_layers() const noexcept { return weights.empty() ? 0 : weights.size() - 1; }
    std::size_t input_width() const { return static_cast<std::size_t>(weights.front().rows()); }
    std::vector<std::size_t> hidden_sizes() const;
    std::size_t parameter_count() const;

    /// Zero-filled parameters of the same shape.
    MlpParams zeros_like() const;

    /// Visits every weight and bias block in a fixed order as a flat span.
    template <class F>
    void for_each_block(F&& f) {
        for (std::size_t t = 0; t < weights.size(); ++t) {
            f(std::span<double>(weights[t].data(), static_cast<std::size_t>(weights[t].size())));
            f(std::span<double>(biases[t].data(), static_cast<std::size_t>(biases[t].size())));
        }
    }

    friend bool operator==(const MlpParams& a, const MlpParams& b);
};

/// Glorot-uniform weights and zero biases.
MlpParams init_mlp(std::size_t input_width, const std::vector<std::size_t>& hidden_sizes, std::mt19937_64& rng);

/// Per hidden layer, a (batch x width) matrix of 0 or 1/(1-rate) entries (inverted dropout).
using DropoutMasks = std::vector<Eigen::MatrixXd>;
DropoutMasks sample_dropout_masks(const MlpParams& params, std::size_t batch, double rate, std::mt19937_64& rng);

/// Intermediate values kept by the forward pass for backpropagation.
struct MlpTape {
    std::vector<Eigen::MatrixXd> layer_inputs;  // input to each layer (post-dropout activations)
    std::vector<Eigen::MatrixXd> pre_activations;
    Eigen::VectorXd logits;
    Eigen::VectorXd outputs;
};

/// Forward pass on a (batch x 2k) input. `masks` (training only) must have one entry per hidden layer.
Eigen::VectorXd mlp_forward(const MlpParams& params, const Eigen::MatrixXd& inputs, const DropoutMasks* masks = nullptr,
                            MlpTape* tape = nullptr);

/// Single-example forward pass on [e_c, e_s]; inference mode (no dropout).
double mlp_forward(const MlpParams& params, std::span<const double> chemical, std::span<const double> species);

/// Backpropagates dL/d(output) through a recorded forward pass. Adds parameter gradients into
/// `grads` (shaped like params) and returns dL/d(inputs).
Eigen::MatrixXd mlp_backward(const MlpParams& params, const MlpTape& tape, const DropoutMasks* masks,
                             const Eigen::VectorXd& output_grad, MlpParams& grads);

inline constexpr double kLogLossEpsilon = 1e-7;

/// Mean binary cross-entropy with predictions clamped to [eps, 1-eps]. Throws on empty or mismatched input.
double log_loss(std::span<const double> labels, std::span<const double> predictions);

/// d(log_loss)/d(prediction_i), evaluated at the clamped prediction.
std::vector<double> log_loss_gradient(std::span<const double> labels, std::span<const double> predictions);

struct AdagradState {
    std::vector<double> accumulators;
    double epsilon = 1e-8;
};

/// G += g^2; theta -= lr * g / sqrt(G + eps). Accumulators are sized on first use.
void adagrad_step(AdagradState& state, std::span<double> params, std::span<const double> grads, double lr);

/// Serialisation in the checkpoint's numeric encoding ("MLP1" section).
void write_mlp(std::ostream& out, const MlpParams& params);
MlpParams read_mlp(std::istream& in);

}  // namespace ecokg
