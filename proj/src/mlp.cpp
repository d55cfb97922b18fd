#include "ecokg/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "ecokg/errors.hpp"
#include "ecokg/kge.hpp"

namespace ecokg {

namespace {

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

}  // namespace

std::vector<std::size_t> MlpParams::hidden_sizes() const {
    std::vector<std::size_t> out;
    for (std::size_t t = 0; t + 1 < weights.size(); ++t) out.push_back(static_cast<std::size_t>(weights[t].cols()));
    return out;
}

std::size_t MlpParams::parameter_count() const {
    std::size_t n = 0;
    for (std::size_t t = 0; t < weights.size(); ++t) n += static_cast<std::size_t>(weights[t].size() + biases[t].size());
    return n;
}

MlpParams MlpParams::zeros_like() const {
    MlpParams z;
    for (std::size_t t = 0; t < weights.size(); ++t) {
        z.weights.push_back(Eigen::MatrixXd::Zero(weights[t].rows(), weights[t].cols()));
        z.biases.push_back(Eigen::VectorXd::Zero(biases[t].size()));
    }
    return z;
}

bool operator==(const MlpParams& a, const MlpParams& b) {
    if (a.weights.size() != b.weights.size()) return false;
    for (std::size_t t = 0; t < a.weights.size(); ++t) {
        if (a.weights[t].rows() != b.weights[t].rows() || a.weights[t].cols() != b.weights[t].cols()) return false;
        if (a.weights[t] != b.weights[t] || a.biases[t] != b.biases[t]) return false;
    }
    return true;
}

MlpParams init_mlp(std::size_t input_width, const std::vector<std::size_t>& hidden_sizes, std::mt19937_64& rng) {
    if (input_width == 0) throw std::invalid_argument("MLP input width must be positive");
    MlpParams p;
    std::size_t in = input_width;
    auto add_layer = [&](std::size_t out) {
        if (out == 0) throw std::invalid_argument("MLP layer width must be positive");
        const double bound = std::sqrt(6.0 / static_cast<double>(in + out));
        std::uniform_real_distribution<double> unif(-bound, bound);
        Eigen::MatrixXd w(in, out);
        for (Eigen::Index c = 0; c < w.cols(); ++c) {
            for (Eigen::Index r = 0; r < w.rows(); ++r) w(r, c) = unif(rng);
        }
        p.weights.push_back(std::move(w));
        p.biases.push_back(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(out)));
        in = out;
    };
    for (auto h : hidden_sizes) add_layer(h);
    add_layer(1);
    return p;
}

DropoutMasks sample_dropout_masks(const MlpParams& params, std::size_t batch, double rate, std::mt19937_64& rng) {
    if (!(rate >= 0.0 && rate < 1.0)) throw std::invalid_argument("dropout rate must lie in [0, 1)");
    DropoutMasks masks;
    std::bernoulli_distribution keep(1.0 - rate);
    const double scale = 1.0 / (1.0 - rate);
    for (auto width : params.hidden_sizes()) {
        Eigen::MatrixXd m(static_cast<Eigen::Index>(batch), static_cast<Eigen::Index>(width));
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = keep(rng) ? scale : 0.0;
        }
        masks.push_back(std::move(m));
    }
    return masks;
}

Eigen::VectorXd mlp_forward(const MlpParams& params, const Eigen::MatrixXd& inputs, const DropoutMasks* masks,
                            MlpTape* tape) {
    if (params.weights.empty()) throw std::invalid_argument("empty MLP");
    if (static_cast<std::size_t>(inputs.cols()) != params.input_width()) {
        throw std::invalid_argument("MLP input width mismatch");
    }
    if (masks && masks->size() != params.hidden_layers()) throw std::invalid_argument("one dropout mask per hidden layer expected");
    if (tape) {
        tape->layer_inputs.clear();
        tape->pre_activations.clear();
    }
    Eigen::MatrixXd y = inputs;
    for (std::size_t t = 0; t < params.hidden_layers(); ++t) {
        if (tape) tape->layer_inputs.push_back(y);
        Eigen::MatrixXd z = y * params.weights[t];
        z.rowwise() += params.biases[t].transpose();
        if (tape) tape->pre_activations.push_back(z);
        y = z.cwiseMax(0.0);
        if (masks) {
            const auto& m = (*masks)[t];
            if (m.rows() != y.rows() || m.cols() != y.cols()) throw std::invalid_argument("dropout mask shape mismatch");
            y = y.cwiseProduct(m);
        }
    }
    if (tape) tape->layer_inputs.push_back(y);
    Eigen::VectorXd logits = y * params.weights.back().col(0);
    logits.array() += params.biases.back()(0);
    Eigen::VectorXd out = logits.unaryExpr([](double z) { return sigmoid(z); });
    if (tape) {
        tape->logits = logits;
        tape->outputs = out;
    }
    return out;
}

double mlp_forward(const MlpParams& params, std::span<const double> chemical, std::span<const double> species) {
    if (chemical.size() + species.size() != params.input_width()) throw std::invalid_argument("MLP input width mismatch");
    Eigen::MatrixXd x(1, static_cast<Eigen::Index>(params.input_width()));
    for (std::size_t d = 0; d < chemical.size(); ++d) x(0, static_cast<Eigen::Index>(d)) = chemical[d];
    for (std::size_t d = 0; d < species.size(); ++d) x(0, static_cast<Eigen::Index>(chemical.size() + d)) = species[d];
    return mlp_forward(params, x)(0);
}

Eigen::MatrixXd mlp_backward(const MlpParams& params, const MlpTape& tape, const DropoutMasks* masks,
                             const Eigen::VectorXd& output_grad, MlpParams& grads) {
    const std::size_t n = params.weights.size();
    // Through the sigmoid.
    Eigen::MatrixXd delta = (output_grad.array() * tape.outputs.array() * (1.0 - tape.outputs.array())).matrix();
    for (std::size_t idx = n; idx-- > 0;) {
        const auto& input = tape.layer_inputs[idx];
        grads.weights[idx].noalias() += input.transpose() * delta;
        grads.biases[idx] += delta.colwise().sum().transpose();
        Eigen::MatrixXd upstream = delta * params.weights[idx].transpose();
        if (idx == 0) return upstream;
        // Back through dropout and ReLU of hidden layer idx-1.
        if (masks) upstream = upstream.cwiseProduct((*masks)[idx - 1]);
        const auto& z = tape.pre_activations[idx - 1];
        delta = upstream.cwiseProduct((z.array() > 0.0).cast<double>().matrix());
    }
    return {};
}

double log_loss(std::span<const double> labels, std::span<const double> predictions) {
    if (labels.empty()) throw std::invalid_argument("log loss of an empty batch");
    if (labels.size() != predictions.size()) throw std::invalid_argument("label/prediction length mismatch");
    double total = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const double p = std::clamp(predictions[i], kLogLossEpsilon, 1.0 - kLogLossEpsilon);
        total += labels[i] * std::log(p) + (1.0 - labels[i]) * std::log(1.0 - p);
    }
    return -total / static_cast<double>(labels.size());
}

std::vector<double> log_loss_gradient(std::span<const double> labels, std::span<const double> predictions) {
    if (labels.empty()) throw std::invalid_argument("log loss of an empty batch");
    if (labels.size() != predictions.size()) throw std::invalid_argument("label/prediction length mismatch");
    const double n = static_cast<double>(labels.size());
    std::vector<double> g(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const double p = std::clamp(predictions[i], kLogLossEpsilon, 1.0 - kLogLossEpsilon);
        g[i] = -(labels[i] / p - (1.0 - labels[i]) / (1.0 - p)) / n;
    }
    return g;
}

void adagrad_step(AdagradState& state, std::span<double> params, std::span<const double> grads, double lr) {
    if (params.size() != grads.size()) throw std::invalid_argument("adagrad: parameter/gradient shape mismatch");
    if (state.accumulators.empty()) state.accumulators.assign(params.size(), 0.0);
    if (state.accumulators.size() != params.size()) throw std::invalid_argument("adagrad: accumulator shape mismatch");
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = grads[i];
        if (g == 0.0) continue;
        state.accumulators[i] += g * g;
        params[i] -= lr * g / std::sqrt(state.accumulators[i] + state.epsilon);
    }
}

void write_mlp(std::ostream& out, const MlpParams& params) {
    out.write("MLP1", 4);
    write_u64(out, params.weights.size());
    for (std::size_t t = 0; t < params.weights.size(); ++t) {
        const auto& w = params.weights[t];
        write_u64(out, static_cast<std::uint64_t>(w.rows()));
        write_u64(out, static_cast<std::uint64_t>(w.cols()));
        for (Eigen::Index r = 0; r < w.rows(); ++r) {
            for (Eigen::Index c = 0; c < w.cols(); ++c) write_f64(out, w(r, c));
        }
        for (Eigen::Index c = 0; c < params.biases[t].size(); ++c) write_f64(out, params.biases[t](c));
    }
}

MlpParams read_mlp(std::istream& in) {
    char magic[4];
    if (!in.read(magic, 4) || std::string_view(magic, 4) != "MLP1") throw InputError("checkpoint has no MLP section");
    const auto layers = read_u64(in);
    if (layers == 0 || layers > 64) throw InputError("corrupt MLP section");
    MlpParams p;
    for (std::uint64_t t = 0; t < layers; ++t) {
        const auto rows = read_u64(in);
        const auto cols = read_u64(in);
        if (rows == 0 || cols == 0 || rows > (1u << 20) || cols > (1u << 20)) throw InputError("corrupt MLP layer shape");
        Eigen::MatrixXd w(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
        for (Eigen::Index r = 0; r < w.rows(); ++r) {
            for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = read_f64(in);
        }
        Eigen::VectorXd b(static_cast<Eigen::Index>(cols));
        for (Eigen::Index c = 0; c < b.size(); ++c) b(c) = read_f64(in);
        p.weights.push_back(std::move(w));
        p.biases.push_back(std::move(b));
    }
    return p;
}

}  // namespace ecokg
