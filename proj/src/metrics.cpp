#include "ecokg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "ecokg/errors.hpp"

namespace ecokg {

namespace {

double ratio(std::size_t num, std::size_t den, bool& degenerate) {
    if (den == 0) {
        degenerate = true;
        return 0.0;
    }
    return static_cast<double>(num) / static_cast<double>(den);
}

void check_lengths(std::span<const std::uint8_t> labels, std::span<const double> scores) {
    if (labels.size() != scores.size()) throw std::invalid_argument("labels and scores differ in length");
}

}  // namespace

ConfusionCounts confusion(std::span<const std::uint8_t> labels, std::span<const double> scores, double threshold) {
    check_lengths(labels, scores);
    ConfusionCounts c;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const bool predicted = scores[i] > threshold;
        if (labels[i]) {
            ++(predicted ? c.tp : c.fn);
        } else {
            ++(predicted ? c.fp : c.tn);
        }
    }
    return c;
}

double f_beta_score(double precision, double recall, double beta) {
    if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
    const double b2 = beta * beta;
    const double den = b2 * precision + recall;
    if (den == 0.0) return 0.0;
    return (1.0 + b2) * precision * recall / den;
}

Metrics metrics(const ConfusionCounts& counts, double beta) {
    Metrics m;
    m.accuracy = ratio(counts.tp + counts.tn, counts.total(), m.degenerate);
    m.precision = ratio(counts.tp, counts.tp + counts.fp, m.degenerate);
    m.recall = ratio(counts.tp, counts.tp + counts.fn, m.degenerate);
    if (m.precision == 0.0 && m.recall == 0.0) m.degenerate = true;
    m.f_beta = f_beta_score(m.precision, m.recall, beta);
    return m;
}

std::vector<double> threshold_grid(double step) {
    if (!(step > 0.0 && step <= 1.0)) throw InputError("threshold step must lie in (0, 1]");
    const auto n = static_cast<std::size_t>(std::floor(1.0 / step + 1e-9));
    std::vector<double> grid;
    grid.reserve(n + 2);
    for (std::size_t i = 0; i <= n; ++i) grid.push_back(std::min(1.0, static_cast<double>(i) * step));
    if (grid.back() < 1.0 - 1e-12) grid.push_back(1.0);
    grid.back() = 1.0;
    return grid;
}

RocResult roc_auc(std::span<const std::uint8_t> labels, std::span<const double> scores, double step) {
    check_lengths(labels, scores);
    const auto positives = static_cast<std::size_t>(std::count_if(labels.begin(), labels.end(), [](auto l) { return l != 0; }));
    const auto negatives = labels.size() - positives;
    if (positives == 0 || negatives == 0) throw InputError("ROC/AUC undefined: labels contain a single class");

    RocResult result;
    const auto grid = threshold_grid(step);
    for (auto it = grid.rbegin(); it != grid.rend(); ++it) {
        const auto c = confusion(labels, scores, *it);
        result.curve.push_back({*it, static_cast<double>(c.fp) / static_cast<double>(negatives),
                                static_cast<double>(c.tp) / static_cast<double>(positives)});
    }

    std::vector<std::pair<double, double>> pts{{0.0, 0.0}, {1.0, 1.0}};
    for (const auto& p : result.curve) pts.emplace_back(p.fpr, p.tpr);
    std::sort(pts.begin(), pts.end());
    double area = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        area += (pts[i].first - pts[i - 1].first) * (pts[i].second + pts[i - 1].second) / 2.0;
    }
    result.auc = area;
    return result;
}

std::vector<SweepRow> threshold_sweep(std::span<const std::uint8_t> labels, std::span<const double> scores,
                                      double step) {
    check_lengths(labels, scores);
    if (labels.empty()) throw InputError("threshold sweep over an empty set");
    std::vector<SweepRow> rows;
    for (double t : threshold_grid(step)) {
        const auto c = confusion(labels, scores, t);
        const auto m = metrics(c, 1.0);
        rows.push_back({t, m.accuracy, m.precision, m.recall, m.f_beta, f_beta_score(m.precision, m.recall, 2.0)});
    }
    return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    out << "threshold,accuracy,precision,recall,f1,f2\n";
    char buf[160];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.6f,%.6f,%.6f,%.6f,%.6f,%.6f\n", r.threshold, r.accuracy, r.precision,
                      r.recall, r.f1, r.f2);
        out << buf;
    }
}

const SweepRow& best_f2(const std::vector<SweepRow>& rows) {
    if (rows.empty()) throw std::invalid_argument("empty sweep");
    return *std::max_element(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.f2 < b.f2; });
}

}  // namespace ecokg
