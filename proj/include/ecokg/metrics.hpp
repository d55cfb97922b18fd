#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace ecokg {

struct ConfusionCounts {
    std::size_t tp = 0;
    std::size_t tn = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;

    std::size_t total() const noexcept { return tp + tn + fp + fn; }
    friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

/// Predicted positive iff score > threshold.
ConfusionCounts confusion(std::span<const std::uint8_t> labels, std::span<const double> scores, double threshold);

struct Metrics {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f_beta = 0.0;
    /// Set when any quotient had a zero denominator (that value is reported as 0).
    bool degenerate = false;
};

/// (1 + b^2) P R / (b^2 P + R); 0 when P = R = 0.
double f_beta_score(double precision, double recall, double beta);

Metrics metrics(const ConfusionCounts& counts, double beta = 1.0);

struct RocPoint {
    double threshold = 0.0;
    double fpr = 0.0;
    double tpr = 0.0;
};

struct RocResult {
    std::vector<RocPoint> curve;  // one point per threshold, thresholds descending
    double auc = 0.0;
};

/// Thresholds 0, step, 2*step, ..., 1 (1 is always included). Throws for step outside (0, 1].
std::vector<double> threshold_grid(double step);

/// ROC over the threshold grid; AUC by trapezoids over FPR with (0,0) and (1,1) anchors.
/// Throws InputError unless both classes are present.
RocResult roc_auc(std::span<const std::uint8_t> labels, std::span<const double> scores, double step = 0.01);

struct SweepRow {
    double threshold = 0.0;
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double f2 = 0.0;
};

/// One row per grid threshold, ascending.
std::vector<SweepRow> threshold_sweep(std::span<const std::uint8_t> labels, std::span<const double> scores,
                                      double step = 0.01);

/// Header `threshold,accuracy,precision,recall,f1,f2`, six decimals.
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

/// Row with the largest F2 (first such row on ties).
const SweepRow& best_f2(const std::vector<SweepRow>& rows);

}  // namespace ecokg
