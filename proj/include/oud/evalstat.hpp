#ifndef OUD_EVALSTAT_HPP
#define OUD_EVALSTAT_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "oud/numkit.hpp"

// Metrics, stratified data splitting, repeated k-fold cross-validation, and
// the Wilcoxon signed-rank test.

namespace oud {

struct ConfusionMatrix {
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
    std::size_t total() const { return tp + fp + fn + tn; }
};

struct MetricsReport {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

// Positive class is label 1.
ConfusionMatrix confusion(const std::vector<int>& predictions, const std::vector<int>& labels);

// Zero-denominator convention: precision/recall/f1 are 0 when undefined.
MetricsReport metrics(const ConfusionMatrix& cm);

struct SplitResult {
    std::vector<std::size_t> train, val, test;
};

// Stratified 56/24/20 split, deterministic per seed.
SplitResult split_train_val_test(const std::vector<int>& labels, std::uint64_t seed);

struct FoldPlan {
    std::size_t k = 0;
    std::vector<std::size_t> fold_of; // per-example fold id
    std::uint64_t seed = 0;

    std::vector<std::size_t> test_indices(std::size_t fold) const;
    std::vector<std::size_t> train_indices(std::size_t fold) const;
};

// Class-stratified folds: per-class round-robin after a seeded shuffle, with
// a cursor carried across classes so overall fold sizes differ by at most 1.
// Throws DataError when some training fold would be single-class.
FoldPlan make_fold_plan(const std::vector<int>& labels, std::size_t k, std::uint64_t seed);

struct FoldMetrics {
    std::size_t repeat = 0;
    std::size_t fold = 0;
    ConfusionMatrix cm;
    MetricsReport report;
};

struct MetricSummary {
    double mean = 0.0;
    double stddev = 0.0; // sample standard deviation
};

struct CvResult {
    std::vector<FoldMetrics> folds; // ordered by (repeat, fold)
    MetricSummary accuracy, precision, recall, f1;
};

// Trains on the given indices, returns a predictor over example indices.
using Trainer =
    std::function<std::function<int(std::size_t)>(const std::vector<std::size_t>& train_idx)>;

// repeats x k-fold CV; fold plans are derived from (seed, repeat) so every
// model compared under the same seed sees identical folds. jobs > 1 trains
// folds concurrently; results are merged by (repeat, fold) key.
CvResult cross_validate(const Trainer& trainer, const std::vector<int>& labels, std::size_t k,
                        std::size_t repeats, std::uint64_t seed, std::size_t jobs = 1);

enum class WilcoxonMethod { Exact, NormalApprox };

struct WilcoxonResult {
    double statistic = 0.0; // W = min(W+, W-)
    double w_plus = 0.0;
    double w_minus = 0.0;
    std::size_t n_effective = 0; // pairs left after dropping zero differences
    double p_value = 1.0;        // two-sided, in (0, 1]
    WilcoxonMethod method = WilcoxonMethod::Exact;
};

// Two-sided signed-rank test: zero differences dropped, average ranks for
// ties, exact distribution (all 2^n sign assignments) for n_effective <= 25,
// otherwise normal approximation with tie correction and 0.5 continuity
// correction. Throws DataError when every difference is zero.
WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& a, const std::vector<double>& b);

} // namespace oud

#endif
