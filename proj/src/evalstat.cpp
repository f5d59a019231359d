#include "oud/evalstat.hpp"

#include <algorithm>
#include <cmath>
#include <future>

namespace oud {

ConfusionMatrix confusion(const std::vector<int>& predictions, const std::vector<int>& labels) {
    if (predictions.size() != labels.size()) {
        throw ShapeError("confusion: " + std::to_string(predictions.size()) + " predictions vs " +
                         std::to_string(labels.size()) + " labels");
    }
    if (predictions.empty()) throw DataError("confusion: empty input");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        if (labels[i] == 1) {
            predictions[i] == 1 ? ++cm.tp : ++cm.fn;
        } else {
            predictions[i] == 1 ? ++cm.fp : ++cm.tn;
        }
    }
    return cm;
}

MetricsReport metrics(const ConfusionMatrix& cm) {
    MetricsReport r;
    const double total = static_cast<double>(cm.total());
    if (total == 0.0) throw DataError("metrics: empty confusion matrix");
    r.accuracy = static_cast<double>(cm.tp + cm.tn) / total;
    r.precision = (cm.tp + cm.fp) > 0 ? static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fp) : 0.0;
    r.recall = (cm.tp + cm.fn) > 0 ? static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fn) : 0.0;
    r.f1 = (r.precision + r.recall) > 0.0 ? 2.0 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
    return r;
}

namespace {

// Per-class index lists, shuffled deterministically.
std::vector<std::vector<std::size_t>> shuffled_class_indices(const std::vector<int>& labels,
                                                             RngState& rng) {
    std::vector<std::vector<std::size_t>> by_class(2);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] != 0 && labels[i] != 1) {
            throw DataError("labels must be 0 or 1 (got " + std::to_string(labels[i]) + ")");
        }
        by_class[static_cast<std::size_t>(labels[i])].push_back(i);
    }
    for (auto& cls : by_class) {
        for (std::size_t i = cls.size(); i > 1; --i) {
            std::swap(cls[i - 1], cls[rng.next_below(i)]);
        }
    }
    return by_class;
}

} // namespace

SplitResult split_train_val_test(const std::vector<int>& labels, std::uint64_t seed) {
    if (labels.size() < 10) throw DataError("split_train_val_test: need at least 10 examples");
    RngState rng = RngState(seed).fork("split");
    auto by_class = shuffled_class_indices(labels, rng);
    if (by_class[0].empty() || by_class[1].empty()) {
        throw DataError("split_train_val_test: a class is absent");
    }

    SplitResult out;
    const double fractions[3] = {0.56, 0.24, 0.20};
    for (const auto& cls : by_class) {
        const double n = static_cast<double>(cls.size());
        // Largest-remainder allocation so per-class counts sum exactly.
        std::size_t counts[3];
        double remainders[3];
        std::size_t assigned = 0;
        for (int i = 0; i < 3; ++i) {
            const double exact = fractions[i] * n;
            counts[i] = static_cast<std::size_t>(exact);
            remainders[i] = exact - static_cast<double>(counts[i]);
            assigned += counts[i];
        }
        while (assigned < cls.size()) {
            int best = 0;
            for (int i = 1; i < 3; ++i) {
                if (remainders[i] > remainders[best]) best = i;
            }
            ++counts[best];
            remainders[best] = -1.0;
            ++assigned;
        }
        std::size_t pos = 0;
        for (std::size_t i = 0; i < counts[0]; ++i) out.train.push_back(cls[pos++]);
        for (std::size_t i = 0; i < counts[1]; ++i) out.val.push_back(cls[pos++]);
        for (std::size_t i = 0; i < counts[2]; ++i) out.test.push_back(cls[pos++]);
    }
    std::sort(out.train.begin(), out.train.end());
    std::sort(out.val.begin(), out.val.end());
    std::sort(out.test.begin(), out.test.end());
    return out;
}

std::vector<std::size_t> FoldPlan::test_indices(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < fold_of.size(); ++i) {
        if (fold_of[i] == fold) out.push_back(i);
    }
    return out;
}

std::vector<std::size_t> FoldPlan::train_indices(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < fold_of.size(); ++i) {
        if (fold_of[i] != fold) out.push_back(i);
    }
    return out;
}

FoldPlan make_fold_plan(const std::vector<int>& labels, std::size_t k, std::uint64_t seed) {
    if (k < 2) throw ConfigError("make_fold_plan: k must be >= 2");
    if (k > labels.size()) {
        throw ConfigError("make_fold_plan: k=" + std::to_string(k) + " exceeds corpus size " +
                          std::to_string(labels.size()));
    }
    RngState rng = RngState(seed).fork("folds");
    auto by_class = shuffled_class_indices(labels, rng);

    FoldPlan plan;
    plan.k = k;
    plan.seed = seed;
    plan.fold_of.assign(labels.size(), 0);

    // Round-robin with a cursor carried across classes keeps overall fold
    // sizes within 1 of each other while staying stratified per class.
    std::size_t cursor = 0;
    for (const auto& cls : by_class) {
        for (std::size_t idx : cls) {
            plan.fold_of[idx] = cursor % k;
            ++cursor;
        }
    }

    // Every training fold (the complement of one fold) must keep both classes.
    for (std::size_t fold = 0; fold < k; ++fold) {
        std::size_t pos = 0, neg = 0;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (plan.fold_of[i] == fold) continue;
            labels[i] == 1 ? ++pos : ++neg;
        }
        if (pos == 0 || neg == 0) {
            throw DataError("make_fold_plan: fold " + std::to_string(fold) +
                            "'s training split lost a class (k too large for the minority class)");
        }
    }
    return plan;
}

CvResult cross_validate(const Trainer& trainer, const std::vector<int>& labels, std::size_t k,
                        std::size_t repeats, std::uint64_t seed, std::size_t jobs) {
    if (repeats == 0) throw ConfigError("cross_validate: repeats must be >= 1");
    CvResult result;
    result.folds.resize(repeats * k);

    auto run_fold = [&](std::size_t repeat, std::size_t fold, const FoldPlan& plan) {
        const auto train_idx = plan.train_indices(fold);
        const auto test_idx = plan.test_indices(fold);
        auto predictor = trainer(train_idx);
        std::vector<int> preds, truth;
        preds.reserve(test_idx.size());
        truth.reserve(test_idx.size());
        for (std::size_t idx : test_idx) {
            preds.push_back(predictor(idx));
            truth.push_back(labels[idx]);
        }
        FoldMetrics fm;
        fm.repeat = repeat;
        fm.fold = fold;
        fm.cm = confusion(preds, truth);
        fm.report = metrics(fm.cm);
        result.folds[repeat * k + fold] = fm;
    };

    for (std::size_t repeat = 0; repeat < repeats; ++repeat) {
        const FoldPlan plan =
            make_fold_plan(labels, k, RngState(seed).fork("cv:repeat:" + std::to_string(repeat)).state);
        if (jobs <= 1) {
            for (std::size_t fold = 0; fold < k; ++fold) run_fold(repeat, fold, plan);
        } else {
            std::vector<std::future<void>> pending;
            for (std::size_t fold = 0; fold < k; ++fold) {
                pending.push_back(std::async(std::launch::async, run_fold, repeat, fold, plan));
                if (pending.size() == jobs) {
                    for (auto& f : pending) f.get();
                    pending.clear();
                }
            }
            for (auto& f : pending) f.get();
        }
    }

    auto summarize = [&result](auto field) {
        MetricSummary s;
        double sum = 0.0;
        for (const auto& fm : result.folds) sum += fm.report.*field;
        const double n = static_cast<double>(result.folds.size());
        s.mean = sum / n;
        if (result.folds.size() > 1) {
            double sq = 0.0;
            for (const auto& fm : result.folds) {
                const double d = fm.report.*field - s.mean;
                sq += d * d;
            }
            s.stddev = std::sqrt(sq / (n - 1.0));
        }
        return s;
    };
    result.accuracy = summarize(&MetricsReport::accuracy);
    result.precision = summarize(&MetricsReport::precision);
    result.recall = summarize(&MetricsReport::recall);
    result.f1 = summarize(&MetricsReport::f1);
    return result;
}

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

} // namespace

WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) {
        throw ShapeError("wilcoxon_signed_rank: sample sizes differ (" + std::to_string(a.size()) +
                         " vs " + std::to_string(b.size()) + ")");
    }
    if (a.empty()) throw DataError("wilcoxon_signed_rank: empty samples");

    std::vector<double> diffs;
    diffs.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        if (d != 0.0) diffs.push_back(d);
    }
    if (diffs.empty()) {
        throw DataError("wilcoxon_signed_rank: all differences are zero (degenerate sample)");
    }
    const std::size_t n = diffs.size();

    // Average ranks of |d| with ties sharing the mean rank.
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&diffs](std::size_t x, std::size_t y) {
        return std::fabs(diffs[x]) < std::fabs(diffs[y]);
    });
    std::vector<double> rank(n, 0.0);
    std::vector<std::size_t> tie_sizes;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && std::fabs(diffs[order[j]]) == std::fabs(diffs[order[i]])) ++j;
        const double avg = 0.5 * static_cast<double>(i + 1 + j); // mean of ranks i+1..j
        for (std::size_t m = i; m < j; ++m) rank[order[m]] = avg;
        tie_sizes.push_back(j - i);
        i = j;
    }

    WilcoxonResult res;
    res.n_effective = n;
    for (std::size_t i = 0; i < n; ++i) {
        (diffs[i] > 0.0 ? res.w_plus : res.w_minus) += rank[i];
    }
    res.statistic = std::min(res.w_plus, res.w_minus);
    const double w_total = res.w_plus + res.w_minus; // n(n+1)/2

    if (n <= 25) {
        res.method = WilcoxonMethod::Exact;
        // Distribution of W+ over all sign assignments via subset-sum counting
        // on doubled ranks (average ranks are multiples of 1/2).
        std::vector<std::size_t> r2(n);
        std::size_t total2 = 0;
        for (std::size_t i = 0; i < n; ++i) {
            r2[i] = static_cast<std::size_t>(std::llround(2.0 * rank[i]));
            total2 += r2[i];
        }
        std::vector<double> count(total2 + 1, 0.0);
        count[0] = 1.0;
        std::size_t reach = 0;
        for (std::size_t i = 0; i < n; ++i) {
            reach += r2[i];
            for (std::size_t s = reach + 1; s-- > r2[i];) {
                count[s] += count[s - r2[i]];
            }
        }
        const double w2 = 2.0 * res.statistic;
        const std::size_t lo_cut = static_cast<std::size_t>(std::llround(w2));
        if (2.0 * res.statistic >= static_cast<double>(total2) - 2.0 * res.statistic) {
            res.p_value = 1.0; // min(W+, W-) can never exceed half the total
        } else {
            double low = 0.0, high = 0.0;
            for (std::size_t s = 0; s <= total2; ++s) {
                if (s <= lo_cut) low += count[s];
                if (static_cast<double>(s) >= static_cast<double>(total2) - w2) high += count[s];
            }
            res.p_value = (low + high) * std::pow(0.5, static_cast<double>(n));
        }
    } else {
        res.method = WilcoxonMethod::NormalApprox;
        const double nd = static_cast<double>(n);
        const double mu = nd * (nd + 1.0) / 4.0;
        double tie_term = 0.0;
        for (std::size_t t : tie_sizes) {
            const double td = static_cast<double>(t);
            tie_term += td * td * td - td;
        }
        const double var = nd * (nd + 1.0) * (2.0 * nd + 1.0) / 24.0 - tie_term / 48.0;
        if (var <= 0.0) {
            throw DataError("wilcoxon_signed_rank: zero variance (all differences tied)");
        }
        const double z = (res.statistic - mu + 0.5) / std::sqrt(var);
        res.p_value = std::min(1.0, 2.0 * normal_cdf(z));
    }
    if (res.p_value <= 0.0) res.p_value = std::pow(0.5, static_cast<double>(n));
    (void)w_total;
    return res;
}

} // namespace oud
