#include "oud/baselines.hpp"

#include <algorithm>
#include <cmath>

namespace oud {

namespace {

void require_both_classes(const BowDataset& data, const char* who) {
    bool pos = false, neg = false;
    for (const auto& [x, y] : data) {
        (void)x;
        if (y == 1) pos = true;
        else neg = true;
    }
    if (!pos || !neg) throw DataError(std::string(who) + ": training data has a single class");
}

double score(const LinearModel& m, const BowVector& x) {
    double s = m.bias;
    for (const auto& [idx, cnt] : x.counts) {
        s += m.weights[idx] * static_cast<double>(cnt);
    }
    return s;
}

} // namespace

BowVector bow_featurize(const TokenSeq& seq, const Vocabulary& vocab) {
    BowVector bow;
    for (std::size_t t = 0; t < seq.tokens.size(); ++t) {
        if (!seq.mask[t]) continue;
        const std::size_t idx = vocab.lookup(seq.tokens[t]);
        if (idx == vocab.pad_index()) continue;
        ++bow.counts[idx];
    }
    return bow;
}

double logreg_loss(const LinearModel& model, const BowDataset& data, double lambda) {
    double loss = 0.0;
    for (const auto& [x, y] : data) {
        const double z = score(model, x);
        // log(1 + exp(-|z|)) form avoids overflow
        const double margin = (y == 1 ? z : -z);
        loss += margin >= 0.0 ? std::log1p(std::exp(-margin)) : -margin + std::log1p(std::exp(margin));
    }
    loss /= static_cast<double>(data.size());
    double w2 = 0.0;
    for (double w : model.weights) w2 += w * w;
    return loss + 0.5 * lambda * w2;
}

LinearModel train_logreg(const BowDataset& data, std::size_t v, const LogregOptions& opts) {
    require_both_classes(data, "train_logreg");
    LinearModel model;
    model.kind = LinearKind::LogisticRegression;
    model.weights.assign(v, 0.0);
    model.bias = 0.0;

    const double n_inv = 1.0 / static_cast<double>(data.size());
    Vec grad_w(v, 0.0);

    double loss = logreg_loss(model, data, opts.lambda);
    for (std::size_t iter = 0; iter < opts.max_iter; ++iter) {
        std::fill(grad_w.begin(), grad_w.end(), 0.0);
        double grad_b = 0.0;
        for (const auto& [x, y] : data) {
            const double p = 1.0 / (1.0 + std::exp(-score(model, x)));
            const double err = (p - static_cast<double>(y)) * n_inv;
            for (const auto& [idx, cnt] : x.counts) {
                grad_w[idx] += err * static_cast<double>(cnt);
            }
            grad_b += err;
        }
        double grad_inf = std::fabs(grad_b);
        for (std::size_t i = 0; i < v; ++i) {
            grad_w[i] += opts.lambda * model.weights[i];
            grad_inf = std::max(grad_inf, std::fabs(grad_w[i]));
        }
        if (grad_inf < opts.grad_tol) break;

        // Backtracking: halve the step until the objective does not increase.
        double step = 1.0;
        LinearModel trial = model;
        for (;;) {
            for (std::size_t i = 0; i < v; ++i) trial.weights[i] = model.weights[i] - step * grad_w[i];
            trial.bias = model.bias - step * grad_b;
            const double trial_loss = logreg_loss(trial, data, opts.lambda);
            if (trial_loss <= loss || step < 1e-12) {
                model.weights = trial.weights;
                model.bias = trial.bias;
                loss = trial_loss;
                break;
            }
            step *= 0.5;
        }
    }
    return model;
}

NbModel train_nb(const BowDataset& data, std::size_t v, double alpha) {
    require_both_classes(data, "train_nb");
    if (alpha <= 0.0) throw ConfigError("train_nb: smoothing alpha must be positive");

    NbModel model;
    model.alpha = alpha;
    model.log_likelihood.assign(2, Vec(v, 0.0));

    std::size_t class_docs[2] = {0, 0};
    std::vector<double> word_count[2] = {std::vector<double>(v, 0.0), std::vector<double>(v, 0.0)};
    double total[2] = {0.0, 0.0};
    for (const auto& [x, y] : data) {
        ++class_docs[y];
        for (const auto& [idx, cnt] : x.counts) {
            word_count[y][idx] += static_cast<double>(cnt);
            total[y] += static_cast<double>(cnt);
        }
    }
    const double n = static_cast<double>(data.size());
    for (int c = 0; c < 2; ++c) {
        model.log_prior[c] = std::log(static_cast<double>(class_docs[c]) / n);
        const double denom = total[c] + alpha * static_cast<double>(v);
        for (std::size_t i = 0; i < v; ++i) {
            model.log_likelihood[c][i] = std::log((word_count[c][i] + alpha) / denom);
        }
    }
    return model;
}

LinearModel train_linear_svm(const BowDataset& data, std::size_t v, const SvmOptions& opts) {
    require_both_classes(data, "train_linear_svm");
    LinearModel model;
    model.kind = LinearKind::LinearSvm;
    model.weights.assign(v, 0.0);
    model.bias = 0.0;

    RngState rng = RngState(opts.seed).fork("svm:shuffle");
    std::vector<std::size_t> order(data.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    // w is kept as scale * base so the (1 - eta*lambda) shrink is O(1).
    Vec base(v, 0.0);
    double scale = 1.0;
    double bias = 0.0;
    auto fold = [&]() {
        for (double& w : base) w *= scale;
        scale = 1.0;
    };

    std::size_t t = 0;
    for (std::size_t epoch = 0; epoch < opts.epochs; ++epoch) {
        for (std::size_t i = order.size(); i > 1; --i) {
            std::swap(order[i - 1], order[rng.next_below(i)]);
        }
        for (std::size_t idx : order) {
            ++t;
            const double eta = 1.0 / (opts.lambda * static_cast<double>(t));
            const auto& [x, label] = data[idx];
            const double y = label == 1 ? 1.0 : -1.0;
            double s = bias;
            for (const auto& [fi, cnt] : x.counts) {
                s += scale * base[fi] * static_cast<double>(cnt);
            }
            const double margin = y * s;
            // w <- (1 - eta*lambda) w  [+ eta*y*x on hinge violation]
            const double shrink = 1.0 - eta * opts.lambda;
            if (shrink == 0.0) {
                std::fill(base.begin(), base.end(), 0.0);
                scale = 1.0;
            } else {
                scale *= shrink;
                if (scale < 1e-100) fold();
            }
            if (margin < 1.0) {
                for (const auto& [fi, cnt] : x.counts) {
                    base[fi] += eta * y * static_cast<double>(cnt) / scale;
                }
                bias += eta * y;
            }
        }
    }
    fold();
    model.weights = std::move(base);
    model.bias = bias;
    return model;
}

int baseline_predict(const LinearModel& model, const BowVector& x) {
    return score(model, x) >= 0.0 ? 1 : 0;
}

int baseline_predict(const NbModel& model, const BowVector& x) {
    double log_post[2];
    for (int c = 0; c < 2; ++c) {
        log_post[c] = model.log_prior[c];
        for (const auto& [idx, cnt] : x.counts) {
            log_post[c] += static_cast<double>(cnt) * model.log_likelihood[c][idx];
        }
    }
    return log_post[1] >= log_post[0] ? 1 : 0;
}

double logreg_probability(const LinearModel& model, const BowVector& x) {
    return 1.0 / (1.0 + std::exp(-score(model, x)));
}

} // namespace oud
