#ifndef OUD_BASELINES_HPP
#define OUD_BASELINES_HPP

#include <cstdint>
#include <map>
#include <vector>

#include "oud/vocab_embed.hpp"

// Bag-of-words featurization and the classical baselines: logistic
// regression, multinomial naive Bayes, and a linear SVM. All trainers are
// deterministic, dependency-free, and documented where a third-party default
// would otherwise apply.

namespace oud {

struct BowVector {
    std::map<std::size_t, std::size_t> counts; // vocab index -> count >= 1
};

enum class LinearKind { LogisticRegression, LinearSvm };

struct LinearModel {
    Vec weights; // length v
    double bias = 0.0;
    LinearKind kind = LinearKind::LogisticRegression;
};

struct NbModel {
    double log_prior[2] = {0.0, 0.0};
    std::vector<Vec> log_likelihood; // [2][v]
    double alpha = 1.0;              // Laplace smoothing
};

struct LogregOptions {
    double lambda = 1e-4;     // L2 penalty (lambda/2 * ||w||^2, bias unpenalized)
    double grad_tol = 1e-6;   // stop when gradient infinity-norm drops below
    std::size_t max_iter = 5000;
};

struct SvmOptions {
    double lambda = 1e-4;
    std::size_t epochs = 2000;
    std::uint64_t seed = 42;
};

// Counts of valid (unmasked) tokens; <END> never counted; unknown tokens
// counted under <UNK>.
BowVector bow_featurize(const TokenSeq& seq, const Vocabulary& vocab);

using BowDataset = std::vector<std::pair<BowVector, int>>;

// Full-batch gradient descent on mean BCE + L2, with step-halving line search
// from step 1.0 so the loss is nonincreasing. Zero initialization.
LinearModel train_logreg(const BowDataset& data, std::size_t v, const LogregOptions& opts = {});

// Multinomial NB with Laplace smoothing: (count(w,c)+a) / (total(c)+a*v).
NbModel train_nb(const BowDataset& data, std::size_t v, double alpha = 1.0);

// Pegasos-style subgradient descent on mean hinge loss + (lambda/2)||w||^2,
// step 1/(lambda*t), seeded shuffle per epoch. Bias unregularized.
LinearModel train_linear_svm(const BowDataset& data, std::size_t v, const SvmOptions& opts = {});

// Linear models: w.x + b >= 0 -> 1 (equivalent to p >= 0.5 for logistic).
// NB: argmax log posterior, ties -> 1.
int baseline_predict(const LinearModel& model, const BowVector& x);
int baseline_predict(const NbModel& model, const BowVector& x);

double logreg_probability(const LinearModel& model, const BowVector& x);

// Mean BCE + L2 objective (exposed for the monotonic-loss property test).
double logreg_loss(const LinearModel& model, const BowDataset& data, double lambda);

} // namespace oud

#endif
