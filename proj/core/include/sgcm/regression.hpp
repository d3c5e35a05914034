#pragma once

#include <vector>

#include "sgcm/kernels.hpp"
#include "sgcm/rng.hpp"

namespace sgcm {

/// Learner configuration for the score-on-Z regressions.  oracle_mean is a
/// test-only learner that predicts the training mean.
struct RegressorSpec {
    enum class Kind { kernel_ridge, gradient_boosted_trees, oracle_mean };

    Kind kind = Kind::gradient_boosted_trees;
    std::vector<double> krr_lambda_grid = default_lambda_grid();
    int gbt_rounds = 200;
    int gbt_depth = 2;
    double gbt_learning_rate = 0.1;
    double gbt_subsample = 1.0;

    static std::vector<double> default_lambda_grid();
    void validate() const;
};

/// Residual scores over the statistic sample I1 (n1 x P).
struct ResidualScores {
    Matrix values;
};

/// Z passed to cross-fitting either as a feature matrix (tree learner) or as
/// a kernel Gram matrix over I1 (kernel ridge).
struct ZRepresentation {
    enum class Kind { features, gram };

    Kind kind = Kind::features;
    Matrix m;

    static ZRepresentation features(Matrix z);
    static ZRepresentation gram(const GramMatrix& g);
};

/// Kernel ridge regression with centered targets:
/// predictions = Kz_eval_rows (Kz_train + lambda I)^{-1} (y - ybar) + ybar.
Vector krr_fit_predict(const GramMatrix& Kz_train, const Vector& y,
                       const Matrix& Kz_eval_rows, double lambda);

/// Squared-loss gradient boosting with depth-limited exact-split regression
/// trees.  Round 0 predicts the target mean; every later round adds
/// learning_rate times a tree fit to the residuals.  Deterministic given the
/// rng seed (the rng is consumed only when gbt_subsample < 1).
Vector gbt_fit_predict(const Matrix& Z_train, const Vector& y, const Matrix& Z_eval,
                       const RegressorSpec& spec, Rng& rng);

/// Cross-fitted residuals: one random fold partition shared by all
/// coordinates; each fold is predicted by a model fit on its complement and
/// the residual is score minus prediction.  For the kernel-ridge learner the
/// lambda is chosen per coordinate and fold by grid search over the
/// cross-fitted MSE inside the training complement (never touching the
/// held-out fold).  GBT substreams are derived from the rng seed per
/// (coordinate, fold), so callers must hand distinct rngs to distinct
/// variables.
ResidualScores cross_fit_residuals(const Matrix& scores, const ZRepresentation& z,
                                   const RegressorSpec& spec, int folds, Rng& rng);

/// The fold partition used by cross_fit_residuals, exposed for bookkeeping
/// tests: entry i is the fold index of observation i.
std::vector<int> draw_fold_assignment(int n1, int folds, Rng& rng);

}  // namespace sgcm
