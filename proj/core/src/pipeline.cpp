#include "sgcm/pipeline.hpp"

#include <cmath>
#include <string>

namespace sgcm {

namespace {

// Substream tags of the master seed; fixed so results are reproducible
// run to run and independent of evaluation order.
constexpr std::uint64_t kStreamSplit = 1;
constexpr std::uint64_t kStreamFoldsX = 2;
constexpr std::uint64_t kStreamFoldsY = 3;
constexpr std::uint64_t kStreamBootstrap = 4;

KernelSpec kernel_for(const TestConfig& cfg, double gamma) {
    KernelSpec spec;
    spec.family = cfg.kernel_family;
    spec.q = cfg.kernel_q;
    spec.gamma = gamma;
    spec.c = cfg.rq_c;
    spec.alpha = cfg.rq_alpha;
    return spec;
}

double bandwidth_for(const char* variable, double override_gamma, const Matrix& block) {
    if (override_gamma > 0.0) return override_gamma;
    try {
        return median_heuristic(SemimetricMatrix(block));
    } catch (const DegenerateDistancesError&) {
        throw DegenerateGramError(std::string("variable ") + variable +
                                  " has a degenerate distance distribution (constant sample?)");
    }
}

struct VariableScores {
    Matrix scores;  // n1 x P
    int P = 0;
    double fve = 0.0;
    bool gap_warning = false;
};

/// Basis-sample eigensystem of one endogenous variable and its eigenfunction
/// scores on I1, truncated by FVE.
VariableScores spectral_scores(const char* name, const Matrix& D, const KernelSpec& spec,
                               const SplitPlan& split, double tau, double floor) {
    const int n2 = static_cast<int>(split.I2.size());
    const GramMatrix G(cross_kernel(spec, D, split.I2, split.I2));
    const EigenSystem es = eigensystem_from_gram(G, n2, floor);

    // FVE over the full positive spectrum (the truncation denominator of the
    // population identity), clamped to the retained pairs.
    int n_pos = 0;
    while (n_pos < static_cast<int>(es.kappa_all.size()) && es.kappa_all[n_pos] > 0.0) ++n_pos;
    Vector lambda_pos(n_pos);
    for (int p = 0; p < n_pos; ++p) lambda_pos[p] = es.kappa_all[p] / static_cast<double>(n2);

    TruncationChoice tc = select_truncation_fve(lambda_pos, tau);
    VariableScores out;
    out.P = std::min(tc.P, es.retained());
    out.fve = tc.fve_achieved;
    if (out.P < n_pos) {
        const double gap = lambda_pos[out.P - 1] - lambda_pos[out.P];
        out.gap_warning = gap < 1.0 / std::sqrt(static_cast<double>(n2));
    }

    const Matrix cross = cross_kernel(spec, D, split.I1, split.I2);
    out.scores = evaluate_scores(es, cross).leftCols(out.P);
    if (!out.scores.allFinite()) {
        throw NumericalError(std::string("non-finite eigenfunction scores for ") + name);
    }
    return out;
}

}  // namespace

void TestConfig::validate() const {
    if (!(frac2 > 0.0) || frac2 > 0.5) throw ParameterError("frac2 must lie in (0, 0.5]");
    if (!(tau_x > 0.0) || tau_x > 1.0 || !(tau_y > 0.0) || tau_y > 1.0) {
        throw ParameterError("tau must lie in (0, 1]");
    }
    if (folds < 2) throw ParameterError("folds must be >= 2");
    if (bootstrap_B < 1) throw ParameterError("bootstrap_B must be >= 1");
    if (!(alpha > 0.0) || !(alpha < 1.0)) throw ParameterError("alpha must lie in (0, 1)");
    if (!(kernel_q > 0.0) || kernel_q > 2.0) throw ParameterError("kernel q must lie in (0, 2]");
    if (!(eig_floor >= 0.0)) throw ParameterError("eig_floor must be nonnegative");
    if (gamma_x < 0.0 || gamma_y < 0.0 || gamma_z < 0.0) {
        throw ParameterError("gamma overrides must be nonnegative (0 = median heuristic)");
    }
}

TestResult run_test(const ObjectSample& X, const ObjectSample& Y, const ObjectSample& Z,
                    const TestConfig& config) {
    config.validate();
    const int n = X.n();
    if (Y.n() != n || Z.n() != n) throw ShapeError("X, Y, Z sample sizes disagree");
    if (n < 20) throw SampleSizeError("run_test needs n >= 20");

    const Matrix DX = pairwise_distances(X).entries();
    const Matrix DY = pairwise_distances(Y).entries();
    const Matrix DZ = pairwise_distances(Z).entries();

    const Rng master(config.seed);
    Rng split_rng = master.spawn(kStreamSplit);
    const SplitPlan split = split_sample(n, config.frac2, split_rng);
    const int n1 = static_cast<int>(split.I1.size());

    Diagnostics diag;
    diag.n = n;
    diag.n1 = n1;
    diag.n2 = static_cast<int>(split.I2.size());

    // Bandwidths: X and Y from the full pairwise distances (the kernels act
    // on both subsamples), Z from the I1 block only (the statistic sample).
    diag.gamma_x = bandwidth_for("X", config.gamma_x, DX);
    diag.gamma_y = bandwidth_for("Y", config.gamma_y, DY);
    const Matrix DZ11 = submatrix(DZ, split.I1, split.I1);
    diag.gamma_z = bandwidth_for("Z", config.gamma_z, DZ11);

    const KernelSpec spec_x = kernel_for(config, diag.gamma_x);
    const KernelSpec spec_y = kernel_for(config, diag.gamma_y);
    const KernelSpec spec_z = kernel_for(config, diag.gamma_z);

    const VariableScores vx =
        spectral_scores("X", DX, spec_x, split, config.tau_x, config.eig_floor);
    const VariableScores vy =
        spectral_scores("Y", DY, spec_y, split, config.tau_y, config.eig_floor);
    diag.P = vx.P;
    diag.Q = vy.P;
    diag.fve_x = vx.fve;
    diag.fve_y = vy.fve;
    diag.gap_warning_x = vx.gap_warning;
    diag.gap_warning_y = vy.gap_warning;

    const GramMatrix Kz(cross_kernel(spec_z, DZ, split.I1, split.I1));

    RegressorSpec learner = config.regressor;
    switch (config.learner) {
        case LearnerChoice::automatic:
            learner.kind = Z.has_features() ? RegressorSpec::Kind::gradient_boosted_trees
                                            : RegressorSpec::Kind::kernel_ridge;
            break;
        case LearnerChoice::kernel_ridge:
            learner.kind = RegressorSpec::Kind::kernel_ridge;
            break;
        case LearnerChoice::gradient_boosted_trees:
            if (!Z.has_features()) {
                throw ParameterError("GBT learner requires Euclidean Z features");
            }
            learner.kind = RegressorSpec::Kind::gradient_boosted_trees;
            break;
    }

    ZRepresentation zrep;
    if (learner.kind == RegressorSpec::Kind::gradient_boosted_trees) {
        std::vector<int> all_cols(static_cast<std::size_t>(Z.points.cols()));
        for (std::size_t j = 0; j < all_cols.size(); ++j) all_cols[j] = static_cast<int>(j);
        zrep = ZRepresentation::features(submatrix(Z.points, split.I1, all_cols));
    } else {
        zrep = ZRepresentation::gram(Kz);
    }

    Rng rng_x = master.spawn(kStreamFoldsX);
    Rng rng_y = master.spawn(kStreamFoldsY);
    const ResidualScores rX = cross_fit_residuals(vx.scores, zrep, learner, config.folds, rng_x);
    const ResidualScores rY = cross_fit_residuals(vy.scores, zrep, learner, config.folds, rng_y);
    diag.learner_mse_x = rX.values.squaredNorm() / static_cast<double>(rX.values.size());
    diag.learner_mse_y = rY.values.squaredNorm() / static_cast<double>(rY.values.size());

    const CoreMatrix A = core_matrix(rX, rY, Kz);

    TestResult result;
    result.diagnostics = diag;
    result.statistic = sgcm_statistic(A);

    const std::vector<double> reps = bootstrap_replicates(
        A, config.bootstrap_B, config.law, master.spawn(kStreamBootstrap), config.workers);
    result.boot_quantile = bootstrap_quantile(reps, config.alpha);
    long count_ge = 0;
    for (double t : reps) {
        if (t >= result.statistic) ++count_ge;
    }
    result.p_value = (1.0 + static_cast<double>(count_ge)) /
                     (static_cast<double>(reps.size()) + 1.0);
    result.reject = result.statistic > result.boot_quantile;
    return result;
}

}  // namespace sgcm
