#pragma once

#include "sgcm/spectral.hpp"
#include "sgcm/statistic.hpp"

namespace sgcm {

enum class LearnerChoice { automatic, kernel_ridge, gradient_boosted_trees };

/// Full configuration of one conditional-independence test run.  Defaults
/// mirror the simulation settings: 20% basis split, tau = 0.80, three folds,
/// B = 2000 bootstrap replicates at level 0.05 with Gaussian multipliers,
/// exponential kernels with q = 1 and median-heuristic bandwidths.
struct TestConfig {
    double frac2 = 0.2;
    double tau_x = 0.80;
    double tau_y = 0.80;
    int folds = 3;
    int bootstrap_B = 2000;
    double alpha = 0.05;
    MultiplierLaw law = MultiplierLaw::gaussian;
    LearnerChoice learner = LearnerChoice::automatic;
    RegressorSpec regressor;

    KernelFamily kernel_family = KernelFamily::exponential;
    double kernel_q = 1.0;
    double rq_c = 1.0;
    double rq_alpha = 1.0;
    // Bandwidth overrides; 0 selects the median heuristic.
    double gamma_x = 0.0;
    double gamma_y = 0.0;
    double gamma_z = 0.0;

    double eig_floor = 1e-10;
    std::uint64_t seed = 0;
    int workers = 0;  // 0 = resolve_workers()

    void validate() const;
};

struct Diagnostics {
    int n = 0;
    int n1 = 0;
    int n2 = 0;
    int P = 0;
    int Q = 0;
    double fve_x = 0.0;
    double fve_y = 0.0;
    bool gap_warning_x = false;
    bool gap_warning_y = false;
    double learner_mse_x = 0.0;
    double learner_mse_y = 0.0;
    double gamma_x = 0.0;
    double gamma_y = 0.0;
    double gamma_z = 0.0;
};

struct TestResult {
    double statistic = 0.0;
    double boot_quantile = 0.0;
    double p_value = 1.0;
    bool reject = false;
    Diagnostics diagnostics;
};

/// End-to-end SGCM test.  Pipeline: split the sample, build Gram matrices
/// for X and Y on the basis sample I2, eigendecompose, evaluate eigenfunction
/// scores on I1, truncate by FVE, cross-fit score-on-Z regressions, form the
/// core matrix with the Z kernel over I1 (median heuristic on I1 distances),
/// and calibrate by wild bootstrap.  Deterministic given config.seed and
/// invariant to the worker count.
TestResult run_test(const ObjectSample& X, const ObjectSample& Y, const ObjectSample& Z,
                    const TestConfig& config);

}  // namespace sgcm
