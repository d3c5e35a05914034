#pragma once

#include <cstdint>
#include <vector>

#include "sgcm/kernels.hpp"
#include "sgcm/regression.hpp"
#include "sgcm/rng.hpp"

namespace sgcm {

/// Random disjoint split of {0..n-1} into the statistic sample I1 and the
/// basis sample I2 (|I2| = round(frac2 * n)).  Indices are kept sorted.
struct SplitPlan {
    std::vector<int> I1;
    std::vector<int> I2;
    double frac2 = 0.2;
};

/// A_ij = (sum_p rX_ip rX_jp)(sum_q rY_iq rY_jq) Kz_ij.  The statistic and
/// all bootstrap replicates are quadratic forms in this matrix.
struct CoreMatrix {
    Matrix A;
};

enum class MultiplierLaw { gaussian, rademacher, mammen };

/// Fourth moment of the multiplier law (3, 1 and 2 respectively).
double multiplier_mu4(MultiplierLaw law);

SplitPlan split_sample(int n, double frac2, Rng& rng);

/// Iid multipliers with mean 0 and variance 1.  The Mammen law takes the
/// value (1-sqrt 5)/2 with probability (sqrt 5 + 1)/(2 sqrt 5) and
/// (1+sqrt 5)/2 otherwise.
Vector sample_multipliers(MultiplierLaw law, int n, Rng& rng);

CoreMatrix core_matrix(const ResidualScores& rX, const ResidualScores& rY,
                       const GramMatrix& Kz);

/// The SGCM statistic n1 * T = (sum_ij A_ij) / n1, diagonal included
/// (V-statistic form).  The entries are summed in sorted order so the value
/// is exactly invariant under a joint permutation of the observations.
double sgcm_statistic(const CoreMatrix& A);

/// Literal quadruple-sum evaluation of the statistic; test oracle, guarded
/// to n1 <= 50.
double naive_statistic_oracle(const ResidualScores& rX, const ResidualScores& rY,
                              const GramMatrix& Kz);

/// Wild-bootstrap replicates T*_b = (W' A W) / n1 with iid multipliers per
/// replicate.  Replicate b always consumes substream b of the rng seed, so
/// the output is invariant to how the loop is parallelized.
std::vector<double> bootstrap_replicates(const CoreMatrix& A, int B, MultiplierLaw law,
                                         const Rng& rng, int workers = 0);

/// Conditional bootstrap moments given the data: mean = (1/n1) sum_i A_ii,
/// second moment = (1/n1^2) [ (sum_i A_ii)^2 + 2 sum_ij A_ij^2
///                            + (mu4 - 3) sum_i A_ii^2 ].
struct BootMoments {
    double mean = 0.0;
    double second_moment = 0.0;
};

BootMoments boot_conditional_moments(const CoreMatrix& A, double mu4);

/// Empirical upper quantile by the order statistic at rank ceil((1-alpha)B).
double bootstrap_quantile(std::vector<double> replicates, double alpha);

}  // namespace sgcm
