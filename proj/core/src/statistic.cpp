#include "sgcm/statistic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "sgcm/parallel.hpp"

namespace sgcm {

double multiplier_mu4(MultiplierLaw law) {
    switch (law) {
        case MultiplierLaw::gaussian: return 3.0;
        case MultiplierLaw::rademacher: return 1.0;
        case MultiplierLaw::mammen: return 2.0;
    }
    throw Error("unreachable multiplier law");
}

SplitPlan split_sample(int n, double frac2, Rng& rng) {
    if (n < 10) throw SampleSizeError("split needs n >= 10");
    if (!(frac2 > 0.0) || frac2 > 0.5) throw ParameterError("frac2 must lie in (0, 0.5]");

    const int n2 = static_cast<int>(std::lround(frac2 * static_cast<double>(n)));
    if (n2 < 2 || n - n2 < 2) throw SampleSizeError("split leaves a subsample below 2");

    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm);

    SplitPlan plan;
    plan.frac2 = frac2;
    plan.I2.assign(perm.begin(), perm.begin() + n2);
    plan.I1.assign(perm.begin() + n2, perm.end());
    std::sort(plan.I1.begin(), plan.I1.end());
    std::sort(plan.I2.begin(), plan.I2.end());
    return plan;
}

Vector sample_multipliers(MultiplierLaw law, int n, Rng& rng) {
    if (n < 1) throw ParameterError("multiplier count must be >= 1");
    Vector w(n);
    switch (law) {
        case MultiplierLaw::gaussian:
            for (int i = 0; i < n; ++i) w[i] = rng.normal();
            break;
        case MultiplierLaw::rademacher:
            for (int i = 0; i < n; ++i) w[i] = rng.sign();
            break;
        case MultiplierLaw::mammen: {
            const double sqrt5 = std::sqrt(5.0);
            const double lo = (1.0 - sqrt5) / 2.0;
            const double hi = (1.0 + sqrt5) / 2.0;
            const double p_lo = (sqrt5 + 1.0) / (2.0 * sqrt5);
            for (int i = 0; i < n; ++i) w[i] = (rng.uniform() < p_lo) ? lo : hi;
            break;
        }
    }
    return w;
}

CoreMatrix core_matrix(const ResidualScores& rX, const ResidualScores& rY,
                       const GramMatrix& Kz) {
    const auto n1 = rX.values.rows();
    if (rY.values.rows() != n1 || Kz.size() != n1) {
        throw ShapeError("core matrix inputs disagree on n1");
    }
    Matrix A = (rX.values * rX.values.transpose())
                   .cwiseProduct(rY.values * rY.values.transpose())
                   .cwiseProduct(Kz.entries());
    return CoreMatrix{std::move(A)};
}

double sgcm_statistic(const CoreMatrix& A) {
    const auto n1 = A.A.rows();
    // Sorted reduction: the summands form the same multiset under any joint
    // permutation of the observations, so summing in value order makes the
    // statistic exactly permutation-invariant.
    std::vector<double> vals(A.A.data(), A.A.data() + A.A.size());
    std::sort(vals.begin(), vals.end());
    double acc = 0.0;
    for (double v : vals) acc += v;
    return acc / static_cast<double>(n1);
}

double naive_statistic_oracle(const ResidualScores& rX, const ResidualScores& rY,
                              const GramMatrix& Kz) {
    const auto n1 = rX.values.rows();
    if (n1 > 50) throw SizeGuardError("oracle limited to n1 <= 50");
    if (rY.values.rows() != n1 || Kz.size() != n1) {
        throw ShapeError("oracle inputs disagree on n1");
    }
    const auto P = rX.values.cols();
    const auto Q = rY.values.cols();
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n1; ++i) {
        for (Eigen::Index j = 0; j < n1; ++j) {
            for (Eigen::Index p = 0; p < P; ++p) {
                for (Eigen::Index q = 0; q < Q; ++q) {
                    acc += rX.values(i, p) * rY.values(i, q) * rX.values(j, p) *
                           rY.values(j, q) * Kz.entries()(i, j);
                }
            }
        }
    }
    return acc / static_cast<double>(n1);
}

std::vector<double> bootstrap_replicates(const CoreMatrix& A, int B, MultiplierLaw law,
                                         const Rng& rng, int workers) {
    if (B < 1) throw ParameterError("bootstrap needs B >= 1");
    const int n1 = static_cast<int>(A.A.rows());
    std::vector<double> reps(static_cast<std::size_t>(B));
    parallel_for(
        static_cast<std::size_t>(B),
        [&](std::size_t b) {
            Rng stream = rng.spawn(static_cast<std::uint64_t>(b));
            const Vector w = sample_multipliers(law, n1, stream);
            reps[b] = w.dot(A.A * w) / static_cast<double>(n1);
        },
        workers);
    return reps;
}

BootMoments boot_conditional_moments(const CoreMatrix& A, double mu4) {
    const double n1 = static_cast<double>(A.A.rows());
    const double trace = A.A.trace();
    const double frob2 = A.A.squaredNorm();
    const double diag4 = A.A.diagonal().squaredNorm();
    BootMoments m;
    m.mean = trace / n1;
    m.second_moment = (trace * trace + 2.0 * frob2 + (mu4 - 3.0) * diag4) / (n1 * n1);
    return m;
}

double bootstrap_quantile(std::vector<double> replicates, double alpha) {
    if (replicates.empty()) throw EmptyInputError("no bootstrap replicates");
    if (!(alpha > 0.0) || !(alpha < 1.0)) throw ParameterError("alpha must lie in (0, 1)");
    const auto B = replicates.size();
    auto rank = static_cast<std::size_t>(
        std::ceil((1.0 - alpha) * static_cast<double>(B)));
    if (rank < 1) rank = 1;
    if (rank > B) rank = B;
    std::nth_element(replicates.begin(), replicates.begin() + static_cast<std::ptrdiff_t>(rank - 1),
                     replicates.end());
    return replicates[rank - 1];
}

}  // namespace sgcm
