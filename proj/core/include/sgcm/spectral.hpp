#pragma once

#include "sgcm/kernels.hpp"

namespace sgcm {

/// Empirical eigensystem of the uncentered covariance operator, obtained
/// from the Gram matrix over the basis sample I2.  For a Gram eigenpair
/// (kappa_p, u_p) the operator eigenvalue is lambda_p = kappa_p / n2 and the
/// eigenfunction is e_p(x) = sum_l alpha_p[l] k(X_l, x) with
/// alpha_p = u_p / sqrt(kappa_p).
///
/// The full decomposition is kept (kappa_all / vectors_all, descending, sign
/// normalized) so reconstruction and trace diagnostics can include the pairs
/// dropped by the eigenvalue floor; `coefficients` holds alpha_p for the
/// retained pairs only.
struct EigenSystem {
    Vector eigenvalues;   // retained lambda_p = kappa_p / n2, descending
    Matrix coefficients;  // n2 x P_retained, column p = alpha_p
    Vector kappa_all;     // all n2 Gram eigenvalues, descending
    Matrix vectors_all;   // n2 x n2 eigenvectors matching kappa_all
    GramMatrix source;    // the Gram matrix the system was built from

    int retained() const { return static_cast<int>(eigenvalues.size()); }
};

struct TruncationChoice {
    int P = 1;
    double fve_achieved = 1.0;
};

/// Symmetric eigendecomposition of G with eigenvalue floor: pairs with
/// kappa_p <= floor * kappa_1 are dropped from the retained set.
EigenSystem eigensystem_from_gram(const GramMatrix& G, int n2, double floor = 1e-10);

/// scores[i, p] = sum_l cross(i, l) * alpha_p[l], for cross-kernel rows
/// k(x_i, X_l) over the basis sample.
Matrix evaluate_scores(const EigenSystem& es, const Matrix& cross);

/// Smallest P whose cumulative eigenvalue share reaches tau.
TruncationChoice select_truncation_fve(const Vector& eigenvalues, double tau);

}  // namespace sgcm
