#include "sgcm/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>

namespace sgcm {

EigenSystem eigensystem_from_gram(const GramMatrix& G, int n2, double floor) {
    if (G.size() != n2) {
        throw ShapeError("Gram matrix size " + std::to_string(G.size()) +
                         " does not match n2 = " + std::to_string(n2));
    }
    if (!(floor >= 0.0)) throw ParameterError("eigenvalue floor must be nonnegative");

    Eigen::SelfAdjointEigenSolver<Matrix> solver(G.entries());
    if (solver.info() != Eigen::Success) {
        throw NumericalError("Gram eigendecomposition failed");
    }

    // Eigen returns ascending order; flip to descending.
    Vector kappa(n2);
    Matrix vectors(n2, n2);
    for (int p = 0; p < n2; ++p) {
        kappa[p] = solver.eigenvalues()[n2 - 1 - p];
        vectors.col(p) = solver.eigenvectors().col(n2 - 1 - p);
    }

    // Sign convention: make the largest-magnitude entry of each u_p positive.
    for (int p = 0; p < n2; ++p) {
        Eigen::Index arg = 0;
        vectors.col(p).cwiseAbs().maxCoeff(&arg);
        if (vectors(arg, p) < 0.0) vectors.col(p) = -vectors.col(p);
    }

    const double kappa1 = kappa[0];
    if (!(kappa1 > 0.0)) {
        throw DegenerateGramError("Gram matrix has no positive eigenvalue");
    }
    int P = 0;
    while (P < n2 && kappa[P] > floor * kappa1) ++P;
    if (P == 0) {
        throw DegenerateGramError("all Gram eigenvalues fall below the floor");
    }

    EigenSystem es{Vector(P), Matrix(n2, P), std::move(kappa), std::move(vectors), G};
    for (int p = 0; p < P; ++p) {
        es.eigenvalues[p] = es.kappa_all[p] / static_cast<double>(n2);
        es.coefficients.col(p) = es.vectors_all.col(p) / std::sqrt(es.kappa_all[p]);
    }
    return es;
}

Matrix evaluate_scores(const EigenSystem& es, const Matrix& cross) {
    if (cross.cols() != es.coefficients.rows()) {
        throw ShapeError("cross-Gram has " + std::to_string(cross.cols()) +
                         " columns, expected " + std::to_string(es.coefficients.rows()));
    }
    return cross * es.coefficients;
}

TruncationChoice select_truncation_fve(const Vector& eigenvalues, double tau) {
    if (eigenvalues.size() == 0) throw EmptyInputError("empty eigenvalue list");
    if (!(tau > 0.0) || tau > 1.0) throw ParameterError("tau must lie in (0, 1]");

    const double total = eigenvalues.sum();
    if (!(total > 0.0)) throw DegenerateGramError("eigenvalue mass is not positive");

    double cum = 0.0;
    for (Eigen::Index p = 0; p < eigenvalues.size(); ++p) {
        cum += eigenvalues[p];
        if (cum / total >= tau) {
            return TruncationChoice{static_cast<int>(p) + 1, cum / total};
        }
    }
    // Rounding can leave the final share an ulp short of tau <= 1.
    return TruncationChoice{static_cast<int>(eigenvalues.size()), 1.0};
}

}  // namespace sgcm
