#include "sgcm/kernels.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace sgcm {

namespace {

void require_positive(double v, const char* name) {
    if (!(v > 0.0)) throw ParameterError(std::string(name) + " must be positive");
}

void require_power(double q) {
    if (!(q > 0.0) || q > 2.0) throw ParameterError("semimetric power q must lie in (0, 2]");
}

}  // namespace

GramMatrix::GramMatrix(Matrix entries) : entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols()) throw ShapeError("Gram matrix must be square");
    if (!entries_.allFinite()) throw InvariantError("Gram matrix has non-finite entries");
    for (Eigen::Index i = 0; i < entries_.rows(); ++i) {
        for (Eigen::Index j = 0; j < i; ++j) {
            if (entries_(i, j) != entries_(j, i)) {
                throw ShapeError("Gram matrix must be symmetric");
            }
        }
    }
}

double median_heuristic(const SemimetricMatrix& D) {
    const auto n = D.size();
    if (n < 2) throw ParameterError("median heuristic needs at least 2 points");

    std::vector<double> off;
    off.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) off.push_back(D.entries()(i, j));
    }
    // Lower middle order statistic: index (m-1)/2 of the sorted list covers
    // both parities.
    const std::size_t mid = (off.size() - 1) / 2;
    std::nth_element(off.begin(), off.begin() + static_cast<std::ptrdiff_t>(mid), off.end());
    const double med = off[mid];
    if (!(med > 0.0)) {
        throw DegenerateDistancesError("median pairwise distance is zero");
    }
    return 1.0 / med;
}

namespace {

template <typename EntryFn>
Matrix kernel_map(const SemimetricMatrix& D, EntryFn&& f) {
    const auto n = D.size();
    Matrix G = Matrix::Ones(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < i; ++j) {
            const double v = f(D.entries()(i, j));
            G(i, j) = v;
            G(j, i) = v;
        }
    }
    return G;
}

}  // namespace

GramMatrix exponential_kernel_matrix(const SemimetricMatrix& D, double gamma, double q) {
    require_positive(gamma, "gamma");
    require_power(q);
    return GramMatrix(kernel_map(D, [gamma, q](double d) {
        return std::exp(-gamma * std::pow(d, q));
    }));
}

GramMatrix rational_quadratic_kernel_matrix(const SemimetricMatrix& D, double c,
                                            double alpha, double q) {
    require_positive(c, "c");
    require_positive(alpha, "alpha");
    require_power(q);
    return GramMatrix(kernel_map(D, [c, alpha, q](double d) {
        return std::pow(1.0 + c * std::pow(d, q), -alpha);
    }));
}

GramMatrix tensor_product_kernel(const GramMatrix& G1, const GramMatrix& G2) {
    if (G1.size() != G2.size()) {
        throw DimensionError("tensor product factors have different sizes");
    }
    return GramMatrix(G1.entries().cwiseProduct(G2.entries()));
}

double kernel_value(const KernelSpec& spec, double distance) {
    switch (spec.family) {
        case KernelFamily::exponential:
            require_positive(spec.gamma, "gamma");
            require_power(spec.q);
            return std::exp(-spec.gamma * std::pow(distance, spec.q));
        case KernelFamily::rational_quadratic:
            require_positive(spec.c, "c");
            require_positive(spec.alpha, "alpha");
            require_power(spec.q);
            return std::pow(1.0 + spec.c * std::pow(distance, spec.q), -spec.alpha);
        case KernelFamily::tensor_product:
            throw ParameterError("tensor kernels have no scalar evaluation");
    }
    throw Error("unreachable kernel family");
}

GramMatrix gram_from_semimetric(const KernelSpec& spec, const SemimetricMatrix& D) {
    switch (spec.family) {
        case KernelFamily::exponential:
            return exponential_kernel_matrix(D, spec.gamma, spec.q);
        case KernelFamily::rational_quadratic:
            return rational_quadratic_kernel_matrix(D, spec.c, spec.alpha, spec.q);
        case KernelFamily::tensor_product: {
            if (spec.factors.empty()) throw ParameterError("tensor kernel without factors");
            GramMatrix G = gram_from_semimetric(spec.factors.front(), D);
            for (std::size_t k = 1; k < spec.factors.size(); ++k) {
                G = tensor_product_kernel(G, gram_from_semimetric(spec.factors[k], D));
            }
            return G;
        }
    }
    throw Error("unreachable kernel family");
}

Matrix cross_kernel(const KernelSpec& spec, const Matrix& full_distances,
                    const std::vector<int>& rows, const std::vector<int>& cols) {
    Matrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < cols.size(); ++j) {
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                kernel_value(spec, full_distances(rows[i], cols[j]));
        }
    }
    return out;
}

double min_eigenvalue(const Matrix& symmetric) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetric,
                                                 Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("eigenvalue computation failed");
    }
    return solver.eigenvalues().minCoeff();
}

}  // namespace sgcm
