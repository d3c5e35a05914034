#pragma once

#include <vector>

#include "sgcm/spaces.hpp"

namespace sgcm {

enum class KernelFamily { exponential, rational_quadratic, tensor_product };

/// Kernel construction parameters.  The exponential family uses `gamma` and
/// the semimetric power `q`; the rational-quadratic family uses `c`, `alpha`
/// and `q`; the tensor family multiplies its factor kernels entrywise.
struct KernelSpec {
    KernelFamily family = KernelFamily::exponential;
    double gamma = 1.0;
    double c = 1.0;
    double alpha = 1.0;
    double q = 1.0;
    std::vector<KernelSpec> factors;
};

/// Symmetric kernel matrix with unit diagonal for the supported families.
/// Positive semidefiniteness is a property of the construction (negative-type
/// semimetric + Schoenberg), checked in tests, not enforced here.
class GramMatrix {
public:
    explicit GramMatrix(Matrix entries);

    const Matrix& entries() const { return entries_; }
    Eigen::Index size() const { return entries_.rows(); }

private:
    Matrix entries_;
};

/// gamma = 1 / median of the strictly-upper-triangle distances.  The median
/// of an even-length list is the lower middle order statistic, which keeps
/// the heuristic exactly scale-equivariant.
double median_heuristic(const SemimetricMatrix& D);

/// Entries exp(-gamma * D_ij^q), diagonal exactly 1.
GramMatrix exponential_kernel_matrix(const SemimetricMatrix& D, double gamma, double q);

/// Entries (1 + c * D_ij^q)^(-alpha), diagonal exactly 1.
GramMatrix rational_quadratic_kernel_matrix(const SemimetricMatrix& D, double c,
                                            double alpha, double q);

/// Entrywise (Schur) product of two kernel matrices over paired observations.
GramMatrix tensor_product_kernel(const GramMatrix& G1, const GramMatrix& G2);

/// Kernel value k(d) for a single semimetric value under `spec`
/// (exponential / rational_quadratic only).
double kernel_value(const KernelSpec& spec, double distance);

/// Gram matrix from a semimetric matrix under `spec`; tensor specs apply
/// their factors to the same semimetric and multiply.
GramMatrix gram_from_semimetric(const KernelSpec& spec, const SemimetricMatrix& D);

/// Rectangular cross-kernel block k(x_i, x_j) for i in `rows`, j in `cols`
/// of a full-sample semimetric matrix.
Matrix cross_kernel(const KernelSpec& spec, const Matrix& full_distances,
                    const std::vector<int>& rows, const std::vector<int>& cols);

/// Smallest eigenvalue of a symmetric matrix (diagnostic for numerical PSD).
double min_eigenvalue(const Matrix& symmetric);

}  // namespace sgcm
