#pragma once

#include <Eigen/Dense>
#include <vector>

#include "sgcm/errors.hpp"
#include "sgcm/rng.hpp"

namespace sgcm {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Probability density sampled on a fixed grid.  Mass under the trapezoid
/// rule must be 1 within 1e-6; densities produced by kde_density are
/// renormalized and satisfy this by construction.
struct DensityGrid {
    Vector grid;    // strictly increasing abscissae
    Vector values;  // nonnegative density values

    DensityGrid(Vector grid_in, Vector values_in);
};

/// Pairwise semimetric values: symmetric, zero diagonal, nonnegative.
class SemimetricMatrix {
public:
    explicit SemimetricMatrix(Matrix entries);

    const Matrix& entries() const { return entries_; }
    Eigen::Index size() const { return entries_.rows(); }

private:
    Matrix entries_;
};

enum class CurveBase { euclidean, sphere };

/// Discretized curve t -> point in a base metric space.  Rows of `values`
/// are the points at the corresponding `times`.  Quadrature weights default
/// to trapezoid weights on the time grid (total = time-span measure).
struct MetricCurve {
    Vector times;
    Matrix values;
    Vector weights;

    MetricCurve(Vector times_in, Matrix values_in);
    MetricCurve(Vector times_in, Matrix values_in, Vector weights_in);
};

/// Trapezoid-rule integral of `values` over `grid`.
double trapezoid(const Vector& grid, const Vector& values);

double euclidean_distance(const Vector& x, const Vector& y);

/// Geodesic distance on the unit sphere: arccos of the clamped inner
/// product.  Inputs must be unit vectors within 1e-9.
double great_circle_distance(const Vector& u, const Vector& v);

double fisher_rao_distance(const DensityGrid& f, const DensityGrid& g);

double hellinger_distance(const DensityGrid& f, const DensityGrid& g);

/// L^p distance between the empirical quantile functions of two 1-d point
/// clouds, p in {1,2}.  Equal sizes reduce to the sorted-sample matching;
/// unequal sizes are evaluated on the midpoint quantile grid of
/// max(m_a, m_b) levels.
double wasserstein_distance_1d(int p, const Vector& a, const Vector& b);

/// Weighted L^p distance between two curves over a shared time grid:
/// ( sum_t w_t d(f(t), g(t))^p )^(1/p) with d the selected base semimetric.
double lp_function_distance(double p, const MetricCurve& f, const MetricCurve& g,
                            CurveBase base);

/// Randomized finite negative-type check: the maximum of a'Da over `trials`
/// random weight vectors a, each centered to sum zero and scaled to unit
/// norm.  Values at or below a small tolerance are consistent with D being
/// of negative type.
double check_negative_type(const SemimetricMatrix& D, int trials, Rng& rng);

/// Silverman's rule-of-thumb bandwidth for a Gaussian KDE.
double silverman_bandwidth(const Vector& cloud);

/// Shared evaluation grid for a family of clouds: pooled min/max extended by
/// three times the largest per-cloud bandwidth, `grid_points` equispaced.
Vector shared_density_grid(const std::vector<Vector>& clouds, int grid_points = 512);

/// Gaussian KDE of one cloud on a fixed grid, renormalized to unit mass.
DensityGrid kde_density(const Vector& cloud, const Vector& grid);

std::vector<DensityGrid> densities_from_clouds(const std::vector<Vector>& clouds,
                                               int grid_points = 512);

enum class Metric {
    euclidean,
    great_circle,
    fisher_rao,
    hellinger,
    wasserstein1,
    wasserstein2,
    lp_curve,
};

/// One column of observations in an object space, together with the
/// semimetric used on it.  Exactly one payload is populated according to
/// `kind`; use the factory functions.
struct ObjectSample {
    enum class Kind { euclidean, sphere, density, cloud, curve };

    Kind kind = Kind::euclidean;
    Metric metric = Metric::euclidean;
    Matrix points;                        // euclidean / sphere: n x d
    std::vector<DensityGrid> densities;   // density
    std::vector<Vector> clouds;           // cloud
    std::vector<MetricCurve> curves;      // curve
    double curve_p = 2.0;
    CurveBase curve_base = CurveBase::euclidean;

    static ObjectSample from_euclidean(Matrix obs);
    static ObjectSample from_sphere(Matrix obs);
    static ObjectSample from_densities(std::vector<DensityGrid> densities, Metric m);
    /// Clouds compared by Wasserstein (m = wasserstein1|2) or, after KDE
    /// preprocessing, by fisher_rao|hellinger.
    static ObjectSample from_clouds(std::vector<Vector> clouds, Metric m);
    static ObjectSample from_curves(std::vector<MetricCurve> curves, double p,
                                    CurveBase base);

    int n() const;
    /// True when the observations are plain feature vectors usable by a
    /// tree learner.
    bool has_features() const { return kind == Kind::euclidean; }
};

/// Full pairwise semimetric matrix of a sample under its chosen metric.
SemimetricMatrix pairwise_distances(const ObjectSample& sample);

/// M[rows, cols] as a dense copy.
Matrix submatrix(const Matrix& M, const std::vector<int>& rows,
                 const std::vector<int>& cols);

}  // namespace sgcm
