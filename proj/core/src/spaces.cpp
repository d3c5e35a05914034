#include "sgcm/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace sgcm {

namespace {

constexpr double kUnitNormTol = 1e-9;
constexpr double kMassTol = 1e-6;

void require_strictly_increasing(const Vector& grid, const char* what) {
    for (Eigen::Index i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) {
            throw InvariantError(std::string(what) + " not strictly increasing at index " +
                                 std::to_string(i));
        }
    }
}

void require_unit(const Vector& u, const std::string& label) {
    if (!u.allFinite()) {
        throw InvariantError(label + " has non-finite entries");
    }
    const double norm = u.norm();
    if (std::abs(norm - 1.0) > kUnitNormTol) {
        throw InvariantError(label + " has norm " + std::to_string(norm) +
                             ", expected unit norm");
    }
}

double clamp(double x, double lo, double hi) { return std::min(hi, std::max(lo, x)); }

/// Left-continuous empirical quantile of a sorted sample at level q in (0,1).
double sorted_quantile(const Vector& sorted, double q) {
    const auto m = sorted.size();
    auto idx = static_cast<Eigen::Index>(std::ceil(q * static_cast<double>(m))) - 1;
    if (idx < 0) idx = 0;
    if (idx >= m) idx = m - 1;
    return sorted[idx];
}

Vector sorted_copy(const Vector& v) {
    Vector s = v;
    std::sort(s.data(), s.data() + s.size());
    return s;
}

Vector trapezoid_weights(const Vector& grid) {
    const auto T = grid.size();
    Vector w = Vector::Zero(T);
    if (T == 1) return w;
    for (Eigen::Index i = 0; i + 1 < T; ++i) {
        const double h = grid[i + 1] - grid[i];
        w[i] += 0.5 * h;
        w[i + 1] += 0.5 * h;
    }
    return w;
}

}  // namespace

DensityGrid::DensityGrid(Vector grid_in, Vector values_in)
    : grid(std::move(grid_in)), values(std::move(values_in)) {
    if (grid.size() < 2) throw InvariantError("density grid needs at least 2 points");
    if (grid.size() != values.size()) {
        throw DimensionError("density grid and values differ in length");
    }
    require_strictly_increasing(grid, "density grid");
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        if (!(values[i] >= 0.0)) {
            throw InvariantError("density value at index " + std::to_string(i) +
                                 " is negative or non-finite");
        }
    }
    const double mass = trapezoid(grid, values);
    if (std::abs(mass - 1.0) > kMassTol) {
        throw InvariantError("density mass " + std::to_string(mass) + " deviates from 1");
    }
}

SemimetricMatrix::SemimetricMatrix(Matrix entries) : entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols()) {
        throw ShapeError("semimetric matrix must be square");
    }
    for (Eigen::Index i = 0; i < entries_.rows(); ++i) {
        if (entries_(i, i) != 0.0) throw InvariantError("semimetric diagonal must be zero");
        for (Eigen::Index j = 0; j < i; ++j) {
            const double d = entries_(i, j);
            if (!(d >= 0.0)) throw InvariantError("semimetric entries must be nonnegative");
            if (d != entries_(j, i)) throw InvariantError("semimetric matrix must be symmetric");
        }
    }
}

MetricCurve::MetricCurve(Vector times_in, Matrix values_in)
    : times(std::move(times_in)), values(std::move(values_in)) {
    if (times.size() != values.rows()) {
        throw DimensionError("curve times and values differ in length");
    }
    if (times.size() < 1) throw EmptyInputError("curve has no time points");
    require_strictly_increasing(times, "curve time grid");
    weights = trapezoid_weights(times);
}

MetricCurve::MetricCurve(Vector times_in, Matrix values_in, Vector weights_in)
    : MetricCurve(std::move(times_in), std::move(values_in)) {
    if (weights_in.size() != times.size()) {
        throw DimensionError("curve weights and times differ in length");
    }
    weights = std::move(weights_in);
}

double trapezoid(const Vector& grid, const Vector& values) {
    if (grid.size() != values.size()) throw DimensionError("trapezoid: length mismatch");
    double acc = 0.0;
    for (Eigen::Index i = 0; i + 1 < grid.size(); ++i) {
        acc += 0.5 * (values[i] + values[i + 1]) * (grid[i + 1] - grid[i]);
    }
    return acc;
}

double euclidean_distance(const Vector& x, const Vector& y) {
    if (x.size() != y.size()) {
        throw DimensionError("euclidean_distance: dimensions " + std::to_string(x.size()) +
                             " vs " + std::to_string(y.size()));
    }
    return (x - y).norm();
}

double great_circle_distance(const Vector& u, const Vector& v) {
    if (u.size() != v.size()) throw DimensionError("great_circle_distance: dimension mismatch");
    require_unit(u, "sphere point");
    require_unit(v, "sphere point");
    return std::acos(clamp(u.dot(v), -1.0, 1.0));
}

namespace {

double sqrt_density_inner(const DensityGrid& f, const DensityGrid& g) {
    if (f.grid.size() != g.grid.size() || (f.grid.array() != g.grid.array()).any()) {
        throw GridError("densities live on different grids");
    }
    Vector integrand(f.values.size());
    for (Eigen::Index i = 0; i < integrand.size(); ++i) {
        integrand[i] = std::sqrt(f.values[i]) * std::sqrt(g.values[i]);
    }
    return clamp(trapezoid(f.grid, integrand), 0.0, 1.0);
}

}  // namespace

double fisher_rao_distance(const DensityGrid& f, const DensityGrid& g) {
    return std::acos(sqrt_density_inner(f, g));
}

double hellinger_distance(const DensityGrid& f, const DensityGrid& g) {
    return std::sqrt(1.0 - sqrt_density_inner(f, g));
}

double wasserstein_distance_1d(int p, const Vector& a, const Vector& b) {
    if (a.size() == 0 || b.size() == 0) throw EmptyInputError("empty point cloud");
    if (p != 1 && p != 2) throw ParameterError("wasserstein order must be 1 or 2");
    if (!a.allFinite() || !b.allFinite()) throw InvariantError("point cloud has non-finite entries");

    const Vector sa = sorted_copy(a);
    const Vector sb = sorted_copy(b);
    const auto L = std::max(sa.size(), sb.size());
    double acc = 0.0;
    for (Eigen::Index l = 1; l <= L; ++l) {
        const double q = (static_cast<double>(l) - 0.5) / static_cast<double>(L);
        const double diff = std::abs(sorted_quantile(sa, q) - sorted_quantile(sb, q));
        acc += (p == 1) ? diff : diff * diff;
    }
    acc /= static_cast<double>(L);
    return (p == 1) ? acc : std::sqrt(acc);
}

double lp_function_distance(double p, const MetricCurve& f, const MetricCurve& g,
                            CurveBase base) {
    if (!(p >= 1.0)) throw ParameterError("curve distance order must be >= 1");
    if (f.times.size() != g.times.size() || (f.times.array() != g.times.array()).any() ||
        (f.weights.array() != g.weights.array()).any()) {
        throw GridError("curves live on different time grids");
    }
    if (f.values.cols() != g.values.cols()) {
        throw DimensionError("curve values have different ambient dimension");
    }
    double acc = 0.0;
    for (Eigen::Index t = 0; t < f.times.size(); ++t) {
        const Vector x = f.values.row(t).transpose();
        const Vector y = g.values.row(t).transpose();
        const double d =
            (base == CurveBase::sphere) ? great_circle_distance(x, y) : euclidean_distance(x, y);
        acc += f.weights[t] * std::pow(d, p);
    }
    return std::pow(acc, 1.0 / p);
}

double check_negative_type(const SemimetricMatrix& D, int trials, Rng& rng) {
    const auto n = D.size();
    if (n < 2) throw EmptyInputError("negative-type check needs at least 2 points");
    if (trials < 1) throw ParameterError("trials must be >= 1");

    double worst = -std::numeric_limits<double>::infinity();
    Vector alpha(n);
    for (int t = 0; t < trials; ++t) {
        double norm2 = 0.0;
        do {
            for (Eigen::Index i = 0; i < n; ++i) alpha[i] = rng.normal();
            alpha.array() -= alpha.mean();
            norm2 = alpha.squaredNorm();
        } while (norm2 < 1e-24);
        alpha /= std::sqrt(norm2);
        worst = std::max(worst, alpha.dot(D.entries() * alpha));
    }
    return worst;
}

double silverman_bandwidth(const Vector& cloud) {
    const auto m = cloud.size();
    if (m == 0) throw EmptyInputError("empty point cloud");
    if (m == 1) throw InvariantError("bandwidth undefined for a single point");
    const double mean = cloud.mean();
    const double sd = std::sqrt((cloud.array() - mean).square().sum() /
                                static_cast<double>(m - 1));
    const Vector s = sorted_copy(cloud);
    const double iqr = sorted_quantile(s, 0.75) - sorted_quantile(s, 0.25);
    double scale = sd;
    if (iqr > 0.0) scale = std::min(sd, iqr / 1.34);
    if (!(scale > 0.0)) throw InvariantError("cloud is constant, KDE bandwidth undefined");
    return 0.9 * scale * std::pow(static_cast<double>(m), -0.2);
}

Vector shared_density_grid(const std::vector<Vector>& clouds, int grid_points) {
    if (clouds.empty()) throw EmptyInputError("no clouds given");
    if (grid_points < 2) throw ParameterError("grid needs at least 2 points");
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    double bw = 0.0;
    for (const auto& c : clouds) {
        if (c.size() == 0) throw EmptyInputError("empty point cloud");
        lo = std::min(lo, c.minCoeff());
        hi = std::max(hi, c.maxCoeff());
        bw = std::max(bw, silverman_bandwidth(c));
    }
    lo -= 3.0 * bw;
    hi += 3.0 * bw;
    Vector grid(grid_points);
    const double step = (hi - lo) / static_cast<double>(grid_points - 1);
    for (int i = 0; i < grid_points; ++i) grid[i] = lo + step * static_cast<double>(i);
    return grid;
}

DensityGrid kde_density(const Vector& cloud, const Vector& grid) {
    const double h = silverman_bandwidth(cloud);
    const double m = static_cast<double>(cloud.size());
    constexpr double inv_sqrt_2pi = 0.3989422804014327;
    Vector values(grid.size());
    for (Eigen::Index j = 0; j < grid.size(); ++j) {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < cloud.size(); ++i) {
            const double u = (grid[j] - cloud[i]) / h;
            acc += std::exp(-0.5 * u * u);
        }
        values[j] = acc * inv_sqrt_2pi / (m * h);
    }
    const double mass = trapezoid(grid, values);
    if (!(mass > 0.0)) throw InvariantError("KDE produced zero mass on the grid");
    values /= mass;
    return DensityGrid(grid, values);
}

std::vector<DensityGrid> densities_from_clouds(const std::vector<Vector>& clouds,
                                               int grid_points) {
    const Vector grid = shared_density_grid(clouds, grid_points);
    std::vector<DensityGrid> out;
    out.reserve(clouds.size());
    for (const auto& c : clouds) out.push_back(kde_density(c, grid));
    return out;
}

ObjectSample ObjectSample::from_euclidean(Matrix obs) {
    if (obs.rows() == 0 || obs.cols() == 0) throw EmptyInputError("empty euclidean sample");
    if (!obs.allFinite()) throw InvariantError("euclidean sample has non-finite entries");
    ObjectSample s;
    s.kind = Kind::euclidean;
    s.metric = Metric::euclidean;
    s.points = std::move(obs);
    return s;
}

ObjectSample ObjectSample::from_sphere(Matrix obs) {
    if (obs.rows() == 0 || obs.cols() == 0) throw EmptyInputError("empty sphere sample");
    for (Eigen::Index i = 0; i < obs.rows(); ++i) {
        require_unit(obs.row(i).transpose(), "sphere row " + std::to_string(i + 1));
    }
    ObjectSample s;
    s.kind = Kind::sphere;
    s.metric = Metric::great_circle;
    s.points = std::move(obs);
    return s;
}

ObjectSample ObjectSample::from_densities(std::vector<DensityGrid> densities, Metric m) {
    if (densities.empty()) throw EmptyInputError("empty density sample");
    if (m != Metric::fisher_rao && m != Metric::hellinger) {
        throw ParameterError("density samples support fisher_rao or hellinger metrics");
    }
    ObjectSample s;
    s.kind = Kind::density;
    s.metric = m;
    s.densities = std::move(densities);
    return s;
}

ObjectSample ObjectSample::from_clouds(std::vector<Vector> clouds, Metric m) {
    if (clouds.empty()) throw EmptyInputError("empty cloud sample");
    if (m != Metric::wasserstein1 && m != Metric::wasserstein2 && m != Metric::fisher_rao &&
        m != Metric::hellinger) {
        throw ParameterError("cloud samples support wasserstein or density metrics");
    }
    ObjectSample s;
    s.kind = Kind::cloud;
    s.metric = m;
    s.clouds = std::move(clouds);
    return s;
}

ObjectSample ObjectSample::from_curves(std::vector<MetricCurve> curves, double p,
                                       CurveBase base) {
    if (curves.empty()) throw EmptyInputError("empty curve sample");
    if (!(p >= 1.0)) throw ParameterError("curve distance order must be >= 1");
    ObjectSample s;
    s.kind = Kind::curve;
    s.metric = Metric::lp_curve;
    s.curves = std::move(curves);
    s.curve_p = p;
    s.curve_base = base;
    return s;
}

int ObjectSample::n() const {
    switch (kind) {
        case Kind::euclidean:
        case Kind::sphere:
            return static_cast<int>(points.rows());
        case Kind::density:
            return static_cast<int>(densities.size());
        case Kind::cloud:
            return static_cast<int>(clouds.size());
        case Kind::curve:
            return static_cast<int>(curves.size());
    }
    return 0;
}

namespace {

template <typename DistFn>
Matrix assemble_pairwise(int n, DistFn&& dist) {
    Matrix D = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < i; ++j) {
            const double d = dist(i, j);
            D(i, j) = d;
            D(j, i) = d;
        }
    }
    return D;
}

}  // namespace

SemimetricMatrix pairwise_distances(const ObjectSample& sample) {
    const int n = sample.n();
    switch (sample.kind) {
        case ObjectSample::Kind::euclidean:
            return SemimetricMatrix(assemble_pairwise(n, [&](int i, int j) {
                return euclidean_distance(sample.points.row(i).transpose(),
                                          sample.points.row(j).transpose());
            }));
        case ObjectSample::Kind::sphere:
            return SemimetricMatrix(assemble_pairwise(n, [&](int i, int j) {
                return great_circle_distance(sample.points.row(i).transpose(),
                                             sample.points.row(j).transpose());
            }));
        case ObjectSample::Kind::density: {
            const bool fr = sample.metric == Metric::fisher_rao;
            return SemimetricMatrix(assemble_pairwise(n, [&](int i, int j) {
                return fr ? fisher_rao_distance(sample.densities[i], sample.densities[j])
                          : hellinger_distance(sample.densities[i], sample.densities[j]);
            }));
        }
        case ObjectSample::Kind::cloud: {
            if (sample.metric == Metric::fisher_rao || sample.metric == Metric::hellinger) {
                return pairwise_distances(
                    ObjectSample::from_densities(densities_from_clouds(sample.clouds),
                                                 sample.metric));
            }
            const int p = sample.metric == Metric::wasserstein2 ? 2 : 1;
            return SemimetricMatrix(assemble_pairwise(n, [&](int i, int j) {
                return wasserstein_distance_1d(p, sample.clouds[i], sample.clouds[j]);
            }));
        }
        case ObjectSample::Kind::curve:
            return SemimetricMatrix(assemble_pairwise(n, [&](int i, int j) {
                return lp_function_distance(sample.curve_p, sample.curves[i],
                                            sample.curves[j], sample.curve_base);
            }));
    }
    throw Error("unreachable sample kind");
}

Matrix submatrix(const Matrix& M, const std::vector<int>& rows,
                 const std::vector<int>& cols) {
    Matrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < cols.size(); ++j) {
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = M(rows[i], cols[j]);
        }
    }
    return out;
}

}  // namespace sgcm
