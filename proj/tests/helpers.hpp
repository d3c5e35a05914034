#pragma once

// Shared fixtures for the test suite. Everything here is deterministic given
// the Rng seed passed in, so test failures reproduce exactly.

#include <sgcm/kernels.hpp>
#include <sgcm/rng.hpp>
#include <sgcm/spaces.hpp>

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace testutil {

using sgcm::Matrix;
using sgcm::Rng;
using sgcm::Vector;

inline Matrix random_matrix(int rows, int cols, Rng& rng) {
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
            m(i, j) = rng.normal();
        }
    }
    return m;
}

inline Vector random_vector(int n, Rng& rng) {
    Vector v(n);
    for (int i = 0; i < n; ++i) {
        v(i) = rng.normal();
    }
    return v;
}

// Symmetrized B * B^T so the result is bitwise symmetric and PSD up to
// rounding.
inline Matrix random_psd(int n, Rng& rng) {
    Matrix b = random_matrix(n, n + 2, rng);
    Matrix m = b * b.transpose() / static_cast<double>(n);
    m = ((m + m.transpose()) / 2.0).eval();
    return m;
}

inline Matrix random_sphere_points(int n, int dim, Rng& rng) {
    Matrix m = random_matrix(n, dim, rng);
    for (int i = 0; i < n; ++i) {
        m.row(i) /= m.row(i).norm();
    }
    return m;
}

// Strictly positive density on `grid`, normalized to unit trapezoid mass.
inline sgcm::DensityGrid random_density(const Vector& grid, Rng& rng) {
    Vector values(grid.size());
    for (int i = 0; i < grid.size(); ++i) {
        values(i) = std::exp(0.5 * rng.normal());
    }
    values /= sgcm::trapezoid(grid, values);
    return sgcm::DensityGrid(grid, values);
}

inline Vector linspace(double lo, double hi, int n) {
    Vector grid(n);
    for (int i = 0; i < n; ++i) {
        grid(i) = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
    }
    return grid;
}

inline std::vector<Vector> random_clouds(int n, int min_size, int max_size, Rng& rng) {
    std::vector<Vector> clouds;
    clouds.reserve(n);
    for (int i = 0; i < n; ++i) {
        int m = min_size;
        if (max_size > min_size) {
            m += static_cast<int>(rng.uniform_below(
                static_cast<std::uint64_t>(max_size - min_size + 1)));
        }
        clouds.push_back(random_vector(m, rng));
    }
    return clouds;
}

// Gaussian pdf evaluated pointwise; used to build analytic density fixtures.
inline Vector gaussian_pdf(const Vector& grid, double mean, double sd) {
    Vector values(grid.size());
    for (int i = 0; i < grid.size(); ++i) {
        double z = (grid(i) - mean) / sd;
        values(i) = std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * M_PI));
    }
    return values;
}

inline double sample_mean(const std::vector<double>& xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

inline double sample_sd(const std::vector<double>& xs) {
    double m = sample_mean(xs);
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

// PSD kernel Gram over random Euclidean points; handy when a test just needs
// some valid Kz.
inline sgcm::GramMatrix random_kernel_gram(int n, Rng& rng) {
    Matrix pts = random_matrix(n, 3, rng);
    sgcm::SemimetricMatrix d = sgcm::pairwise_distances(
        sgcm::ObjectSample::from_euclidean(pts));
    sgcm::KernelSpec spec;
    spec.family = sgcm::KernelFamily::exponential;
    spec.gamma = sgcm::median_heuristic(d);
    spec.q = 1.0;
    return sgcm::gram_from_semimetric(spec, d);
}

class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        base_ = std::filesystem::temp_directory_path() /
                ("sgcm_test_" + tag + "_" + std::to_string(::getpid()));
        std::filesystem::create_directories(base_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(base_, ec);
    }
    std::filesystem::path path(const std::string& name) const { return base_ / name; }
    const std::filesystem::path& root() const { return base_; }

    void write(const std::string& name, const std::string& content) const {
        std::ofstream out(path(name), std::ios::binary);
        out << content;
    }

private:
    std::filesystem::path base_;
};

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace testutil
