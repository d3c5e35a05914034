#include "sgcm/simulate.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "sgcm/parallel.hpp"

namespace sgcm {

void DgpSpec::validate() const {
    if (n < 1) throw ParameterError("n must be >= 1");
    switch (family) {
        case Family::low_dim:
            if (a != 2 && a != 4 && a != 6) {
                throw ParameterError("oscillation parameter a must be one of {2, 4, 6}");
            }
            break;
        case Family::high_dim:
            if (d < 1) throw ParameterError("dimension d must be >= 1");
            if (b != 0.0 && b != 0.5) throw ParameterError("direct effect b must be 0 or 0.5");
            break;
        case Family::distributional: {
            if (m < 2) throw ParameterError("cloud size m must be >= 2");
            const bool c_ok = c == 0.0 || c == 0.05 || c == 0.10 || c == 0.15 || c == 0.20;
            if (!c_ok) throw ParameterError("signal c must be in {0, 0.05, 0.10, 0.15, 0.20}");
            break;
        }
    }
}

double damped_sine(double a, double z) { return std::exp(-0.5 * z * z) * std::sin(a * z); }

GeneratedData gen_low_dim(const DgpSpec& spec, Rng& rng) {
    if (spec.family != DgpSpec::Family::low_dim) throw ParameterError("family mismatch");
    spec.validate();
    const int n = spec.n;
    const double a = static_cast<double>(spec.a);

    // Draw order (fixed): Z, then eps_X, then eps_Y, then the scenario's
    // shared source if any.
    Vector Z(n), ex(n), ey(n);
    for (int i = 0; i < n; ++i) Z[i] = rng.normal();
    for (int i = 0; i < n; ++i) ex[i] = rng.normal();
    for (int i = 0; i < n; ++i) ey[i] = rng.normal();

    Vector X(n), Y(n);
    for (int i = 0; i < n; ++i) {
        const double f = damped_sine(a, Z[i]);
        X[i] = f + 0.3 * ex[i];
        Y[i] = f + 0.3 * ey[i];
    }

    GeneratedData out;
    out.x_sources = {"Z", "eps_X"};
    out.y_sources = {"Z", "eps_Y"};

    switch (spec.scenario) {
        case DgpSpec::Scenario::null_case:
            break;
        case DgpSpec::Scenario::dgp1_1:
            Y += 0.2 * X;
            out.y_sources.push_back("eps_X");
            break;
        case DgpSpec::Scenario::dgp1_2: {
            Vector U(n);
            for (int i = 0; i < n; ++i) U[i] = rng.normal();
            for (int i = 0; i < n; ++i) {
                X[i] += 0.3 * (U[i] * U[i] - 1.0);
                Y[i] += 0.3 * U[i];
            }
            out.x_sources.push_back("U");
            out.y_sources.push_back("U");
            break;
        }
        case DgpSpec::Scenario::dgp1_3: {
            Vector U(n);
            for (int i = 0; i < n; ++i) U[i] = damped_sine(1.0, Z[i]) + rng.normal();
            for (int i = 0; i < n; ++i) {
                X[i] += 0.3 * (U[i] * U[i] - 1.0);
                Y[i] += 0.3 * U[i];
            }
            out.x_sources.push_back("U");
            out.y_sources.push_back("U");
            break;
        }
    }

    out.X = ObjectSample::from_euclidean(X);
    out.Y = ObjectSample::from_euclidean(Y);
    out.Z = ObjectSample::from_euclidean(Z);
    return out;
}

namespace {

Vector l1_normalized_uniform(int d, Rng& rng) {
    Vector beta(d);
    for (int j = 0; j < d; ++j) beta[j] = 2.0 * rng.uniform() - 1.0;
    const double l1 = beta.cwiseAbs().sum();
    if (!(l1 > 0.0)) {
        // Probability-zero draw; a degenerate direction would zero the signal.
        beta.setZero();
        beta[0] = 1.0;
        return beta;
    }
    return beta / l1;
}

}  // namespace

GeneratedData gen_high_dim(const DgpSpec& spec, Rng& rng) {
    if (spec.family != DgpSpec::Family::high_dim) throw ParameterError("family mismatch");
    spec.validate();
    const int n = spec.n;
    const int d = spec.d;

    // Draw order (fixed): Z row-wise, beta_X, beta_Y, eps_X, eps_Y.
    Matrix Z(n, d);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < d; ++j) Z(i, j) = rng.normal();
    }
    const Vector bx = l1_normalized_uniform(d, rng);
    const Vector by = l1_normalized_uniform(d, rng);
    Vector ex(n), ey(n);
    for (int i = 0; i < n; ++i) ex[i] = rng.normal();
    for (int i = 0; i < n; ++i) ey[i] = rng.normal();

    Vector X(n), Y(n);
    for (int i = 0; i < n; ++i) {
        X[i] = std::sin(Z.row(i).dot(bx) + 0.5 * ex[i]);
        Y[i] = std::cos(Z.row(i).dot(by) + spec.b * X[i] + 0.5 * ey[i]);
    }

    GeneratedData out;
    out.x_sources = {"Z", "eps_X"};
    out.y_sources = {"Z", "eps_Y"};
    if (spec.b != 0.0) out.y_sources.push_back("eps_X");
    out.X = ObjectSample::from_euclidean(X);
    out.Y = ObjectSample::from_euclidean(Y);
    out.Z = ObjectSample::from_euclidean(Z);
    return out;
}

GeneratedData gen_distributional(const DgpSpec& spec, Rng& rng) {
    if (spec.family != DgpSpec::Family::distributional) throw ParameterError("family mismatch");
    spec.validate();
    const int n = spec.n;
    const int d = 10;
    const int m = spec.m;

    // Draw order (fixed): Z row-wise, beta_X, beta_Y, eps_X, eps_Y, then per
    // observation the X cloud followed by the Y cloud.
    Matrix Z(n, d);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < d; ++j) Z(i, j) = rng.normal();
    }
    const Vector bx = l1_normalized_uniform(d, rng);
    const Vector by = l1_normalized_uniform(d, rng);
    Vector ex(n), ey(n);
    for (int i = 0; i < n; ++i) ex[i] = rng.normal();
    for (int i = 0; i < n; ++i) ey[i] = rng.normal();

    std::vector<Vector> cx(static_cast<std::size_t>(n));
    std::vector<Vector> cy(static_cast<std::size_t>(n));
    const bool mean_kind = spec.dist_kind == DgpSpec::DistKind::mean_varying;
    for (int i = 0; i < n; ++i) {
        const double sx = Z.row(i).dot(bx) + 0.5 * ex[i];
        const double sy = Z.row(i).dot(by) + spec.c * ex[i] + 0.5 * ey[i];
        Vector cloud_x(m), cloud_y(m);
        if (mean_kind) {
            for (int k = 0; k < m; ++k) cloud_x[k] = sx + rng.normal();
            for (int k = 0; k < m; ++k) cloud_y[k] = sy + rng.normal();
        } else {
            const double sd_x = std::sqrt(std::exp(sx));
            const double sd_y = std::sqrt(std::exp(sy));
            for (int k = 0; k < m; ++k) cloud_x[k] = sd_x * rng.normal();
            for (int k = 0; k < m; ++k) cloud_y[k] = sd_y * rng.normal();
        }
        cx[static_cast<std::size_t>(i)] = std::move(cloud_x);
        cy[static_cast<std::size_t>(i)] = std::move(cloud_y);
    }

    GeneratedData out;
    out.x_sources = {"Z", "eps_X"};
    out.y_sources = {"Z", "eps_Y"};
    if (spec.c != 0.0) out.y_sources.push_back("eps_X");
    out.X = ObjectSample::from_clouds(std::move(cx), spec.cloud_metric);
    out.Y = ObjectSample::from_clouds(std::move(cy), spec.cloud_metric);
    out.Z = ObjectSample::from_euclidean(Z);
    return out;
}

GeneratedData generate(const DgpSpec& spec, Rng& rng) {
    switch (spec.family) {
        case DgpSpec::Family::low_dim: return gen_low_dim(spec, rng);
        case DgpSpec::Family::high_dim: return gen_high_dim(spec, rng);
        case DgpSpec::Family::distributional: return gen_distributional(spec, rng);
    }
    throw Error("unreachable DGP family");
}

StudyReport monte_carlo_study(const DgpSpec& dgp, const TestConfig& config,
                              int replications, std::uint64_t master_seed) {
    if (replications < 1) throw ParameterError("replications must be >= 1");
    dgp.validate();
    config.validate();

    const auto start = std::chrono::steady_clock::now();
    std::vector<char> reject(static_cast<std::size_t>(replications), 0);
    const Rng master(master_seed);

    parallel_for(static_cast<std::size_t>(replications), [&](std::size_t r) {
        try {
            const Rng rep = master.spawn(static_cast<std::uint64_t>(r));
            Rng data_rng = rep.spawn(0);
            const GeneratedData data = generate(dgp, data_rng);

            TestConfig rep_config = config;
            rep_config.seed = Rng::derive(rep.seed(), 1);
            rep_config.workers = 1;  // parallelism lives at the replication level
            reject[r] = run_test(data.X, data.Y, data.Z, rep_config).reject ? 1 : 0;
        } catch (const DegenerateGramError& e) {
            throw DegenerateGramError("replication " + std::to_string(r) + ": " + e.what());
        } catch (const DegenerateDistancesError& e) {
            throw DegenerateDistancesError("replication " + std::to_string(r) + ": " + e.what());
        } catch (const Error& e) {
            throw Error("replication " + std::to_string(r) + ": " + e.what());
        }
    });

    const auto stop = std::chrono::steady_clock::now();

    StudyRow row;
    row.dgp = dgp;
    row.B = config.bootstrap_B;
    row.replications = replications;
    double rate = 0.0;
    for (char c : reject) rate += static_cast<double>(c);
    rate /= static_cast<double>(replications);
    row.rejection_rate = rate;
    row.se = std::sqrt(rate * (1.0 - rate) / static_cast<double>(replications));
    row.wall_time_s = std::chrono::duration<double>(stop - start).count();

    StudyReport report;
    report.rows.push_back(row);
    return report;
}

std::string family_name(DgpSpec::Family f) {
    switch (f) {
        case DgpSpec::Family::low_dim: return "low_dim";
        case DgpSpec::Family::high_dim: return "high_dim";
        case DgpSpec::Family::distributional: return "distributional";
    }
    return "unknown";
}

std::string scenario_name(const DgpSpec& spec) {
    switch (spec.family) {
        case DgpSpec::Family::low_dim:
            switch (spec.scenario) {
                case DgpSpec::Scenario::null_case: return "null";
                case DgpSpec::Scenario::dgp1_1: return "dgp1_1";
                case DgpSpec::Scenario::dgp1_2: return "dgp1_2";
                case DgpSpec::Scenario::dgp1_3: return "dgp1_3";
            }
            return "unknown";
        case DgpSpec::Family::high_dim:
            return spec.b == 0.0 ? "null" : "h1";
        case DgpSpec::Family::distributional:
            return spec.dist_kind == DgpSpec::DistKind::mean_varying ? "mean_varying"
                                                                     : "variance_varying";
    }
    return "unknown";
}

namespace {

std::string format_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

std::string study_csv(const StudyReport& report, bool include_timing) {
    std::ostringstream os;
    os << "family,scenario,a,d,c,n,B,replications,rejection_rate,se,wall_time_s\n";
    for (const StudyRow& row : report.rows) {
        os << family_name(row.dgp.family) << ',' << scenario_name(row.dgp) << ','
           << row.dgp.a << ',' << row.dgp.d << ',' << format_double(row.dgp.c) << ','
           << row.dgp.n << ',' << row.B << ',' << row.replications << ','
           << format_double(row.rejection_rate) << ',' << format_double(row.se) << ',';
        if (include_timing) {
            os << format_double(row.wall_time_s);
        } else {
            os << "nan";
        }
        os << '\n';
    }
    return os.str();
}

}  // namespace sgcm
