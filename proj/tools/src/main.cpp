// sgcm: conditional-independence testing for metric-space data.
//
// Subcommands:
//   test      run the test on user CSV data, write a JSON result record
//   simulate  Monte Carlo size/power study, write a CSV report
//   diagnose  semimetric / kernel diagnostics for one variable
//
// Exit codes: 0 success, 2 input or configuration error, 3 degenerate-data
// error, 1 internal error.  Every output file starts with '#' comment lines
// carrying the fully resolved configuration and seed.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sgcm/io.hpp"
#include "sgcm/pipeline.hpp"
#include "sgcm/simulate.hpp"

namespace {

using sgcm::Metric;
using sgcm::ObjectSample;

std::string fmt_g17(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

using KV = std::vector<std::pair<std::string, std::string>>;

std::string header_comment(const std::string& command, const KV& kv) {
    std::string h = "# sgcm " + command + "\n";
    for (const auto& [k, v] : kv) h += "# " + k + " = " + v + "\n";
    return h;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw sgcm::FileError("cannot open output file " + path);
    out << content;
    if (!out.good()) throw sgcm::FileError("failed writing " + path);
}

// ---------------------------------------------------------------- spaces --

struct SpaceOpts {
    std::string path;
    std::string space = "euclidean";
    std::string metric;
    double curve_p = 2.0;
    std::string curve_base = "euclidean";
};

void add_space_options(CLI::App* cmd, const std::string& prefix, SpaceOpts& o,
                       const std::string& what) {
    cmd->add_option("--" + prefix, o.path,
                    what + " data (CSV file; directory of CSVs for curves)")
        ->required();
    cmd->add_option("--" + prefix + "-space", o.space,
                    what + " space: euclidean|sphere|cloud|density|curve")
        ->check(CLI::IsMember({"euclidean", "sphere", "cloud", "density", "curve"}))
        ->capture_default_str();
    cmd->add_option("--" + prefix + "-metric", o.metric,
                    what + " semimetric for cloud/density spaces")
        ->check(CLI::IsMember({"wasserstein1", "wasserstein2", "fisher_rao", "hellinger"}));
    cmd->add_option("--" + prefix + "-curve-p", o.curve_p, what + " curve L^p order")
        ->capture_default_str();
    cmd->add_option("--" + prefix + "-curve-base", o.curve_base,
                    what + " curve base space: euclidean|sphere")
        ->check(CLI::IsMember({"euclidean", "sphere"}))
        ->capture_default_str();
}

Metric parse_metric(const std::string& s, Metric fallback) {
    if (s.empty()) return fallback;
    if (s == "wasserstein1") return Metric::wasserstein1;
    if (s == "wasserstein2") return Metric::wasserstein2;
    if (s == "fisher_rao") return Metric::fisher_rao;
    if (s == "hellinger") return Metric::hellinger;
    throw sgcm::ParameterError("unknown metric " + s);
}

std::string effective_metric(const SpaceOpts& o) {
    if (!o.metric.empty()) return o.metric;
    if (o.space == "euclidean") return "euclidean";
    if (o.space == "sphere") return "great_circle";
    if (o.space == "cloud") return "wasserstein1";
    if (o.space == "density") return "fisher_rao";
    return "lp_curve";
}

ObjectSample load_space(const SpaceOpts& o) {
    if (o.space == "euclidean") {
        return ObjectSample::from_euclidean(sgcm::read_csv_matrix(o.path));
    }
    if (o.space == "sphere") {
        return ObjectSample::from_sphere(sgcm::read_csv_matrix(o.path));
    }
    if (o.space == "cloud") {
        return ObjectSample::from_clouds(sgcm::read_csv_rows(o.path),
                                         parse_metric(o.metric, Metric::wasserstein1));
    }
    if (o.space == "density") {
        return ObjectSample::from_densities(sgcm::read_density_csv(o.path),
                                            parse_metric(o.metric, Metric::fisher_rao));
    }
    if (o.space == "curve") {
        const auto base = o.curve_base == "sphere" ? sgcm::CurveBase::sphere
                                                   : sgcm::CurveBase::euclidean;
        return ObjectSample::from_curves(sgcm::read_curve_dir(o.path), o.curve_p, base);
    }
    throw sgcm::ParameterError("unknown space " + o.space);
}

void describe_space(KV& kv, const std::string& prefix, const SpaceOpts& o) {
    kv.emplace_back(prefix, o.path);
    kv.emplace_back(prefix + "_space", o.space);
    kv.emplace_back(prefix + "_metric", effective_metric(o));
    if (o.space == "curve") {
        kv.emplace_back(prefix + "_curve_p", fmt_g17(o.curve_p));
        kv.emplace_back(prefix + "_curve_base", o.curve_base);
    }
}

// ----------------------------------------------------------- test config --

struct TestOpts {
    double frac2 = 0.2;
    double tau = 0.8;
    int folds = 3;
    int B = 2000;
    double alpha = 0.05;
    std::string law = "gaussian";
    std::string learner = "auto";
    std::string kernel = "exponential";
    double q = 1.0;
    double rq_c = 1.0;
    double rq_alpha = 1.0;
    double gamma_x = 0.0;
    double gamma_y = 0.0;
    double gamma_z = 0.0;
    int gbt_rounds = 200;
    int gbt_depth = 2;
    double gbt_lr = 0.1;
};

void add_test_options(CLI::App* cmd, TestOpts& o, int default_B) {
    o.B = default_B;
    cmd->add_option("--frac2", o.frac2, "Basis-sample fraction")->capture_default_str();
    cmd->add_option("--tau", o.tau, "FVE truncation threshold for X and Y")
        ->capture_default_str();
    cmd->add_option("--folds", o.folds, "Cross-fitting folds")->capture_default_str();
    cmd->add_option("--B", o.B, "Wild-bootstrap replicates")->capture_default_str();
    cmd->add_option("--alpha", o.alpha, "Test level")->capture_default_str();
    cmd->add_option("--law", o.law, "Multiplier law: gaussian|rademacher|mammen")
        ->check(CLI::IsMember({"gaussian", "rademacher", "mammen"}))
        ->capture_default_str();
    cmd->add_option("--learner", o.learner, "Regression learner: auto|krr|gbt")
        ->check(CLI::IsMember({"auto", "krr", "gbt"}))
        ->capture_default_str();
    cmd->add_option("--kernel", o.kernel, "Kernel family: exponential|rational_quadratic")
        ->check(CLI::IsMember({"exponential", "rational_quadratic"}))
        ->capture_default_str();
    cmd->add_option("--q", o.q, "Semimetric power inside the kernel")->capture_default_str();
    cmd->add_option("--rq-c", o.rq_c, "Rational-quadratic scale c")->capture_default_str();
    cmd->add_option("--rq-alpha", o.rq_alpha, "Rational-quadratic exponent alpha")
        ->capture_default_str();
    cmd->add_option("--gamma-x", o.gamma_x, "X bandwidth override (0 = median heuristic)")
        ->capture_default_str();
    cmd->add_option("--gamma-y", o.gamma_y, "Y bandwidth override (0 = median heuristic)")
        ->capture_default_str();
    cmd->add_option("--gamma-z", o.gamma_z, "Z bandwidth override (0 = median heuristic)")
        ->capture_default_str();
    cmd->add_option("--gbt-rounds", o.gbt_rounds, "Boosting rounds")->capture_default_str();
    cmd->add_option("--gbt-depth", o.gbt_depth, "Tree depth")->capture_default_str();
    cmd->add_option("--gbt-lr", o.gbt_lr, "Boosting learning rate")->capture_default_str();
}

sgcm::TestConfig to_config(const TestOpts& o, std::uint64_t seed) {
    sgcm::TestConfig c;
    c.frac2 = o.frac2;
    c.tau_x = o.tau;
    c.tau_y = o.tau;
    c.folds = o.folds;
    c.bootstrap_B = o.B;
    c.alpha = o.alpha;
    if (o.law == "gaussian") c.law = sgcm::MultiplierLaw::gaussian;
    else if (o.law == "rademacher") c.law = sgcm::MultiplierLaw::rademacher;
    else c.law = sgcm::MultiplierLaw::mammen;
    if (o.learner == "auto") c.learner = sgcm::LearnerChoice::automatic;
    else if (o.learner == "krr") c.learner = sgcm::LearnerChoice::kernel_ridge;
    else c.learner = sgcm::LearnerChoice::gradient_boosted_trees;
    c.kernel_family = o.kernel == "rational_quadratic"
                          ? sgcm::KernelFamily::rational_quadratic
                          : sgcm::KernelFamily::exponential;
    c.kernel_q = o.q;
    c.rq_c = o.rq_c;
    c.rq_alpha = o.rq_alpha;
    c.gamma_x = o.gamma_x;
    c.gamma_y = o.gamma_y;
    c.gamma_z = o.gamma_z;
    c.regressor.gbt_rounds = o.gbt_rounds;
    c.regressor.gbt_depth = o.gbt_depth;
    c.regressor.gbt_learning_rate = o.gbt_lr;
    c.seed = seed;
    return c;
}

void describe_test(KV& kv, const TestOpts& o, std::uint64_t seed) {
    kv.emplace_back("frac2", fmt_g17(o.frac2));
    kv.emplace_back("tau", fmt_g17(o.tau));
    kv.emplace_back("folds", std::to_string(o.folds));
    kv.emplace_back("B", std::to_string(o.B));
    kv.emplace_back("alpha", fmt_g17(o.alpha));
    kv.emplace_back("law", o.law);
    kv.emplace_back("learner", o.learner);
    kv.emplace_back("kernel", o.kernel);
    kv.emplace_back("q", fmt_g17(o.q));
    if (o.kernel == "rational_quadratic") {
        kv.emplace_back("rq_c", fmt_g17(o.rq_c));
        kv.emplace_back("rq_alpha", fmt_g17(o.rq_alpha));
    }
    kv.emplace_back("gamma_x", fmt_g17(o.gamma_x));
    kv.emplace_back("gamma_y", fmt_g17(o.gamma_y));
    kv.emplace_back("gamma_z", fmt_g17(o.gamma_z));
    kv.emplace_back("gbt_rounds", std::to_string(o.gbt_rounds));
    kv.emplace_back("gbt_depth", std::to_string(o.gbt_depth));
    kv.emplace_back("gbt_lr", fmt_g17(o.gbt_lr));
    kv.emplace_back("seed", std::to_string(seed));
}

// ------------------------------------------------------------- commands --

int cmd_test(const SpaceOpts& x, const SpaceOpts& y, const SpaceOpts& z,
             const TestOpts& topt, std::uint64_t seed, const std::string& out_path) {
    const ObjectSample X = load_space(x);
    const ObjectSample Y = load_space(y);
    const ObjectSample Z = load_space(z);
    const sgcm::TestConfig config = to_config(topt, seed);
    const sgcm::TestResult r = sgcm::run_test(X, Y, Z, config);

    KV kv;
    describe_space(kv, "x", x);
    describe_space(kv, "y", y);
    describe_space(kv, "z", z);
    describe_test(kv, topt, seed);
    kv.emplace_back("out", out_path);

    nlohmann::json j;
    j["statistic"] = r.statistic;
    j["boot_quantile"] = r.boot_quantile;
    j["p_value"] = r.p_value;
    j["reject"] = r.reject;
    nlohmann::json d;
    d["n"] = r.diagnostics.n;
    d["n1"] = r.diagnostics.n1;
    d["n2"] = r.diagnostics.n2;
    d["P"] = r.diagnostics.P;
    d["Q"] = r.diagnostics.Q;
    d["fve_x"] = r.diagnostics.fve_x;
    d["fve_y"] = r.diagnostics.fve_y;
    d["gap_warning_x"] = r.diagnostics.gap_warning_x;
    d["gap_warning_y"] = r.diagnostics.gap_warning_y;
    d["learner_mse_x"] = r.diagnostics.learner_mse_x;
    d["learner_mse_y"] = r.diagnostics.learner_mse_y;
    d["gamma_x"] = r.diagnostics.gamma_x;
    d["gamma_y"] = r.diagnostics.gamma_y;
    d["gamma_z"] = r.diagnostics.gamma_z;
    j["diagnostics"] = d;

    write_file(out_path, header_comment("test", kv) + j.dump(2) + "\n");
    std::cout << "statistic " << fmt_g17(r.statistic) << "\np_value " << fmt_g17(r.p_value)
              << "\nreject " << (r.reject ? "true" : "false") << "\n";
    return 0;
}

struct SimOpts {
    std::string family;
    std::string scenario = "null";
    int a = 2;
    int d = 10;
    int n = 100;
    int m = 150;
    double c = 0.0;
    std::string metric = "wasserstein1";
    int reps = 300;
    bool timing = false;
    bool full_scale = false;
};

sgcm::DgpSpec build_dgp(const SimOpts& o) {
    sgcm::DgpSpec dgp;
    dgp.n = o.n;
    if (o.family == "low_dim") {
        dgp.family = sgcm::DgpSpec::Family::low_dim;
        dgp.a = o.a;
        if (o.scenario == "null") dgp.scenario = sgcm::DgpSpec::Scenario::null_case;
        else if (o.scenario == "dgp1_1") dgp.scenario = sgcm::DgpSpec::Scenario::dgp1_1;
        else if (o.scenario == "dgp1_2") dgp.scenario = sgcm::DgpSpec::Scenario::dgp1_2;
        else if (o.scenario == "dgp1_3") dgp.scenario = sgcm::DgpSpec::Scenario::dgp1_3;
        else {
            throw sgcm::ParameterError("scenario '" + o.scenario +
                                       "' not valid for family low_dim");
        }
    } else if (o.family == "high_dim") {
        dgp.family = sgcm::DgpSpec::Family::high_dim;
        dgp.d = o.d;
        if (o.scenario == "null") dgp.b = 0.0;
        else if (o.scenario == "h1") dgp.b = 0.5;
        else {
            throw sgcm::ParameterError("scenario '" + o.scenario +
                                       "' not valid for family high_dim");
        }
    } else if (o.family == "distributional") {
        dgp.family = sgcm::DgpSpec::Family::distributional;
        if (o.scenario == "mean_varying" || o.scenario == "null") {
            dgp.dist_kind = sgcm::DgpSpec::DistKind::mean_varying;
        } else if (o.scenario == "variance_varying") {
            dgp.dist_kind = sgcm::DgpSpec::DistKind::variance_varying;
        } else {
            throw sgcm::ParameterError("scenario '" + o.scenario +
                                       "' not valid for family distributional");
        }
        dgp.c = o.c;
        dgp.m = o.m;
        dgp.cloud_metric = parse_metric(o.metric, Metric::wasserstein1);
    } else {
        throw sgcm::ParameterError("unknown family " + o.family);
    }
    dgp.validate();
    return dgp;
}

int cmd_simulate(const SimOpts& so, const TestOpts& topt, std::uint64_t seed,
                 const std::string& out_path) {
    const sgcm::DgpSpec dgp = build_dgp(so);
    const sgcm::TestConfig config = to_config(topt, 0);
    const sgcm::StudyReport report = sgcm::monte_carlo_study(dgp, config, so.reps, seed);

    KV kv;
    kv.emplace_back("family", sgcm::family_name(dgp.family));
    kv.emplace_back("scenario", sgcm::scenario_name(dgp));
    kv.emplace_back("a", std::to_string(dgp.a));
    kv.emplace_back("d", std::to_string(dgp.d));
    kv.emplace_back("b", fmt_g17(dgp.b));
    kv.emplace_back("c", fmt_g17(dgp.c));
    kv.emplace_back("m", std::to_string(dgp.m));
    kv.emplace_back("n", std::to_string(dgp.n));
    if (dgp.family == sgcm::DgpSpec::Family::distributional) {
        kv.emplace_back("cloud_metric", so.metric);
    }
    kv.emplace_back("replications", std::to_string(so.reps));
    kv.emplace_back("timing", so.timing ? "true" : "false");
    kv.emplace_back("full_scale", so.full_scale ? "true" : "false");
    describe_test(kv, topt, seed);
    kv.emplace_back("out", out_path);

    write_file(out_path, header_comment("simulate", kv) + sgcm::study_csv(report, so.timing));
    std::cout << "rejection_rate " << fmt_g17(report.rows.front().rejection_rate) << "\n";
    return 0;
}

int cmd_diagnose(const SpaceOpts& in, const TestOpts& topt, int trials,
                 std::uint64_t seed, const std::string& out_path) {
    const ObjectSample S = load_space(in);
    const sgcm::SemimetricMatrix D = pairwise_distances(S);
    const int n = static_cast<int>(D.size());

    double dmin = 0.0, dmax = 0.0, dmean = 0.0;
    if (n > 1) {
        bool first = true;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < i; ++j) {
                const double v = D.entries()(i, j);
                if (first) {
                    dmin = dmax = v;
                    first = false;
                } else {
                    dmin = std::min(dmin, v);
                    dmax = std::max(dmax, v);
                }
                dmean += v;
            }
        }
        dmean /= 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
    }

    const double gamma = topt.gamma_x > 0.0 ? topt.gamma_x : sgcm::median_heuristic(D);
    sgcm::KernelSpec spec;
    spec.family = topt.kernel == "rational_quadratic" ? sgcm::KernelFamily::rational_quadratic
                                                      : sgcm::KernelFamily::exponential;
    spec.gamma = gamma;
    spec.q = topt.q;
    spec.c = topt.rq_c;
    spec.alpha = topt.rq_alpha;
    const sgcm::GramMatrix G = gram_from_semimetric(spec, D);
    const double min_eig = sgcm::min_eigenvalue(G.entries());

    sgcm::Rng rng(seed);
    const double neg_type = sgcm::check_negative_type(D, trials, rng);

    const sgcm::EigenSystem es = sgcm::eigensystem_from_gram(G, n);
    int n_pos = 0;
    while (n_pos < static_cast<int>(es.kappa_all.size()) && es.kappa_all[n_pos] > 0.0) {
        ++n_pos;
    }
    double total = 0.0;
    for (int p = 0; p < n_pos; ++p) total += es.kappa_all[p];

    KV kv;
    kv.emplace_back("input", in.path);
    kv.emplace_back("space", in.space);
    kv.emplace_back("metric", effective_metric(in));
    kv.emplace_back("kernel", topt.kernel);
    kv.emplace_back("q", fmt_g17(topt.q));
    kv.emplace_back("gamma_override", fmt_g17(topt.gamma_x));
    kv.emplace_back("negative_type_trials", std::to_string(trials));
    kv.emplace_back("seed", std::to_string(seed));
    kv.emplace_back("out", out_path);

    std::string body;
    body += "n = " + std::to_string(n) + "\n";
    body += "distance_min = " + fmt_g17(dmin) + "\n";
    body += "distance_mean = " + fmt_g17(dmean) + "\n";
    body += "distance_max = " + fmt_g17(dmax) + "\n";
    body += "gamma = " + fmt_g17(gamma) + "\n";
    body += "negative_type_max = " + fmt_g17(neg_type) + "\n";
    body += "gram_min_eigenvalue = " + fmt_g17(min_eig) + "\n";
    body += "eigenvalues = " + std::to_string(n_pos) + "\n";
    body += "index,lambda,fve\n";
    double cum = 0.0;
    for (int p = 0; p < n_pos; ++p) {
        cum += es.kappa_all[p];
        const double lambda = es.kappa_all[p] / static_cast<double>(n);
        body += std::to_string(p + 1) + "," + fmt_g17(lambda) + "," + fmt_g17(cum / total) +
                "\n";
    }

    write_file(out_path, header_comment("diagnose", kv) + body);
    std::cout << "gamma " << fmt_g17(gamma) << "\nnegative_type_max " << fmt_g17(neg_type)
              << "\ngram_min_eigenvalue " << fmt_g17(min_eig) << "\n";
    return 0;
}

int fail(int code, const char* what) {
    std::cerr << "error: " << what << "\n";
    return code;
}

template <typename Fn>
int guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const sgcm::DegenerateGramError& e) {
        return fail(3, e.what());
    } catch (const sgcm::DegenerateDistancesError& e) {
        return fail(3, e.what());
    } catch (const sgcm::InvariantError& e) {
        return fail(3, e.what());
    } catch (const sgcm::GridError& e) {
        return fail(3, e.what());
    } catch (const sgcm::FileError& e) {
        return fail(2, e.what());
    } catch (const sgcm::ParameterError& e) {
        return fail(2, e.what());
    } catch (const sgcm::DimensionError& e) {
        return fail(2, e.what());
    } catch (const sgcm::ShapeError& e) {
        return fail(2, e.what());
    } catch (const sgcm::SampleSizeError& e) {
        return fail(2, e.what());
    } catch (const sgcm::EmptyInputError& e) {
        return fail(2, e.what());
    } catch (const sgcm::FoldSizeError& e) {
        return fail(2, e.what());
    } catch (const std::exception& e) {
        return fail(1, e.what());
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Conditional-independence testing for metric-space data"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Read options from an INI config file; flags override");

    SpaceOpts tx, ty, tz;
    TestOpts t_test;
    std::uint64_t t_seed = 0;
    std::string t_out = "sgcm_result.json";
    CLI::App* test = app.add_subcommand("test", "Run the test on data files");
    add_space_options(test, "x", tx, "X");
    add_space_options(test, "y", ty, "Y");
    add_space_options(test, "z", tz, "Z");
    add_test_options(test, t_test, 2000);
    test->add_option("--seed", t_seed, "Random seed")->capture_default_str();
    test->add_option("--out", t_out, "Result file (JSON after '#' header)")
        ->capture_default_str();

    SimOpts so;
    TestOpts t_sim;
    std::uint64_t s_seed = 0;
    std::string s_out = "sgcm_study.csv";
    CLI::App* sim = app.add_subcommand("simulate", "Monte Carlo size/power study");
    sim->add_option("--family", so.family, "DGP family: low_dim|high_dim|distributional")
        ->check(CLI::IsMember({"low_dim", "high_dim", "distributional"}))
        ->required();
    sim->add_option("--scenario", so.scenario,
                    "low_dim: null|dgp1_1|dgp1_2|dgp1_3; high_dim: null|h1; "
                    "distributional: mean_varying|variance_varying")
        ->capture_default_str();
    sim->add_option("--a", so.a, "Damped-sine oscillation (2, 4 or 6)")->capture_default_str();
    sim->add_option("--d", so.d, "Z dimension (high_dim)")->capture_default_str();
    sim->add_option("--n", so.n, "Sample size")->capture_default_str();
    sim->add_option("--m", so.m, "Cloud size (distributional)")->capture_default_str();
    sim->add_option("--c", so.c, "Shared-noise signal (distributional)")
        ->capture_default_str();
    sim->add_option("--metric", so.metric, "Cloud semimetric (distributional)")
        ->check(CLI::IsMember({"wasserstein1", "wasserstein2", "fisher_rao", "hellinger"}))
        ->capture_default_str();
    sim->add_option("--reps", so.reps, "Monte Carlo replications")->capture_default_str();
    sim->add_flag("--timing", so.timing, "Write measured wall time to the CSV");
    sim->add_flag("--full-scale", so.full_scale,
                  "Full-scale defaults: B = 2000, reps = 1000 (explicit flags still win)");
    add_test_options(sim, t_sim, 500);
    sim->add_option("--seed", s_seed, "Master seed")->capture_default_str();
    sim->add_option("--out", s_out, "Study CSV path")->capture_default_str();

    SpaceOpts din;
    TestOpts t_diag;
    int d_trials = 200;
    std::uint64_t d_seed = 0;
    std::string d_out = "sgcm_diagnostics.txt";
    CLI::App* diag = app.add_subcommand("diagnose", "Semimetric and kernel diagnostics");
    diag->add_option("--input", din.path, "Data (CSV file; directory of CSVs for curves)")
        ->required();
    diag->add_option("--space", din.space, "Space: euclidean|sphere|cloud|density|curve")
        ->check(CLI::IsMember({"euclidean", "sphere", "cloud", "density", "curve"}))
        ->capture_default_str();
    diag->add_option("--metric", din.metric, "Semimetric for cloud/density spaces")
        ->check(CLI::IsMember({"wasserstein1", "wasserstein2", "fisher_rao", "hellinger"}));
    diag->add_option("--curve-p", din.curve_p, "Curve L^p order")->capture_default_str();
    diag->add_option("--curve-base", din.curve_base, "Curve base space: euclidean|sphere")
        ->check(CLI::IsMember({"euclidean", "sphere"}))
        ->capture_default_str();
    diag->add_option("--kernel", t_diag.kernel,
                     "Kernel family: exponential|rational_quadratic")
        ->check(CLI::IsMember({"exponential", "rational_quadratic"}))
        ->capture_default_str();
    diag->add_option("--q", t_diag.q, "Semimetric power inside the kernel")
        ->capture_default_str();
    diag->add_option("--rq-c", t_diag.rq_c, "Rational-quadratic scale c")
        ->capture_default_str();
    diag->add_option("--rq-alpha", t_diag.rq_alpha, "Rational-quadratic exponent alpha")
        ->capture_default_str();
    diag->add_option("--gamma", t_diag.gamma_x, "Bandwidth override (0 = median heuristic)")
        ->capture_default_str();
    diag->add_option("--trials", d_trials, "Negative-type check weight vectors")
        ->capture_default_str();
    diag->add_option("--seed", d_seed, "Random seed")->capture_default_str();
    diag->add_option("--out", d_out, "Diagnostics file")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (sim->parsed() && so.full_scale) {
        if (sim->count("--B") == 0) t_sim.B = 2000;
        if (sim->count("--reps") == 0) so.reps = 1000;
    }

    if (test->parsed()) {
        return guarded([&] { return cmd_test(tx, ty, tz, t_test, t_seed, t_out); });
    }
    if (sim->parsed()) {
        return guarded([&] { return cmd_simulate(so, t_sim, s_seed, s_out); });
    }
    return guarded([&] { return cmd_diagnose(din, t_diag, d_trials, d_seed, d_out); });
}
