#pragma once

#include <string>
#include <vector>

#include "sgcm/pipeline.hpp"

namespace sgcm {

/// Data-generating process parameters.  `a` is the oscillation parameter of
/// the damped sine family (low_dim), `b` the direct-effect strength
/// (high_dim, 0 under the null and 0.5 under the alternative), `c` the
/// shared-noise signal of the distributional designs (0 under the null).
struct DgpSpec {
    enum class Family { low_dim, high_dim, distributional };
    enum class Scenario { null_case, dgp1_1, dgp1_2, dgp1_3 };
    enum class DistKind { mean_varying, variance_varying };

    Family family = Family::low_dim;
    int a = 2;
    Scenario scenario = Scenario::null_case;
    int d = 10;
    double b = 0.0;
    DistKind dist_kind = DistKind::mean_varying;
    double c = 0.0;
    int m = 150;
    int n = 100;
    /// Semimetric applied to the generated point clouds (distributional only).
    Metric cloud_metric = Metric::wasserstein1;

    void validate() const;
};

/// Generated dataset plus source bookkeeping: which latent draws feed the X
/// channel and which feed Y.  Under every null scenario the two source sets
/// share nothing beyond Z.
struct GeneratedData {
    ObjectSample X;
    ObjectSample Y;
    ObjectSample Z;
    std::vector<std::string> x_sources;
    std::vector<std::string> y_sources;
};

/// Damped sine f_a(z) = exp(-z^2/2) sin(a z).
double damped_sine(double a, double z);

GeneratedData gen_low_dim(const DgpSpec& spec, Rng& rng);
GeneratedData gen_high_dim(const DgpSpec& spec, Rng& rng);
GeneratedData gen_distributional(const DgpSpec& spec, Rng& rng);

/// Dispatch on spec.family.
GeneratedData generate(const DgpSpec& spec, Rng& rng);

struct StudyRow {
    DgpSpec dgp;
    int B = 0;
    int replications = 0;
    double rejection_rate = 0.0;
    double se = 0.0;
    double wall_time_s = 0.0;
};

struct StudyReport {
    std::vector<StudyRow> rows;
};

/// Monte Carlo size/power study: replication r draws data and runs the test
/// with seeds derived as substreams r of the master seed, so the report is
/// deterministic and independent of the worker count.  A failing replication
/// aborts the study naming the (lowest) failing index.
StudyReport monte_carlo_study(const DgpSpec& dgp, const TestConfig& config,
                              int replications, std::uint64_t master_seed);

/// CSV serialization with the fixed header
/// family,scenario,a,d,c,n,B,replications,rejection_rate,se,wall_time_s.
/// Wall time is a measured quantity and breaks byte-reproducibility, so it
/// is only written when include_timing is set; otherwise the column holds
/// nan.
std::string study_csv(const StudyReport& report, bool include_timing);

std::string family_name(DgpSpec::Family f);
std::string scenario_name(const DgpSpec& spec);

}  // namespace sgcm
