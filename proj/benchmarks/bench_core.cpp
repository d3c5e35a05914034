#include <benchmark/benchmark.h>

#include <sgcm/pipeline.hpp>
#include <sgcm/simulate.hpp>

namespace {

using sgcm::GramMatrix;
using sgcm::Matrix;
using sgcm::ObjectSample;
using sgcm::Rng;
using sgcm::Vector;

Matrix random_points(int n, int d, std::uint64_t seed) {
    Rng rng(seed);
    Matrix m(n, d);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < d; ++j) m(i, j) = rng.normal();
    }
    return m;
}

std::vector<Vector> random_clouds(int n, int m, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Vector> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        Vector cloud(m);
        for (int k = 0; k < m; ++k) cloud[k] = rng.normal();
        out[static_cast<std::size_t>(i)] = std::move(cloud);
    }
    return out;
}

GramMatrix kernel_gram(const ObjectSample& sample) {
    const sgcm::SemimetricMatrix D = sgcm::pairwise_distances(sample);
    sgcm::KernelSpec spec;
    spec.gamma = sgcm::median_heuristic(D);
    return sgcm::gram_from_semimetric(spec, D);
}

void BM_GramAssembly(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const ObjectSample sample = ObjectSample::from_euclidean(random_points(n, 3, 1));
    for (auto _ : state) {
        benchmark::DoNotOptimize(kernel_gram(sample));
    }
}
BENCHMARK(BM_GramAssembly)->Arg(100)->Arg(200)->Arg(400);

void BM_Eigensystem(benchmark::State& state) {
    const int n2 = static_cast<int>(state.range(0));
    const ObjectSample sample = ObjectSample::from_euclidean(random_points(n2, 3, 2));
    const GramMatrix G = kernel_gram(sample);
    for (auto _ : state) {
        benchmark::DoNotOptimize(sgcm::eigensystem_from_gram(G, n2));
    }
}
BENCHMARK(BM_Eigensystem)->Arg(40)->Arg(80)->Arg(160);

void BM_StatisticAndBootstrap(benchmark::State& state) {
    const int n1 = static_cast<int>(state.range(0));
    Rng rng(3);
    sgcm::ResidualScores rX{random_points(n1, 3, 4)};
    sgcm::ResidualScores rY{random_points(n1, 3, 5)};
    const GramMatrix Kz = kernel_gram(ObjectSample::from_euclidean(random_points(n1, 1, 6)));
    const sgcm::CoreMatrix A = sgcm::core_matrix(rX, rY, Kz);
    for (auto _ : state) {
        benchmark::DoNotOptimize(sgcm::sgcm_statistic(A));
        benchmark::DoNotOptimize(
            sgcm::bootstrap_replicates(A, 500, sgcm::MultiplierLaw::gaussian, Rng(7), 1));
    }
}
BENCHMARK(BM_StatisticAndBootstrap)->Arg(80)->Arg(160)->Arg(240);

void BM_WassersteinPairwise(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const ObjectSample sample =
        ObjectSample::from_clouds(random_clouds(n, 150, 8), sgcm::Metric::wasserstein1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(sgcm::pairwise_distances(sample));
    }
}
BENCHMARK(BM_WassersteinPairwise)->Arg(50)->Arg(100)->Arg(200);

void BM_FullTest(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    sgcm::DgpSpec dgp;
    dgp.n = n;
    Rng rng(9);
    const sgcm::GeneratedData data = sgcm::generate(dgp, rng);
    sgcm::TestConfig cfg;
    cfg.bootstrap_B = 500;
    cfg.workers = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(sgcm::run_test(data.X, data.Y, data.Z, cfg));
    }
}
BENCHMARK(BM_FullTest)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
