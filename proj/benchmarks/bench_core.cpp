#include "objsn/changepoint.hpp"
#include "objsn/null_dist.hpp"
#include "objsn/rng.hpp"
#include "objsn/series.hpp"
#include "objsn/space.hpp"
#include "objsn/two_sample.hpp"

#include <benchmark/benchmark.h>

#include <vector>

namespace {

using namespace objsn;

MetricObject random_object(const SpaceDescriptor& desc, Rng& rng) {
    switch (desc.kind) {
        case SpaceKind::scalar:
            return MetricObject::scalar(rng.normal());
        case SpaceKind::l2_function:
        case SpaceKind::wasserstein_1d: {
            Eigen::VectorXd v(desc.grid_size);
            if (desc.kind == SpaceKind::wasserstein_1d)
                return MetricObject::from_values(
                    desc, gaussian_quantiles(desc.grid_size, rng.normal(),
                                             1.0 + 0.2 * rng.uniform()));
            for (int i = 0; i < desc.grid_size; ++i) v[i] = rng.normal();
            return MetricObject::from_values(desc, v);
        }
        default: {
            const int p = desc.matrix_dim;
            Eigen::MatrixXd m(p, p);
            for (int i = 0; i < p; ++i)
                for (int j = 0; j < p; ++j) m(i, j) = rng.normal();
            if (desc.kind == SpaceKind::graph_laplacian) {
                Eigen::MatrixXd w =
                    (m.cwiseAbs() + m.cwiseAbs().transpose()).eval();
                w.diagonal().setZero();
                Eigen::MatrixXd lap = -w;
                lap.diagonal() = w.rowwise().sum();
                return MetricObject::from_matrix(desc, lap);
            }
            Eigen::MatrixXd spd =
                (m * m.transpose() + 0.5 * Eigen::MatrixXd::Identity(p, p))
                    .eval();
            if (desc.kind == SpaceKind::frobenius_matrix)
                return MetricObject::from_matrix(
                    desc, ((m + m.transpose()) / 2.0).eval());
            return MetricObject::from_matrix(desc, spd);
        }
    }
}

ObjectSeries make_series(const SpaceDescriptor& desc, int n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<MetricObject> objects;
    objects.reserve(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t) objects.push_back(random_object(desc, rng));
    return ObjectSeries::from_objects(std::move(objects));
}

void bm_distance_wasserstein(benchmark::State& state) {
    const SpaceDescriptor desc =
        SpaceDescriptor::wasserstein(static_cast<int>(state.range(0)));
    Rng rng(1);
    const MetricObject a = random_object(desc, rng);
    const MetricObject b = random_object(desc, rng);
    for (auto _ : state) benchmark::DoNotOptimize(distance(a, b));
}
BENCHMARK(bm_distance_wasserstein)->Arg(100)->Arg(1000);

void bm_distance_spd(benchmark::State& state) {
    const SpaceDescriptor desc =
        SpaceDescriptor::log_euclidean(static_cast<int>(state.range(0)));
    Rng rng(1);
    const MetricObject a = random_object(desc, rng);
    const MetricObject b = random_object(desc, rng);
    for (auto _ : state) benchmark::DoNotOptimize(distance(a, b));
}
BENCHMARK(bm_distance_spd)->Arg(3)->Arg(10);

void bm_prefix_build(benchmark::State& state) {
    const ObjectSeries s = make_series(SpaceDescriptor::wasserstein(100),
                                       static_cast<int>(state.range(0)), 2);
    for (auto _ : state) {
        PrefixStats stats(s);
        benchmark::DoNotOptimize(stats.n());
    }
}
BENCHMARK(bm_prefix_build)->Arg(400)->Arg(1600);

void bm_window_variance(benchmark::State& state) {
    const ObjectSeries s = make_series(SpaceDescriptor::wasserstein(100), 800, 3);
    const PrefixStats stats(s);
    int lo = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(stats.subsample_variance(lo, lo + 399));
        lo = lo % 400 + 1;
    }
}
BENCHMARK(bm_window_variance);

void bm_two_sample_d2(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const ObjectSeries a = make_series(SpaceDescriptor::wasserstein(100), n, 4);
    const ObjectSeries b = make_series(SpaceDescriptor::wasserstein(100), n, 5);
    for (auto _ : state)
        benchmark::DoNotOptimize(d2_statistic(two_sample_profiles(a, b, 0.15)));
}
BENCHMARK(bm_two_sample_d2)->Arg(100)->Arg(400);

void bm_contrast_curve(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const ObjectSeries s = make_series(SpaceDescriptor::wasserstein(100), n, 6);
    const PrefixStats prefix(s);
    const PrefixGram gram(prefix);
    for (auto _ : state) {
        const auto [sn1, sn2] = contrast_curve_pair(prefix, gram, 0, n, 0.15, 0.05);
        benchmark::DoNotOptimize(sn2.max_value());
    }
}
BENCHMARK(bm_contrast_curve)->Arg(200)->Arg(400);

void bm_null_draws_deta(benchmark::State& state) {
    Rng rng(7);
    const int grid = static_cast<int>(state.range(0));
    for (auto _ : state) {
        const std::vector<double> path = simulate_brownian_path(grid, rng);
        benchmark::DoNotOptimize(deta_functional(path, 0.15));
    }
}
BENCHMARK(bm_null_draws_deta)->Arg(1000)->Arg(5000);

void bm_null_draws_seta(benchmark::State& state) {
    Rng rng(7);
    const int grid = static_cast<int>(state.range(0));
    for (auto _ : state) {
        const std::vector<double> path = simulate_brownian_path(grid, rng);
        benchmark::DoNotOptimize(seta_functional(path, 0.15, 0.05));
    }
}
BENCHMARK(bm_null_draws_seta)->Arg(1000)->Arg(5000);

} // namespace

BENCHMARK_MAIN();
