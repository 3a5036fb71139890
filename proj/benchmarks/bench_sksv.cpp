#include "sksv/sksv.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

sksv::SketchConfig config(sksv::JlFamily family, std::size_t m, std::size_t N, std::size_t n) {
    sksv::SketchConfig c;
    c.seed = 42;
    c.family = family;
    c.m = m;
    c.N = N;
    c.n = n;
    c.validate();
    return c;
}

void BM_PhiColumn(benchmark::State& state, sksv::JlFamily family) {
    const auto c = config(family, static_cast<std::size_t>(state.range(0)), 1 << 20, 1);
    std::vector<double> out(c.m);
    std::uint64_t col = 0;
    for (auto _ : state) {
        sksv::phi_column_into(c, col++, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK_CAPTURE(BM_PhiColumn, gaussian, sksv::JlFamily::gaussian())->Arg(128)->Arg(1024)->Arg(8192);
BENCHMARK_CAPTURE(BM_PhiColumn, rademacher, sksv::JlFamily::rademacher())->Arg(1024);
BENCHMARK_CAPTURE(BM_PhiColumn, sparse_sign, sksv::JlFamily::sparse_sign(3))->Arg(1024);

void BM_ApplyUpdate(benchmark::State& state) {
    auto s = sksv::new_sketch(config(sksv::JlFamily::gaussian(), static_cast<std::size_t>(state.range(0)), 100000, 32));
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<std::uint64_t> row(0, 99999), col(0, 31);
    for (auto _ : state) {
        sksv::apply_update(s, {row(rng), col(rng), 1.0});
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_ApplyUpdate)->Arg(256)->Arg(897)->Arg(4096);

void BM_ApplyEdgeUpdate(benchmark::State& state) {
    const std::size_t n = 256;
    auto g = sksv::new_graph_sketch(
        sksv::graph_config(1, sksv::JlFamily::gaussian(), n, static_cast<std::size_t>(state.range(0)), 0.5, 0.05));
    std::mt19937_64 rng(2);
    std::uniform_int_distribution<std::uint64_t> vertex(0, n - 1);
    for (auto _ : state) {
        const auto u = vertex(rng);
        auto v = vertex(rng);
        if (u == v) v = (v + 1) % n;
        sksv::apply_edge_update(g, {u, v, 1.0});
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_ApplyEdgeUpdate)->Arg(1024)->Arg(10544);

void BM_SketchedSvd(benchmark::State& state) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> normal;
    Eigen::MatrixXd Y(state.range(0), state.range(1));
    for (Eigen::Index i = 0; i < Y.size(); ++i) Y(i) = normal(rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(sksv::sketched_svd(Y));
    }
}
BENCHMARK(BM_SketchedSvd)->Args({897, 32})->Args({4096, 64})->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
