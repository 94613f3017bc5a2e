#include "aeb/autoencoder.hpp"
#include "aeb/baselines.hpp"
#include "aeb/codec.hpp"
#include "aeb/random.hpp"

#include <benchmark/benchmark.h>

#include <vector>

namespace {

aeb::ModelParams make_model(std::size_t n, std::size_t k)
{
    aeb::Rng rng(7);
    aeb::ModelParams model;
    model.weights = aeb::Weights(n, k);
    auto flat = model.weights.flatten();
    for (auto& v : flat) {
        v = aeb::uniform(rng, -1.0, 1.0);
    }
    model.weights.assign(flat);
    model.sigma = aeb::SpheringScale(1.0);
    return model;
}

std::vector<double> make_series(std::size_t n, std::uint64_t seed)
{
    aeb::Rng rng(seed);
    std::vector<double> p(n);
    double level = 20.0;
    for (auto& v : p) {
        level += 0.3 * aeb::standard_normal(rng);
        v = level;
    }
    return p;
}

void BM_Compress(benchmark::State& state)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto model = make_model(n, 4);
    const auto p = make_series(n, 1);
    for (auto _ : state) {
        auto pkt = aeb::compress(p, model, 0.1);
        benchmark::DoNotOptimize(aeb::serialize_packet(pkt, n, 4));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_Compress)->Arg(23)->Arg(32)->Arg(128);

void BM_Decompress(benchmark::State& state)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto model = make_model(n, 4);
    const auto wire = aeb::serialize_packet(aeb::compress(make_series(n, 2), model, 0.1), n, 4);
    for (auto _ : state) {
        benchmark::DoNotOptimize(aeb::decompress(aeb::deserialize_packet(wire, n, 4), model));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_Decompress)->Arg(23)->Arg(32)->Arg(128);

void BM_CostAndGradient(benchmark::State& state)
{
    const std::size_t n = 32;
    const auto count = static_cast<std::size_t>(state.range(0));
    const auto model = make_model(n, 4);
    aeb::Rng rng(3);
    std::vector<std::vector<double>> data(count, std::vector<double>(n));
    for (auto& v : data) {
        for (auto& e : v) {
            e = aeb::uniform(rng, 0.1, 0.9);
        }
    }
    aeb::CostConfig cfg;
    cfg.variant = aeb::CostVariant::sae;
    for (auto _ : state) {
        benchmark::DoNotOptimize(aeb::gradient(model.weights, data, cfg));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(count));
}
BENCHMARK(BM_CostAndGradient)->Arg(256)->Arg(4096);

void BM_LtcCompress(benchmark::State& state)
{
    const auto p = make_series(static_cast<std::size_t>(state.range(0)), 4);
    for (auto _ : state) {
        benchmark::DoNotOptimize(aeb::ltc_compress(p, 0.25));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LtcCompress)->Arg(20000);

void BM_LzwRoundTrip(benchmark::State& state)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto p = make_series(n, 5);
    for (auto _ : state) {
        benchmark::DoNotOptimize(aeb::lzw_truncated_decompress(aeb::lzw_truncated_compress(p, 0.1), n));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_LzwRoundTrip)->Arg(20000);

}  // namespace

BENCHMARK_MAIN();
