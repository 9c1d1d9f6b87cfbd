#include <benchmark/benchmark.h>

#include "ausn/error_model.hpp"
#include "ausn/packing.hpp"
#include "ausn/power_poly.hpp"
#include "ausn/quantizer.hpp"
#include "ausn/rng.hpp"

namespace {

const ausn::BitLayout kLayout = ausn::make_layout(6, 3, {2});

void BM_QuantizeTensor(benchmark::State& state) {
    const auto data = ausn::seeded_normal(1, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(ausn::quantize_tensor(data, kLayout));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_QuantizeTensor)->Range(1 << 10, 1 << 18);

void BM_QuantizeTensorNearest(benchmark::State& state) {
    const auto data = ausn::seeded_normal(2, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            ausn::quantize_tensor(data, kLayout, ausn::RoundingMode::nearest));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_QuantizeTensorNearest)->Range(1 << 10, 1 << 16);

void BM_PackUnpack(benchmark::State& state) {
    const auto data = ausn::seeded_normal(3, static_cast<std::size_t>(state.range(0)));
    const auto qt = ausn::quantize_tensor(data, kLayout);
    for (auto _ : state) {
        const auto bytes = ausn::pack(qt.codes, kLayout);
        benchmark::DoNotOptimize(ausn::unpack(bytes, qt.codes.size(), kLayout));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_PackUnpack)->Range(1 << 10, 1 << 16);

void BM_SearchLayout(benchmark::State& state) {
    const auto data = ausn::seeded_normal(4, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(ausn::search_layout(data, 5, 2));
    }
}
BENCHMARK(BM_SearchLayout)->Range(1 << 10, 1 << 14);

void BM_DotProductExact(benchmark::State& state) {
    const auto w = ausn::seeded_normal(5, 64);
    const auto a = ausn::seeded_normal(6, 64);
    const auto wq = ausn::quantize_tensor(w, kLayout);
    const auto aq = ausn::quantize_tensor(a, kLayout);
    for (auto _ : state) {
        benchmark::DoNotOptimize(ausn::dot_product(wq, aq, kLayout, ausn::DotMode::exact));
    }
}
BENCHMARK(BM_DotProductExact);

void BM_DotProductRounded(benchmark::State& state) {
    const auto w = ausn::seeded_normal(7, 64);
    const auto a = ausn::seeded_normal(8, 64);
    const auto wq = ausn::quantize_tensor(w, kLayout);
    const auto aq = ausn::quantize_tensor(a, kLayout);
    for (auto _ : state) {
        benchmark::DoNotOptimize(ausn::dot_product(wq, aq, kLayout, ausn::DotMode::rounded));
    }
}
BENCHMARK(BM_DotProductRounded);

void BM_Compress16(benchmark::State& state) {
    const ausn::RoundingBudget budget = ausn::RoundingBudget::single_bit_tiers(2);
    long long d = 1;
    for (auto _ : state) {
        d = (d * 2862933555777941757LL + 3037000493LL) & 0xffff;
        if (d == 0) d = 1;
        ausn::PowerPoly poly;
        for (int bit = 0; bit < 16; ++bit) {
            if ((d >> bit) & 1) poly.exponents.push_back(bit);
        }
        benchmark::DoNotOptimize(ausn::compress(std::move(poly), budget));
    }
}
BENCHMARK(BM_Compress16);

}  // namespace

BENCHMARK_MAIN();
