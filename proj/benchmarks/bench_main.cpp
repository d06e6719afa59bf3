#include <benchmark/benchmark.h>

#include "radarbev/cfar.hpp"
#include "radarbev/fft.hpp"
#include "radarbev/latent_codec.hpp"
#include "radarbev/metrics.hpp"
#include "radarbev/nnet.hpp"
#include "radarbev/rng.hpp"
#include "radarbev/ssim.hpp"

using namespace rbev;

namespace {

std::vector<cplx> random_signal(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<cplx> x(n);
    for (auto& v : x) v = cplx(rng.normal(), rng.normal());
    return x;
}

PolarBev random_bev(std::uint32_t rows, std::uint32_t cols, std::uint64_t seed) {
    PolarBev bev;
    bev.n_range = rows;
    bev.n_azimuth = cols;
    bev.range_res = 0.04f;
    bev.fov = 3.14159265f;
    bev.values.resize(std::size_t(rows) * cols);
    Rng rng(seed);
    for (auto& v : bev.values) v = float(rng.rayleigh(0.1));
    return bev;
}

void BM_FftPow2(benchmark::State& state) {
    const auto n = std::size_t(state.range(0));
    const auto input = random_signal(n, 1);
    for (auto _ : state) {
        auto x = input;
        fft(x);
        benchmark::DoNotOptimize(x.data());
    }
    state.SetComplexityN(int64_t(n));
}
BENCHMARK(BM_FftPow2)->RangeMultiplier(4)->Range(256, 16384)->Complexity();

void BM_FftBluestein(benchmark::State& state) {
    const auto input = random_signal(std::size_t(state.range(0)), 2);
    for (auto _ : state) {
        auto x = input;
        fft(x);
        benchmark::DoNotOptimize(x.data());
    }
}
BENCHMARK(BM_FftBluestein)->Arg(241)->Arg(1000)->Arg(4095);

void BM_NaiveDft(benchmark::State& state) {
    const auto n = std::size_t(state.range(0));
    const auto input = random_signal(n, 3);
    for (auto _ : state) {
        std::vector<cplx> out(n);
        for (std::size_t k = 0; k < n; ++k) {
            cplx acc(0, 0);
            for (std::size_t j = 0; j < n; ++j) {
                const double ang = -6.283185307179586 * double(k * j % n) / double(n);
                acc += input[j] * cplx(std::cos(ang), std::sin(ang));
            }
            out[k] = acc;
        }
        benchmark::DoNotOptimize(out.data());
    }
}
BENCHMARK(BM_NaiveDft)->Arg(256)->Arg(1024);

void BM_CfarCa(benchmark::State& state) {
    const auto n = std::uint32_t(state.range(0));
    const PolarBev bev = random_bev(n, n, 4);
    CfarConfig cfg;
    for (auto _ : state) {
        auto mask = cfar_detect(bev, cfg);
        benchmark::DoNotOptimize(mask.hits.data());
    }
    state.SetItemsProcessed(state.iterations() * int64_t(n) * n);
}
BENCHMARK(BM_CfarCa)->Arg(64)->Arg(256);

void BM_CfarOs(benchmark::State& state) {
    const PolarBev bev = random_bev(128, 128, 5);
    CfarConfig cfg;
    cfg.variant = CfarVariant::OS;
    for (auto _ : state) {
        auto mask = cfar_detect(bev, cfg);
        benchmark::DoNotOptimize(mask.hits.data());
    }
}
BENCHMARK(BM_CfarOs);

void BM_DirectedMeanNn(benchmark::State& state) {
    Rng rng(6);
    PointCloud2D a, b;
    for (int i = 0; i < state.range(0); ++i) {
        a.points.push_back({rng.uniform(-10, 10), rng.uniform(-10, 10)});
        b.points.push_back({rng.uniform(-10, 10), rng.uniform(-10, 10)});
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(directed_mean_nn(a, b));
    }
}
BENCHMARK(BM_DirectedMeanNn)->Arg(200)->Arg(2000);

void BM_CodecEncode(benchmark::State& state) {
    const PolarBev bev = random_bev(256, 512, 7);
    for (auto _ : state) {
        auto z = encode(bev);
        benchmark::DoNotOptimize(z.v.data());
    }
}
BENCHMARK(BM_CodecEncode);

void BM_Ssim(benchmark::State& state) {
    const PolarBev a = random_bev(64, 64, 8);
    const PolarBev b = random_bev(64, 64, 9);
    for (auto _ : state) {
        benchmark::DoNotOptimize(ssim(a, b));
    }
}
BENCHMARK(BM_Ssim);

void BM_DenoiserForward(benchmark::State& state) {
    Denoiser<float> net;
    Rng rng(10);
    net.init_params(rng);
    Tensor3<float> x(8, 8, 8);
    for (auto& v : x.v) v = float(rng.normal());
    for (auto _ : state) {
        auto y = net.forward(x, 500);
        benchmark::DoNotOptimize(y.v.data());
    }
}
BENCHMARK(BM_DenoiserForward);

void BM_DenoiserForwardBackward(benchmark::State& state) {
    Denoiser<float> net;
    Rng rng(11);
    net.init_params(rng);
    Tensor3<float> x(8, 8, 8);
    Tensor3<float> g(4, 8, 8);
    for (auto& v : x.v) v = float(rng.normal());
    for (auto& v : g.v) v = float(rng.normal());
    std::vector<float> grads;
    for (auto _ : state) {
        typename Denoiser<float>::Cache cache;
        auto y = net.forward(x, 500, &cache);
        net.backward(cache, g, grads);
        benchmark::DoNotOptimize(grads.data());
    }
}
BENCHMARK(BM_DenoiserForwardBackward);

}  // namespace

BENCHMARK_MAIN();
