#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "radarbev/errors.hpp"
#include "radarbev/rng.hpp"
#include "radarbev/ssim.hpp"

using namespace rbev;

namespace {

std::vector<double> random_image(std::uint32_t h, std::uint32_t w, std::uint64_t seed) {
    std::vector<double> img(std::size_t(h) * w);
    Rng rng(seed);
    for (auto& v : img) v = rng.uniform();
    return img;
}

}  // namespace

TEST_CASE("ssim(x, x) is exactly 1") {
    const auto x = random_image(20, 24, 1);
    CHECK(ssim(x.data(), x.data(), 20, 24) == 1.0);
}

TEST_CASE("ssim is symmetric") {
    const auto a = random_image(16, 16, 2);
    const auto b = random_image(16, 16, 3);
    CHECK(std::abs(ssim(a.data(), b.data(), 16, 16) -
                   ssim(b.data(), a.data(), 16, 16)) < 1e-12);
}

TEST_CASE("ssim of a checkerboard against its inverse is negative") {
    const std::uint32_t n = 32;
    std::vector<double> x(n * n), y(n * n);
    for (std::uint32_t i = 0; i < n; ++i)
        for (std::uint32_t j = 0; j < n; ++j) {
            x[i * n + j] = double((i + j) % 2);
            y[i * n + j] = 1.0 - x[i * n + j];
        }
    const double direct = oracle::direct_ssim(x, y, n, n);
    CHECK(direct < 0.0);
    CHECK(ssim(x.data(), y.data(), n, n) == doctest::Approx(direct).epsilon(1e-9));
}

TEST_CASE("separable implementation matches the direct oracle") {
    const auto a = random_image(18, 25, 4);
    const auto b = random_image(18, 25, 5);
    const double got = ssim(a.data(), b.data(), 18, 25);
    const double want = oracle::direct_ssim(a, b, 18, 25);
    CHECK(got == doctest::Approx(want).epsilon(1e-9));
}

TEST_CASE("images smaller than the window are rejected") {
    const auto a = random_image(10, 16, 6);
    CHECK_THROWS_AS(ssim(a.data(), a.data(), 10, 16), TooSmall);
    CHECK_THROWS_AS(ssim(a.data(), a.data(), 16, 10), TooSmall);
}

TEST_CASE("BEV wrapper validates shapes") {
    PolarBev a, b;
    a.n_range = b.n_range = 16;
    a.n_azimuth = 16;
    b.n_azimuth = 24;
    a.values.assign(256, 0.5f);
    b.values.assign(16 * 24, 0.5f);
    a.range_res = b.range_res = 0.04f;
    a.fov = b.fov = 3.14f;
    CHECK_THROWS_AS(ssim(a, b), ShapeMismatch);
    b = a;
    CHECK(ssim(a, b) == 1.0);
}

TEST_CASE("ssim_with_grad matches finite differences") {
    const std::uint32_t h = 13, w = 15;
    auto a = random_image(h, w, 7);
    const auto b = random_image(h, w, 8);

    std::vector<double> grad(a.size());
    ssim_with_grad(a.data(), b.data(), h, w, grad.data());

    // central differences are step-sensitive where the gradient is tiny;
    // accept the best of three steps per probe
    auto fd_err = [&](std::size_t idx) {
        const double keep = a[idx];
        double best = 1e9;
        for (const double step : {1e-5, 1e-6, 1e-7}) {
            a[idx] = keep + step;
            const double fp = ssim(a.data(), b.data(), h, w);
            a[idx] = keep - step;
            const double fm = ssim(a.data(), b.data(), h, w);
            a[idx] = keep;
            const double fd = (fp - fm) / (2.0 * step);
            const double scale = std::max({std::abs(fd), std::abs(grad[idx]), 1e-8});
            best = std::min(best, std::abs(grad[idx] - fd) / scale);
        }
        return best;
    };

    Rng rng(9);
    // probe a random subset plus corners (padding-free scatter edges)
    std::vector<std::size_t> probes = {0, w - 1, (h - 1) * w, h * w - 1};
    for (int i = 0; i < 40; ++i) probes.push_back(rng.below(a.size()));
    for (const std::size_t idx : probes) CHECK(fd_err(idx) < 1e-4);
}
