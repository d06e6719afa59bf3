#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"
#include "radarbev/errors.hpp"
#include "radarbev/latent_codec.hpp"
#include "radarbev/rng.hpp"

using namespace rbev;

namespace {

PolarBev random_bev(std::uint32_t h, std::uint32_t w, std::uint64_t seed) {
    PolarBev bev;
    bev.n_range = h;
    bev.n_azimuth = w;
    bev.range_res = 0.04f;
    bev.fov = 3.14159265f;
    bev.values.resize(std::size_t(h) * w);
    Rng rng(seed);
    for (auto& v : bev.values) v = float(rng.uniform());
    return bev;
}

}  // namespace

TEST_CASE("constant image encodes to DC-only latent with gain 8") {
    PolarBev bev = random_bev(16, 16, 1);
    for (auto& v : bev.values) v = 0.625f;
    const LatentTensor z = encode(bev);
    REQUIRE(z.c == 4);
    REQUIRE(z.h == 2);
    REQUIRE(z.w == 2);
    for (std::uint32_t y = 0; y < 2; ++y)
        for (std::uint32_t x = 0; x < 2; ++x) {
            CHECK(z.at(0, y, x) == doctest::Approx(8.0 * 0.625).epsilon(1e-6));
            CHECK(std::abs(z.at(1, y, x)) < 1e-6);
            CHECK(std::abs(z.at(2, y, x)) < 1e-6);
            CHECK(std::abs(z.at(3, y, x)) < 1e-6);
        }
}

TEST_CASE("256x512 input maps to a 4x32x64 latent") {
    const PolarBev bev = random_bev(256, 512, 2);
    const LatentTensor z = encode(bev);
    CHECK(z.c == 4);
    CHECK(z.h == 32);
    CHECK(z.w == 64);
}

TEST_CASE("encode rejects shapes not divisible by 8") {
    CHECK_THROWS_AS(encode(random_bev(12, 16, 3)), BadShape);
}

TEST_CASE("encode matches the direct DCT-II oracle") {
    const PolarBev bev = random_bev(24, 32, 4);
    const std::uint32_t chan_u[4] = {0, 0, 1, 1};
    const std::uint32_t chan_v[4] = {0, 1, 0, 1};

    // double path carries the 1e-9 oracle bound
    std::vector<double> img(bev.values.begin(), bev.values.end());
    std::vector<double> zd(4 * 3 * 4);
    codec::encode_patches(img.data(), 24, 32, zd.data());

    // the f32 BEV wrapper adds one storage rounding on top
    const LatentTensor zf = encode(bev);

    for (std::uint32_t py = 0; py < 3; ++py)
        for (std::uint32_t px = 0; px < 4; ++px) {
            double patch[8][8];
            for (int i = 0; i < 8; ++i)
                for (int j = 0; j < 8; ++j)
                    patch[i][j] = bev.at(py * 8 + i, px * 8 + j);
            for (std::uint32_t ch = 0; ch < 4; ++ch) {
                const double want =
                    oracle::dct2_coeff(patch, int(chan_u[ch]), int(chan_v[ch]));
                const double got_d = zd[(std::size_t(ch) * 3 + py) * 4 + px];
                CHECK(std::abs(got_d - want) < 1e-9);
                CHECK(std::abs(double(zf.at(ch, py, px)) - want) < 1e-6);
            }
        }
}

TEST_CASE("zero latent decodes to a zero image") {
    LatentTensor z(4, 2, 3);
    const PolarBev img = decode(z, 0.04f, 3.14f);
    for (float v : img.values) CHECK(v == 0.0f);
}

TEST_CASE("retained-subspace images round-trip exactly") {
    // build an image that lives entirely in the retained 4-coefficient
    // subspace of every patch
    LatentTensor z(4, 3, 2);
    Rng rng(9);
    for (auto& v : z.v) v = float(rng.uniform(-1.0, 1.0));
    const PolarBev img = decode(z, 0.04f, 3.14f, /*clamp=*/false);
    const LatentTensor z2 = encode(img);
    for (std::size_t i = 0; i < z.v.size(); ++i)
        CHECK(std::abs(double(z.v[i]) - double(z2.v[i])) < 1e-6);

    const PolarBev img2 = decode(z2, 0.04f, 3.14f, /*clamp=*/false);
    for (std::size_t i = 0; i < img.values.size(); ++i)
        CHECK(std::abs(double(img.values[i]) - double(img2.values[i])) < 1e-6);
}

TEST_CASE("encode is linear") {
    const PolarBev x = random_bev(16, 16, 10);
    const PolarBev y = random_bev(16, 16, 11);
    const double a = 0.7, b = -1.3;

    // combine raw arrays to dodge the [0,1] clamp entirely
    std::vector<double> xv(x.values.begin(), x.values.end());
    std::vector<double> yv(y.values.begin(), y.values.end());
    std::vector<double> comb(xv.size());
    for (std::size_t i = 0; i < xv.size(); ++i) comb[i] = a * xv[i] + b * yv[i];

    std::vector<double> zx(4 * 2 * 2), zy(4 * 2 * 2), zc(4 * 2 * 2);
    codec::encode_patches(xv.data(), 16, 16, zx.data());
    codec::encode_patches(yv.data(), 16, 16, zy.data());
    codec::encode_patches(comb.data(), 16, 16, zc.data());
    for (std::size_t i = 0; i < zc.size(); ++i)
        CHECK(zc[i] == doctest::Approx(a * zx[i] + b * zy[i]).epsilon(1e-12));
}

TEST_CASE("decode(encode(.)) is an idempotent projection") {
    const PolarBev x = random_bev(16, 24, 12);
    std::vector<double> img(x.values.begin(), x.values.end());
    std::vector<double> z(4 * 2 * 3), once(img.size()), z2(z.size()), twice(img.size());
    codec::encode_patches(img.data(), 16, 24, z.data());
    codec::decode_patches(z.data(), 2, 3, once.data());
    codec::encode_patches(once.data(), 16, 24, z2.data());
    codec::decode_patches(z2.data(), 2, 3, twice.data());
    for (std::size_t i = 0; i < img.size(); ++i)
        CHECK(std::abs(once[i] - twice[i]) < 1e-12);
}

TEST_CASE("energy inequality: ||encode(x)|| <= ||x||") {
    for (std::uint64_t seed : {20ull, 21ull, 22ull}) {
        const PolarBev x = random_bev(32, 32, seed);
        const LatentTensor z = encode(x);
        double ex = 0.0, ez = 0.0;
        for (float v : x.values) ex += double(v) * v;
        for (float v : z.v) ez += double(v) * v;
        CHECK(ez <= ex + 1e-9);
    }
}

TEST_CASE("decode(encode(x)) is the least-squares reconstruction") {
    // on a single random patch, compare against an explicit least-squares
    // projection onto the 4 retained basis images
    Rng rng(31);
    double patch[8][8];
    for (auto& row : patch)
        for (auto& v : row) v = rng.uniform();

    // basis images via the oracle: e_{uv}(i,j) = a_u a_v cos.. cos..
    const int us[4] = {0, 0, 1, 1};
    const int vs[4] = {0, 1, 0, 1};
    double basis[4][64];
    for (int k = 0; k < 4; ++k) {
        double unit[8][8] = {};
        for (int i = 0; i < 8; ++i)
            for (int j = 0; j < 8; ++j) {
                // basis vector = gradient of coefficient wrt pixel
                const auto a = [](int q) {
                    return q == 0 ? std::sqrt(1.0 / 8.0) : std::sqrt(2.0 / 8.0);
                };
                unit[i][j] =
                    a(us[k]) * a(vs[k]) *
                    std::cos(std::numbers::pi * (2.0 * i + 1.0) * us[k] / 16.0) *
                    std::cos(std::numbers::pi * (2.0 * j + 1.0) * vs[k] / 16.0);
            }
        for (int i = 0; i < 8; ++i)
            for (int j = 0; j < 8; ++j) basis[k][i * 8 + j] = unit[i][j];
    }
    // least squares: coefficients = B^T x (basis orthonormal), recon = B c
    double recon[64] = {};
    for (int k = 0; k < 4; ++k) {
        double coef = 0.0;
        for (int i = 0; i < 64; ++i) coef += basis[k][i] * patch[i / 8][i % 8];
        for (int i = 0; i < 64; ++i) recon[i] += coef * basis[k][i];
    }

    std::vector<double> img(64), z(4), dec(64);
    for (int i = 0; i < 64; ++i) img[i] = patch[i / 8][i % 8];
    codec::encode_patches(img.data(), 8, 8, z.data());
    codec::decode_patches(z.data(), 1, 1, dec.data());
    for (int i = 0; i < 64; ++i) CHECK(std::abs(dec[i] - recon[i]) < 1e-9);
}

TEST_CASE("decode clamps only on demand") {
    LatentTensor z(4, 1, 1);
    z.at(0, 0, 0) = 100.0f;  // DC far above the displayable range
    const PolarBev clamped = decode(z, 0.04f, 3.14f, true);
    const PolarBev raw = decode(z, 0.04f, 3.14f, false);
    CHECK(clamped.values[0] == 1.0f);
    CHECK(raw.values[0] == doctest::Approx(12.5));  // 100/8
}
