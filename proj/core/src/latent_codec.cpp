#include "radarbev/latent_codec.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "radarbev/errors.hpp"

namespace rbev {
namespace codec {

namespace {

// Orthonormal 1D DCT-II basis rows u = 0, 1 (the only ones the codec
// keeps): c[u][i] = a_u * cos(pi*(2i+1)*u/16).
struct Basis {
    std::array<std::array<double, kPatch>, 2> c{};
    Basis() {
        const double a0 = std::sqrt(1.0 / kPatch);
        const double a1 = std::sqrt(2.0 / kPatch);
        for (std::uint32_t i = 0; i < kPatch; ++i) {
            c[0][i] = a0;
            c[1][i] = a1 * std::cos(std::numbers::pi * (2.0 * i + 1.0) / 16.0);
        }
    }
};
const Basis kBasis;

// channel -> (vertical u, horizontal v)
constexpr std::uint32_t kChanU[kChannels] = {0, 0, 1, 1};
constexpr std::uint32_t kChanV[kChannels] = {0, 1, 0, 1};

}  // namespace

template <typename T>
void encode_patches(const T* img, std::uint32_t H, std::uint32_t W, T* latent) {
    const std::uint32_t lh = H / kPatch;
    const std::uint32_t lw = W / kPatch;
    for (std::uint32_t py = 0; py < lh; ++py) {
        for (std::uint32_t px = 0; px < lw; ++px) {
            for (std::uint32_t ch = 0; ch < kChannels; ++ch) {
                const auto& cu = kBasis.c[kChanU[ch]];
                const auto& cv = kBasis.c[kChanV[ch]];
                double acc = 0.0;
                for (std::uint32_t i = 0; i < kPatch; ++i) {
                    const T* row = img + std::size_t(py * kPatch + i) * W + px * kPatch;
                    double rowacc = 0.0;
                    for (std::uint32_t j = 0; j < kPatch; ++j)
                        rowacc += double(row[j]) * cv[j];
                    acc += cu[i] * rowacc;
                }
                latent[(std::size_t(ch) * lh + py) * lw + px] = T(acc);
            }
        }
    }
}

template <typename T>
void decode_patches(const T* latent, std::uint32_t lh, std::uint32_t lw, T* img) {
    const std::uint32_t W = lw * kPatch;
    for (std::uint32_t py = 0; py < lh; ++py) {
        for (std::uint32_t px = 0; px < lw; ++px) {
            double coef[kChannels];
            for (std::uint32_t ch = 0; ch < kChannels; ++ch)
                coef[ch] = double(latent[(std::size_t(ch) * lh + py) * lw + px]);
            for (std::uint32_t i = 0; i < kPatch; ++i) {
                T* row = img + std::size_t(py * kPatch + i) * W + px * kPatch;
                for (std::uint32_t j = 0; j < kPatch; ++j) {
                    double acc = 0.0;
                    for (std::uint32_t ch = 0; ch < kChannels; ++ch)
                        acc += coef[ch] * kBasis.c[kChanU[ch]][i] * kBasis.c[kChanV[ch]][j];
                    row[j] = T(acc);
                }
            }
        }
    }
}

template void encode_patches<float>(const float*, std::uint32_t, std::uint32_t, float*);
template void encode_patches<double>(const double*, std::uint32_t, std::uint32_t,
                                     double*);
template void decode_patches<float>(const float*, std::uint32_t, std::uint32_t, float*);
template void decode_patches<double>(const double*, std::uint32_t, std::uint32_t,
                                     double*);

}  // namespace codec

LatentTensor encode(const PolarBev& bev) {
    if (bev.n_range % codec::kPatch != 0 || bev.n_azimuth % codec::kPatch != 0)
        throw BadShape("encode: BEV dimensions must be divisible by 8");
    LatentTensor z(codec::kChannels, bev.n_range / codec::kPatch,
                   bev.n_azimuth / codec::kPatch);
    codec::encode_patches(bev.values.data(), bev.n_range, bev.n_azimuth, z.v.data());
    return z;
}

PolarBev decode(const LatentTensor& z, float range_res, float fov, bool clamp) {
    if (z.c != codec::kChannels) throw BadShape("decode: latent must have 4 channels");
    PolarBev bev;
    bev.n_range = z.h * codec::kPatch;
    bev.n_azimuth = z.w * codec::kPatch;
    bev.range_res = range_res;
    bev.fov = fov;
    bev.values.resize(std::size_t(bev.n_range) * bev.n_azimuth);
    codec::decode_patches(z.v.data(), z.h, z.w, bev.values.data());
    if (clamp) {
        for (float& x : bev.values) x = std::clamp(x, 0.0f, 1.0f);
    }
    return bev;
}

}  // namespace rbev
