#pragma once

#include <cstdint>

#include "radarbev/types.hpp"

namespace rbev {

/// Deterministic linear codec standing in for a learned autoencoder:
/// each non-overlapping 8x8 patch is transformed by the orthonormal 2D
/// DCT-II and only the (0,0), (0,1), (1,0), (1,1) coefficients are kept as
/// the 4 latent channels, giving the 8x spatial compression and 4-channel
/// latent geometry the diffusion core expects (256x512 -> 4x32x64).
///
/// encode is linear; decode is its exact adjoint (and the least-squares
/// reconstruction on the retained subspace). Channel order: 0 = DC,
/// 1 = first horizontal AC, 2 = first vertical AC, 3 = diagonal AC.
namespace codec {

inline constexpr std::uint32_t kPatch = 8;
inline constexpr std::uint32_t kChannels = 4;

/// Raw-array encode: img is H x W row-major (H, W divisible by 8), latent
/// is kChannels x (H/8) x (W/8).
template <typename T>
void encode_patches(const T* img, std::uint32_t H, std::uint32_t W, T* latent);

/// Raw-array decode: inverse DCT with all discarded coefficients at zero.
/// No clamping here; callers clamp at image emission, not inside losses.
template <typename T>
void decode_patches(const T* latent, std::uint32_t lh, std::uint32_t lw, T* img);

}  // namespace codec

/// BEV-level wrappers. encode requires H and W divisible by 8.
LatentTensor encode(const PolarBev& bev);

/// decode clamps to [0,1] by default (final image emission); pass
/// clamp=false inside loss computations so gradients stay linear.
PolarBev decode(const LatentTensor& z, float range_res, float fov, bool clamp = true);

}  // namespace rbev
