#pragma once

#include <cstdint>

#include "radarbev/types.hpp"

namespace rbev {

/// Windowed SSIM with an 11x11 Gaussian window (sigma 1.5), C1 = 0.01^2,
/// C2 = 0.03^2 at dynamic range 1, averaged over valid window positions.
/// Both images are H x W row-major; H, W must be >= 11 (TooSmall
/// otherwise). Values are expected in [0,1] but the formula itself is
/// total.
template <typename T>
double ssim(const T* a, const T* b, std::uint32_t H, std::uint32_t W);

/// Same, also writing d(mean SSIM)/d(a) into grad_a (length H*W).
template <typename T>
double ssim_with_grad(const T* a, const T* b, std::uint32_t H, std::uint32_t W,
                      T* grad_a);

/// Shape-checked wrapper over two BEVs.
double ssim(const PolarBev& a, const PolarBev& b);

}  // namespace rbev
