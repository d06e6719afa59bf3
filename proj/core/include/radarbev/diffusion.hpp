#pragma once

#include <cstdint>
#include <vector>

#include "radarbev/types.hpp"

namespace rbev {

/// Linear variance schedule with derived quantities, 1-based timesteps.
struct NoiseSchedule {
    std::uint32_t T = 0;
    std::vector<double> beta;           // beta_t
    std::vector<double> alpha;          // 1 - beta_t
    std::vector<double> alpha_bar;      // prod alpha_1..t
    std::vector<double> posterior_var;  // beta_t (1-abar_{t-1})/(1-abar_t); beta_1 at t=1

    double beta_t(std::uint32_t t) const { return beta[t - 1]; }
    double alpha_t(std::uint32_t t) const { return alpha[t - 1]; }
    double alpha_bar_t(std::uint32_t t) const { return alpha_bar[t - 1]; }
    double posterior_var_t(std::uint32_t t) const { return posterior_var[t - 1]; }
};

/// Linear interpolation of beta from beta_start to beta_end over T steps.
NoiseSchedule make_schedule(std::uint32_t T, double beta_start = 1e-4,
                            double beta_end = 0.02);

/// Closed-form forward marginal: z_t = sqrt(abar_t) z0 + sqrt(1-abar_t) eps.
template <typename T>
Tensor3<T> q_sample(const Tensor3<T>& z0, std::uint32_t t, const Tensor3<T>& eps,
                    const NoiseSchedule& sched);

/// Inversion of q_sample: z0_hat = (z_t - sqrt(1-abar_t) eps_hat)/sqrt(abar_t).
template <typename T>
Tensor3<T> predict_x0(const Tensor3<T>& z_t, std::uint32_t t, const Tensor3<T>& eps_hat,
                      const NoiseSchedule& sched);

/// One reverse step:
///   z_{t-1} = (z_t - beta_t/sqrt(1-abar_t) eps_hat)/sqrt(alpha_t) + sigma_t noise
/// with sigma_t^2 = posterior_var_t by default (beta_t when
/// use_beta_variance is set). noise must be all-zero when t = 1.
template <typename T>
Tensor3<T> ancestral_step(const Tensor3<T>& z_t, std::uint32_t t,
                          const Tensor3<T>& eps_hat, const Tensor3<T>& noise,
                          const NoiseSchedule& sched, bool use_beta_variance = false);

/// Reverse transition between two cumulative products, for strided
/// sampling: treats the jump abar_cur -> abar_prev as one effective step
/// (abar_prev = 1 produces the final clean estimate). Coefficients reduce
/// to ancestral_step's when the steps are consecutive.
template <typename T>
Tensor3<T> ancestral_step_between(const Tensor3<T>& z, double abar_cur,
                                  double abar_prev, const Tensor3<T>& eps_hat,
                                  const Tensor3<T>* noise, bool use_beta_variance = false);

/// Uniformly spaced subsequence of 1..T (descending, unique, includes T
/// and 1) used by the strided sampler.
std::vector<std::uint32_t> strided_timesteps(std::uint32_t T, std::uint32_t steps);

/// Channel-wise concatenation [z_t channels, then radar condition].
template <typename T>
Tensor3<T> condition_concat(const Tensor3<T>& z_t, const Tensor3<T>& c);

/// Dual-space objective weights. The perceptual (LPIPS) term of the
/// published objective needs a pretrained network and is fixed at zero
/// here.
struct LossWeights {
    double lambda_p = 1.0;
    double lambda_l1 = 1.0;
    double lambda_ssim = 0.2;
};

struct LossBreakdown {
    double total = 0.0;
    double latent_mse = 0.0;  // mean squared error between eps and eps_hat
    double l1 = 0.0;          // pixel L1 between unclamped decode and target
    double ssim_term = 0.0;   // 1 - SSIM between unclamped decode and target
};

/// Full training objective:
///   L = MSE(eps, eps_hat)
///     + lambda_p (lambda_l1 L1(decode(z0_hat/latent_scale), gt)
///                 + lambda_ssim (1 - SSIM(decode(z0_hat/latent_scale), gt)))
/// with z0_hat = predict_x0(q_sample(z0, t, eps), t, eps_hat). Decoding is
/// unclamped inside the loss. gt_image is the (8*h) x (8*w) target in
/// [0,1]. When grad_eps_hat is non-null it receives dL/d(eps_hat).
template <typename T>
LossBreakdown training_loss(const Tensor3<T>& z0, std::uint32_t t,
                            const Tensor3<T>& eps, const Tensor3<T>& eps_hat,
                            const std::vector<T>& gt_image, const LossWeights& weights,
                            const NoiseSchedule& sched, double latent_scale = 1.0,
                            Tensor3<T>* grad_eps_hat = nullptr);

}  // namespace rbev
