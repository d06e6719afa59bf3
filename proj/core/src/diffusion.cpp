#include "radarbev/diffusion.hpp"

#include <algorithm>
#include <cmath>

#include "radarbev/errors.hpp"
#include "radarbev/latent_codec.hpp"
#include "radarbev/ssim.hpp"

namespace rbev {

NoiseSchedule make_schedule(std::uint32_t T, double beta_start, double beta_end) {
    if (T < 1) throw BadScheduleParams("make_schedule: T must be >= 1");
    if (!(beta_start > 0.0 && beta_start <= beta_end && beta_end < 1.0))
        throw BadScheduleParams("make_schedule: need 0 < beta_start <= beta_end < 1");

    NoiseSchedule s;
    s.T = T;
    s.beta.resize(T);
    s.alpha.resize(T);
    s.alpha_bar.resize(T);
    s.posterior_var.resize(T);

    double abar = 1.0;
    for (std::uint32_t i = 0; i < T; ++i) {
        const double frac = T == 1 ? 0.0 : double(i) / double(T - 1);
        s.beta[i] = beta_start + (beta_end - beta_start) * frac;
        s.alpha[i] = 1.0 - s.beta[i];
        const double abar_prev = abar;
        abar *= s.alpha[i];
        s.alpha_bar[i] = abar;
        s.posterior_var[i] =
            i == 0 ? s.beta[0] : s.beta[i] * (1.0 - abar_prev) / (1.0 - abar);
    }
    return s;
}

namespace {

void check_step(std::uint32_t t, const NoiseSchedule& sched) {
    if (t < 1 || t > sched.T) throw InvalidInput("timestep out of range");
}

template <typename T>
bool all_zero(const Tensor3<T>& x) {
    for (const T& v : x.v)
        if (v != T(0)) return false;
    return true;
}

}  // namespace

template <typename T>
Tensor3<T> q_sample(const Tensor3<T>& z0, std::uint32_t t, const Tensor3<T>& eps,
                    const NoiseSchedule& sched) {
    check_step(t, sched);
    if (!z0.same_shape(eps)) throw ShapeMismatch("q_sample: z0/eps shapes differ");
    const double ab = sched.alpha_bar_t(t);
    const T a = T(std::sqrt(ab));
    const T b = T(std::sqrt(1.0 - ab));
    Tensor3<T> out(z0.c, z0.h, z0.w);
    for (std::size_t i = 0; i < z0.v.size(); ++i) out.v[i] = a * z0.v[i] + b * eps.v[i];
    return out;
}

template <typename T>
Tensor3<T> predict_x0(const Tensor3<T>& z_t, std::uint32_t t, const Tensor3<T>& eps_hat,
                      const NoiseSchedule& sched) {
    check_step(t, sched);
    if (!z_t.same_shape(eps_hat))
        throw ShapeMismatch("predict_x0: z_t/eps_hat shapes differ");
    const double ab = sched.alpha_bar_t(t);
    const T inv_a = T(1.0 / std::sqrt(ab));
    const T b = T(std::sqrt(1.0 - ab));
    Tensor3<T> out(z_t.c, z_t.h, z_t.w);
    for (std::size_t i = 0; i < z_t.v.size(); ++i)
        out.v[i] = (z_t.v[i] - b * eps_hat.v[i]) * inv_a;
    return out;
}

template <typename T>
Tensor3<T> ancestral_step(const Tensor3<T>& z_t, std::uint32_t t,
                          const Tensor3<T>& eps_hat, const Tensor3<T>& noise,
                          const NoiseSchedule& sched, bool use_beta_variance) {
    check_step(t, sched);
    if (!z_t.same_shape(eps_hat) || !z_t.same_shape(noise))
        throw ShapeMismatch("ancestral_step: shapes differ");
    if (t == 1 && !all_zero(noise))
        throw NoiseAtFinalStep("ancestral_step: noise must be zero at t=1");

    const double ab = sched.alpha_bar_t(t);
    const T inv_sqrt_alpha = T(1.0 / std::sqrt(sched.alpha_t(t)));
    const T coef = T(sched.beta_t(t) / std::sqrt(1.0 - ab));
    const T sigma =
        T(std::sqrt(use_beta_variance ? sched.beta_t(t) : sched.posterior_var_t(t)));
    Tensor3<T> out(z_t.c, z_t.h, z_t.w);
    for (std::size_t i = 0; i < z_t.v.size(); ++i)
        out.v[i] =
            inv_sqrt_alpha * (z_t.v[i] - coef * eps_hat.v[i]) + sigma * noise.v[i];
    return out;
}

template <typename T>
Tensor3<T> ancestral_step_between(const Tensor3<T>& z, double abar_cur, double abar_prev,
                                  const Tensor3<T>& eps_hat, const Tensor3<T>* noise,
                                  bool use_beta_variance) {
    if (!z.same_shape(eps_hat))
        throw ShapeMismatch("ancestral_step_between: shapes differ");
    const double alpha_eff = abar_cur / abar_prev;
    const double beta_eff = 1.0 - alpha_eff;
    const T inv_sqrt_alpha = T(1.0 / std::sqrt(alpha_eff));
    const T coef = T(beta_eff / std::sqrt(1.0 - abar_cur));
    Tensor3<T> out(z.c, z.h, z.w);
    for (std::size_t i = 0; i < z.v.size(); ++i)
        out.v[i] = inv_sqrt_alpha * (z.v[i] - coef * eps_hat.v[i]);
    if (noise != nullptr && abar_prev < 1.0) {
        if (!z.same_shape(*noise))
            throw ShapeMismatch("ancestral_step_between: noise shape differs");
        const double var = use_beta_variance
                               ? beta_eff
                               : beta_eff * (1.0 - abar_prev) / (1.0 - abar_cur);
        const T sigma = T(std::sqrt(var));
        for (std::size_t i = 0; i < z.v.size(); ++i) out.v[i] += sigma * noise->v[i];
    }
    return out;
}

std::vector<std::uint32_t> strided_timesteps(std::uint32_t T, std::uint32_t steps) {
    if (steps < 1) throw InvalidInput("strided_timesteps: steps must be >= 1");
    steps = std::min(steps, T);
    std::vector<std::uint32_t> taus;
    taus.reserve(steps);
    for (std::uint32_t i = 0; i < steps; ++i) {
        // uniform over [1, T], descending
        const double x = steps == 1 ? double(T)
                                    : double(T) - double(i) * double(T - 1) /
                                                      double(steps - 1);
        const auto t = std::uint32_t(std::llround(x));
        if (taus.empty() || taus.back() != t) taus.push_back(t);
    }
    return taus;
}

template <typename T>
Tensor3<T> condition_concat(const Tensor3<T>& z_t, const Tensor3<T>& c) {
    if (z_t.h != c.h || z_t.w != c.w)
        throw ShapeMismatch("condition_concat: spatial shapes differ");
    Tensor3<T> out(z_t.c + c.c, z_t.h, z_t.w);
    std::copy(z_t.v.begin(), z_t.v.end(), out.v.begin());
    std::copy(c.v.begin(), c.v.end(), out.v.begin() + z_t.v.size());
    return out;
}

template <typename T>
LossBreakdown training_loss(const Tensor3<T>& z0, std::uint32_t t,
                            const Tensor3<T>& eps, const Tensor3<T>& eps_hat,
                            const std::vector<T>& gt_image, const LossWeights& weights,
                            const NoiseSchedule& sched, double latent_scale,
                            Tensor3<T>* grad_eps_hat) {
    if (!z0.same_shape(eps) || !z0.same_shape(eps_hat))
        throw ShapeMismatch("training_loss: latent shapes differ");
    const std::uint32_t H = z0.h * codec::kPatch;
    const std::uint32_t W = z0.w * codec::kPatch;
    if (gt_image.size() != std::size_t(H) * W)
        throw ShapeMismatch("training_loss: gt image size mismatch");
    if (!(weights.lambda_p >= 0.0 && weights.lambda_l1 >= 0.0 &&
          weights.lambda_ssim >= 0.0))
        throw InvalidInput("training_loss: weights must be non-negative");

    const std::size_t M = eps.v.size();
    const std::size_t N = gt_image.size();

    LossBreakdown out;
    for (std::size_t i = 0; i < M; ++i) {
        const double d = double(eps_hat.v[i]) - double(eps.v[i]);
        out.latent_mse += d * d;
    }
    out.latent_mse /= double(M);

    const Tensor3<T> z_t = q_sample(z0, t, eps, sched);
    const Tensor3<T> z0_hat = predict_x0(z_t, t, eps_hat, sched);

    // unclamped decode of the rescaled latent estimate
    std::vector<T> image(N);
    {
        Tensor3<T> z_dec = z0_hat;
        const T inv_s = T(1.0 / latent_scale);
        for (T& v : z_dec.v) v *= inv_s;
        codec::decode_patches(z_dec.v.data(), z_dec.h, z_dec.w, image.data());
    }

    for (std::size_t i = 0; i < N; ++i)
        out.l1 += std::abs(double(image[i]) - double(gt_image[i]));
    out.l1 /= double(N);

    std::vector<T> ssim_grad;
    double ssim_val;
    if (grad_eps_hat != nullptr) {
        ssim_grad.resize(N);
        ssim_val = ssim_with_grad(image.data(), gt_image.data(), H, W, ssim_grad.data());
    } else {
        ssim_val = ssim(image.data(), gt_image.data(), H, W);
    }
    out.ssim_term = 1.0 - ssim_val;

    out.total = out.latent_mse +
                weights.lambda_p * (weights.lambda_l1 * out.l1 +
                                    weights.lambda_ssim * out.ssim_term);

    if (grad_eps_hat != nullptr) {
        Tensor3<T>& g = *grad_eps_hat;
        g = Tensor3<T>(eps.c, eps.h, eps.w);
        for (std::size_t i = 0; i < M; ++i)
            g.v[i] = T(2.0 / double(M)) * (eps_hat.v[i] - eps.v[i]);

        if (weights.lambda_p > 0.0) {
            std::vector<T> g_image(N);
            const double wl1 = weights.lambda_p * weights.lambda_l1 / double(N);
            const double wss = weights.lambda_p * weights.lambda_ssim;
            for (std::size_t i = 0; i < N; ++i) {
                const double diff = double(image[i]) - double(gt_image[i]);
                const double sgn = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
                g_image[i] = T(wl1 * sgn - wss * double(ssim_grad[i]));
            }
            // decode is the adjoint of encode, so the pixel gradient pulls
            // back through encode; then through predict_x0's linear factor.
            std::vector<T> g_latent(M);
            codec::encode_patches(g_image.data(), H, W, g_latent.data());
            const double ab = sched.alpha_bar_t(t);
            const T factor =
                T(-std::sqrt(1.0 - ab) / std::sqrt(ab) / latent_scale);
            for (std::size_t i = 0; i < M; ++i) g.v[i] += factor * g_latent[i];
        }
    }
    return out;
}

#define RBEV_INSTANTIATE(T)                                                            \
    template Tensor3<T> q_sample<T>(const Tensor3<T>&, std::uint32_t,                 \
                                    const Tensor3<T>&, const NoiseSchedule&);          \
    template Tensor3<T> predict_x0<T>(const Tensor3<T>&, std::uint32_t,               \
                                      const Tensor3<T>&, const NoiseSchedule&);        \
    template Tensor3<T> ancestral_step<T>(const Tensor3<T>&, std::uint32_t,           \
                                          const Tensor3<T>&, const Tensor3<T>&,       \
                                          const NoiseSchedule&, bool);                 \
    template Tensor3<T> ancestral_step_between<T>(const Tensor3<T>&, double, double,  \
                                                  const Tensor3<T>&,                  \
                                                  const Tensor3<T>*, bool);           \
    template Tensor3<T> condition_concat<T>(const Tensor3<T>&, const Tensor3<T>&);    \
    template LossBreakdown training_loss<T>(                                          \
        const Tensor3<T>&, std::uint32_t, const Tensor3<T>&, const Tensor3<T>&,       \
        const std::vector<T>&, const LossWeights&, const NoiseSchedule&, double,      \
        Tensor3<T>*);

RBEV_INSTANTIATE(float)
RBEV_INSTANTIATE(double)
#undef RBEV_INSTANTIATE

}  // namespace rbev
