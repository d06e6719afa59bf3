#include "radarbev/ssim.hpp"

#include <array>
#include <cmath>
#include <vector>

#include "radarbev/errors.hpp"

namespace rbev {

namespace {

constexpr std::uint32_t kWin = 11;
constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;

const std::array<double, kWin>& gauss_kernel() {
    static const std::array<double, kWin> g = [] {
        std::array<double, kWin> k{};
        const double sigma = 1.5;
        double sum = 0.0;
        for (std::uint32_t i = 0; i < kWin; ++i) {
            const double d = double(i) - (kWin - 1) / 2.0;
            k[i] = std::exp(-d * d / (2.0 * sigma * sigma));
            sum += k[i];
        }
        for (auto& v : k) v /= sum;
        return k;
    }();
    return g;
}

// separable valid correlation: (H x W) -> (H-10 x W-10)
template <typename T>
void valid_corr(const T* img, std::uint32_t H, std::uint32_t W, std::vector<double>& out,
                std::vector<double>& tmp) {
    const auto& g = gauss_kernel();
    const std::uint32_t Wv = W - kWin + 1;
    const std::uint32_t Hv = H - kWin + 1;
    tmp.assign(std::size_t(H) * Wv, 0.0);
    for (std::uint32_t y = 0; y < H; ++y) {
        const T* row = img + std::size_t(y) * W;
        double* trow = tmp.data() + std::size_t(y) * Wv;
        for (std::uint32_t x = 0; x < Wv; ++x) {
            double acc = 0.0;
            for (std::uint32_t k = 0; k < kWin; ++k) acc += g[k] * double(row[x + k]);
            trow[x] = acc;
        }
    }
    out.assign(std::size_t(Hv) * Wv, 0.0);
    for (std::uint32_t y = 0; y < Hv; ++y) {
        double* orow = out.data() + std::size_t(y) * Wv;
        for (std::uint32_t k = 0; k < kWin; ++k) {
            const double* trow = tmp.data() + std::size_t(y + k) * Wv;
            const double gk = g[k];
            for (std::uint32_t x = 0; x < Wv; ++x) orow[x] += gk * trow[x];
        }
    }
}

// adjoint of valid_corr: scatter a window field (Hv x Wv) back to (H x W)
void scatter_corr(const std::vector<double>& field, std::uint32_t Hv, std::uint32_t Wv,
                  std::uint32_t H, std::uint32_t W, std::vector<double>& out,
                  std::vector<double>& tmp) {
    const auto& g = gauss_kernel();
    tmp.assign(std::size_t(H) * Wv, 0.0);
    for (std::uint32_t py = 0; py < Hv; ++py) {
        const double* frow = field.data() + std::size_t(py) * Wv;
        for (std::uint32_t k = 0; k < kWin; ++k) {
            double* trow = tmp.data() + std::size_t(py + k) * Wv;
            const double gk = g[k];
            for (std::uint32_t x = 0; x < Wv; ++x) trow[x] += gk * frow[x];
        }
    }
    out.assign(std::size_t(H) * W, 0.0);
    for (std::uint32_t y = 0; y < H; ++y) {
        const double* trow = tmp.data() + std::size_t(y) * Wv;
        double* orow = out.data() + std::size_t(y) * W;
        for (std::uint32_t px = 0; px < Wv; ++px) {
            const double f = trow[px];
            if (f == 0.0) continue;
            for (std::uint32_t k = 0; k < kWin; ++k) orow[px + k] += f * g[k];
        }
    }
}

struct SsimFields {
    std::uint32_t Hv = 0, Wv = 0;
    std::vector<double> mu_a, mu_b, s_aa, s_bb, s_ab;  // means and central moments
};

template <typename T>
SsimFields compute_fields(const T* a, const T* b, std::uint32_t H, std::uint32_t W) {
    if (H < kWin || W < kWin)
        throw TooSmall("ssim: both dimensions must be >= 11");

    SsimFields f;
    f.Hv = H - kWin + 1;
    f.Wv = W - kWin + 1;
    std::vector<double> tmp;
    valid_corr(a, H, W, f.mu_a, tmp);
    valid_corr(b, H, W, f.mu_b, tmp);

    const std::size_t n = std::size_t(H) * W;
    std::vector<double> prod(n);
    for (std::size_t i = 0; i < n; ++i) prod[i] = double(a[i]) * double(a[i]);
    valid_corr(prod.data(), H, W, f.s_aa, tmp);
    for (std::size_t i = 0; i < n; ++i) prod[i] = double(b[i]) * double(b[i]);
    valid_corr(prod.data(), H, W, f.s_bb, tmp);
    for (std::size_t i = 0; i < n; ++i) prod[i] = double(a[i]) * double(b[i]);
    valid_corr(prod.data(), H, W, f.s_ab, tmp);

    const std::size_t m = f.mu_a.size();
    for (std::size_t i = 0; i < m; ++i) {
        f.s_aa[i] -= f.mu_a[i] * f.mu_a[i];
        f.s_bb[i] -= f.mu_b[i] * f.mu_b[i];
        f.s_ab[i] -= f.mu_a[i] * f.mu_b[i];
    }
    return f;
}

}  // namespace

template <typename T>
double ssim(const T* a, const T* b, std::uint32_t H, std::uint32_t W) {
    const SsimFields f = compute_fields(a, b, H, W);
    double sum = 0.0;
    for (std::size_t i = 0; i < f.mu_a.size(); ++i) {
        const double n1 = 2.0 * f.mu_a[i] * f.mu_b[i] + kC1;
        const double n2 = 2.0 * f.s_ab[i] + kC2;
        const double d1 = f.mu_a[i] * f.mu_a[i] + f.mu_b[i] * f.mu_b[i] + kC1;
        const double d2 = f.s_aa[i] + f.s_bb[i] + kC2;
        sum += (n1 * n2) / (d1 * d2);
    }
    return sum / double(f.mu_a.size());
}

template <typename T>
double ssim_with_grad(const T* a, const T* b, std::uint32_t H, std::uint32_t W,
                      T* grad_a) {
    const SsimFields f = compute_fields(a, b, H, W);
    const std::size_t m = f.mu_a.size();

    // per-window partials of S wrt mu_a, sigma_aa, sigma_ab
    std::vector<double> dmu(m), dsaa(m), dsab(m), dmu_mua(m), dsab_mub(m);
    double sum = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double mua = f.mu_a[i], mub = f.mu_b[i];
        const double n1 = 2.0 * mua * mub + kC1;
        const double n2 = 2.0 * f.s_ab[i] + kC2;
        const double d1 = mua * mua + mub * mub + kC1;
        const double d2 = f.s_aa[i] + f.s_bb[i] + kC2;
        const double s = (n1 * n2) / (d1 * d2);
        sum += s;
        dmu[i] = (2.0 * mub * n2) / (d1 * d2) - s * 2.0 * mua / d1;
        dsaa[i] = -s / d2;
        dsab[i] = 2.0 * n1 / (d1 * d2);
        dmu_mua[i] = dsaa[i] * mua;   // for the -2 G*(B mu_a) term
        dsab_mub[i] = dsab[i] * mub;  // for the  -G*(C mu_b) term
    }

    // grad_a = (1/P) [ G^T A + 2 a (G^T B) - 2 G^T(B mu_a)
    //                  + b (G^T C) - G^T(C mu_b) ]
    std::vector<double> tmp, gA, gB, gBmu, gC, gCmu;
    scatter_corr(dmu, f.Hv, f.Wv, H, W, gA, tmp);
    scatter_corr(dsaa, f.Hv, f.Wv, H, W, gB, tmp);
    scatter_corr(dmu_mua, f.Hv, f.Wv, H, W, gBmu, tmp);
    scatter_corr(dsab, f.Hv, f.Wv, H, W, gC, tmp);
    scatter_corr(dsab_mub, f.Hv, f.Wv, H, W, gCmu, tmp);

    const double inv_p = 1.0 / double(m);
    const std::size_t n = std::size_t(H) * W;
    for (std::size_t i = 0; i < n; ++i) {
        const double g = gA[i] + 2.0 * double(a[i]) * gB[i] - 2.0 * gBmu[i] +
                         double(b[i]) * gC[i] - gCmu[i];
        grad_a[i] = T(g * inv_p);
    }
    return sum * inv_p;
}

double ssim(const PolarBev& a, const PolarBev& b) {
    if (a.n_range != b.n_range || a.n_azimuth != b.n_azimuth)
        throw ShapeMismatch("ssim: image shapes differ");
    return ssim(a.values.data(), b.values.data(), a.n_range, a.n_azimuth);
}

template double ssim<float>(const float*, const float*, std::uint32_t, std::uint32_t);
template double ssim<double>(const double*, const double*, std::uint32_t,
                             std::uint32_t);
template double ssim_with_grad<float>(const float*, const float*, std::uint32_t,
                                      std::uint32_t, float*);
template double ssim_with_grad<double>(const double*, const double*, std::uint32_t,
                                       std::uint32_t, double*);

}  // namespace rbev
