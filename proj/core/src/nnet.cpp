#include "radarbev/nnet.hpp"

#include <cmath>
#include <cstring>

#include "radarbev/errors.hpp"

namespace rbev {

namespace {

inline int refl(int i, int n) { return i < 0 ? -i : (i >= n ? 2 * n - 2 - i : i); }

template <typename T>
inline T sigmoid(T x) {
    return T(1) / (T(1) + std::exp(-x));
}

// out[co][y][x] = b[co] + sum_{ci,ky,kx} W[co][ci][ky][kx] in[ci][ry][rx]
// with reflection padding of one cell.
template <typename T>
void conv3x3(const T* in, std::uint32_t ci_n, std::uint32_t h, std::uint32_t w,
             const T* W, const T* b, std::uint32_t co_n, T* out) {
    const std::size_t plane = std::size_t(h) * w;
    for (std::uint32_t co = 0; co < co_n; ++co) {
        T* op = out + co * plane;
        for (std::size_t i = 0; i < plane; ++i) op[i] = b[co];
        for (std::uint32_t ci = 0; ci < ci_n; ++ci) {
            const T* ip = in + ci * plane;
            const T* wp = W + (std::size_t(co) * ci_n + ci) * 9;
            for (std::uint32_t y = 0; y < h; ++y) {
                const T* r0 = ip + std::size_t(refl(int(y) - 1, int(h))) * w;
                const T* r1 = ip + std::size_t(y) * w;
                const T* r2 = ip + std::size_t(refl(int(y) + 1, int(h))) * w;
                T* orow = op + std::size_t(y) * w;
                for (std::uint32_t x = 0; x < w; ++x) {
                    const std::uint32_t xl = std::uint32_t(refl(int(x) - 1, int(w)));
                    const std::uint32_t xr = std::uint32_t(refl(int(x) + 1, int(w)));
                    orow[x] += wp[0] * r0[xl] + wp[1] * r0[x] + wp[2] * r0[xr] +
                               wp[3] * r1[xl] + wp[4] * r1[x] + wp[5] * r1[xr] +
                               wp[6] * r2[xl] + wp[7] * r2[x] + wp[8] * r2[xr];
                }
            }
        }
    }
}

// Gradients of conv3x3. gW/gb are accumulated; gin (if non-null) is
// accumulated as well, so callers zero the buffers they own.
template <typename T>
void conv3x3_backward(const T* in, std::uint32_t ci_n, std::uint32_t h,
                      std::uint32_t w, const T* W, std::uint32_t co_n, const T* gout,
                      T* gW, T* gb, T* gin) {
    const std::size_t plane = std::size_t(h) * w;
    for (std::uint32_t co = 0; co < co_n; ++co) {
        const T* gp = gout + co * plane;
        T gbacc = T(0);
        for (std::size_t i = 0; i < plane; ++i) gbacc += gp[i];
        gb[co] += gbacc;
        for (std::uint32_t ci = 0; ci < ci_n; ++ci) {
            const T* ip = in + ci * plane;
            T* gwp = gW + (std::size_t(co) * ci_n + ci) * 9;
            T* gip = gin ? gin + ci * plane : nullptr;
            const T* wp = W + (std::size_t(co) * ci_n + ci) * 9;
            for (std::uint32_t y = 0; y < h; ++y) {
                const std::uint32_t y0 = std::uint32_t(refl(int(y) - 1, int(h)));
                const std::uint32_t y2 = std::uint32_t(refl(int(y) + 1, int(h)));
                const T* gr = gp + std::size_t(y) * w;
                for (std::uint32_t x = 0; x < w; ++x) {
                    const T g = gr[x];
                    if (g == T(0)) continue;
                    const std::uint32_t xl = std::uint32_t(refl(int(x) - 1, int(w)));
                    const std::uint32_t xr = std::uint32_t(refl(int(x) + 1, int(w)));
                    const std::uint32_t ys[3] = {y0, y, y2};
                    const std::uint32_t xs[3] = {xl, x, xr};
                    for (int k = 0; k < 9; ++k) {
                        const std::size_t idx =
                            std::size_t(ys[k / 3]) * w + xs[k % 3];
                        gwp[k] += g * ip[idx];
                        if (gip) gip[idx] += g * wp[k];
                    }
                }
            }
        }
    }
}

}  // namespace

template <typename T>
void timestep_embedding(std::uint32_t t, T* out, std::uint32_t dim) {
    const std::uint32_t half = dim / 2;
    for (std::uint32_t i = 0; i < half; ++i) {
        const double freq =
            std::exp(-std::log(10000.0) * double(i) / double(half - 1));
        out[i] = T(std::sin(double(t) * freq));
        out[half + i] = T(std::cos(double(t) * freq));
    }
}

template <typename T>
const typename Denoiser<T>::Offsets& Denoiser<T>::offsets() {
    static const Offsets off = [] {
        Offsets o{};
        std::size_t p = 0;
        o.conv1_w = p; p += std::size_t(kBase) * kInCh * 9;
        o.conv1_b = p; p += kBase;
        o.aff_w = p; p += std::size_t(2 * kBase) * kEmbDim;
        o.aff_b = p; p += 2 * kBase;
        o.conv2_w = p; p += std::size_t(kBase) * kBase * 9;
        o.conv2_b = p; p += kBase;
        o.conv3_w = p; p += std::size_t(kBase) * (2 * kBase) * 9;
        o.conv3_b = p; p += kBase;
        o.head_w = p; p += std::size_t(kOutCh) * kBase * 9;
        o.head_b = p; p += kOutCh;
        o.total = p;
        return o;
    }();
    return off;
}

template <typename T>
std::uint64_t Denoiser<T>::arch_hash() {
    // FNV-1a over the architecture description; any layout change must
    // change this string.
    const char* desc =
        "denoiser-v1:emb32:film32:conv3x3r-8-32-silu:pool2-conv3x3r-32-32-silu:"
        "up2-cat-conv3x3r-64-32-silu:head3x3-32-4";
    std::uint64_t hash = 1469598103934665603ULL;
    for (const char* c = desc; *c; ++c) {
        hash ^= std::uint64_t(std::uint8_t(*c));
        hash *= 1099511628211ULL;
    }
    return hash;
}

template <typename T>
void Denoiser<T>::init_params(Rng& rng) {
    const Offsets& o = offsets();
    auto he = [&](std::size_t begin, std::size_t count, std::uint32_t fan_in) {
        const double std_dev = std::sqrt(2.0 / double(fan_in));
        for (std::size_t i = 0; i < count; ++i)
            p_[begin + i] = T(rng.normal() * std_dev);
    };
    he(o.conv1_w, std::size_t(kBase) * kInCh * 9, kInCh * 9);
    he(o.conv2_w, std::size_t(kBase) * kBase * 9, kBase * 9);
    he(o.conv3_w, std::size_t(kBase) * 2 * kBase * 9, 2 * kBase * 9);
    // conditioning starts as identity: small weights, scale bias 1
    for (std::size_t i = 0; i < std::size_t(2 * kBase) * kEmbDim; ++i)
        p_[o.aff_w + i] = T(rng.normal() * 0.02);
    for (std::uint32_t i = 0; i < kBase; ++i) p_[o.aff_b + i] = T(1);
    // head stays zero so the initial prediction is zero noise
}

template <typename T>
Tensor3<T> Denoiser<T>::forward(const Tensor3<T>& x, std::uint32_t t,
                                Cache* cache) const {
    if (x.c != kInCh) throw ShapeMismatch("denoiser: input must have 8 channels");
    if (x.h < 4 || x.w < 4 || x.h % 2 != 0 || x.w % 2 != 0)
        throw ShapeMismatch("denoiser: h and w must be even and >= 4");

    const Offsets& o = offsets();
    const std::uint32_t h = x.h, w = x.w;
    const std::uint32_t h2 = h / 2, w2 = w / 2;
    const std::size_t plane = std::size_t(h) * w;
    const std::size_t plane2 = std::size_t(h2) * w2;

    std::vector<T> emb(kEmbDim);
    timestep_embedding(t, emb.data(), kEmbDim);

    std::vector<T> scale(kBase), shift(kBase);
    for (std::uint32_t i = 0; i < 2 * kBase; ++i) {
        T acc = p_[o.aff_b + i];
        const T* wrow = &p_[o.aff_w + std::size_t(i) * kEmbDim];
        for (std::uint32_t j = 0; j < kEmbDim; ++j) acc += wrow[j] * emb[j];
        (i < kBase ? scale[i] : shift[i - kBase]) = acc;
    }

    // stage 1
    std::vector<T> pre1(std::size_t(kBase) * plane);
    conv3x3(x.v.data(), kInCh, h, w, &p_[o.conv1_w], &p_[o.conv1_b], kBase,
            pre1.data());
    std::vector<T> s1act(pre1.size());
    for (std::size_t i = 0; i < pre1.size(); ++i)
        s1act[i] = pre1[i] * sigmoid(pre1[i]);
    std::vector<T> s1f(s1act.size());
    for (std::uint32_t c = 0; c < kBase; ++c) {
        const T sc = scale[c], sh = shift[c];
        const T* in = s1act.data() + c * plane;
        T* out = s1f.data() + c * plane;
        for (std::size_t i = 0; i < plane; ++i) out[i] = in[i] * sc + sh;
    }

    // stage 2
    std::vector<T> pool(std::size_t(kBase) * plane2);
    for (std::uint32_t c = 0; c < kBase; ++c) {
        const T* in = s1f.data() + c * plane;
        T* out = pool.data() + c * plane2;
        for (std::uint32_t y = 0; y < h2; ++y)
            for (std::uint32_t x2 = 0; x2 < w2; ++x2) {
                const T* r0 = in + std::size_t(2 * y) * w + 2 * x2;
                const T* r1 = r0 + w;
                out[std::size_t(y) * w2 + x2] =
                    (r0[0] + r0[1] + r1[0] + r1[1]) * T(0.25);
            }
    }
    std::vector<T> pre2(std::size_t(kBase) * plane2);
    conv3x3(pool.data(), kBase, h2, w2, &p_[o.conv2_w], &p_[o.conv2_b], kBase,
            pre2.data());
    std::vector<T> s2(pre2.size());
    for (std::size_t i = 0; i < pre2.size(); ++i) s2[i] = pre2[i] * sigmoid(pre2[i]);

    // stage 3: upsample, concat [upsampled, stage-1 features]
    std::vector<T> cat(std::size_t(2 * kBase) * plane);
    for (std::uint32_t c = 0; c < kBase; ++c) {
        const T* in = s2.data() + c * plane2;
        T* out = cat.data() + c * plane;
        for (std::uint32_t y = 0; y < h; ++y) {
            const T* irow = in + std::size_t(y / 2) * w2;
            T* orow = out + std::size_t(y) * w;
            for (std::uint32_t xx = 0; xx < w; ++xx) orow[xx] = irow[xx / 2];
        }
    }
    std::memcpy(cat.data() + std::size_t(kBase) * plane, s1f.data(),
                sizeof(T) * s1f.size());
    std::vector<T> pre3(std::size_t(kBase) * plane);
    conv3x3(cat.data(), 2 * kBase, h, w, &p_[o.conv3_w], &p_[o.conv3_b], kBase,
            pre3.data());
    std::vector<T> s3(pre3.size());
    for (std::size_t i = 0; i < pre3.size(); ++i) s3[i] = pre3[i] * sigmoid(pre3[i]);

    Tensor3<T> out(kOutCh, h, w);
    conv3x3(s3.data(), kBase, h, w, &p_[o.head_w], &p_[o.head_b], kOutCh,
            out.v.data());

    if (cache) {
        cache->valid = true;
        cache->t = t;
        cache->h = h;
        cache->w = w;
        cache->x = x.v;
        cache->emb = std::move(emb);
        cache->scale = std::move(scale);
        cache->shift = std::move(shift);
        cache->pre1 = std::move(pre1);
        cache->s1act = std::move(s1act);
        cache->s1f = std::move(s1f);
        cache->pool = std::move(pool);
        cache->pre2 = std::move(pre2);
        cache->s2 = std::move(s2);
        cache->cat = std::move(cat);
        cache->pre3 = std::move(pre3);
        cache->s3 = std::move(s3);
    }
    return out;
}

template <typename T>
void Denoiser<T>::backward(const Cache& cache, const Tensor3<T>& grad_out,
                           std::vector<T>& grad_params, Tensor3<T>* grad_input) const {
    if (!cache.valid) throw MissingForwardCache("denoiser: no forward cache");
    if (grad_out.c != kOutCh || grad_out.h != cache.h || grad_out.w != cache.w)
        throw ShapeMismatch("denoiser: upstream gradient shape mismatch");

    const Offsets& o = offsets();
    const std::uint32_t h = cache.h, w = cache.w;
    const std::uint32_t h2 = h / 2, w2 = w / 2;
    const std::size_t plane = std::size_t(h) * w;
    const std::size_t plane2 = std::size_t(h2) * w2;

    grad_params.assign(param_count(), T(0));

    auto silu_bwd = [](const std::vector<T>& pre, const std::vector<T>& g,
                       std::vector<T>& out) {
        out.resize(pre.size());
        for (std::size_t i = 0; i < pre.size(); ++i) {
            const T s = sigmoid(pre[i]);
            out[i] = g[i] * s * (T(1) + pre[i] * (T(1) - s));
        }
    };

    // head
    std::vector<T> g_s3(std::size_t(kBase) * plane, T(0));
    conv3x3_backward(cache.s3.data(), kBase, h, w, &p_[o.head_w], kOutCh,
                     grad_out.v.data(), &grad_params[o.head_w],
                     &grad_params[o.head_b], g_s3.data());

    // stage 3
    std::vector<T> g_pre3;
    silu_bwd(cache.pre3, g_s3, g_pre3);
    std::vector<T> g_cat(std::size_t(2 * kBase) * plane, T(0));
    conv3x3_backward(cache.cat.data(), 2 * kBase, h, w, &p_[o.conv3_w], kBase,
                     g_pre3.data(), &grad_params[o.conv3_w], &grad_params[o.conv3_b],
                     g_cat.data());

    // split: g_up (upsampled half), g_s1f (skip half)
    std::vector<T> g_s2(std::size_t(kBase) * plane2, T(0));
    for (std::uint32_t c = 0; c < kBase; ++c) {
        const T* gu = g_cat.data() + c * plane;
        T* gs = g_s2.data() + c * plane2;
        for (std::uint32_t y = 0; y < h; ++y) {
            const T* grow = gu + std::size_t(y) * w;
            T* srow = gs + std::size_t(y / 2) * w2;
            for (std::uint32_t xx = 0; xx < w; ++xx) srow[xx / 2] += grow[xx];
        }
    }
    std::vector<T> g_s1f(g_cat.begin() + std::size_t(kBase) * plane, g_cat.end());

    // stage 2
    std::vector<T> g_pre2;
    silu_bwd(cache.pre2, g_s2, g_pre2);
    std::vector<T> g_pool(std::size_t(kBase) * plane2, T(0));
    conv3x3_backward(cache.pool.data(), kBase, h2, w2, &p_[o.conv2_w], kBase,
                     g_pre2.data(), &grad_params[o.conv2_w], &grad_params[o.conv2_b],
                     g_pool.data());
    for (std::uint32_t c = 0; c < kBase; ++c) {
        const T* gp = g_pool.data() + c * plane2;
        T* gs = g_s1f.data() + c * plane;
        for (std::uint32_t y = 0; y < h; ++y) {
            const T* grow = gp + std::size_t(y / 2) * w2;
            T* srow = gs + std::size_t(y) * w;
            for (std::uint32_t xx = 0; xx < w; ++xx)
                srow[xx] += grow[xx / 2] * T(0.25);
        }
    }

    // FiLM: y = s1act*scale + shift
    std::vector<T> g_s1act(std::size_t(kBase) * plane);
    std::vector<T> g_aff_out(2 * kBase, T(0));
    for (std::uint32_t c = 0; c < kBase; ++c) {
        const T sc = cache.scale[c];
        const T* g = g_s1f.data() + c * plane;
        const T* act = cache.s1act.data() + c * plane;
        T* ga = g_s1act.data() + c * plane;
        T gscale = T(0), gshift = T(0);
        for (std::size_t i = 0; i < plane; ++i) {
            ga[i] = g[i] * sc;
            gscale += g[i] * act[i];
            gshift += g[i];
        }
        g_aff_out[c] = gscale;
        g_aff_out[kBase + c] = gshift;
    }
    for (std::uint32_t i = 0; i < 2 * kBase; ++i) {
        grad_params[o.aff_b + i] += g_aff_out[i];
        T* gw = &grad_params[o.aff_w + std::size_t(i) * kEmbDim];
        for (std::uint32_t j = 0; j < kEmbDim; ++j)
            gw[j] += g_aff_out[i] * cache.emb[j];
    }

    // stage 1
    std::vector<T> g_pre1;
    silu_bwd(cache.pre1, g_s1act, g_pre1);
    T* gin = nullptr;
    if (grad_input) {
        *grad_input = Tensor3<T>(kInCh, h, w);
        gin = grad_input->v.data();
    }
    conv3x3_backward(cache.x.data(), kInCh, h, w, &p_[o.conv1_w], kBase,
                     g_pre1.data(), &grad_params[o.conv1_w], &grad_params[o.conv1_b],
                     gin);
}

template <typename T>
void adam_step(std::vector<T>& params, const std::vector<T>& grads,
               AdamState<T>& state, double lr, double beta1, double beta2,
               double eps) {
    if (params.size() != grads.size())
        throw ShapeMismatch("adam_step: params/grads size mismatch");
    if (state.m.empty()) {
        state.m.assign(params.size(), T(0));
        state.v.assign(params.size(), T(0));
    }
    if (state.m.size() != params.size())
        throw ShapeMismatch("adam_step: state size mismatch");

    state.step += 1;
    const double bc1 = 1.0 - std::pow(beta1, double(state.step));
    const double bc2 = 1.0 - std::pow(beta2, double(state.step));
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = double(grads[i]);
        const double m = beta1 * double(state.m[i]) + (1.0 - beta1) * g;
        const double v = beta2 * double(state.v[i]) + (1.0 - beta2) * g * g;
        state.m[i] = T(m);
        state.v[i] = T(v);
        params[i] = T(double(params[i]) - lr * (m / bc1) / (std::sqrt(v / bc2) + eps));
    }
}

template class Denoiser<float>;
template class Denoiser<double>;
template void timestep_embedding<float>(std::uint32_t, float*, std::uint32_t);
template void timestep_embedding<double>(std::uint32_t, double*, std::uint32_t);
template void adam_step<float>(std::vector<float>&, const std::vector<float>&,
                               AdamState<float>&, double, double, double, double);
template void adam_step<double>(std::vector<double>&, const std::vector<double>&,
                                AdamState<double>&, double, double, double, double);

}  // namespace rbev
