#pragma once

#include <cstdint>
#include <vector>

#include "radarbev/rng.hpp"
#include "radarbev/types.hpp"

namespace rbev {

/// Sinusoidal embedding of an integer timestep: 16 sin / 16 cos pairs with
/// geometrically spaced frequencies from 1 down to 1e-4.
template <typename T>
void timestep_embedding(std::uint32_t t, T* out, std::uint32_t dim = 32);

/// Conditional noise predictor: a small fixed 3-stage U-Net over 8-channel
/// latent inputs (noisy target latent stacked with the radar condition).
///
///   stage 1: conv3x3 (8->32), SiLU, then a per-channel scale+shift whose
///            coefficients come from an affine map of the timestep
///            embedding (scale initialized to 1)
///   stage 2: 2x average pool, conv3x3 (32->32), SiLU
///   stage 3: nearest-neighbor 2x upsample, concat with stage-1 features
///            ([upsampled, stage-1]), conv3x3 (64->32), SiLU
///   head:    conv3x3 (32->4), linear, zero-initialized
///
/// All convolutions use reflection padding. Parameters live in one flat
/// vector so gradient checking, Adam and checkpointing can treat the model
/// as a single array.
template <typename T>
class Denoiser {
  public:
    static constexpr std::uint32_t kInCh = 8;
    static constexpr std::uint32_t kBase = 32;
    static constexpr std::uint32_t kOutCh = 4;
    static constexpr std::uint32_t kEmbDim = 32;

    struct Offsets {
        std::size_t conv1_w, conv1_b, aff_w, aff_b, conv2_w, conv2_b;
        std::size_t conv3_w, conv3_b, head_w, head_b, total;
    };
    static const Offsets& offsets();
    static std::size_t param_count() { return offsets().total; }

    /// Stable identifier of the fixed architecture, embedded in
    /// checkpoints to reject mismatched parameter blobs.
    static std::uint64_t arch_hash();

    Denoiser() : p_(param_count(), T(0)) {}

    /// He-normal conv weights, identity scale/zero shift conditioning,
    /// zero head.
    void init_params(Rng& rng);

    std::vector<T>& params() { return p_; }
    const std::vector<T>& params() const { return p_; }

    struct Cache {
        bool valid = false;
        std::uint32_t t = 0;
        std::uint32_t h = 0, w = 0;
        std::vector<T> x;          // input 8 x h x w
        std::vector<T> emb;        // 32
        std::vector<T> scale, shift;
        std::vector<T> pre1, s1act, s1f;  // 32 x h x w
        std::vector<T> pool, pre2, s2;    // 32 x h/2 x w/2
        std::vector<T> cat;               // 64 x h x w
        std::vector<T> pre3, s3;          // 32 x h x w
    };

    /// x must be 8 x h x w with h, w even and >= 4; returns 4 x h x w.
    Tensor3<T> forward(const Tensor3<T>& x, std::uint32_t t,
                       Cache* cache = nullptr) const;

    /// Exact reverse-mode gradients for all parameters (accumulated into
    /// grad_params, which is resized/zeroed) and optionally the input.
    void backward(const Cache& cache, const Tensor3<T>& grad_out,
                  std::vector<T>& grad_params, Tensor3<T>* grad_input = nullptr) const;

  private:
    std::vector<T> p_;
};

/// Bias-corrected adaptive-moment update (Adam).
template <typename T>
struct AdamState {
    std::vector<T> m, v;
    std::uint64_t step = 0;
};

template <typename T>
void adam_step(std::vector<T>& params, const std::vector<T>& grads,
               AdamState<T>& state, double lr, double beta1 = 0.9,
               double beta2 = 0.999, double eps = 1e-8);

}  // namespace rbev
