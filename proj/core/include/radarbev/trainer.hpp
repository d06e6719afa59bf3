#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "radarbev/diffusion.hpp"
#include "radarbev/io.hpp"
#include "radarbev/metrics.hpp"
#include "radarbev/nnet.hpp"
#include "radarbev/types.hpp"

namespace rbev {

/// Training run configuration; serializable as JSON ("schema": 1).
struct TrainConfig {
    std::uint32_t T = 1000;
    double beta_start = 1e-4;
    double beta_end = 0.02;
    LossWeights weights;
    std::uint64_t seed = 1;
    std::uint32_t steps = 6000;
    std::uint32_t batch = 16;
    double lr = 1e-3;
    std::uint32_t ckpt_every = 2000;
    /// Latents are multiplied by this factor before diffusion so their
    /// scale roughly matches the unit-variance noise.
    float latent_scale = 4.0f;
    std::uint32_t jobs = 0;  // 0 = hardware concurrency
    bool use_beta_variance = false;
    /// Cosine-decay the learning rate to 10% of lr over the run. The
    /// effective rate is a pure function of (config, step), so resumed
    /// runs stay bit-exact.
    bool lr_decay = true;
};

TrainConfig train_config_from_json(const std::string& path);
void train_config_to_json(const TrainConfig& cfg, const std::string& path);

/// In-memory paired dataset (radar condition, LiDAR target).
struct Dataset {
    std::vector<PolarBev> radar;
    std::vector<PolarBev> gt;

    std::size_t size() const { return radar.size(); }
    /// Loads every *_radar.rsbev / *_gt.rsbev pair under dir/pairs (or dir
    /// itself), sorted by filename.
    static Dataset load(const std::string& dir);
};

struct TrainLogRow {
    std::uint64_t step = 0;
    double loss_total = 0.0;
    double loss_latent = 0.0;
    double loss_l1 = 0.0;
    double loss_ssim = 0.0;
};

/// Conditional latent-diffusion trainer. Deterministic given the config
/// seed: per-sample randomness is derived from (seed, step, slot), so
/// results do not depend on the worker count, and resuming from a
/// checkpoint reproduces the uninterrupted run bit-exactly.
class Trainer {
  public:
    Trainer(const TrainConfig& cfg, const Dataset& data);

    void init_fresh();
    void resume(const Checkpoint& ckpt);
    Checkpoint make_checkpoint() const;

    TrainLogRow step();
    std::uint64_t current_step() const { return step_; }

    const Denoiser<float>& net() const { return net_; }

  private:
    TrainConfig cfg_;
    NoiseSchedule sched_;
    Denoiser<float> net_;
    AdamState<float> adam_;
    std::uint64_t step_ = 0;
    std::vector<LatentTensor> z0_, cond_;
    std::vector<std::vector<float>> gt_images_;
    std::uint32_t lh_ = 0, lw_ = 0;
};

/// Run (or resume) a full training loop, writing the log CSV
/// (step,loss_total,loss_latent,loss_l1,loss_ssim) and periodic
/// checkpoints to ckpt_path.
void train(const TrainConfig& cfg, const Dataset& data, const std::string& ckpt_path,
           const std::string& log_path,
           const std::optional<Checkpoint>& resume_from = std::nullopt,
           bool verbose = false);

/// Reverse-diffusion reconstruction of one radar BEV. steps = 1000 runs
/// the full chain; fewer steps use the uniform strided subsequence. The
/// decoded image is clamped and then max-normalized to [0,1] like every
/// other BEV in the pipeline.
PolarBev sample_bev(const Checkpoint& ckpt, const PolarBev& radar,
                    std::uint32_t steps, std::uint64_t seed);

/// Sample every *_radar.rsbev under in_dir (dataset layout) into
/// out_dir/NNNNN_pred.rsbev, frame-parallel with per-frame seeds.
void sample_directory(const Checkpoint& ckpt, const std::string& in_dir,
                      const std::string& out_dir, std::uint32_t steps,
                      std::uint64_t seed, std::uint32_t jobs = 0);

struct EvalOptions {
    double binarize = 0.5;
    ChamferMode cd_mode = ChamferMode::MeanOfDirected;
    MhdMode mhd_mode = MhdMode::MaxOfDirected;
    std::uint32_t jobs = 0;  // frame-parallel; 0 = hardware concurrency
};

struct EvalOutcome {
    std::vector<std::pair<std::string, MetricResult>> rows;
    std::size_t skipped_empty = 0;
    double mean_cd = 0.0;
    double mean_mhd = 0.0;
};

/// Pair BEV files of two directories by basename (ignoring _radar/_gt/
/// _pred suffixes), extract point clouds at the binarize threshold and
/// compute CD/MHD per frame. Frames where either cloud is empty are
/// skipped and counted.
EvalOutcome evaluate_dirs(const std::string& pred_dir, const std::string& gt_dir,
                          const EvalOptions& opt = {});

}  // namespace rbev
