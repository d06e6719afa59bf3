#include "radarbev/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <thread>

#include "json.hpp"
#include "radarbev/bevgrid.hpp"
#include "radarbev/errors.hpp"
#include "radarbev/latent_codec.hpp"
#include "radarbev/rng.hpp"

namespace rbev {

namespace fs = std::filesystem;

TrainConfig train_config_from_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("bad JSON in " + path + ": " + e.what());
    }
    if (j.value("schema", 0) != 1)
        throw FormatError("config schema must be 1 in " + path);

    TrainConfig cfg;
    if (j.contains("schedule")) {
        const auto& s = j["schedule"];
        cfg.T = s.value("T", cfg.T);
        cfg.beta_start = s.value("beta_start", cfg.beta_start);
        cfg.beta_end = s.value("beta_end", cfg.beta_end);
    }
    if (j.contains("weights")) {
        const auto& w = j["weights"];
        cfg.weights.lambda_p = w.value("lambda_p", cfg.weights.lambda_p);
        cfg.weights.lambda_l1 = w.value("lambda_l1", cfg.weights.lambda_l1);
        cfg.weights.lambda_ssim = w.value("lambda_ssim", cfg.weights.lambda_ssim);
    }
    cfg.seed = j.value("seed", cfg.seed);
    cfg.steps = j.value("steps", cfg.steps);
    cfg.batch = j.value("batch", cfg.batch);
    cfg.lr = j.value("lr", cfg.lr);
    cfg.ckpt_every = j.value("ckpt_every", cfg.ckpt_every);
    cfg.latent_scale = j.value("latent_scale", cfg.latent_scale);
    cfg.jobs = j.value("jobs", cfg.jobs);
    cfg.use_beta_variance = j.value("use_beta_variance", cfg.use_beta_variance);
    cfg.lr_decay = j.value("lr_decay", cfg.lr_decay);
    return cfg;
}

void train_config_to_json(const TrainConfig& cfg, const std::string& path) {
    nlohmann::json j;
    j["schema"] = 1;
    j["schedule"] = {{"T", cfg.T},
                     {"beta_start", cfg.beta_start},
                     {"beta_end", cfg.beta_end}};
    j["weights"] = {{"lambda_p", cfg.weights.lambda_p},
                    {"lambda_l1", cfg.weights.lambda_l1},
                    {"lambda_ssim", cfg.weights.lambda_ssim}};
    j["seed"] = cfg.seed;
    j["steps"] = cfg.steps;
    j["batch"] = cfg.batch;
    j["lr"] = cfg.lr;
    j["ckpt_every"] = cfg.ckpt_every;
    j["latent_scale"] = cfg.latent_scale;
    j["jobs"] = cfg.jobs;
    j["use_beta_variance"] = cfg.use_beta_variance;
    j["lr_decay"] = cfg.lr_decay;
    std::ofstream out(path);
    if (!out) throw IoError("cannot write config: " + path);
    out << j.dump(2) << "\n";
}

namespace {

// dataset file pairing: key = basename without extension and without a
// trailing _radar/_gt/_pred role suffix
std::string pair_key(const fs::path& p) {
    std::string stem = p.stem().string();
    for (const char* suffix : {"_radar", "_gt", "_pred"}) {
        const std::size_t len = std::string(suffix).size();
        if (stem.size() > len && stem.compare(stem.size() - len, len, suffix) == 0) {
            stem.resize(stem.size() - len);
            break;
        }
    }
    return stem;
}

std::map<std::string, fs::path> list_bevs(const std::string& dir,
                                          const char* role_suffix) {
    fs::path root(dir);
    if (fs::is_directory(root / "pairs")) root /= "pairs";
    if (!fs::is_directory(root)) throw IoError("not a directory: " + dir);
    std::map<std::string, fs::path> out;
    for (const auto& entry : fs::directory_iterator(root)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".rsbev") continue;
        const std::string stem = entry.path().stem().string();
        if (role_suffix != nullptr) {
            const std::string suffix(role_suffix);
            if (stem.size() <= suffix.size() ||
                stem.compare(stem.size() - suffix.size(), suffix.size(), suffix) != 0)
                continue;
        }
        out[pair_key(entry.path())] = entry.path();
    }
    return out;
}

std::uint32_t resolve_jobs(std::uint32_t jobs) {
    if (jobs != 0) return jobs;
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : hc;
}

// static partition of [0, n) across worker threads
void parallel_for(std::uint32_t n, std::uint32_t jobs,
                  const std::function<void(std::uint32_t)>& fn) {
    jobs = std::min(jobs, n);
    if (jobs <= 1) {
        for (std::uint32_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (std::uint32_t w = 0; w < jobs; ++w) {
        pool.emplace_back([&, w] {
            for (std::uint32_t i = w; i < n; i += jobs) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace

Dataset Dataset::load(const std::string& dir) {
    const auto radar_files = list_bevs(dir, "_radar");
    const auto gt_files = list_bevs(dir, "_gt");
    Dataset data;
    for (const auto& [key, radar_path] : radar_files) {
        const auto it = gt_files.find(key);
        if (it == gt_files.end()) continue;
        data.radar.push_back(read_rsbev(radar_path.string()));
        data.gt.push_back(read_rsbev(it->second.string()));
    }
    if (data.radar.empty()) throw IoError("no radar/gt pairs found under " + dir);
    return data;
}

Trainer::Trainer(const TrainConfig& cfg, const Dataset& data)
    : cfg_(cfg), sched_(make_schedule(cfg.T, cfg.beta_start, cfg.beta_end)) {
    if (data.size() == 0) throw InvalidInput("trainer: empty dataset");

    z0_.reserve(data.size());
    cond_.reserve(data.size());
    gt_images_.reserve(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        const PolarBev& gt = data.gt[i];
        const PolarBev& radar = data.radar[i];
        if (gt.n_range != radar.n_range || gt.n_azimuth != radar.n_azimuth)
            throw ShapeMismatch("trainer: radar/gt shapes differ");
        LatentTensor z = encode(gt);
        LatentTensor c = encode(radar);
        for (float& v : z.v) v *= cfg_.latent_scale;
        for (float& v : c.v) v *= cfg_.latent_scale;
        if (i == 0) {
            lh_ = z.h;
            lw_ = z.w;
        } else if (z.h != lh_ || z.w != lw_) {
            throw ShapeMismatch("trainer: inconsistent BEV shapes in dataset");
        }
        z0_.push_back(std::move(z));
        cond_.push_back(std::move(c));
        gt_images_.emplace_back(gt.values.begin(), gt.values.end());
    }
}

void Trainer::init_fresh() {
    Rng rng(Rng::derive(cfg_.seed, 0x1717));
    net_.init_params(rng);
    adam_ = AdamState<float>{};
    step_ = 0;
}

void Trainer::resume(const Checkpoint& ckpt) {
    if (ckpt.arch_hash != Denoiser<float>::arch_hash())
        throw FormatError("checkpoint architecture hash mismatch");
    if (ckpt.params.size() != Denoiser<float>::param_count())
        throw FormatError("checkpoint parameter count mismatch");
    net_.params() = ckpt.params;
    adam_.m = ckpt.adam_m;
    adam_.v = ckpt.adam_v;
    adam_.step = ckpt.adam_step;
    step_ = ckpt.train_step;
}

Checkpoint Trainer::make_checkpoint() const {
    Checkpoint c;
    c.arch_hash = Denoiser<float>::arch_hash();
    c.T = cfg_.T;
    c.beta_start = cfg_.beta_start;
    c.beta_end = cfg_.beta_end;
    c.latent_scale = cfg_.latent_scale;
    c.use_beta_variance = cfg_.use_beta_variance;
    c.train_step = step_;
    c.params = net_.params();
    c.adam_m = adam_.m.empty() ? std::vector<float>(c.params.size(), 0.0f) : adam_.m;
    c.adam_v = adam_.v.empty() ? std::vector<float>(c.params.size(), 0.0f) : adam_.v;
    c.adam_step = adam_.step;
    c.rng_state = {cfg_.seed, 0, 0, 0};
    return c;
}

TrainLogRow Trainer::step() {
    const std::uint32_t B = cfg_.batch;
    const std::size_t P = Denoiser<float>::param_count();

    std::vector<std::vector<float>> grads(B);
    std::vector<LossBreakdown> losses(B);

    parallel_for(B, resolve_jobs(cfg_.jobs), [&](std::uint32_t k) {
        // randomness is a pure function of (seed, step, slot)
        Rng rng(Rng::derive(cfg_.seed, step_ * 0x10001ULL + k));
        const std::size_t i = rng.below(z0_.size());
        const auto t = std::uint32_t(1 + rng.below(cfg_.T));

        LatentTensor eps(4, lh_, lw_);
        for (float& v : eps.v) v = float(rng.normal());

        const LatentTensor z_t = q_sample(z0_[i], t, eps, sched_);
        const LatentTensor x_in = condition_concat(z_t, cond_[i]);

        typename Denoiser<float>::Cache cache;
        const LatentTensor eps_hat = net_.forward(x_in, t, &cache);

        LatentTensor g_eps;
        losses[k] = training_loss(z0_[i], t, eps, eps_hat, gt_images_[i],
                                  cfg_.weights, sched_, cfg_.latent_scale, &g_eps);
        net_.backward(cache, g_eps, grads[k]);
    });

    // fixed-order reduction keeps the step deterministic for any job count
    std::vector<float> grad(P, 0.0f);
    const float inv_b = 1.0f / float(B);
    for (std::uint32_t k = 0; k < B; ++k)
        for (std::size_t j = 0; j < P; ++j) grad[j] += grads[k][j] * inv_b;

    double lr = cfg_.lr;
    if (cfg_.lr_decay && cfg_.steps > 0) {
        const double frac = std::min(1.0, double(step_) / double(cfg_.steps));
        lr *= 0.1 + 0.45 * (1.0 + std::cos(3.14159265358979323846 * frac));
    }
    adam_step(net_.params(), grad, adam_, lr);
    step_ += 1;

    TrainLogRow row;
    row.step = step_;
    for (std::uint32_t k = 0; k < B; ++k) {
        row.loss_total += losses[k].total;
        row.loss_latent += losses[k].latent_mse;
        row.loss_l1 += losses[k].l1;
        row.loss_ssim += losses[k].ssim_term;
    }
    row.loss_total /= B;
    row.loss_latent /= B;
    row.loss_l1 /= B;
    row.loss_ssim /= B;
    return row;
}

void train(const TrainConfig& cfg, const Dataset& data, const std::string& ckpt_path,
           const std::string& log_path, const std::optional<Checkpoint>& resume_from,
           bool verbose) {
    Trainer trainer(cfg, data);
    std::ofstream log;
    if (resume_from.has_value()) {
        trainer.resume(*resume_from);
        log.open(log_path, std::ios::app);
    } else {
        trainer.init_fresh();
        log.open(log_path);
        if (log) log << "step,loss_total,loss_latent,loss_l1,loss_ssim\n";
    }
    if (!log) throw IoError("cannot write log: " + log_path);

    char buf[160];
    while (trainer.current_step() < cfg.steps) {
        const TrainLogRow row = trainer.step();
        std::snprintf(buf, sizeof(buf), "%llu,%.6f,%.6f,%.6f,%.6f\n",
                      static_cast<unsigned long long>(row.step), row.loss_total,
                      row.loss_latent, row.loss_l1, row.loss_ssim);
        log << buf;
        if (verbose && row.step % 200 == 0) {
            std::fprintf(stderr, "step %6llu  total %.4f  latent %.4f  l1 %.4f\n",
                         static_cast<unsigned long long>(row.step), row.loss_total,
                         row.loss_latent, row.loss_l1);
        }
        if (cfg.ckpt_every > 0 && row.step % cfg.ckpt_every == 0)
            write_rsckpt(ckpt_path, trainer.make_checkpoint());
    }
    write_rsckpt(ckpt_path, trainer.make_checkpoint());
}

PolarBev sample_bev(const Checkpoint& ckpt, const PolarBev& radar,
                    std::uint32_t steps, std::uint64_t seed) {
    if (ckpt.arch_hash != Denoiser<float>::arch_hash())
        throw FormatError("checkpoint architecture hash mismatch");
    Denoiser<float> net;
    if (ckpt.params.size() != net.params().size())
        throw FormatError("checkpoint parameter count mismatch");
    net.params() = ckpt.params;

    const NoiseSchedule sched = make_schedule(ckpt.T, ckpt.beta_start, ckpt.beta_end);
    LatentTensor cond = encode(radar);
    for (float& v : cond.v) v *= ckpt.latent_scale;

    Rng rng(Rng::derive(seed, 0x5a11));
    LatentTensor z(4, cond.h, cond.w);
    for (float& v : z.v) v = float(rng.normal());

    const auto taus = strided_timesteps(ckpt.T, steps);
    for (std::size_t i = 0; i < taus.size(); ++i) {
        const std::uint32_t t = taus[i];
        const LatentTensor x_in = condition_concat(z, cond);
        const LatentTensor eps_hat = net.forward(x_in, t);
        const double abar_cur = sched.alpha_bar_t(t);
        const double abar_prev =
            i + 1 < taus.size() ? sched.alpha_bar_t(taus[i + 1]) : 1.0;
        if (abar_prev < 1.0) {
            LatentTensor noise(4, cond.h, cond.w);
            for (float& v : noise.v) v = float(rng.normal());
            z = ancestral_step_between(z, abar_cur, abar_prev, eps_hat, &noise,
                                       ckpt.use_beta_variance);
        } else {
            z = ancestral_step_between(z, abar_cur, abar_prev, eps_hat,
                                       static_cast<const LatentTensor*>(nullptr),
                                       ckpt.use_beta_variance);
        }
    }

    const float inv_scale = 1.0f / ckpt.latent_scale;
    for (float& v : z.v) v *= inv_scale;
    PolarBev out = decode(z, radar.range_res, radar.fov, /*clamp=*/true);
    // Bring the decoded sample back to the pipeline's [0,1] convention.
    // The truncated codec reconstructs thin walls well below 1.0 and a
    // handful of cells (wall junctions) overshoot, so normalize by a high
    // percentile rather than the strict max and clamp the overshoot.
    std::vector<float> order = out.values;
    const std::size_t k = std::max<std::size_t>(1, order.size() / 250);  // 99.6th
    std::nth_element(order.begin(), order.begin() + (k - 1), order.end(),
                     std::greater<float>());
    const float scale = order[k - 1];
    if (scale > 0.0f) {
        for (float& v : out.values) v = std::min(1.0f, v / scale);
    }
    return out;
}

void sample_directory(const Checkpoint& ckpt, const std::string& in_dir,
                      const std::string& out_dir, std::uint32_t steps,
                      std::uint64_t seed, std::uint32_t jobs) {
    const auto radar_files = list_bevs(in_dir, "_radar");
    if (radar_files.empty()) throw IoError("no *_radar.rsbev files under " + in_dir);
    fs::create_directories(out_dir);

    std::vector<std::pair<std::string, fs::path>> items(radar_files.begin(),
                                                        radar_files.end());
    parallel_for(std::uint32_t(items.size()), resolve_jobs(jobs),
                 [&](std::uint32_t i) {
                     const auto& [key, path] = items[i];
                     const PolarBev radar = read_rsbev(path.string());
                     // per-frame seed keeps output independent of job count
                     const PolarBev out =
                         sample_bev(ckpt, radar, steps, Rng::derive(seed, i));
                     write_rsbev((fs::path(out_dir) / (key + "_pred.rsbev")).string(),
                                 out);
                 });
}

EvalOutcome evaluate_dirs(const std::string& pred_dir, const std::string& gt_dir,
                          const EvalOptions& opt) {
    // role resolution: prediction side prefers _pred files, then _radar
    // (dataset-as-baseline), then any .rsbev; ground truth prefers _gt.
    auto pred_files = list_bevs(pred_dir, "_pred");
    if (pred_files.empty()) pred_files = list_bevs(pred_dir, "_radar");
    if (pred_files.empty()) pred_files = list_bevs(pred_dir, nullptr);
    auto gt_map = list_bevs(gt_dir, "_gt");
    if (gt_map.empty()) gt_map = list_bevs(gt_dir, nullptr);

    std::vector<std::pair<std::string, fs::path>> work;
    for (const auto& [key, pred_path] : pred_files) {
        if (gt_map.count(key)) work.emplace_back(key, pred_path);
    }

    // per-frame slots keep the row order independent of the job count
    std::vector<int> ok(work.size(), 0);
    std::vector<MetricResult> results(work.size());
    parallel_for(std::uint32_t(work.size()), resolve_jobs(opt.jobs),
                 [&](std::uint32_t i) {
                     const auto& [key, pred_path] = work[i];
                     const PolarBev pred = read_rsbev(pred_path.string());
                     const PolarBev gt = read_rsbev(gt_map.at(key).string());
                     const PointCloud2D pc_pred = bev_to_points(pred, opt.binarize);
                     const PointCloud2D pc_gt = bev_to_points(gt, opt.binarize);
                     if (pc_pred.empty() || pc_gt.empty()) return;
                     results[i] =
                         evaluate_pair(pc_pred, pc_gt, opt.cd_mode, opt.mhd_mode);
                     ok[i] = 1;
                 });

    EvalOutcome out;
    for (std::size_t i = 0; i < work.size(); ++i) {
        if (ok[i])
            out.rows.emplace_back(work[i].first, results[i]);
        else
            out.skipped_empty += 1;
    }
    if (out.rows.empty()) throw NoResults("evaluate_dirs: no comparable pairs");
    for (const auto& [key, r] : out.rows) {
        out.mean_cd += r.cd;
        out.mean_mhd += r.mhd;
    }
    out.mean_cd /= double(out.rows.size());
    out.mean_mhd /= double(out.rows.size());
    return out;
}

}  // namespace rbev
