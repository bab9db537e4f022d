// Copyright 2026 The vqinit Authors
// SPDX-License-Identifier: Apache-2.0

#include "vqinit/ddpm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "json_io.hpp"
#include "vqinit/vqe_opt.hpp"

namespace vqinit {

using detail::json;

namespace {

constexpr std::size_t kChunk = 8;
constexpr std::uint64_t kInitStream = 1;
constexpr std::uint64_t kTrainStream = 2;

void require_same_length(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    fail(ErrorKind::kInvalidArgument, std::string(what) + ": length " + std::to_string(a) +
                                          " vs " + std::to_string(b));
  }
}

void require_step(int t, const NoiseSchedule& sched) {
  if (t < 1 || t > sched.steps()) {
    fail(ErrorKind::kOutOfRange,
         "timestep " + std::to_string(t) + " outside [1, " + std::to_string(sched.steps()) + "]");
  }
}

void require_finite(std::span<const double> v, const std::string& what) {
  for (double x : v) {
    if (!std::isfinite(x)) fail(ErrorKind::kNumerical, "non-finite value in " + what);
  }
}

json diffusion_to_json(const DiffusionConfig& c) {
  return json{{"timesteps", c.timesteps},   {"beta_start", c.beta_start},
              {"beta_end", c.beta_end},     {"guidance", c.guidance},
              {"p_guidance", c.p_guidance}, {"epochs", c.epochs},
              {"learning_rate", c.learning_rate}, {"batch_size", c.batch_size}};
}

DiffusionConfig diffusion_from_json(const json& j) {
  DiffusionConfig c;
  c.timesteps = j.at("timesteps").get<int>();
  c.beta_start = j.at("beta_start").get<double>();
  c.beta_end = j.at("beta_end").get<double>();
  c.guidance = j.at("guidance").get<double>();
  c.p_guidance = j.at("p_guidance").get<double>();
  c.epochs = j.at("epochs").get<int>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.batch_size = j.at("batch_size").get<int>();
  c.validate();
  return c;
}

json arch_to_json(const DenoiserArch& a) {
  return json{{"input_dim", a.input_dim}, {"hidden", a.hidden},     {"blocks", a.blocks},
              {"time_dim", a.time_dim},   {"cond_dim", a.cond_dim}, {"timesteps", a.timesteps}};
}

DenoiserArch arch_from_json(const json& j) {
  DenoiserArch a;
  a.input_dim = j.at("input_dim").get<int>();
  a.hidden = j.at("hidden").get<int>();
  a.blocks = j.at("blocks").get<int>();
  a.time_dim = j.at("time_dim").get<int>();
  a.cond_dim = j.at("cond_dim").get<int>();
  a.timesteps = j.at("timesteps").get<int>();
  a.validate();
  return a;
}

}  // namespace

void DiffusionConfig::validate() const {
  if (timesteps < 2) fail(ErrorKind::kInvalidArgument, "diffusion needs at least 2 timesteps");
  if (!(beta_start > 0.0 && beta_end < 1.0 && beta_start <= beta_end)) {
    fail(ErrorKind::kInvalidArgument, "beta schedule endpoints must satisfy 0 < b1 <= bT < 1");
  }
  if (!(guidance >= 0.0) || !std::isfinite(guidance)) {
    fail(ErrorKind::kInvalidArgument, "guidance scale must be finite and non-negative");
  }
  if (!(p_guidance >= 0.0 && p_guidance <= 1.0)) {
    fail(ErrorKind::kInvalidArgument, "guidance dropout probability must lie in [0, 1]");
  }
  if (epochs < 1) fail(ErrorKind::kInvalidArgument, "epochs must be positive");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    fail(ErrorKind::kInvalidArgument, "learning rate must be positive");
  }
  if (batch_size < 1) fail(ErrorKind::kInvalidArgument, "batch size must be positive");
}

NoiseSchedule::NoiseSchedule(std::vector<double> betas) {
  if (betas.size() < 2) fail(ErrorKind::kInvalidArgument, "schedule needs at least 2 steps");
  beta_.assign(1, 0.0);
  alpha_.assign(1, 1.0);
  alpha_bar_.assign(1, 1.0);
  for (std::size_t i = 0; i < betas.size(); ++i) {
    const double b = betas[i];
    if (!(b > 0.0 && b < 1.0)) fail(ErrorKind::kInvalidArgument, "beta must lie in (0, 1)");
    if (i > 0 && b < betas[i - 1]) {
      fail(ErrorKind::kInvalidArgument, "beta schedule must be non-decreasing");
    }
    beta_.push_back(b);
    alpha_.push_back(1.0 - b);
    alpha_bar_.push_back(alpha_bar_.back() * (1.0 - b));
  }
}

void NoiseSchedule::check(int t) const {
  if (t < 0 || t > steps()) {
    fail(ErrorKind::kOutOfRange,
         "timestep " + std::to_string(t) + " outside [0, " + std::to_string(steps()) + "]");
  }
}

double NoiseSchedule::beta(int t) const {
  check(t);
  return beta_[static_cast<std::size_t>(t)];
}

double NoiseSchedule::alpha(int t) const {
  check(t);
  return alpha_[static_cast<std::size_t>(t)];
}

double NoiseSchedule::alpha_bar(int t) const {
  check(t);
  return alpha_bar_[static_cast<std::size_t>(t)];
}

NoiseSchedule linear_schedule(const DiffusionConfig& cfg) {
  cfg.validate();
  const int T = cfg.timesteps;
  std::vector<double> betas(static_cast<std::size_t>(T));
  for (int t = 1; t <= T; ++t) {
    betas[static_cast<std::size_t>(t - 1)] =
        cfg.beta_start + (t - 1) * (cfg.beta_end - cfg.beta_start) / (T - 1);
  }
  return NoiseSchedule(std::move(betas));
}

std::vector<double> forward_sample(std::span<const double> x0, int t, std::span<const double> eps,
                                   const NoiseSchedule& sched) {
  require_step(t, sched);
  require_same_length(x0.size(), eps.size(), "forward_sample");
  const double a = std::sqrt(sched.alpha_bar(t));
  const double s = std::sqrt(1.0 - sched.alpha_bar(t));
  std::vector<double> out(x0.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a * x0[i] + s * eps[i];
  return out;
}

ParamGrid forward_sample(const ParamGrid& x0, int t, const ParamGrid& eps,
                         const NoiseSchedule& sched) {
  if (x0.rows != eps.rows || x0.cols != eps.cols || x0.mask != eps.mask) {
    fail(ErrorKind::kInvalidArgument, "noise grid shape does not match the parameter grid");
  }
  for (std::size_t i = 0; i < eps.values.size(); ++i) {
    if (!eps.mask[i] && eps.values[i] != 0.0) {
      fail(ErrorKind::kInvalidArgument, "noise must be zero on masked cells");
    }
  }
  const auto x = forward_sample(occupied_values(x0), t, occupied_values(eps), sched);
  return grid_from_occupied(x0, x);
}

std::vector<double> forward_step(std::span<const double> x_prev, int t, std::span<const double> z,
                                 const NoiseSchedule& sched) {
  require_step(t, sched);
  require_same_length(x_prev.size(), z.size(), "forward_step");
  const double a = std::sqrt(sched.alpha(t));
  const double s = std::sqrt(sched.beta(t));
  std::vector<double> out(x_prev.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a * x_prev[i] + s * z[i];
  return out;
}

std::vector<double> combine_guidance(std::span<const double> eps_uncond,
                                     std::span<const double> eps_cond, double g) {
  require_same_length(eps_uncond.size(), eps_cond.size(), "combine_guidance");
  std::vector<double> out(eps_cond.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = (1.0 - g) * eps_uncond[i] + g * eps_cond[i];
  }
  return out;
}

std::vector<double> cfg_epsilon(const NoisePredictor& model, std::span<const double> x_t, int t,
                                const ConditioningFeatures& cond, double g) {
  const auto eu = model.predict(x_t, t, nullptr);
  const auto ec = model.predict(x_t, t, &cond);
  return combine_guidance(eu, ec, g);
}

std::vector<double> reverse_mean(std::span<const double> x_t, int t,
                                 std::span<const double> eps_hat, const NoiseSchedule& sched) {
  require_step(t, sched);
  require_same_length(x_t.size(), eps_hat.size(), "reverse_step");
  const double coef = sched.beta(t) / std::sqrt(1.0 - sched.alpha_bar(t));
  const double scale = 1.0 / std::sqrt(sched.alpha(t));
  std::vector<double> out(x_t.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = scale * (x_t[i] - coef * eps_hat[i]);
  return out;
}

std::vector<double> reverse_step(std::span<const double> x_t, int t,
                                 std::span<const double> eps_hat, const NoiseSchedule& sched,
                                 Rng& rng) {
  auto out = reverse_mean(x_t, t, eps_hat, sched);
  if (t > 1) {
    const double sigma = std::sqrt(sched.beta(t));
    std::normal_distribution<double> normal;
    for (auto& v : out) v += sigma * normal(rng);
  }
  return out;
}

ParamGrid sample_parameters(const NoisePredictor& model, const ParamGrid& shape,
                            const ConditioningFeatures& cond, const NoiseSchedule& sched, double g,
                            Rng& rng) {
  std::vector<double> x(shape.occupied_count());
  std::normal_distribution<double> normal;
  for (auto& v : x) v = normal(rng);
  for (int t = sched.steps(); t >= 1; --t) {
    const auto eps = cfg_epsilon(model, x, t, cond, g);
    x = reverse_step(x, t, eps, sched, rng);
    require_finite(x, "reverse chain at t = " + std::to_string(t));
  }
  return grid_from_occupied(shape, x);
}

ParamVector decode_sample(const CircuitLayout& layout, const ParamGrid& sample) {
  return decode_grid(layout, normalize_angles(sample, AngleDirection::kInverse));
}

std::vector<NoiseDraw> draw_noise(std::span<const TrainingItem> batch, const NoiseSchedule& sched,
                                  double p_guidance, Rng& rng) {
  std::uniform_int_distribution<int> step(1, sched.steps());
  std::normal_distribution<double> normal;
  std::bernoulli_distribution drop(p_guidance);
  std::vector<NoiseDraw> draws(batch.size());
  for (std::size_t b = 0; b < batch.size(); ++b) {
    draws[b].t = step(rng);
    draws[b].eps.resize(batch[b].x0.size());
    for (auto& v : draws[b].eps) v = normal(rng);
    draws[b].drop_condition = drop(rng);
  }
  return draws;
}

namespace {

std::size_t total_cells(std::span<const TrainingItem> batch, std::span<const NoiseDraw> draws) {
  if (batch.empty()) fail(ErrorKind::kInvalidArgument, "training batch is empty");
  require_same_length(batch.size(), draws.size(), "noise draws");
  std::size_t n = 0;
  for (std::size_t b = 0; b < batch.size(); ++b) {
    require_same_length(batch[b].x0.size(), draws[b].eps.size(), "noise draw");
    n += batch[b].x0.size();
  }
  if (n == 0) fail(ErrorKind::kInvalidArgument, "training items have no cells");
  return n;
}

}  // namespace

double denoising_loss(const NoisePredictor& model, std::span<const TrainingItem> batch,
                      std::span<const NoiseDraw> draws, const NoiseSchedule& sched) {
  const std::size_t n = total_cells(batch, draws);
  double sum = 0.0;
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const auto xt = forward_sample(batch[b].x0, draws[b].t, draws[b].eps, sched);
    const auto pred =
        model.predict(xt, draws[b].t, draws[b].drop_condition ? nullptr : &batch[b].cond);
    require_same_length(pred.size(), xt.size(), "prediction");
    for (std::size_t i = 0; i < pred.size(); ++i) {
      const double r = draws[b].eps[i] - pred[i];
      sum += r * r;
    }
  }
  const double loss = sum / static_cast<double>(n);
  if (!std::isfinite(loss)) fail(ErrorKind::kNumerical, "non-finite denoising loss");
  return loss;
}

StepResult denoising_loss_grad(const Denoiser& model, std::span<const TrainingItem> batch,
                               std::span<const NoiseDraw> draws, const NoiseSchedule& sched,
                               int workers) {
  const std::size_t n = total_cells(batch, draws);
  const std::size_t dim = model.layout().total;
  const std::size_t chunks = (batch.size() + kChunk - 1) / kChunk;
  std::vector<std::vector<double>> grads(chunks);
  std::vector<double> sums(chunks, 0.0);
  const double inv_n = 1.0 / static_cast<double>(n);

  parallel_for(chunks, workers, [&](std::size_t c) {
    std::vector<double> g(dim, 0.0);
    double sum = 0.0;
    const std::size_t end = std::min(batch.size(), (c + 1) * kChunk);
    for (std::size_t b = c * kChunk; b < end; ++b) {
      const auto xt = forward_sample(batch[b].x0, draws[b].t, draws[b].eps, sched);
      const ConditioningFeatures* cond = draws[b].drop_condition ? nullptr : &batch[b].cond;
      const auto pred = model.forward(xt, draws[b].t, cond);
      std::vector<double> upstream(pred.size());
      for (std::size_t i = 0; i < pred.size(); ++i) {
        const double r = draws[b].eps[i] - pred[i];
        sum += r * r;
        upstream[i] = -2.0 * r * inv_n;
      }
      model.backward_accumulate(xt, draws[b].t, cond, upstream, g);
    }
    grads[c] = std::move(g);
    sums[c] = sum;
  });

  StepResult out;
  out.grad.assign(dim, 0.0);
  double sum = 0.0;
  for (std::size_t c = 0; c < chunks; ++c) {
    sum += sums[c];
    for (std::size_t i = 0; i < dim; ++i) out.grad[i] += grads[c][i];
  }
  out.loss = sum * inv_n;
  if (!std::isfinite(out.loss)) fail(ErrorKind::kNumerical, "non-finite denoising loss");
  return out;
}

StepResult training_step(const Denoiser& model, std::span<const TrainingItem> batch,
                         const NoiseSchedule& sched, const DiffusionConfig& cfg, Rng& rng,
                         int workers) {
  const auto draws = draw_noise(batch, sched, cfg.p_guidance, rng);
  return denoising_loss_grad(model, batch, draws, sched, workers);
}

double cosine_learning_rate(double peak, int epoch, int epochs) {
  return peak * 0.5 * (1.0 + std::cos(std::numbers::pi * epoch / epochs));
}

DenoiserArch default_arch(TaskFamily family, int timesteps) {
  const TaskInstance task = build_task(family, default_task_params(family));
  DenoiserArch arch;
  arch.input_dim = static_cast<int>(empty_grid(task.layout).occupied_count());
  arch.timesteps = timesteps;
  return arch;
}

std::vector<TrainingItem> training_items(const std::vector<DatasetRecord>& records) {
  std::vector<TrainingItem> items;
  items.reserve(records.size());
  for (const auto& r : records) {
    const TaskInstance task = rebuild_task(r);
    const ParamGrid grid = encode_grid(task.layout, r.theta_opt);
    items.push_back({occupied_values(normalize_angles(grid, AngleDirection::kForward)),
                     r.conditioning});
  }
  return items;
}

TrainResult train_model(const std::vector<DatasetRecord>& train, const DiffusionConfig& cfg,
                        const DenoiserArch& arch, std::uint64_t seed, int workers) {
  cfg.validate();
  if (train.empty()) fail(ErrorKind::kInvalidArgument, "training set is empty");
  for (const auto& r : train) {
    if (r.family != train.front().family) {
      fail(ErrorKind::kInvalidArgument, "training set mixes task families");
    }
  }
  if (arch.timesteps != cfg.timesteps) {
    fail(ErrorKind::kInvalidArgument, "denoiser timestep range does not match the schedule");
  }
  const auto items = training_items(train);
  if (items.front().x0.size() != static_cast<std::size_t>(arch.input_dim)) {
    fail(ErrorKind::kInvalidArgument,
         "denoiser input dim " + std::to_string(arch.input_dim) + " does not match " +
             std::to_string(items.front().x0.size()) + " occupied cells");
  }
  const NoiseSchedule sched = linear_schedule(cfg);
  Denoiser model = Denoiser::init(arch, mix_seed(seed, kInitStream));
  AdamState adam(model.params().size());
  Rng rng(mix_seed(seed, kTrainStream));

  std::vector<std::size_t> order(items.size());
  std::vector<TrainingItem> batch;
  std::vector<double> history;
  history.reserve(static_cast<std::size_t>(cfg.epochs));
  const auto bs = static_cast<std::size_t>(cfg.batch_size);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (std::size_t i = order.size() - 1; i > 0; --i) {
      std::swap(order[i], order[static_cast<std::size_t>(rng() % (i + 1))]);
    }
    const double lr = cosine_learning_rate(cfg.learning_rate, epoch, cfg.epochs);
    double weighted = 0.0;
    for (std::size_t start = 0; start < order.size(); start += bs) {
      const std::size_t end = std::min(order.size(), start + bs);
      batch.clear();
      for (std::size_t i = start; i < end; ++i) batch.push_back(items[order[i]]);
      StepResult step;
      try {
        step = training_step(model, batch, sched, cfg, rng, workers);
      } catch (const Error& e) {
        history.push_back(std::numeric_limits<double>::quiet_NaN());
        throw TrainingDiverged("epoch " + std::to_string(epoch) + ": " + e.what(), history);
      }
      weighted += step.loss * static_cast<double>(end - start);
      adam_step(adam, model.mutable_params(), step.grad, lr);
    }
    const double epoch_loss = weighted / static_cast<double>(order.size());
    history.push_back(epoch_loss);
    if (!(epoch_loss <= kDivergenceLoss)) {
      throw TrainingDiverged("training diverged at epoch " + std::to_string(epoch) +
                                 " with loss " + format_double(epoch_loss),
                             history);
    }
  }
  return {std::move(model), std::move(history)};
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  if (ckpt.weights.size() != ckpt.arch.param_count()) {
    fail(ErrorKind::kInvalidArgument, "checkpoint weights do not match the architecture");
  }
  json j;
  j["schema"] = kCheckpointSchemaVersion;
  j["family"] = std::string(family_id(ckpt.family));
  j["config"] = diffusion_to_json(ckpt.config);
  j["arch"] = arch_to_json(ckpt.arch);
  j["seed"] = ckpt.seed;
  j["generator_version"] = ckpt.generator_version;
  j["loss_history"] = ckpt.loss_history;
  j["weights"] = ckpt.weights;
  detail::write_text(path, j.dump() + "\n");
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  const json j = detail::read_json(path);
  detail::check_schema(j, kCheckpointSchemaVersion, path.string());
  Checkpoint c;
  try {
    c.family = parse_family(j.at("family").get<std::string>());
    c.config = diffusion_from_json(j.at("config"));
    c.arch = arch_from_json(j.at("arch"));
    c.seed = j.at("seed").get<std::uint64_t>();
    c.generator_version = j.at("generator_version").get<std::string>();
    c.loss_history = j.at("loss_history").get<std::vector<double>>();
    c.weights = j.at("weights").get<std::vector<double>>();
  } catch (const json::exception& e) {
    fail(ErrorKind::kFormat, path.string() + ": " + e.what());
  }
  if (c.weights.size() != c.arch.param_count()) {
    fail(ErrorKind::kFormat, path.string() + ": weight count does not match the architecture");
  }
  require_finite(c.weights, path.string());
  return c;
}

}  // namespace vqinit
