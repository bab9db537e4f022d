// Copyright 2026 The vqinit Authors
// SPDX-License-Identifier: Apache-2.0

#include <numbers>
#include <random>

#include <benchmark/benchmark.h>

#include "vqinit/ddpm.hpp"
#include "vqinit/denoiser.hpp"
#include "vqinit/quantum_sim.hpp"
#include "vqinit/tasks.hpp"
#include "vqinit/vqe_opt.hpp"

namespace {

using namespace vqinit;

ParamVector angles(int n, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> u(-std::numbers::pi, std::numbers::pi);
  ParamVector theta(static_cast<std::size_t>(n));
  for (auto& v : theta) v = u(rng);
  return theta;
}

TaskFamily family_arg(const benchmark::State& state) {
  return kAllFamilies[static_cast<std::size_t>(state.range(0))];
}

void BM_TaskLoss(benchmark::State& state) {
  const TaskFamily f = family_arg(state);
  const TaskInstance task = build_task(f, default_task_params(f));
  const ParamVector theta = angles(task.layout.n_params(), 1);
  for (auto _ : state) benchmark::DoNotOptimize(task_loss(task, theta));
  state.SetLabel(std::string(family_id(f)));
}
BENCHMARK(BM_TaskLoss)->DenseRange(0, 4);

void BM_ParameterShift(benchmark::State& state) {
  const TaskFamily f = family_arg(state);
  const TaskInstance task = build_task(f, default_task_params(f));
  const ParamVector theta = angles(task.layout.n_params(), 2);
  for (auto _ : state) benchmark::DoNotOptimize(parameter_shift_grad(task, theta));
  state.SetLabel(std::string(family_id(f)));
}
BENCHMARK(BM_ParameterShift)->DenseRange(0, 4);

void BM_GroundEnergy(benchmark::State& state) {
  const TaskInstance task = build_task(TaskFamily::TFI_2D, {{0.2, 3.0}});
  for (auto _ : state) benchmark::DoNotOptimize(ground_energy(*task.observable));
}
BENCHMARK(BM_GroundEnergy);

Denoiser default_model(int input_dim) {
  DenoiserArch arch;
  arch.input_dim = input_dim;
  Denoiser m = Denoiser::init(arch, 3);
  // Non-zero output weights so the backward pass does real work.
  Rng rng(4);
  std::normal_distribution<double> n(0.0, 0.05);
  for (auto& v : m.mutable_params()) v += n(rng);
  return m;
}

void BM_DenoiserForward(benchmark::State& state) {
  const Denoiser m = default_model(static_cast<int>(state.range(0)));
  const std::vector<double> x = angles(static_cast<int>(state.range(0)), 5);
  ConditioningFeatures c{};
  c[0] = 1.0;
  for (auto _ : state) benchmark::DoNotOptimize(m.forward(x, 37, &c));
}
BENCHMARK(BM_DenoiserForward)->Arg(8)->Arg(48);

void BM_DenoiserBackward(benchmark::State& state) {
  const Denoiser m = default_model(static_cast<int>(state.range(0)));
  const std::vector<double> x = angles(static_cast<int>(state.range(0)), 6);
  const std::vector<double> up = angles(static_cast<int>(state.range(0)), 7);
  ConditioningFeatures c{};
  c[0] = 1.0;
  for (auto _ : state) benchmark::DoNotOptimize(m.backward(x, 37, &c, up));
}
BENCHMARK(BM_DenoiserBackward)->Arg(8)->Arg(48);

void BM_SampleParameters(benchmark::State& state) {
  const TaskInstance task = build_task(TaskFamily::XYZ_1D, {{2.0, 1.0, 0.5}});
  const Denoiser m = default_model(task.layout.n_params());
  const NoiseSchedule sched = linear_schedule(DiffusionConfig{});
  const ConditioningFeatures c = conditioning_features(task);
  const ParamGrid shape = empty_grid(task.layout);
  Rng rng(8);
  for (auto _ : state) benchmark::DoNotOptimize(sample_parameters(m, shape, c, sched, 10.0, rng));
}
BENCHMARK(BM_SampleParameters)->Unit(benchmark::kMillisecond);

}  // namespace
