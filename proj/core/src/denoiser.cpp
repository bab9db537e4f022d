// Copyright 2026 The vqinit Authors
// SPDX-License-Identifier: Apache-2.0

#include "vqinit/denoiser.hpp"

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "vqinit/error.hpp"
#include "vqinit/util.hpp"

namespace vqinit {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMat = Eigen::Map<const RowMat>;
using MutMat = Eigen::Map<RowMat>;
using Vec = Eigen::VectorXd;
using ConstVec = Eigen::Map<const Vec>;
using MutVec = Eigen::Map<Vec>;

constexpr int kCondFeatures = static_cast<int>(kConditioningDim);

Vec silu_vec(const Vec& u) { return u.unaryExpr([](double x) { return silu(x); }); }
Vec silu_grad_vec(const Vec& u) { return u.unaryExpr([](double x) { return silu_grad(x); }); }

}  // namespace

void DenoiserArch::validate() const {
  if (input_dim <= 0 || hidden <= 0 || blocks < 0 || time_dim <= 0 || cond_dim <= 0 ||
      timesteps <= 0) {
    fail(ErrorKind::kInvalidArgument, "denoiser dimensions must be positive");
  }
  if (time_dim % 2 != 0) fail(ErrorKind::kInvalidArgument, "time embedding dim must be even");
}

std::size_t DenoiserArch::param_count() const { return DenoiserLayout(*this).total; }

DenoiserLayout::DenoiserLayout(const DenoiserArch& a) {
  a.validate();
  const auto d = static_cast<std::size_t>(a.input_dim);
  const auto h = static_cast<std::size_t>(a.hidden);
  const auto te = static_cast<std::size_t>(a.time_dim);
  const auto ce = static_cast<std::size_t>(a.cond_dim);
  std::size_t off = 0;
  auto take = [&off](std::size_t n) {
    const std::size_t at = off;
    off += n;
    return at;
  };
  w_in = take(h * d);
  b_in = take(h);
  w_t = take(h * te);
  b_t = take(h);
  w_c1 = take(ce * kConditioningDim);
  b_c1 = take(ce);
  null_emb = take(ce);
  w_c2 = take(h * ce);
  b_c2 = take(h);
  for (int k = 0; k < a.blocks; ++k) {
    w1.push_back(take(h * h));
    b1.push_back(take(h));
    w2.push_back(take(h * h));
    b2.push_back(take(h));
  }
  w_out = take(d * h);
  b_out = take(d);
  total = off;
}

std::vector<double> sinusoidal_embed(int t, int dim, int max_t) {
  if (dim <= 0 || dim % 2 != 0) {
    fail(ErrorKind::kInvalidArgument, "sinusoidal embedding dim must be positive and even");
  }
  if (t < 0 || t > max_t) {
    fail(ErrorKind::kOutOfRange,
         "timestep " + std::to_string(t) + " outside [0, " + std::to_string(max_t) + "]");
  }
  std::vector<double> out(static_cast<std::size_t>(dim));
  for (int k = 0; k < dim / 2; ++k) {
    const double omega = std::pow(10000.0, -2.0 * k / dim);
    out[static_cast<std::size_t>(2 * k)] = std::sin(t * omega);
    out[static_cast<std::size_t>(2 * k + 1)] = std::cos(t * omega);
  }
  return out;
}

double silu(double x) { return x / (1.0 + std::exp(-x)); }

double silu_grad(double x) {
  const double s = 1.0 / (1.0 + std::exp(-x));
  return s * (1.0 + x * (1.0 - s));
}

struct Denoiser::Cache {
  Vec x, pe, c, c_pre, e, h0;
  std::vector<Vec> h;  // h[k] is the input of block k; h[blocks] the last
  std::vector<Vec> u;  // block pre-activations
  std::vector<Vec> s;  // silu(u)
  Vec o, y;
  bool use_null = true;
};

Denoiser::Denoiser(DenoiserArch arch, std::vector<double> params)
    : arch_(arch), layout_(arch_), params_(std::move(params)) {
  if (params_.size() != layout_.total) {
    fail(ErrorKind::kInvalidArgument, "denoiser expects " + std::to_string(layout_.total) +
                                          " parameters, got " + std::to_string(params_.size()));
  }
}

Denoiser Denoiser::init(const DenoiserArch& arch, std::uint64_t seed) {
  const DenoiserLayout L(arch);
  std::vector<double> p(L.total, 0.0);
  Rng rng(seed);
  auto he = [&](std::size_t at, std::size_t rows, std::size_t fan_in) {
    std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / static_cast<double>(fan_in)));
    for (std::size_t i = 0; i < rows * fan_in; ++i) p[at + i] = dist(rng);
  };
  const auto d = static_cast<std::size_t>(arch.input_dim);
  const auto h = static_cast<std::size_t>(arch.hidden);
  const auto te = static_cast<std::size_t>(arch.time_dim);
  const auto ce = static_cast<std::size_t>(arch.cond_dim);
  he(L.w_in, h, d);
  he(L.w_t, h, te);
  he(L.w_c1, ce, kConditioningDim);
  {
    std::normal_distribution<double> dist(0.0, std::sqrt(1.0 / static_cast<double>(ce)));
    for (std::size_t i = 0; i < ce; ++i) p[L.null_emb + i] = dist(rng);
  }
  he(L.w_c2, h, ce);
  for (int k = 0; k < arch.blocks; ++k) {
    he(L.w1[static_cast<std::size_t>(k)], h, h);
    he(L.w2[static_cast<std::size_t>(k)], h, h);
  }
  return Denoiser(arch, std::move(p));
}

void Denoiser::run_forward(std::span<const double> x_t, int t, const ConditioningFeatures* cond,
                           Cache& c) const {
  if (x_t.size() != static_cast<std::size_t>(arch_.input_dim)) {
    fail(ErrorKind::kInvalidArgument, "denoiser input has length " + std::to_string(x_t.size()) +
                                          ", expected " + std::to_string(arch_.input_dim));
  }
  const int d = arch_.input_dim;
  const int h = arch_.hidden;
  const int te = arch_.time_dim;
  const int ce = arch_.cond_dim;
  const double* P = params_.data();
  const auto& L = layout_;

  c.x = ConstVec(x_t.data(), d);
  const auto pe = sinusoidal_embed(t, te, arch_.timesteps);
  c.pe = ConstVec(pe.data(), te);
  c.use_null = cond == nullptr;
  if (c.use_null) {
    c.e = ConstVec(P + L.null_emb, ce);
  } else {
    c.c = ConstVec(cond->data(), kCondFeatures);
    c.c_pre = ConstMat(P + L.w_c1, ce, kCondFeatures) * c.c + ConstVec(P + L.b_c1, ce);
    c.e = silu_vec(c.c_pre);
  }
  c.h0 = ConstMat(P + L.w_in, h, d) * c.x + ConstVec(P + L.b_in, h) +
         ConstMat(P + L.w_t, h, te) * c.pe + ConstVec(P + L.b_t, h) +
         ConstMat(P + L.w_c2, h, ce) * c.e + ConstVec(P + L.b_c2, h);

  const auto nb = static_cast<std::size_t>(arch_.blocks);
  c.h.assign(nb + 1, Vec());
  c.u.assign(nb, Vec());
  c.s.assign(nb, Vec());
  c.h[0] = c.h0;
  for (std::size_t k = 0; k < nb; ++k) {
    c.u[k] = ConstMat(P + L.w1[k], h, h) * c.h[k] + ConstVec(P + L.b1[k], h);
    c.s[k] = silu_vec(c.u[k]);
    c.h[k + 1] = c.h[k] + ConstMat(P + L.w2[k], h, h) * c.s[k] + ConstVec(P + L.b2[k], h);
  }
  c.o = silu_vec(c.h[nb]);
  c.y = ConstMat(P + L.w_out, d, h) * c.o + ConstVec(P + L.b_out, d);
}

std::vector<double> Denoiser::forward(std::span<const double> x_t, int t,
                                      const ConditioningFeatures* cond) const {
  Cache c;
  run_forward(x_t, t, cond, c);
  return {c.y.data(), c.y.data() + c.y.size()};
}

std::vector<double> Denoiser::backward(std::span<const double> x_t, int t,
                                       const ConditioningFeatures* cond,
                                       std::span<const double> upstream) const {
  std::vector<double> grad(layout_.total, 0.0);
  backward_accumulate(x_t, t, cond, upstream, grad);
  return grad;
}

void Denoiser::backward_accumulate(std::span<const double> x_t, int t,
                                   const ConditioningFeatures* cond,
                                   std::span<const double> upstream,
                                   std::span<double> grad) const {
  if (upstream.size() != static_cast<std::size_t>(arch_.input_dim)) {
    fail(ErrorKind::kInvalidArgument, "upstream gradient has length " +
                                          std::to_string(upstream.size()) + ", expected " +
                                          std::to_string(arch_.input_dim));
  }
  if (grad.size() != layout_.total) {
    fail(ErrorKind::kInvalidArgument, "gradient buffer has wrong length");
  }
  Cache c;
  run_forward(x_t, t, cond, c);

  const int d = arch_.input_dim;
  const int h = arch_.hidden;
  const int te = arch_.time_dim;
  const int ce = arch_.cond_dim;
  const double* P = params_.data();
  double* G = grad.data();
  const auto& L = layout_;
  const auto nb = static_cast<std::size_t>(arch_.blocks);

  const ConstVec gy(upstream.data(), d);
  MutMat(G + L.w_out, d, h).noalias() += gy * c.o.transpose();
  MutVec(G + L.b_out, d) += gy;
  Vec gh = (ConstMat(P + L.w_out, d, h).transpose() * gy).cwiseProduct(silu_grad_vec(c.h[nb]));

  for (std::size_t k = nb; k-- > 0;) {
    MutVec(G + L.b2[k], h) += gh;
    MutMat(G + L.w2[k], h, h).noalias() += gh * c.s[k].transpose();
    const Vec gu =
        (ConstMat(P + L.w2[k], h, h).transpose() * gh).cwiseProduct(silu_grad_vec(c.u[k]));
    MutVec(G + L.b1[k], h) += gu;
    MutMat(G + L.w1[k], h, h).noalias() += gu * c.h[k].transpose();
    gh.noalias() += ConstMat(P + L.w1[k], h, h).transpose() * gu;
  }

  MutVec(G + L.b_in, h) += gh;
  MutMat(G + L.w_in, h, d).noalias() += gh * c.x.transpose();
  MutVec(G + L.b_t, h) += gh;
  MutMat(G + L.w_t, h, te).noalias() += gh * c.pe.transpose();
  MutVec(G + L.b_c2, h) += gh;
  MutMat(G + L.w_c2, h, ce).noalias() += gh * c.e.transpose();
  const Vec ge = ConstMat(P + L.w_c2, h, ce).transpose() * gh;
  if (c.use_null) {
    MutVec(G + L.null_emb, ce) += ge;
  } else {
    const Vec gcp = ge.cwiseProduct(silu_grad_vec(c.c_pre));
    MutVec(G + L.b_c1, ce) += gcp;
    MutMat(G + L.w_c1, ce, kCondFeatures).noalias() += gcp * c.c.transpose();
  }
}

}  // namespace vqinit
