// Copyright 2026 The QMTL Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Trainable head variants behind one interface. Each model owns its flat
// parameter layout and provides forward logits plus the vector-Jacobian
// product needed by the trainer.

#include <cmath>
#include <cstdint>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qmtl/arch.hpp"
#include "qmtl/baselines.hpp"
#include "qmtl/gradients.hpp"
#include "qmtl/noise.hpp"
#include "qmtl/random.hpp"

namespace qmtl {

/// Circuit angles are never weight-decayed; classical scalars may be.
enum class ParamClass : std::uint8_t { Circuit, Classical };

/// How circuit expectations are obtained at evaluation time.
struct EvalMode {
  /// 0 = exact expectations.
  std::size_t shots = 0;
  std::optional<NoiseSpec> noise;

  bool exact() const noexcept { return shots == 0 && (!noise || noise->noiseless()); }
};

class HeadModel {
 public:
  virtual ~HeadModel() = default;

  virtual std::string_view variant() const = 0;
  virtual std::size_t feature_dim() const = 0;
  virtual std::vector<std::size_t> output_sizes() const = 0;
  virtual std::size_t num_params() const = 0;
  virtual std::vector<ParamClass> param_classes() const = 0;
  virtual std::vector<double> initial_params(std::uint64_t seed) const = 0;

  virtual TaskLogits forward(std::span<const double> params,
                             std::span<const double> x) const = 0;

  /// Forward under shot sampling or noise. `sample_seed` fixes the random
  /// stream for this one input.
  virtual TaskLogits forward(std::span<const double> params, std::span<const double> x,
                             const EvalMode& mode, std::uint64_t sample_seed) const {
    (void)sample_seed;
    if (!mode.exact()) {
      throw ConfigError(std::string(variant()) + " head has no circuit to sample or make noisy");
    }
    return forward(params, x);
  }

  /// grad += (d logits / d params)^T upstream, for one input.
  virtual void accumulate_gradient(std::span<const double> params, std::span<const double> x,
                                   const TaskLogits& upstream, std::span<double> grad) const = 0;

 protected:
  void check_params(std::span<const double> p) const {
    if (p.size() != num_params()) {
      throw DimensionError(std::string(variant()) + " model has " + std::to_string(num_params()) +
                           " parameters, got " + std::to_string(p.size()));
    }
  }
  void check_input(std::span<const double> x) const {
    if (x.size() != feature_dim()) {
      throw DimensionError(std::string(variant()) + " model expects " +
                           std::to_string(feature_dim()) + " features, got " +
                           std::to_string(x.size()));
    }
  }
};

namespace detail {

inline std::vector<double> circuit_readout(const Circuit& c, std::span<const double> theta,
                                           std::span<const double> x,
                                           const std::vector<PauliString>& obs,
                                           const EvalMode& mode, std::uint64_t seed) {
  if (mode.noise && !mode.noise->noiseless()) {
    NoiseSpec n = *mode.noise;
    n.seed = derive_seed(n.seed, seed);
    return noisy_expectations(c, theta, x, obs, n);
  }
  if (mode.shots > 0) {
    return sampled_expectations(evaluate(c, theta, x), obs, mode.shots, seed);
  }
  return evaluate_expectations(c, theta, x, obs);
}

inline void fill_uniform(std::span<double> out, Rng& rng, double lo, double hi) {
  for (auto& v : out) v = uniform(rng, lo, hi);
}

}  // namespace detail

class QmtlModel final : public HeadModel {
 public:
  explicit QmtlModel(QmtlModelConfig config)
      : config_(std::move(config)), model_(assemble(config_)), observables_(model_.all_observables()) {}

  const QmtlModelConfig& config() const noexcept { return config_; }
  const AssembledModel& assembled() const noexcept { return model_; }

  std::string_view variant() const override { return "qmtl"; }
  std::size_t feature_dim() const override { return model_.feature_dim(); }
  std::vector<std::size_t> output_sizes() const override {
    std::vector<std::size_t> out;
    for (const auto& t : model_.outputs) out.push_back(t.observables.size());
    return out;
  }
  std::size_t num_params() const override { return model_.num_params(); }
  std::vector<ParamClass> param_classes() const override {
    std::vector<ParamClass> c(model_.num_circuit_params(), ParamClass::Circuit);
    c.resize(model_.num_params(), ParamClass::Classical);
    return c;
  }

  std::vector<double> initial_params(std::uint64_t seed) const override {
    Rng rng(derive_seed(seed, 0x51));
    std::vector<double> p(model_.num_circuit_params());
    detail::fill_uniform(p, rng, 0.0, 2 * std::numbers::pi);
    const auto cal = model_.initial_calibration();
    p.insert(p.end(), cal.begin(), cal.end());
    return p;
  }

  TaskLogits forward(std::span<const double> params, std::span<const double> x) const override {
    check_params(params);
    check_input(x);
    return qmtl::forward(model_, params, x);
  }

  TaskLogits forward(std::span<const double> params, std::span<const double> x,
                     const EvalMode& mode, std::uint64_t sample_seed) const override {
    check_params(params);
    check_input(x);
    const auto raw = detail::circuit_readout(model_.circuit, circuit_part(params), x, observables_,
                                             mode, sample_seed);
    return calibrate(model_, params, raw);
  }

  void accumulate_gradient(std::span<const double> params, std::span<const double> x,
                           const TaskLogits& upstream, std::span<double> grad) const override {
    check_params(params);
    check_input(x);
    const auto theta = circuit_part(params);
    const std::size_t m = observables_.size();
    std::vector<double> weights(m, 0.0);
    std::vector<std::uint8_t> mask(model_.num_circuit_params(), 0);
    for (std::size_t s = 0; s < config_.encoder.feature_dim(); ++s) mask[s] = 1;

    bool need_raw = false;
    for (std::size_t t = 0; t < model_.outputs.size(); ++t) {
      const auto& out = model_.outputs[t];
      for (double u : upstream[t]) need_raw |= (u != 0.0 && out.calibration.kind != CalibrationKind::None);
    }
    std::vector<double> raw;
    if (need_raw) raw = evaluate_expectations(model_.circuit, theta, x, observables_);

    std::size_t k = 0;
    bool any = false;
    for (std::size_t t = 0; t < model_.outputs.size(); ++t) {
      const auto& out = model_.outputs[t];
      const auto& u = upstream.at(t);
      if (u.size() != out.observables.size()) throw DimensionError("upstream gradient shape mismatch");
      bool active = false;
      for (std::size_t i = 0; i < u.size(); ++i, ++k) {
        if (u[i] == 0.0) continue;
        active = true;
        const std::size_t c = out.calibration_offset;
        switch (out.calibration.kind) {
          case CalibrationKind::Affine:
            weights[k] = u[i] * params[c];
            grad[c] += u[i] * raw[k];
            grad[c + 1] += u[i];
            break;
          case CalibrationKind::Temperature:
            weights[k] = u[i] * params[c];
            grad[c] += u[i] * raw[k];
            break;
          default: weights[k] = u[i]; break;
        }
      }
      if (active) {
        any = true;
        for (std::size_t s = out.param_begin; s < out.param_end; ++s) mask[s] = 1;
      }
    }
    if (!any) return;
    const auto g = param_shift_vjp(model_.circuit, theta, x, observables_, weights,
                                   SlotKind::Trainable, mask);
    for (std::size_t j = 0; j < g.size(); ++j) grad[j] += g[j];
  }

 private:
  std::span<const double> circuit_part(std::span<const double> params) const {
    return params.first(model_.num_circuit_params());
  }

  QmtlModelConfig config_;
  AssembledModel model_;
  std::vector<PauliString> observables_;
};

/// Independent linear heads. Layout per task: W_t (r_t x d row-major), b_t.
class ClassicalModel final : public HeadModel {
 public:
  ClassicalModel(std::size_t feature_dim, std::vector<std::size_t> outputs)
      : d_(feature_dim), outputs_(std::move(outputs)) {
    if (d_ < 1) throw ConfigError("classical head feature dimension must be positive");
    std::size_t off = 0;
    for (auto r : outputs_) {
      if (r < 1) throw ConfigError("classical head outputs must be positive");
      offsets_.push_back(off);
      off += r * (d_ + 1);
    }
    total_ = off;
  }

  std::string_view variant() const override { return "classical"; }
  std::size_t feature_dim() const override { return d_; }
  std::vector<std::size_t> output_sizes() const override { return outputs_; }
  std::size_t num_params() const override { return total_; }
  std::vector<ParamClass> param_classes() const override {
    return std::vector<ParamClass>(total_, ParamClass::Classical);
  }

  std::vector<double> initial_params(std::uint64_t seed) const override {
    Rng rng(derive_seed(seed, 0xC1));
    std::vector<double> p(total_);
    const double bound = 1.0 / std::sqrt(static_cast<double>(d_));
    detail::fill_uniform(p, rng, -bound, bound);
    return p;
  }

  TaskLogits forward(std::span<const double> params, std::span<const double> x) const override {
    check_params(params);
    check_input(x);
    TaskLogits out;
    for (std::size_t t = 0; t < outputs_.size(); ++t) {
      const std::size_t r = outputs_[t];
      const auto block = params.subspan(offsets_[t], r * (d_ + 1));
      out.push_back(classical_head_forward(block.first(r * d_), block.subspan(r * d_, r), x));
    }
    return out;
  }

  void accumulate_gradient(std::span<const double> params, std::span<const double> x,
                           const TaskLogits& upstream, std::span<double> grad) const override {
    check_params(params);
    check_input(x);
    for (std::size_t t = 0; t < outputs_.size(); ++t) {
      const std::size_t r = outputs_[t];
      const std::size_t off = offsets_[t];
      for (std::size_t i = 0; i < r; ++i) {
        const double u = upstream.at(t).at(i);
        if (u == 0.0) continue;
        for (std::size_t j = 0; j < d_; ++j) grad[off + i * d_ + j] += u * x[j];
        grad[off + r * d_ + i] += u;
      }
    }
  }

 private:
  std::size_t d_;
  std::vector<std::size_t> outputs_;
  std::vector<std::size_t> offsets_;
  std::size_t total_ = 0;
};

/// Hybrid head. Layout: projection W_p (3 x d), b_p (3), circuit slots, scale
/// s, then per task W_t (r_t x q), b_t.
class HqnnModel final : public HeadModel {
 public:
  explicit HqnnModel(HqnnConfig cfg)
      : cfg_(std::move(cfg)), circuit_(build_hqnn_circuit(cfg_)) {
    for (std::size_t q = 0; q < cfg_.qubits; ++q) observables_.push_back(PauliString::single(q, Pauli::Z));
    const std::size_t d = cfg_.feature_dim;
    proj_w_ = 0;
    proj_b_ = HqnnConfig::kBottleneck * d;
    circ_ = proj_b_ + HqnnConfig::kBottleneck;
    scale_ = circ_ + circuit_.num_trainable();
    std::size_t off = scale_ + 1;
    for (auto r : cfg_.outputs) {
      head_offsets_.push_back(off);
      off += r * (cfg_.qubits + 1);
    }
    total_ = off;
  }

  const HqnnConfig& config() const noexcept { return cfg_; }
  const Circuit& circuit() const noexcept { return circuit_; }

  std::string_view variant() const override { return "hqnn"; }
  std::size_t feature_dim() const override { return cfg_.feature_dim; }
  std::vector<std::size_t> output_sizes() const override { return cfg_.outputs; }
  std::size_t num_params() const override { return total_; }
  std::vector<ParamClass> param_classes() const override {
    std::vector<ParamClass> c(total_, ParamClass::Classical);
    for (std::size_t i = circ_; i < scale_; ++i) c[i] = ParamClass::Circuit;
    return c;
  }

  std::vector<double> initial_params(std::uint64_t seed) const override {
    Rng rng(derive_seed(seed, 0x401));
    std::vector<double> p(total_);
    std::span<double> all(p);
    const double pb = 1.0 / std::sqrt(static_cast<double>(cfg_.feature_dim));
    detail::fill_uniform(all.subspan(0, circ_), rng, -pb, pb);
    detail::fill_uniform(all.subspan(circ_, scale_ - circ_), rng, 0.0, 2 * std::numbers::pi);
    p[scale_] = 1.0;
    const double hb = 1.0 / std::sqrt(static_cast<double>(cfg_.qubits));
    detail::fill_uniform(all.subspan(scale_ + 1), rng, -hb, hb);
    return p;
  }

  TaskLogits forward(std::span<const double> params, std::span<const double> x) const override {
    return forward(params, x, EvalMode{}, 0);
  }

  TaskLogits forward(std::span<const double> params, std::span<const double> x,
                     const EvalMode& mode, std::uint64_t sample_seed) const override {
    check_params(params);
    check_input(x);
    const auto angles = project(params, x);
    const auto z = detail::circuit_readout(circuit_, circuit_part(params), angles, observables_,
                                           mode, sample_seed);
    return heads(params, scaled(params, z));
  }

  void accumulate_gradient(std::span<const double> params, std::span<const double> x,
                           const TaskLogits& upstream, std::span<double> grad) const override {
    check_params(params);
    check_input(x);
    const std::size_t q = cfg_.qubits;
    const auto angles = project(params, x);
    const auto theta = circuit_part(params);
    const auto z = evaluate_expectations(circuit_, theta, angles, observables_);
    const double s = params[scale_];

    std::vector<double> dh(q, 0.0);
    bool any = false;
    for (std::size_t t = 0; t < cfg_.outputs.size(); ++t) {
      const std::size_t r = cfg_.outputs[t];
      const std::size_t off = head_offsets_[t];
      for (std::size_t i = 0; i < r; ++i) {
        const double u = upstream.at(t).at(i);
        if (u == 0.0) continue;
        any = true;
        for (std::size_t j = 0; j < q; ++j) {
          grad[off + i * q + j] += u * s * z[j];
          dh[j] += u * params[off + i * q + j];
        }
        grad[off + r * q + i] += u;
      }
    }
    if (!any) return;

    std::vector<double> dz(q);
    for (std::size_t j = 0; j < q; ++j) {
      grad[scale_] += dh[j] * z[j];
      dz[j] = dh[j] * s;
    }
    const auto g_theta = param_shift_vjp(circuit_, theta, angles, observables_, dz);
    for (std::size_t j = 0; j < g_theta.size(); ++j) grad[circ_ + j] += g_theta[j];
    const auto g_in = param_shift_vjp(circuit_, theta, angles, observables_, dz, SlotKind::Input);
    const std::size_t d = cfg_.feature_dim;
    for (std::size_t a = 0; a < HqnnConfig::kBottleneck; ++a) {
      for (std::size_t j = 0; j < d; ++j) grad[proj_w_ + a * d + j] += g_in[a] * x[j];
      grad[proj_b_ + a] += g_in[a];
    }
  }

 private:
  std::span<const double> circuit_part(std::span<const double> params) const {
    return params.subspan(circ_, scale_ - circ_);
  }

  std::vector<double> project(std::span<const double> params, std::span<const double> x) const {
    const std::size_t d = cfg_.feature_dim;
    return classical_head_forward(params.subspan(proj_w_, HqnnConfig::kBottleneck * d),
                                  params.subspan(proj_b_, HqnnConfig::kBottleneck), x);
  }

  std::vector<double> scaled(std::span<const double> params, std::vector<double> z) const {
    for (auto& v : z) v *= params[scale_];
    return z;
  }

  TaskLogits heads(std::span<const double> params, const std::vector<double>& h) const {
    TaskLogits out;
    const std::size_t q = cfg_.qubits;
    for (std::size_t t = 0; t < cfg_.outputs.size(); ++t) {
      const std::size_t r = cfg_.outputs[t];
      const auto block = params.subspan(head_offsets_[t], r * (q + 1));
      out.push_back(classical_head_forward(block.first(r * q), block.subspan(r * q, r), h));
    }
    return out;
  }

  HqnnConfig cfg_;
  Circuit circuit_;
  std::vector<PauliString> observables_;
  std::size_t proj_w_ = 0, proj_b_ = 0, circ_ = 0, scale_ = 0;
  std::vector<std::size_t> head_offsets_;
  std::size_t total_ = 0;
};

inline std::unique_ptr<HeadModel> build_hqnn_baseline(std::size_t feature_dim, std::size_t qubits,
                                                      std::vector<std::size_t> outputs) {
  return std::make_unique<HqnnModel>(HqnnConfig{feature_dim, qubits, std::move(outputs), 3});
}

}  // namespace qmtl
