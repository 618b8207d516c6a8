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

// qmtl: parameter accounting, gradient checks, training, evaluation and
// ablation sweeps for quantum multi-task heads.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qmtl.hpp"
#include "qmtl/experiment.hpp"

namespace {

namespace fs = std::filesystem;
using namespace qmtl;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitGradcheck = 2;

struct Common {
  std::string config;
  std::string preset;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::size_t shots = 0;
  std::optional<std::size_t> trajectories;
  std::optional<double> p1, p2;
  std::string variant;
  std::optional<std::size_t> epochs;
};

void add_source_flags(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "JSON experiment config");
  cmd->add_option("--preset", c.preset, "built-in config: glue-like, chexpert-like, mustard-like, theorem1, toy");
}

void add_eval_flags(CLI::App* cmd, Common& c) {
  cmd->add_option("--shots", c.shots, "measurement shots per observable group (0 = exact)");
  cmd->add_option("--trajectories", c.trajectories, "noise trajectories per expectation");
  cmd->add_option("--p1", c.p1, "single-qubit depolarizing probability");
  cmd->add_option("--p2", c.p2, "two-qubit depolarizing probability");
}

ExperimentConfig load_config(const Common& c) {
  if (!c.config.empty() && !c.preset.empty()) throw ConfigError("--config and --preset are exclusive");
  ExperimentConfig cfg;
  if (!c.config.empty()) {
    cfg = parse_config(detail::read_file(c.config));
  } else {
    cfg = preset(c.preset.empty() ? "toy" : c.preset);
  }
  if (c.seed) cfg.seed = cfg.train.seed = *c.seed;
  if (!c.variant.empty()) cfg.variant = c.variant;
  if (c.epochs) cfg.train.epochs = *c.epochs;
  validate_config(cfg);
  return cfg;
}

/// Returns the evaluation mode implied by the flags, layered over `base`.
EvalMode eval_mode(const Common& c, EvalMode base, std::uint64_t seed) {
  if (c.shots) base.shots = c.shots;
  if (c.p1 || c.p2 || c.trajectories) {
    NoiseSpec n = base.noise.value_or(NoiseSpec{});
    n.p1 = c.p1.value_or(n.p1);
    n.p2 = c.p2.value_or(n.p2);
    n.num_trajectories = c.trajectories.value_or(n.num_trajectories);
    n.seed = seed;
    n.validate();
    base.noise = n;
  }
  return base;
}

void print_eval(const EvalResult& e) {
  for (const auto& t : e.tasks) {
    std::printf("  %-20s", t.name.c_str());
    for (const auto& [m, v] : t.metrics) {
      std::printf(" %s=%.4f%s", std::string(metric_name(m)).c_str(), v.value, v.degenerate ? "*" : "");
    }
    std::printf(" loss=%.4f\n", t.loss);
  }
  std::printf("  score %.6f\n", e.score);
}

int cmd_params(const Common& c) {
  const auto cfg = load_config(c);
  const auto b = budgets(cfg);
  std::printf("config %s: Q=%zu L=%zu d=%zu tasks=%zu\n", cfg.name.empty() ? "(file)" : cfg.name.c_str(),
              cfg.model.encoder.num_qubits, cfg.model.encoder.layers, cfg.feature_dim(), cfg.tasks.size());
  std::printf("P_Q %zu (shared %zu, heads", b.quantum.total, b.quantum.shared);
  for (auto h : b.quantum.per_head) std::printf(" %zu", h);
  std::printf(")\n");
  std::printf("calibration scalars %zu\n", b.quantum.calibration);
  std::printf("P_C %zu\n", b.classical);
  std::printf("HQNN %zu (projection %zu, circuit %zu, scale %zu, heads %zu)\n", b.hqnn.total(), b.hqnn.projection,
              b.hqnn.circuit, b.hqnn.scale, b.hqnn.heads);
  std::printf("P_Q/P_C %.6f\n", static_cast<double>(b.quantum.total) / static_cast<double>(b.classical));

  const auto& s = cfg.scaling;
  const auto rows = scaling_table(s.tasks, s.r, s.layers, s.k_theta, s.head_layers, s.width);
  std::printf("\nscaling (r=%zu L=%zu k_theta=%zu L_h=%zu S=%zu)\n", s.r, s.layers, s.k_theta, s.head_layers,
              s.width);
  std::printf("%8s %8s %10s %10s %12s %10s\n", "T", "d", "P_C", "P_Q", "P_Q/P_C", "ratio*T");
  for (const auto& r : rows) {
    std::printf("%8zu %8zu %10zu %10zu %12.6f %10.6f\n", r.tasks, r.feature_dim, r.classical, r.quantum, r.ratio,
                r.ratio * static_cast<double>(r.tasks));
  }
  if (!c.out_dir.empty()) {
    Json j = budget_json(b);
    j["scaling"] = Json::array();
    for (const auto& r : rows) {
      j["scaling"].push_back({{"T", r.tasks}, {"d", r.feature_dim}, {"P_C", r.classical}, {"P_Q", r.quantum},
                              {"ratio", r.ratio}});
    }
    detail::write_file(fs::path(c.out_dir) / "params.json", j.dump(2) + "\n");
  }
  return kExitOk;
}

struct GradcheckArgs {
  std::size_t qubits = 4;
  std::size_t depth = 20;
  std::size_t seeds = 10;
  double tol = 1e-5;
  bool corrupt_shift = false;
};

int cmd_gradcheck(const Common& c, const GradcheckArgs& g) {
  if (g.qubits < 1 || g.qubits > 8) throw ConfigError("gradcheck supports 1 to 8 qubits");
  const std::uint64_t base = c.seed.value_or(0);
  ShiftOptions shift;
  // Negative control: a wrong shift constant must be caught.
  if (g.corrupt_shift) shift.shift = std::numbers::pi / 3;
  bool all = true;
  std::printf("%8s %8s %14s %6s\n", "seed", "params", "max_dev", "status");
  for (std::size_t i = 0; i < g.seeds; ++i) {
    const std::uint64_t seed = base + i;
    RandomCircuitOptions opts;
    opts.num_qubits = g.qubits;
    opts.depth = g.depth;
    const auto rc = random_circuit(opts, seed);
    const auto r = gradcheck(rc, 1e-6, g.tol, shift);
    all &= r.passed;
    std::printf("%8llu %8zu %14.3e %6s\n", static_cast<unsigned long long>(seed), r.num_params, r.max_deviation,
                r.passed ? "PASS" : "FAIL");
  }
  std::printf("%s\n", all ? "gradcheck PASS" : "gradcheck FAIL");
  return all ? kExitOk : kExitGradcheck;
}

int cmd_train(const Common& c) {
  auto cfg = load_config(c);
  cfg.eval = eval_mode(c, cfg.eval, cfg.seed);
  validate_config(cfg);
  const auto run = run_train(cfg);
  std::printf("trained %s for %zu updates, best score %.6f at step %zu%s\n", cfg.variant.c_str(),
              run.train.train_losses.size(), run.train.best_score, run.train.best_step,
              run.train.stopped_early ? " (early stop)" : "");
  print_eval(run.eval);
  const fs::path dir = c.out_dir.empty() ? fs::path("runs") / (cfg.name.empty() ? "run" : cfg.name) : fs::path(c.out_dir);
  write_run(run, dir);
  std::printf("wrote %s\n", dir.string().c_str());
  return kExitOk;
}

int cmd_eval(const Common& c, const std::string& checkpoint_path) {
  std::optional<ExperimentConfig> expected;
  if (!c.config.empty() || !c.preset.empty()) expected = load_config(c);
  auto ck = checkpoint_from_json(detail::read_file(checkpoint_path), expected ? &*expected : nullptr);
  if (c.seed) ck.config.seed = *c.seed;
  const auto mode = eval_mode(c, ck.config.eval, ck.config.seed);
  const auto e = run_eval(ck, mode);
  print_eval(e);
  if (!c.out_dir.empty()) {
    auto report = make_report(ck.config, e, "");
    report["checkpoint"] = checkpoint_path;
    detail::write_file(fs::path(c.out_dir) / "eval_report.json", report.dump(2) + "\n");
  }
  return kExitOk;
}

template <class T>
std::vector<T> parse_list(const std::string& s) {
  std::vector<T> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::istringstream is(item);
    T v{};
    if (!(is >> v) || !is.eof()) throw ConfigError("bad list item '" + item + "'");
    out.push_back(v);
  }
  return out;
}

int cmd_sweep(const Common& c, const std::string& kind_name, const std::string& grid, const std::string& seeds) {
  const auto kind = parse_sweep_kind(kind_name);
  const auto cfg = load_config(c);
  std::vector<std::uint64_t> seed_list = parse_list<std::uint64_t>(seeds);
  if (seed_list.empty()) seed_list.push_back(cfg.seed);
  const auto res = run_sweep(kind, cfg, parse_list<double>(grid), seed_list, c.trajectories.value_or(1000));
  const auto csv = sweep_to_csv(res);
  std::fputs(csv.c_str(), stdout);
  if (!c.out_dir.empty()) {
    detail::write_file(fs::path(c.out_dir) / ("sweep_" + std::string(kind_name) + ".csv"), csv);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum multi-task heads: accounting, gradients, training and sweeps"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--seed", common.seed, "global seed")->expected(1);

  auto* params = app.add_subcommand("params", "parameter budgets and the scaling table");
  add_source_flags(params, common);
  params->add_option("--out-dir", common.out_dir, "write params.json here");

  GradcheckArgs gc;
  auto* grad = app.add_subcommand("gradcheck", "parameter shift vs finite differences on random circuits");
  grad->add_option("--qubits", gc.qubits, "qubits per circuit (<= 8)");
  grad->add_option("--depth", gc.depth, "gates per circuit");
  grad->add_option("--seeds", gc.seeds, "number of circuits");
  grad->add_option("--tol", gc.tol, "maximum allowed deviation");
  grad->add_flag("--corrupt-shift", gc.corrupt_shift, "use a wrong shift constant (negative control)");

  auto* trn = app.add_subcommand("train", "train a head and write checkpoint, history and report");
  add_source_flags(trn, common);
  add_eval_flags(trn, common);
  trn->add_option("--out-dir", common.out_dir, "output directory");
  trn->add_option("--variant", common.variant, "qmtl, classical or hqnn");
  trn->add_option("--epochs", common.epochs, "override the epoch budget");

  std::string checkpoint;
  auto* evl = app.add_subcommand("eval", "score a checkpoint");
  evl->add_option("--checkpoint", checkpoint, "checkpoint.json from train")->required();
  add_source_flags(evl, common);
  add_eval_flags(evl, common);
  evl->add_option("--out-dir", common.out_dir, "write eval_report.json here");

  std::string kind, grid, seeds;
  auto* swp = app.add_subcommand("sweep", "ablation sweeps written as CSV");
  swp->add_option("--kind", kind, "depth-L, depth-Lh, entanglement or noise")->required();
  swp->add_option("--grid", grid, "comma-separated grid values (default per kind)");
  swp->add_option("--seeds", seeds, "comma-separated seeds (default: the config seed)");
  add_source_flags(swp, common);
  add_eval_flags(swp, common);
  swp->add_option("--out-dir", common.out_dir, "write sweep_<kind>.csv here");
  swp->add_option("--epochs", common.epochs, "override the epoch budget");

  // Subcommand-local --seed for convenience (same meaning as the global one).
  for (auto* sub : {params, grad, trn, evl, swp}) sub->add_option("--seed", common.seed, "global seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*params) return cmd_params(common);
    if (*grad) return cmd_gradcheck(common, gc);
    if (*trn) return cmd_train(common);
    if (*evl) return cmd_eval(common, checkpoint);
    if (*swp) return cmd_sweep(common, kind, grid, seeds);
  } catch (const qmtl::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  }
  return kExitOk;
}
