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

// End-to-end runs behind the command-line tool: train, eval, sweeps,
// checkpoints, and machine-readable reports.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qmtl/circuit_text.hpp"
#include "qmtl/config.hpp"

namespace qmtl {

inline constexpr const char* kVersion = "1.0.0";
inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  ExperimentConfig config;
  std::vector<double> params;
  double best_score = 0.0;
  std::size_t best_step = 0;
};

namespace detail {

inline std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << v;
  return os.str();
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + p.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + p.string());
  out << text;
}

}  // namespace detail

inline Json checkpoint_to_json(const Checkpoint& c) {
  return {{"format", "qmtl-checkpoint"},
          {"version", kCheckpointVersion},
          {"fingerprint", detail::hex64(config_fingerprint(c.config))},
          {"config", config_to_json(c.config)},
          {"params", c.params},
          {"best_score", c.best_score},
          {"best_step", c.best_step}};
}

/// Parses a checkpoint. When `expected` is given its layout fingerprint must
/// match the stored one.
inline Checkpoint checkpoint_from_json(const std::string& text, const ExperimentConfig* expected = nullptr) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const auto [line, col] = detail::line_col(text, e.byte);
    throw ParseError("column " + std::to_string(col) + ": malformed checkpoint", line);
  }
  if (!j.is_object() || j.value("format", "") != "qmtl-checkpoint") throw ConfigError("not a qmtl checkpoint");
  if (j.value("version", 0) != kCheckpointVersion) {
    throw ConfigError("unsupported checkpoint version " + j.value("version", Json(0)).dump());
  }
  Checkpoint c;
  c.config = parse_config(j.at("config").dump());
  const auto fp = detail::hex64(config_fingerprint(c.config));
  if (j.value("fingerprint", "") != fp) throw ConfigError("checkpoint fingerprint does not match its config");
  if (expected && detail::hex64(config_fingerprint(*expected)) != fp) {
    throw ConfigError("checkpoint was produced by a different model configuration");
  }
  try {
    c.params = j.at("params").get<std::vector<double>>();
    c.best_score = j.at("best_score").get<double>();
    c.best_step = j.at("best_step").get<std::size_t>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("checkpoint is missing parameters or scores");
  }
  if (c.params.size() != make_model(c.config)->num_params()) {
    throw ConfigError("checkpoint parameter count does not match its model");
  }
  return c;
}

inline Json eval_to_json(const EvalResult& e) {
  Json tasks = Json::object();
  for (const auto& t : e.tasks) {
    Json m = Json::object();
    for (const auto& [k, v] : t.metrics) {
      m[std::string(metric_name(k))] = v.value;
      if (v.degenerate) m[std::string(metric_name(k)) + "_degenerate"] = true;
    }
    m["loss"] = t.loss;
    tasks[t.name] = m;
  }
  return {{"tasks", tasks}, {"score", e.score}};
}

inline Json history_record_json(const HistoryRecord& h) {
  Json j = eval_to_json(h.eval);
  j["step"] = h.step;
  j["epoch"] = h.epoch;
  j["lr"] = h.lr;
  j["wall_time"] = h.wall_time;
  return j;
}

inline Json budget_json(const BudgetReport& b) {
  return {{"quantum",
           {{"shared", b.quantum.shared},
            {"per_head", b.quantum.per_head},
            {"total", b.quantum.total},
            {"calibration", b.quantum.calibration}}},
          {"classical", b.classical},
          {"hqnn",
           {{"projection", b.hqnn.projection},
            {"circuit", b.hqnn.circuit},
            {"scale", b.hqnn.scale},
            {"heads", b.hqnn.heads},
            {"total", b.hqnn.total()}}}};
}

struct RunOutput {
  Checkpoint checkpoint;
  EvalResult eval;
  TrainResult train;
  Json report;
};

inline Json make_report(const ExperimentConfig& cfg, const EvalResult& eval, const std::string& history_ref) {
  return {{"config", config_to_json(cfg)},
          {"variant", cfg.variant},
          {"seed", cfg.seed},
          {"budget", budget_json(budgets(cfg))},
          {"metrics", eval_to_json(eval)},
          {"history", history_ref},
          {"versions", {{"qmtl", kVersion}, {"checkpoint", kCheckpointVersion}}}};
}

/// Generates the dataset, trains, and scores the best parameters on the
/// validation split with `cfg.eval`.
inline RunOutput run_train(const ExperimentConfig& cfg) {
  validate_config(cfg);
  const auto data = gen_synthetic(cfg.data);
  const auto model = make_model(cfg);
  TrainConfig tc = cfg.train;
  tc.seed = cfg.seed;
  RunOutput out;
  out.train = train(*model, model->initial_params(cfg.seed), data.train, data.val, cfg.tasks, tc);
  out.checkpoint = {cfg, out.train.best_params, out.train.best_score, out.train.best_step};
  out.eval = evaluate_model(*model, out.train.best_params, data.val, cfg.tasks, cfg.eval, cfg.seed);
  out.report = make_report(cfg, out.eval, "history.jsonl");
  out.report["best_step"] = out.train.best_step;
  out.report["updates"] = out.train.train_losses.size();
  return out;
}

/// Scores a checkpoint on the validation split of its own dataset. `mode`
/// overrides the evaluation mode stored in the config.
inline EvalResult run_eval(const Checkpoint& ck, const std::optional<EvalMode>& mode = std::nullopt) {
  const auto data = gen_synthetic(ck.config.data);
  const auto model = make_model(ck.config);
  return evaluate_model(*model, ck.params, data.val, ck.config.tasks, mode.value_or(ck.config.eval),
                        ck.config.seed);
}

inline void write_run(const RunOutput& run, const std::filesystem::path& dir) {
  std::string hist;
  for (const auto& h : run.train.history) hist += history_record_json(h).dump() + "\n";
  detail::write_file(dir / "history.jsonl", hist);
  detail::write_file(dir / "checkpoint.json", checkpoint_to_json(run.checkpoint).dump(2) + "\n");
  detail::write_file(dir / "report.json", run.report.dump(2) + "\n");
}

// --- sweeps ----------------------------------------------------------------

enum class SweepKind { DepthL, DepthLh, Entanglement, Noise };

inline SweepKind parse_sweep_kind(std::string_view s) {
  if (s == "depth-L") return SweepKind::DepthL;
  if (s == "depth-Lh") return SweepKind::DepthLh;
  if (s == "entanglement") return SweepKind::Entanglement;
  if (s == "noise") return SweepKind::Noise;
  throw ConfigError("unknown sweep kind '" + std::string(s) + "'");
}

inline std::string_view sweep_kind_name(SweepKind k) {
  switch (k) {
    case SweepKind::DepthL: return "depth-L";
    case SweepKind::DepthLh: return "depth-Lh";
    case SweepKind::Entanglement: return "entanglement";
    case SweepKind::Noise: return "noise";
  }
  return "?";
}

/// Default grids: L in {2,3,4}, L_h in {1,2,3}, CNOTs on/off, p in
/// {0, 0.01, 0.05, 0.1, 0.2}.
inline std::vector<double> default_grid(SweepKind k) {
  switch (k) {
    case SweepKind::DepthL: return {2, 3, 4};
    case SweepKind::DepthLh: return {1, 2, 3};
    case SweepKind::Entanglement: return {1, 0};
    case SweepKind::Noise: return {0, 0.01, 0.05, 0.1, 0.2};
  }
  return {};
}

/// Columns shared by every sweep kind; per-task columns follow.
inline const std::vector<std::string>& sweep_base_columns() {
  static const std::vector<std::string> cols = {
      "sweep", "variant", "seed",         "L",           "L_h",         "entangling",    "p",
      "trajectories", "P_shared", "P_heads", "P_total", "P_calibration", "P_classical", "P_hqnn", "score"};
  return cols;
}

struct SweepRow {
  ExperimentConfig config;
  std::optional<double> p;
  /// Noise trajectories behind this row; 0 when evaluated exactly.
  std::size_t trajectories = 0;
  EvalResult eval;
};

struct SweepResult {
  SweepKind kind = SweepKind::DepthL;
  std::vector<SweepRow> rows;
};

/// Applies a depth-L grid value. Teacher features keep their position
/// relative to the last encoding layer so each head still sees them.
inline ExperimentConfig with_encoder_depth(ExperimentConfig cfg, std::size_t layers) {
  if (layers < 1) throw ConfigError("encoder depth must be positive");
  const std::size_t Q = cfg.model.encoder.num_qubits;
  const auto old_d = static_cast<long long>(cfg.feature_dim());
  const auto new_d = static_cast<long long>(Q * layers);
  auto remap = [&](std::vector<std::size_t>& feats) {
    for (auto& f : feats) {
      const long long g = static_cast<long long>(f) + new_d - old_d;
      if (g < 0) {
        throw ConfigError("teacher feature " + std::to_string(f) + " has no counterpart at L=" +
                          std::to_string(layers));
      }
      f = static_cast<std::size_t>(g);
    }
  };
  remap(cfg.data.teacher_features);
  for (auto& t : cfg.data.tasks) remap(t.features);
  cfg.model.encoder.layers = layers;
  cfg.data.dim = cfg.feature_dim();
  validate_config(cfg);
  return cfg;
}

/// One row per grid value and seed. Noise sweeps train once per seed and only
/// re-evaluate that checkpoint under p1 = p2 = p.
inline SweepResult run_sweep(SweepKind kind, const ExperimentConfig& base, std::vector<double> grid,
                             const std::vector<std::uint64_t>& seeds, std::size_t trajectories = 1000) {
  if (grid.empty()) grid = default_grid(kind);
  if (seeds.empty()) throw ConfigError("sweep needs at least one seed");
  if (base.variant != "qmtl") {
    throw ConfigError(std::string(sweep_kind_name(kind)) + " sweeps apply to the qmtl variant only");
  }
  for (double v : grid) {
    const bool integral = v == static_cast<double>(static_cast<std::size_t>(v));
    if ((kind == SweepKind::DepthL || kind == SweepKind::DepthLh) && (!integral || v < 1)) {
      throw ConfigError("depth grid values must be positive integers");
    }
    if (kind == SweepKind::Entanglement && v != 0 && v != 1) throw ConfigError("entanglement grid values are 0 or 1");
    if (kind == SweepKind::Noise && !(v >= 0 && v <= 1)) throw ConfigError("noise probabilities must lie in [0, 1]");
  }

  SweepResult res;
  res.kind = kind;
  for (auto seed : seeds) {
    ExperimentConfig seeded = base;
    seeded.seed = seeded.train.seed = seed;
    if (kind == SweepKind::Noise) {
      const auto run = run_train(seeded);
      for (double p : grid) {
        EvalMode mode;
        if (p > 0) mode.noise = NoiseSpec{p, p, trajectories, seed};
        res.rows.push_back({seeded, p, p > 0 ? trajectories : 0, run_eval(run.checkpoint, mode)});
      }
      continue;
    }
    for (double v : grid) {
      ExperimentConfig cfg = seeded;
      if (kind == SweepKind::DepthL) {
        cfg = with_encoder_depth(cfg, static_cast<std::size_t>(v));
      } else if (kind == SweepKind::DepthLh) {
        for (auto& h : cfg.model.heads) h.layers = static_cast<std::size_t>(v);
      } else {
        cfg.model.encoder.entangling = v != 0;
      }
      validate_config(cfg);
      res.rows.push_back({cfg, std::nullopt, 0, run_train(cfg).eval});
    }
  }
  return res;
}

inline std::vector<std::string> sweep_columns(const SweepResult& r) {
  auto cols = sweep_base_columns();
  if (r.rows.empty()) return cols;
  for (const auto& t : r.rows.front().eval.tasks) {
    for (const auto& [m, v] : t.metrics) cols.push_back(t.name + "_" + std::string(metric_name(m)));
    cols.push_back(t.name + "_loss");
  }
  return cols;
}

inline std::string sweep_to_csv(const SweepResult& r) {
  std::ostringstream os;
  const auto cols = sweep_columns(r);
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << "\n";
  auto num = [](double v) { return format_double(v); };
  for (const auto& row : r.rows) {
    const auto& c = row.config;
    const auto b = budgets(c);
    std::size_t heads = 0;
    for (auto h : b.quantum.per_head) heads += h;
    std::vector<std::string> cells = {
        std::string(sweep_kind_name(r.kind)),
        c.variant,
        std::to_string(c.seed),
        std::to_string(c.model.encoder.layers),
        c.model.heads.empty() ? "" : std::to_string(c.model.heads.front().layers),
        c.model.encoder.entangling ? "1" : "0",
        row.p ? num(*row.p) : "",
        row.trajectories ? std::to_string(row.trajectories) : "",
        std::to_string(b.quantum.shared),
        std::to_string(heads),
        std::to_string(b.quantum.total),
        std::to_string(b.quantum.calibration),
        std::to_string(b.classical),
        std::to_string(b.hqnn.total()),
        num(row.eval.score)};
    for (const auto& t : row.eval.tasks) {
      for (const auto& [m, v] : t.metrics) cells.push_back(num(v.value));
      cells.push_back(num(t.loss));
    }
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
    os << "\n";
  }
  return os.str();
}

}  // namespace qmtl
