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

// JSON experiment configuration: model shape, tasks, data, training, and
// evaluation mode. Unknown keys are rejected so typos surface early.

#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "qmtl/arch.hpp"
#include "qmtl/data.hpp"
#include "qmtl/errors.hpp"
#include "qmtl/models.hpp"
#include "qmtl/trainer.hpp"

namespace qmtl {

using Json = nlohmann::json;

struct ScalingSpec {
  std::size_t r = 2;
  std::size_t layers = 3;
  std::size_t k_theta = 1;
  std::size_t head_layers = 1;
  std::size_t width = 1;
  std::vector<std::size_t> tasks = {1, 2, 5, 10, 20, 50, 100, 200, 500, 1000};
};

struct ExperimentConfig {
  std::string name;
  std::string variant = "qmtl";
  std::uint64_t seed = 0;
  QmtlModelConfig model;
  /// Aligned with model.heads.
  std::vector<TaskSpec> tasks;
  std::size_t hqnn_qubits = 4;
  SyntheticSpec data;
  TrainConfig train;
  EvalMode eval;
  ScalingSpec scaling;

  std::size_t feature_dim() const { return model.encoder.feature_dim(); }
  std::vector<std::size_t> outputs() const {
    std::vector<std::size_t> r;
    for (const auto& t : tasks) r.push_back(t.num_outputs());
    return r;
  }
};

namespace detail {

inline std::pair<std::size_t, std::size_t> line_col(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

/// Reads typed fields from one JSON object and remembers which keys were used.
class ObjectReader {
 public:
  ObjectReader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + " must be an object");
  }

  bool has(const char* key) const { return j_.contains(key); }

  template <class T>
  T get(const char* key, T fallback) {
    seen_.insert(key);
    if (!j_.contains(key)) return fallback;
    try {
      return j_.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
      throw ConfigError(where(key) + " has the wrong type");
    }
  }

  const Json& raw(const char* key) {
    seen_.insert(key);
    return j_.at(key);
  }

  std::string where(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError("unknown key " + where(it.key().c_str()));
    }
  }

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

inline TaskKind parse_task_kind(const std::string& s) {
  if (s == "binary") return TaskKind::Binary;
  if (s == "multiclass") return TaskKind::Multiclass;
  if (s == "regression") return TaskKind::Regression;
  throw ConfigError("unknown task kind '" + s + "'");
}

inline std::string_view task_kind_name(TaskKind k) {
  switch (k) {
    case TaskKind::Binary: return "binary";
    case TaskKind::Multiclass: return "multiclass";
    case TaskKind::Regression: return "regression";
  }
  return "?";
}

inline Calibration parse_calibration(const Json& j, const std::string& path) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "none") return Calibration::none();
    if (s == "affine") return Calibration::affine();
    if (s == "temperature") return Calibration::temperature();
    throw ConfigError(path + ": unknown calibration '" + s + "'");
  }
  ObjectReader r(j, path);
  const auto kind = r.get<std::string>("kind", "none");
  Calibration c = parse_calibration(Json(kind), path);
  c.gamma = r.get("gamma", c.gamma);
  c.beta = r.get("beta", c.beta);
  c.tau = r.get("tau", c.tau);
  r.finish();
  return c;
}

inline std::string_view calibration_name(CalibrationKind k) {
  switch (k) {
    case CalibrationKind::Affine: return "affine";
    case CalibrationKind::Temperature: return "temperature";
    default: return "none";
  }
}

inline void parse_head(const Json& j, const std::string& path, ExperimentConfig& cfg) {
  ObjectReader r(j, path);
  TaskSpec task;
  TaskHeadConfig head;
  task.name = head.name = r.get<std::string>("name", "task" + std::to_string(cfg.tasks.size()));
  task.kind = parse_task_kind(r.get<std::string>("kind", "binary"));
  task.classes = r.get<std::size_t>("classes", task.kind == TaskKind::Regression ? 1 : 2);
  if (task.kind == TaskKind::Binary) task.classes = 2;
  task.lambda = r.get("lambda", 1.0);
  for (const auto& m : r.get<std::vector<std::string>>("metrics", {})) task.metrics.push_back(parse_metric(m));
  task.binarize_eval = r.get("binarize_eval", false);
  if (r.has("loss")) {
    ObjectReader l(r.raw("loss"), r.where("loss"));
    task.loss.focal = l.get("focal", false);
    task.loss.focal_gamma = l.get("gamma", task.loss.focal_gamma);
    task.loss.focal_alpha = l.get("alpha", task.loss.focal_alpha);
    task.loss.class_weights = l.get<std::vector<double>>("class_weights", {});
    l.finish();
  }
  head.qubits = r.get<std::vector<std::size_t>>("qubits", {});
  head.layers = r.get<std::size_t>("layers", 1);
  head.k_theta = r.get<std::size_t>("k_theta", 3);
  head.outputs = r.get<std::size_t>("outputs", task.num_outputs());
  for (const auto& s : r.get<std::vector<std::string>>("readout", {})) head.readout.push_back(PauliString::parse(s));
  if (r.has("calibration")) head.calibration = parse_calibration(r.raw("calibration"), r.where("calibration"));
  SyntheticTask st{task.kind, task.classes, r.get<std::vector<std::size_t>>("teacher_features", {})};
  r.finish();
  task.validate();
  cfg.tasks.push_back(std::move(task));
  cfg.model.heads.push_back(std::move(head));
  cfg.data.tasks.push_back(std::move(st));
}

inline void parse_train(const Json& j, TrainConfig& t) {
  ObjectReader r(j, "train");
  const auto opt = r.get<std::string>("optimizer", t.optim.kind == OptimizerKind::Adam ? "adam" : "adamw");
  if (opt == "adam") {
    t.optim.kind = OptimizerKind::Adam;
  } else if (opt == "adamw") {
    t.optim.kind = OptimizerKind::AdamW;
  } else {
    throw ConfigError("unknown optimizer '" + opt + "'");
  }
  t.optim.lr = r.get("lr", t.optim.lr);
  t.optim.weight_decay = r.get("weight_decay", t.optim.weight_decay);
  t.optim.clip_norm = r.get("clip_norm", t.optim.clip_norm);
  t.epochs = r.get("epochs", t.epochs);
  t.batch_size = r.get("batch_size", t.batch_size);
  t.protocol = parse_protocol(r.get<std::string>("protocol", std::string(protocol_name(t.protocol))));
  t.task_cap = r.get("task_cap", t.task_cap);
  t.early_stop_patience = r.get("early_stop_patience", t.early_stop_patience);
  t.eval_every = r.get("eval_every", t.eval_every);
  if (r.has("scheduler")) {
    ObjectReader s(r.raw("scheduler"), "train.scheduler");
    t.use_scheduler = s.get("enabled", t.use_scheduler);
    t.plateau.factor = s.get("factor", t.plateau.factor);
    t.plateau.patience = s.get("patience", t.plateau.patience);
    t.plateau.min_lr = s.get("min_lr", t.plateau.min_lr);
    s.finish();
  }
  r.finish();
}

inline void parse_data(const Json& j, SyntheticSpec& d) {
  ObjectReader r(j, "data");
  d.n_train = r.get("n_train", d.n_train);
  d.n_val = r.get("n_val", d.n_val);
  d.teacher_seed = r.get("teacher_seed", d.teacher_seed);
  d.noise_level = r.get("noise_level", d.noise_level);
  d.missing_rate = r.get("missing_rate", d.missing_rate);
  d.one_task_per_sample = r.get("one_task_per_sample", d.one_task_per_sample);
  d.teacher_features = r.get("teacher_features", d.teacher_features);
  r.finish();
}

inline void parse_eval(const Json& j, EvalMode& e) {
  ObjectReader r(j, "eval");
  e.shots = r.get("shots", e.shots);
  NoiseSpec n = e.noise.value_or(NoiseSpec{});
  n.p1 = r.get("p1", n.p1);
  n.p2 = r.get("p2", n.p2);
  n.num_trajectories = r.get("trajectories", n.num_trajectories);
  r.finish();
  n.validate();
  if (n.noiseless()) {
    e.noise.reset();
  } else {
    e.noise = n;
  }
}

inline void parse_scaling(const Json& j, ScalingSpec& s) {
  ObjectReader r(j, "scaling");
  s.r = r.get("r", s.r);
  s.layers = r.get("L", s.layers);
  s.k_theta = r.get("k_theta", s.k_theta);
  s.head_layers = r.get("L_h", s.head_layers);
  s.width = r.get("S", s.width);
  s.tasks = r.get("T", s.tasks);
  r.finish();
}

}  // namespace detail

/// Checks cross-field consistency; called by the parser and by presets.
inline void validate_config(const ExperimentConfig& cfg) {
  if (cfg.variant != "qmtl" && cfg.variant != "classical" && cfg.variant != "hqnn") {
    throw ConfigError("unknown head variant '" + cfg.variant + "' (expected qmtl, classical or hqnn)");
  }
  validate_model(cfg.model);
  if (cfg.tasks.size() != cfg.model.heads.size()) throw ConfigError("tasks and heads are misaligned");
  for (std::size_t t = 0; t < cfg.tasks.size(); ++t) {
    cfg.tasks[t].validate();
    if (cfg.model.heads[t].outputs != cfg.tasks[t].num_outputs()) {
      throw ConfigError("head '" + cfg.tasks[t].name + "' has " + std::to_string(cfg.model.heads[t].outputs) +
                        " outputs but its task needs " + std::to_string(cfg.tasks[t].num_outputs()));
    }
  }
  cfg.train.validate();
  if (cfg.data.dim != cfg.feature_dim()) throw ConfigError("data dimension must equal encoder Q*L");
  cfg.data.validate();
}

/// Parses a JSON document. Syntax errors carry the line and column.
inline ExperimentConfig parse_config(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text.begin(), text.end(), nullptr, true, true);
  } catch (const nlohmann::json::parse_error& e) {
    const auto [line, col] = detail::line_col(text, e.byte);
    std::string msg = e.what();
    if (const auto p = msg.find("syntax error"); p != std::string::npos) msg = msg.substr(p);
    throw ParseError("column " + std::to_string(col) + ": " + msg, line);
  }
  ExperimentConfig cfg;
  detail::ObjectReader r(j, "");
  cfg.name = r.get<std::string>("name", "");
  cfg.variant = r.get<std::string>("variant", cfg.variant);
  cfg.seed = r.get("seed", cfg.seed);
  if (!r.has("encoder")) throw ConfigError("missing key encoder");
  {
    detail::ObjectReader e(r.raw("encoder"), "encoder");
    cfg.model.encoder.num_qubits = e.get<std::size_t>("Q", 1);
    cfg.model.encoder.layers = e.get<std::size_t>("L", 1);
    cfg.model.encoder.entangling = e.get("entangling", true);
    e.finish();
  }
  if (r.has("heads")) {
    const auto& heads = r.raw("heads");
    if (!heads.is_array()) throw ConfigError("heads must be an array");
    for (std::size_t i = 0; i < heads.size(); ++i) {
      detail::parse_head(heads[i], "heads[" + std::to_string(i) + "]", cfg);
    }
  }
  if (r.has("hqnn")) {
    detail::ObjectReader h(r.raw("hqnn"), "hqnn");
    cfg.hqnn_qubits = h.get("qubits", cfg.hqnn_qubits);
    h.finish();
  }
  if (r.has("data")) detail::parse_data(r.raw("data"), cfg.data);
  if (r.has("train")) detail::parse_train(r.raw("train"), cfg.train);
  if (r.has("eval")) detail::parse_eval(r.raw("eval"), cfg.eval);
  if (r.has("scaling")) detail::parse_scaling(r.raw("scaling"), cfg.scaling);
  r.finish();
  cfg.data.dim = cfg.feature_dim();
  cfg.train.seed = cfg.seed;
  validate_config(cfg);
  return cfg;
}

/// Inverse of parse_config (round-trips every field it reads).
inline Json config_to_json(const ExperimentConfig& cfg) {
  Json j;
  if (!cfg.name.empty()) j["name"] = cfg.name;
  j["variant"] = cfg.variant;
  j["seed"] = cfg.seed;
  j["encoder"] = {{"Q", cfg.model.encoder.num_qubits},
                  {"L", cfg.model.encoder.layers},
                  {"entangling", cfg.model.encoder.entangling}};
  j["heads"] = Json::array();
  for (std::size_t t = 0; t < cfg.tasks.size(); ++t) {
    const auto& task = cfg.tasks[t];
    const auto& head = cfg.model.heads[t];
    Json h;
    h["name"] = task.name;
    h["kind"] = detail::task_kind_name(task.kind);
    h["classes"] = task.classes;
    h["lambda"] = task.lambda;
    std::vector<std::string> metrics;
    for (auto m : task.metrics) metrics.emplace_back(metric_name(m));
    h["metrics"] = metrics;
    h["binarize_eval"] = task.binarize_eval;
    h["loss"] = {{"focal", task.loss.focal},
                 {"gamma", task.loss.focal_gamma},
                 {"alpha", task.loss.focal_alpha},
                 {"class_weights", task.loss.class_weights}};
    h["qubits"] = head.qubits;
    h["layers"] = head.layers;
    h["k_theta"] = head.k_theta;
    h["outputs"] = head.outputs;
    std::vector<std::string> readout;
    for (const auto& o : head.readout) readout.push_back(o.to_string());
    h["readout"] = readout;
    h["calibration"] = {{"kind", detail::calibration_name(head.calibration.kind)},
                        {"gamma", head.calibration.gamma},
                        {"beta", head.calibration.beta},
                        {"tau", head.calibration.tau}};
    h["teacher_features"] = t < cfg.data.tasks.size() ? cfg.data.tasks[t].features : std::vector<std::size_t>{};
    j["heads"].push_back(h);
  }
  j["hqnn"] = {{"qubits", cfg.hqnn_qubits}};
  j["data"] = {{"n_train", cfg.data.n_train},
               {"n_val", cfg.data.n_val},
               {"teacher_seed", cfg.data.teacher_seed},
               {"noise_level", cfg.data.noise_level},
               {"missing_rate", cfg.data.missing_rate},
               {"one_task_per_sample", cfg.data.one_task_per_sample},
               {"teacher_features", cfg.data.teacher_features}};
  const auto& t = cfg.train;
  j["train"] = {{"optimizer", t.optim.kind == OptimizerKind::Adam ? "adam" : "adamw"},
                {"lr", t.optim.lr},
                {"weight_decay", t.optim.weight_decay},
                {"clip_norm", t.optim.clip_norm},
                {"epochs", t.epochs},
                {"batch_size", t.batch_size},
                {"protocol", protocol_name(t.protocol)},
                {"task_cap", t.task_cap},
                {"early_stop_patience", t.early_stop_patience},
                {"eval_every", t.eval_every},
                {"scheduler",
                 {{"enabled", t.use_scheduler},
                  {"factor", t.plateau.factor},
                  {"patience", t.plateau.patience},
                  {"min_lr", t.plateau.min_lr}}}};
  const NoiseSpec n = cfg.eval.noise.value_or(NoiseSpec{});
  j["eval"] = {{"shots", cfg.eval.shots}, {"p1", n.p1}, {"p2", n.p2}, {"trajectories", n.num_trajectories}};
  const auto& s = cfg.scaling;
  j["scaling"] = {{"r", s.r}, {"L", s.layers}, {"k_theta", s.k_theta}, {"L_h", s.head_layers},
                  {"S", s.width}, {"T", s.tasks}};
  return j;
}

/// Stable hash of the parts of a config that fix the parameter layout.
inline std::uint64_t config_fingerprint(const ExperimentConfig& cfg) {
  Json j = config_to_json(cfg);
  Json layout = {{"variant", j["variant"]}, {"encoder", j["encoder"]}, {"hqnn", j["hqnn"]}};
  for (const auto& h : j["heads"]) {
    layout["heads"].push_back({{"qubits", h["qubits"]},
                               {"layers", h["layers"]},
                               {"k_theta", h["k_theta"]},
                               {"outputs", h["outputs"]},
                               {"readout", h["readout"]},
                               {"calibration", h["calibration"]["kind"]}});
  }
  const std::string s = layout.dump();
  std::uint64_t hash = 1469598103934665603ull;  // FNV-1a
  for (unsigned char c : s) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

inline std::unique_ptr<HeadModel> make_model(const ExperimentConfig& cfg) {
  if (cfg.variant == "qmtl") return std::make_unique<QmtlModel>(cfg.model);
  if (cfg.variant == "classical") return std::make_unique<ClassicalModel>(cfg.feature_dim(), cfg.outputs());
  if (cfg.variant == "hqnn") return build_hqnn_baseline(cfg.feature_dim(), cfg.hqnn_qubits, cfg.outputs());
  throw ConfigError("unknown head variant '" + cfg.variant + "'");
}

/// Budgets of all three head families for this configuration.
struct BudgetReport {
  ParamBudget quantum;
  std::size_t classical = 0;
  HqnnBudget hqnn;
};

inline BudgetReport budgets(const ExperimentConfig& cfg) {
  BudgetReport b;
  b.quantum = count_params_quantum(cfg.model);
  const auto outs = cfg.outputs();
  b.classical = count_params_classical(cfg.feature_dim(), outs);
  b.hqnn = count_params_hqnn(HqnnConfig{cfg.feature_dim(), cfg.hqnn_qubits, outs, 3});
  return b;
}

// --- presets ---------------------------------------------------------------

inline std::vector<std::string> preset_names() {
  return {"glue-like", "chexpert-like", "mustard-like", "theorem1", "toy"};
}

namespace detail {

inline void add_task(ExperimentConfig& cfg, std::string name, TaskKind kind, std::size_t classes,
                     std::vector<std::size_t> qubits, Calibration cal = {}, std::vector<std::size_t> features = {}) {
  TaskSpec t;
  t.name = name;
  t.kind = kind;
  t.classes = kind == TaskKind::Binary ? 2 : classes;
  TaskHeadConfig h;
  h.name = std::move(name);
  h.qubits = std::move(qubits);
  h.outputs = t.num_outputs();
  h.calibration = cal;
  cfg.data.tasks.push_back({t.kind, t.classes, std::move(features)});
  cfg.tasks.push_back(std::move(t));
  cfg.model.heads.push_back(std::move(h));
}

inline std::vector<std::size_t> range(std::size_t first, std::size_t n) {
  std::vector<std::size_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = first + i;
  return v;
}

}  // namespace detail

inline ExperimentConfig preset(std::string_view name) {
  using detail::add_task;
  ExperimentConfig cfg;
  cfg.name = std::string(name);
  if (name == "glue-like") {
    cfg.model.encoder = {10, 3, true};
    const char* binary[] = {"cola", "sst2", "mrpc", "qnli", "qqp", "rte", "wnli"};
    for (std::size_t i = 0; i < 7; ++i) add_task(cfg, binary[i], TaskKind::Binary, 2, {i});
    add_task(cfg, "stsb", TaskKind::Regression, 1, {7}, Calibration::affine());
    add_task(cfg, "mnli", TaskKind::Multiclass, 3, {8, 9});
    cfg.tasks[0].metrics = {Metric::MCC};
    cfg.tasks[7].metrics = {Metric::Pearson, Metric::Spearman};
    cfg.train.protocol = Protocol::TaskSampled;
    cfg.train.optim.kind = OptimizerKind::AdamW;
    cfg.train.optim.lr = 5e-4;
    cfg.train.optim.weight_decay = 0.01;
    cfg.data.one_task_per_sample = true;
  } else if (name == "chexpert-like") {
    cfg.model.encoder = {10, 3, true};
    const char* names[] = {"atelectasis", "cardiomegaly", "consolidation", "edema", "effusion"};
    for (std::size_t i = 0; i < 5; ++i) {
      add_task(cfg, names[i], TaskKind::Multiclass, 3, {2 * i, 2 * i + 1}, Calibration::temperature());
      cfg.tasks.back().binarize_eval = true;
      cfg.tasks.back().loss.focal = true;
      cfg.tasks.back().metrics = {Metric::Accuracy, Metric::F1};
    }
    cfg.train.protocol = Protocol::MaskedParallel;
    cfg.train.optim.lr = 1e-4;
    cfg.data.missing_rate = 0.1;
  } else if (name == "mustard-like") {
    cfg.model.encoder = {13, 3, true};
    add_task(cfg, "sarcasm", TaskKind::Binary, 2, {0});
    add_task(cfg, "sentiment_implicit", TaskKind::Multiclass, 3, {1, 2});
    add_task(cfg, "sentiment_explicit", TaskKind::Multiclass, 3, {3, 4});
    add_task(cfg, "emotion_implicit", TaskKind::Multiclass, 9, detail::range(5, 4));
    add_task(cfg, "emotion_explicit", TaskKind::Multiclass, 9, detail::range(9, 4));
    for (auto& t : cfg.tasks) t.lambda = 0.2;
    cfg.train.protocol = Protocol::ParallelWeighted;
    cfg.train.optim.lr = 1e-4;
  } else if (name == "theorem1") {
    // T single-qubit heads, r = 2, L = 3, k_theta = 1, L_h = 1, at T = 10.
    cfg.model.encoder = {10, 3, true};
    for (std::size_t i = 0; i < 10; ++i) {
      add_task(cfg, "t" + std::to_string(i), TaskKind::Multiclass, 2, {i});
      cfg.model.heads.back().k_theta = 1;
    }
    cfg.scaling = ScalingSpec{};
  } else if (name == "toy") {
    cfg.model.encoder = {4, 3, true};
    // Teachers read last-layer features. Pulled back through the final CNOT
    // ladder, Z0, X3 and Z1Z2 stay single-qubit operators.
    add_task(cfg, "a", TaskKind::Binary, 2, {0}, Calibration::temperature(), {8});
    add_task(cfg, "b", TaskKind::Binary, 2, {3}, Calibration::temperature(), {11});
    add_task(cfg, "c", TaskKind::Multiclass, 3, {1, 2}, Calibration::temperature(), {10});
    cfg.model.heads[2].layers = 3;
    cfg.train.optim.lr = 0.02;
    cfg.train.use_scheduler = false;
    cfg.train.early_stop_patience = 0;
  } else {
    throw ConfigError("unknown preset '" + std::string(name) + "'");
  }
  cfg.data.dim = cfg.feature_dim();
  cfg.train.seed = cfg.seed;
  validate_config(cfg);
  return cfg;
}

}  // namespace qmtl
