// Copyright 2026 The asgld Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ASGLD_CONFIG_HPP
#define ASGLD_CONFIG_HPP

// Experiment config files.
//
// A config is a flat list of `key = value` lines with dotted keys. A
// `[section]` line prefixes the following keys with `section.`, so both
//
//     optimizer.psi = 0.5
//
// and
//
//     [optimizer]
//     psi = 0.5
//
// set the same key. `#` starts a comment. Strings may be bare or double
// quoted; lists are comma separated, optionally wrapped in [ ].
// Precedence is defaults < file < command-line overrides.

#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "asgld/dataset.hpp"
#include "asgld/harness.hpp"

namespace asgld {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ValueType { real, integer, boolean, string, real_list, int_list };

struct KeyInfo {
  const char* key;
  ValueType type;
  const char* help;
};

inline const std::vector<KeyInfo>& config_schema() {
  static const std::vector<KeyInfo> schema = {
      {"optimizer.name", ValueType::string, "sgd|momentum|sgld|sghmc|psgld|adagrad|adam|amsgrad|asgld"},
      {"optimizer.eta", ValueType::real, "base step size"},
      {"optimizer.rho", ValueType::real, "momentum / accumulator decay"},
      {"optimizer.psi", ValueType::real, "ASGLD noise multiplier"},
      {"optimizer.epsilon", ValueType::real, "isotropic noise variance (sgld, sghmc, psgld)"},
      {"optimizer.beta1", ValueType::real, "Adam first-moment decay"},
      {"optimizer.beta2", ValueType::real, "second-moment decay (adam, amsgrad, psgld)"},
      {"optimizer.stab", ValueType::real, "denominator stabilizer"},
      {"optimizer.zero_mean_noise", ValueType::boolean, "ASGLD noise N(0, C) instead of N(mu, C)"},
      {"problem.kind", ValueType::string, "quadratic|rosenbrock|saddle|logistic|mlp"},
      {"problem.dim", ValueType::integer, "quadratic dimension"},
      {"problem.condition", ValueType::real, "quadratic condition number"},
      {"problem.sigma_g", ValueType::real, "gradient noise standard deviation"},
      {"problem.data", ValueType::string, "two_moons|csv"},
      {"problem.n", ValueType::integer, "two_moons sample count"},
      {"problem.noise", ValueType::real, "two_moons noise standard deviation"},
      {"problem.data_seed", ValueType::integer, "dataset generation / split seed"},
      {"problem.csv", ValueType::string, "CSV dataset path"},
      {"problem.label", ValueType::string, "CSV label column"},
      {"problem.hidden", ValueType::int_list, "MLP hidden widths"},
      {"problem.l2", ValueType::real, "logistic L2 penalty"},
      {"problem.init", ValueType::real_list, "initial parameters"},
      {"schedule.kind", ValueType::string, "constant|step_decay|inverse_time"},
      {"schedule.factor", ValueType::real, "step_decay divisor"},
      {"schedule.at", ValueType::real, "step_decay point as a fraction of the epoch budget"},
      {"run.epochs", ValueType::integer, "epoch budget"},
      {"run.batch_size", ValueType::integer, "minibatch size"},
      {"run.steps_per_epoch", ValueType::integer, "steps per epoch on landscapes"},
      {"run.seed", ValueType::integer, "base seed"},
      {"run.seeds", ValueType::integer, "seeds per optimizer for compare"},
      {"run.label", ValueType::string, "series label"},
      {"run.wall_clock", ValueType::boolean, "record wall-clock seconds"},
      {"grid.center", ValueType::real, "grid center (default optimizer.eta)"},
      {"grid.points", ValueType::integer, "grid size"},
      {"grid.ratio", ValueType::real, "ratio between neighbouring grid points"},
      {"grid.max_extensions", ValueType::integer, "boundary extensions allowed"},
      {"grid.metric", ValueType::string, "auto|test_acc|full_eval"},
  };
  return schema;
}

inline const KeyInfo* find_key(const std::string& key) {
  for (const auto& k : config_schema())
    if (key == k.key) return &k;
  return nullptr;
}

namespace detail {

inline std::string unquote(std::string v) {
  v = trim(v);
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') v = v.substr(1, v.size() - 2);
  return v;
}

inline std::vector<std::string> list_items(std::string v) {
  v = trim(v);
  if (v.size() >= 2 && v.front() == '[' && v.back() == ']') v = v.substr(1, v.size() - 2);
  std::vector<std::string> out;
  if (trim(v).empty()) return out;
  for (auto& s : split_commas(v)) out.push_back(trim(s));
  return out;
}

inline bool parse_int(const std::string& text, long long& out) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  char* end = nullptr;
  errno = 0;
  out = std::strtoll(t.c_str(), &end, 10);
  return errno == 0 && end == t.c_str() + t.size();
}

inline bool parse_bool(const std::string& t, bool& out) {
  if (t == "true" || t == "1") return out = true, true;
  if (t == "false" || t == "0") return out = false, true;
  return false;
}

}  // namespace detail

/// Checks that `value` parses as the schema type of `key`; returns the normalised value.
inline std::string check_value(const std::string& key, const std::string& raw) {
  const KeyInfo* info = find_key(key);
  if (!info) throw ConfigError("unknown key '" + key + "'");
  const std::string v = detail::unquote(raw);
  double d = 0;
  long long i = 0;
  bool b = false;
  bool ok = true;
  switch (info->type) {
    case ValueType::real: ok = detail::parse_double(v, d); break;
    case ValueType::integer: ok = detail::parse_int(v, i); break;
    case ValueType::boolean: ok = detail::parse_bool(v, b); break;
    case ValueType::string: ok = !v.empty(); break;
    case ValueType::real_list:
      for (const auto& item : detail::list_items(v)) ok = ok && detail::parse_double(item, d);
      break;
    case ValueType::int_list:
      for (const auto& item : detail::list_items(v)) ok = ok && detail::parse_int(item, i) && i >= 0;
      break;
  }
  if (!ok) throw ConfigError("invalid value '" + raw + "' for key '" + key + "'");
  return v;
}

/// Validated key -> value map.
class ConfigMap {
 public:
  void set(const std::string& key, const std::string& raw) { values_[key] = check_value(key, raw); }

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::string get_string(const std::string& key, const std::string& def) const {
    auto it = values_.find(key);
    return it == values_.end() ? def : it->second;
  }

  double get_real(const std::string& key, double def) const {
    auto it = values_.find(key);
    if (it == values_.end()) return def;
    double d = 0;
    detail::parse_double(it->second, d);
    return d;
  }

  long long get_int(const std::string& key, long long def) const {
    auto it = values_.find(key);
    if (it == values_.end()) return def;
    long long i = 0;
    detail::parse_int(it->second, i);
    return i;
  }

  bool get_bool(const std::string& key, bool def) const {
    auto it = values_.find(key);
    if (it == values_.end()) return def;
    bool b = false;
    detail::parse_bool(it->second, b);
    return b;
  }

  std::vector<double> get_reals(const std::string& key) const {
    std::vector<double> out;
    auto it = values_.find(key);
    if (it == values_.end()) return out;
    for (const auto& s : detail::list_items(it->second)) {
      double d = 0;
      detail::parse_double(s, d);
      out.push_back(d);
    }
    return out;
  }

  std::vector<std::size_t> get_sizes(const std::string& key, std::vector<std::size_t> def) const {
    auto it = values_.find(key);
    if (it == values_.end()) return def;
    std::vector<std::size_t> out;
    for (const auto& s : detail::list_items(it->second)) {
      long long i = 0;
      detail::parse_int(s, i);
      out.push_back(static_cast<std::size_t>(i));
    }
    return out;
  }

  const std::map<std::string, std::string>& entries() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

inline ConfigMap parse_config_text(const std::string& text, const std::string& origin = "<config>") {
  ConfigMap cfg;
  std::istringstream in(text);
  std::string line, section;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    // Strip comments outside quotes.
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '#' && !quoted) {
        line.resize(i);
        break;
      }
    }
    line = detail::trim(line);
    if (line.empty()) continue;
    const std::string where = origin + ":" + std::to_string(lineno) + ": ";
    if (line.front() == '[' && line.back() == ']') {
      section = detail::trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
    std::string key = detail::trim(line.substr(0, eq));
    if (!section.empty()) key = section + "." + key;
    try {
      cfg.set(key, line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
  return cfg;
}

inline ConfigMap load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path.string());
}

/// Everything one config file describes.
struct ResolvedConfig {
  ExperimentConfig experiment;
  GridSpec grid;
  GridMetric grid_metric = GridMetric::automatic;
  int seeds = 5;
};

inline ResolvedConfig resolve_config(const ConfigMap& c) {
  ResolvedConfig r;
  ExperimentConfig& e = r.experiment;
  try {
    e.method = parse_method(c.get_string("optimizer.name", "sgd"));
    e.hp.rho = c.get_real("optimizer.rho", e.hp.rho);
    e.hp.psi = c.get_real("optimizer.psi", e.hp.psi);
    e.hp.epsilon_noise = c.get_real("optimizer.epsilon", e.hp.epsilon_noise);
    e.hp.beta1 = c.get_real("optimizer.beta1", e.hp.beta1);
    e.hp.beta2 = c.get_real("optimizer.beta2", e.hp.beta2);
    e.hp.stab = c.get_real("optimizer.stab", e.hp.stab);
    e.hp.zero_mean_noise = c.get_bool("optimizer.zero_mean_noise", false);

    ProblemSpec& p = e.problem;
    p.kind = c.get_string("problem.kind", p.kind);
    p.dim = static_cast<std::size_t>(c.get_int("problem.dim", static_cast<long long>(p.dim)));
    p.condition = c.get_real("problem.condition", p.condition);
    p.sigma_g = c.get_real("problem.sigma_g", p.sigma_g);
    p.data = c.get_string("problem.data", p.data);
    p.n = static_cast<std::size_t>(c.get_int("problem.n", static_cast<long long>(p.n)));
    p.noise = c.get_real("problem.noise", p.noise);
    p.data_seed = static_cast<std::uint64_t>(c.get_int("problem.data_seed", 0));
    p.csv_path = c.get_string("problem.csv", "");
    p.label_column = c.get_string("problem.label", p.label_column);
    p.hidden = c.get_sizes("problem.hidden", p.hidden);
    p.l2 = c.get_real("problem.l2", p.l2);
    p.init = c.get_reals("problem.init");

    e.schedule.kind = parse_schedule_kind(c.get_string("schedule.kind", "constant"));
    e.schedule.base_eta = c.get_real("optimizer.eta", 0.01);
    e.schedule.decay_factor = c.get_real("schedule.factor", e.schedule.decay_factor);
    e.schedule.decay_at_fraction = c.get_real("schedule.at", e.schedule.decay_at_fraction);

    const long long epochs = c.get_int("run.epochs", 200);
    const long long batch = c.get_int("run.batch_size", 32);
    const long long steps = c.get_int("run.steps_per_epoch", 10);
    if (batch < 1) throw std::invalid_argument("run.batch_size must be >= 1");
    if (steps < 1) throw std::invalid_argument("run.steps_per_epoch must be >= 1");
    e.epochs = static_cast<int>(epochs);
    e.batch_size = static_cast<std::size_t>(batch);
    e.steps_per_epoch = static_cast<std::size_t>(steps);
    e.seed = static_cast<std::uint64_t>(c.get_int("run.seed", 0));
    e.label = c.get_string("run.label", "");
    e.wall_clock = c.get_bool("run.wall_clock", false);
    r.seeds = static_cast<int>(c.get_int("run.seeds", 5));

    r.grid.center = c.get_real("grid.center", e.schedule.base_eta);
    r.grid.points = static_cast<int>(c.get_int("grid.points", 5));
    r.grid.ratio = c.get_real("grid.ratio", 10.0);
    r.grid.max_extensions = static_cast<int>(c.get_int("grid.max_extensions", 4));
    const std::string metric = c.get_string("grid.metric", "auto");
    if (metric == "auto") r.grid_metric = GridMetric::automatic;
    else if (metric == "test_acc") r.grid_metric = GridMetric::final_test_accuracy;
    else if (metric == "full_eval") r.grid_metric = GridMetric::final_full_eval;
    else throw std::invalid_argument("unknown grid.metric '" + metric + "'");

    e.hp.with_eta(e.schedule.base_eta);
    e.schedule.validate();
  } catch (const std::invalid_argument& ex) {
    throw ConfigError(ex.what());
  }
  return r;
}

}  // namespace asgld

#endif  // ASGLD_CONFIG_HPP
