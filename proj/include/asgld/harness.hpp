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

#ifndef ASGLD_HARNESS_HPP
#define ASGLD_HARNESS_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "asgld/core.hpp"
#include "asgld/dataset.hpp"
#include "asgld/optimizers.hpp"
#include "asgld/problems.hpp"
#include "asgld/schedule.hpp"

namespace asgld {

/**
 * Declarative description of a problem, so that a config can rebuild it.
 *
 * kind: quadratic | rosenbrock | saddle | logistic | mlp
 * data: two_moons | csv (dataset kinds only)
 *
 * sigma_g > 0 wraps any kind in seeded gradient noise. `init`, when
 * non-empty, replaces the problem's default starting point.
 */
struct ProblemSpec {
  std::string kind = "quadratic";
  std::size_t dim = 10;
  double condition = 10.0;
  double sigma_g = 0.0;
  std::string data = "two_moons";
  std::size_t n = 1000;
  double noise = 0.2;
  std::uint64_t data_seed = 0;
  std::string csv_path;
  std::string label_column = "label";
  std::vector<std::size_t> hidden = {16};
  double l2 = 0.0;
  std::vector<double> init;

  bool is_dataset() const { return kind == "logistic" || kind == "mlp"; }
  bool operator==(const ProblemSpec&) const = default;
};

inline std::shared_ptr<const Dataset> make_dataset(const ProblemSpec& spec) {
  if (spec.data == "two_moons") return std::make_shared<Dataset>(two_moons(spec.n, spec.noise, spec.data_seed));
  if (spec.data == "csv") return std::make_shared<Dataset>(load_csv_dataset(spec.csv_path, spec.label_column, spec.data_seed));
  throw std::invalid_argument("unknown data source '" + spec.data + "'");
}

/// Builds the problem; `noise_seed` keys the optional gradient-noise wrapper.
inline ProblemPtr make_problem(const ProblemSpec& spec, std::uint64_t noise_seed = 0) {
  ProblemPtr p;
  if (spec.kind == "quadratic") p = quadratic_problem(spec.dim, spec.condition);
  else if (spec.kind == "rosenbrock") p = rosenbrock_problem();
  else if (spec.kind == "saddle") p = saddle_problem();
  else if (spec.kind == "logistic") p = logistic_problem(make_dataset(spec), spec.l2);
  else if (spec.kind == "mlp") p = mlp_problem(make_dataset(spec), spec.hidden);
  else throw std::invalid_argument("unknown problem kind '" + spec.kind + "'");
  if (spec.sigma_g > 0.0) p = stochastic_wrapper(std::move(p), spec.sigma_g, GaussianStream(noise_seed));
  if (!spec.init.empty() && spec.init.size() != p->dim())
    throw std::invalid_argument("problem.init has " + std::to_string(spec.init.size()) + " entries, problem dim is " +
                                std::to_string(p->dim()));
  return p;
}

struct ExperimentConfig {
  std::string label;  // series name; empty means the optimizer name
  Method method = Method::sgd;
  HyperParams hp;     // hp.eta is ignored; the schedule supplies eta per epoch
  ProblemSpec problem;
  Schedule schedule;
  int epochs = 200;
  std::size_t batch_size = 32;
  std::size_t steps_per_epoch = 10;  // landscapes only; datasets use ceil(n_train / batch_size)
  std::uint64_t seed = 0;
  bool wall_clock = false;           // when false, wall_secs is written as 0 so output is reproducible
  std::filesystem::path output;      // RunRecord CSV destination; empty disables persistence

  std::string display_label() const { return label.empty() ? std::string(method_name(method)) : label; }

  ExperimentConfig with_eta(double eta) const {
    ExperimentConfig c = *this;
    c.schedule.base_eta = eta;
    return c;
  }

  ExperimentConfig with_seed(std::uint64_t s) const {
    ExperimentConfig c = *this;
    c.seed = s;
    return c;
  }
};

struct EpochRow {
  int epoch = 0;
  double eta = 0.0;
  double train_loss = 0.0;
  double train_acc = 0.0;
  double test_loss = 0.0;
  double test_acc = 0.0;
  double wall_secs = 0.0;
};

inline constexpr const char* kRunRecordHeader = "epoch,eta,train_loss,train_acc,test_loss,test_acc,wall_secs";

namespace detail {

inline std::string fmt9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

inline std::string format_row_metrics(const EpochRow& r) {
  return fmt9(r.eta) + "," + fmt9(r.train_loss) + "," + fmt9(r.train_acc) + "," + fmt9(r.test_loss) + "," +
         fmt9(r.test_acc) + "," + fmt9(r.wall_secs);
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
}

}  // namespace detail

/// Per-epoch metrics of one run. Landscape problems report NaN accuracies.
struct RunRecord {
  std::string label;
  std::uint64_t seed = 0;
  std::vector<EpochRow> rows;
  std::optional<int> diverged_at;
  ParamVector final_theta;

  bool diverged() const { return diverged_at.has_value(); }

  std::string to_csv() const {
    std::string out = std::string(kRunRecordHeader) + "\n";
    for (const auto& r : rows) out += std::to_string(r.epoch) + "," + detail::format_row_metrics(r) + "\n";
    if (diverged_at) out += "diverged," + std::to_string(*diverged_at) + "\n";
    return out;
  }

  void save(const std::filesystem::path& path) const { detail::write_text(path, to_csv()); }
};

/**
 * Parses a RunRecord CSV written by RunRecord::to_csv. Only the columns are
 * restored; label is set to the file stem.
 */
inline RunRecord read_run_record(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line) || detail::trim(line) != kRunRecordHeader)
    throw std::runtime_error("'" + path.string() + "' is not a run record (bad header)");
  RunRecord rec;
  rec.label = path.stem().string();
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    auto cells = detail::split_commas(line);
    if (cells.size() == 2 && detail::trim(cells[0]) == "diverged") {
      rec.diverged_at = std::stoi(cells[1]);
      continue;
    }
    if (cells.size() != 7) throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": expected 7 fields");
    double v[7];
    for (int c = 0; c < 7; ++c) {
      const std::string t = detail::trim(cells[static_cast<std::size_t>(c)]);
      char* end = nullptr;
      v[c] = std::strtod(t.c_str(), &end);
      if (t.empty() || end != t.c_str() + t.size())
        throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": malformed number");
    }
    rec.rows.push_back({static_cast<int>(v[0]), v[1], v[2], v[3], v[4], v[5], v[6]});
  }
  return rec;
}

namespace detail {

inline EpochRow evaluate_epoch(const Problem& p, const ParamVector& theta, int epoch, double eta) {
  EpochRow row{epoch, eta, 0, 0, 0, 0, 0};
  if (p.dataset()) {
    row.train_loss = partition_loss(p, theta, Partition::train);
    row.test_loss = partition_loss(p, theta, Partition::test);
    row.train_acc = accuracy(p, theta, Partition::train);
    row.test_acc = accuracy(p, theta, Partition::test);
  } else {
    row.train_loss = row.test_loss = p.full_eval(theta);
    row.train_acc = row.test_acc = std::numeric_limits<double>::quiet_NaN();
  }
  return row;
}

}  // namespace detail

/**
 * Runs one experiment. All randomness (optimizer noise, gradient noise,
 * minibatch sampling, initialisation) derives from cfg.seed. Minibatches
 * draw training rows uniformly with replacement.
 *
 * A non-finite gradient, parameter or epoch loss ends the run: the record
 * keeps the completed epochs and diverged_at names the failing epoch.
 * The record is written to cfg.output when that is set.
 */
inline RunRecord run_experiment(const ExperimentConfig& cfg) {
  if (cfg.epochs <= 0) throw std::invalid_argument("empty schedule");
  if (cfg.batch_size == 0) throw std::invalid_argument("batch_size must be >= 1");
  cfg.schedule.validate();
  cfg.hp.with_eta(cfg.schedule.base_eta);

  const ProblemPtr problem = make_problem(cfg.problem, mix_seed(cfg.seed, 2));
  const Dataset* ds = problem->dataset();
  if (ds && cfg.batch_size > ds->train.size())
    throw std::invalid_argument("batch_size exceeds training set size");
  const std::size_t steps = ds ? (ds->train.size() + cfg.batch_size - 1) / cfg.batch_size : cfg.steps_per_epoch;
  if (steps == 0) throw std::invalid_argument("steps_per_epoch must be >= 1");

  ParamVector theta0 = cfg.problem.init.empty() ? problem->initial_point(mix_seed(cfg.seed, 4))
                                                : ParamVector(cfg.problem.init);
  OptimizerState state(std::move(theta0), mix_seed(cfg.seed, 1));
  std::mt19937_64 sampler(mix_seed(cfg.seed, 3));

  RunRecord rec;
  rec.label = cfg.display_label();
  rec.seed = cfg.seed;
  const auto started = std::chrono::steady_clock::now();
  std::uint64_t ticket = 0;
  BatchRef batch;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const double eta = schedule_eta(cfg.schedule, epoch, cfg.epochs);
    const HyperParams hp = cfg.hp.with_eta(eta);
    try {
      for (std::size_t s = 0; s < steps; ++s) {
        batch.ticket = ticket++;
        if (ds) {
          batch.indices.resize(cfg.batch_size);
          for (auto& idx : batch.indices) idx = ds->train[sampler() % ds->train.size()];
        }
        step(cfg.method, state, problem->grad(state.theta, batch), hp);
      }
      EpochRow row = detail::evaluate_epoch(*problem, state.theta, epoch, eta);
      if (!std::isfinite(row.train_loss) || !std::isfinite(row.test_loss)) throw NonFiniteError("non-finite loss");
      if (cfg.wall_clock)
        row.wall_secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
      rec.rows.push_back(row);
    } catch (const NonFiniteError&) {
      rec.diverged_at = epoch;
      break;
    }
  }
  rec.final_theta = state.theta;
  if (!cfg.output.empty()) rec.save(cfg.output);
  return rec;
}

// ---------------------------------------------------------------------------
// Learning-rate grid search

/// Log-spaced grid center * ratio^k, k symmetric around 0.
struct GridSpec {
  double center = 0.01;
  int points = 5;
  double ratio = 10.0;
  int max_extensions = 4;

  void validate() const {
    if (!(std::isfinite(center) && center > 0.0)) throw std::invalid_argument("grid: center must be > 0");
    if (points < 1) throw std::invalid_argument("grid: points must be >= 1");
    if (!(std::isfinite(ratio) && ratio > 1.0)) throw std::invalid_argument("grid: ratio must be > 1");
    if (max_extensions < 0) throw std::invalid_argument("grid: max_extensions must be >= 0");
  }

  std::vector<double> initial_values() const {
    std::vector<double> out;
    const double mid = (points - 1) / 2.0;
    for (int k = 0; k < points; ++k) out.push_back(center * std::pow(ratio, k - mid));
    return out;
  }
};

struct GridOutcome {
  double best_eta = 0.0;
  double best_score = 0.0;
  std::vector<double> etas;    // ascending
  std::vector<std::optional<double>> scores;  // aligned with etas; nullopt = diverged
  int extensions = 0;
  bool boundary_capped = false;  // best ended on an edge with no extensions left
};

/**
 * Evaluates every grid point with `score(eta)` (nullopt means diverged).
 * While the best point sits on an edge of the grid and extensions remain,
 * one more point is added a ratio step beyond that edge. Ties between equal
 * scores go to the point nearest the original center.
 */
template <typename ScoreFn>
GridOutcome grid_search_fn(const GridSpec& grid, ScoreFn&& score, bool higher_is_better) {
  grid.validate();
  GridOutcome out;
  out.etas = grid.initial_values();
  for (double eta : out.etas) out.scores.push_back(score(eta));

  auto better = [&](double a, double b) { return higher_is_better ? a > b : a < b; };
  auto pick_best = [&]() -> std::optional<std::size_t> {
    std::optional<std::size_t> best;
    double best_dist = 0.0;
    for (std::size_t i = 0; i < out.etas.size(); ++i) {
      if (!out.scores[i]) continue;
      const double dist = std::abs(std::log(out.etas[i] / grid.center));
      if (!best || better(*out.scores[i], *out.scores[*best]) ||
          (*out.scores[i] == *out.scores[*best] && dist < best_dist - 1e-9)) {
        best = i;
        best_dist = dist;
      }
    }
    return best;
  };

  for (;;) {
    const auto best = pick_best();
    if (!best) {
      std::string tried;
      for (double e : out.etas) tried += (tried.empty() ? "" : ", ") + detail::fmt9(e);
      throw std::runtime_error("grid search: all runs diverged (eta tried: " + tried + ")");
    }
    const bool at_low = *best == 0;
    const bool at_high = *best + 1 == out.etas.size();
    if (!at_low && !at_high) {
      out.best_eta = out.etas[*best];
      out.best_score = *out.scores[*best];
      return out;
    }
    if (out.extensions >= grid.max_extensions) {
      out.best_eta = out.etas[*best];
      out.best_score = *out.scores[*best];
      out.boundary_capped = true;
      return out;
    }
    ++out.extensions;
    if (at_low) {
      const double eta = out.etas.front() / grid.ratio;
      out.etas.insert(out.etas.begin(), eta);
      out.scores.insert(out.scores.begin(), score(eta));
    } else {
      const double eta = out.etas.back() * grid.ratio;
      out.etas.push_back(eta);
      out.scores.push_back(score(eta));
    }
  }
}

enum class GridMetric { automatic, final_test_accuracy, final_full_eval };

struct GridSearchResult {
  GridOutcome outcome;
  std::vector<RunRecord> records;  // in evaluation order
};

/**
 * Tunes the base step size of `tmpl`. With GridMetric::automatic, dataset
 * problems maximise final test accuracy and landscapes minimise the final
 * full objective. When out_dir is set each run is saved as
 * <label>_eta<eta>_seed<seed>.csv there.
 */
inline GridSearchResult grid_search(const ExperimentConfig& tmpl, const GridSpec& grid,
                                    GridMetric metric = GridMetric::automatic,
                                    const std::filesystem::path& out_dir = {}) {
  if (metric == GridMetric::automatic)
    metric = tmpl.problem.is_dataset() ? GridMetric::final_test_accuracy : GridMetric::final_full_eval;
  GridSearchResult result;
  auto score = [&](double eta) -> std::optional<double> {
    ExperimentConfig cfg = tmpl.with_eta(eta);
    cfg.output = out_dir.empty() ? std::filesystem::path{}
                                 : out_dir / (cfg.display_label() + "_eta" + detail::fmt9(eta) + "_seed" +
                                              std::to_string(cfg.seed) + ".csv");
    RunRecord rec = run_experiment(cfg);
    std::optional<double> s;
    if (!rec.diverged() && !rec.rows.empty()) {
      const EpochRow& last = rec.rows.back();
      s = metric == GridMetric::final_test_accuracy ? last.test_acc : last.train_loss;
    }
    result.records.push_back(std::move(rec));
    return s;
  };
  result.outcome = grid_search_fn(grid, score, metric == GridMetric::final_test_accuracy);
  return result;
}

// ---------------------------------------------------------------------------
// Multi-seed comparison

struct MetricSummary {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation; 0 for a single seed
};

struct ComparisonEntry {
  std::string label;
  MetricSummary train_loss, train_acc, test_loss, test_acc;
  std::vector<EpochRow> mean_curve;  // per-epoch mean over seeds that reached that epoch
  std::vector<RunRecord> runs;
  int diverged_runs = 0;
};

struct ComparisonTable {
  std::vector<ComparisonEntry> entries;

  const ComparisonEntry& at(const std::string& label) const {
    for (const auto& e : entries)
      if (e.label == label) return e;
    throw std::out_of_range("no comparison entry '" + label + "'");
  }

  /// Long format: optimizer,seed,epoch,eta,train_loss,train_acc,test_loss,test_acc,wall_secs
  std::string to_csv() const {
    std::string out = "optimizer,seed,epoch,eta,train_loss,train_acc,test_loss,test_acc,wall_secs\n";
    for (const auto& e : entries)
      for (const auto& run : e.runs)
        for (const auto& r : run.rows)
          out += e.label + "," + std::to_string(run.seed) + "," + std::to_string(r.epoch) + "," +
                 detail::format_row_metrics(r) + "\n";
    return out;
  }
};

namespace detail {

inline MetricSummary summarize(const std::vector<double>& xs) {
  MetricSummary m;
  if (xs.empty()) return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
  for (double x : xs) m.mean += x;
  m.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - m.mean) * (x - m.mean);
    m.std = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return m;
}

}  // namespace detail

/**
 * Runs every config over seeds cfg.seed, cfg.seed + 1, ..., cfg.seed + seeds - 1
 * and summarises final metrics. Final metrics average over non-diverged runs
 * only. Runs execute sequentially; each one owns its state. When combined_csv
 * is set the long-format table is written there.
 */
inline ComparisonTable compare(const std::vector<ExperimentConfig>& cfgs, int seeds = 5,
                               const std::filesystem::path& combined_csv = {}) {
  if (cfgs.size() < 2) throw std::invalid_argument("compare: need at least 2 configs");
  if (seeds < 1) throw std::invalid_argument("compare: seeds must be >= 1");
  for (const auto& c : cfgs) {
    if (!(c.problem == cfgs.front().problem)) throw std::invalid_argument("compare: configs use different problems");
    if (c.epochs != cfgs.front().epochs) throw std::invalid_argument("compare: configs use different epoch budgets");
  }
  for (std::size_t i = 0; i < cfgs.size(); ++i)
    for (std::size_t j = i + 1; j < cfgs.size(); ++j)
      if (cfgs[i].display_label() == cfgs[j].display_label())
        throw std::invalid_argument("compare: duplicate label '" + cfgs[i].display_label() + "'");

  ComparisonTable table;
  for (const auto& base : cfgs) {
    ComparisonEntry entry;
    entry.label = base.display_label();
    std::vector<double> trl, tra, tel, tea;
    for (int r = 0; r < seeds; ++r) {
      ExperimentConfig cfg = base.with_seed(base.seed + static_cast<std::uint64_t>(r));
      cfg.output.clear();
      RunRecord rec = run_experiment(cfg);
      if (rec.diverged() || rec.rows.empty()) {
        ++entry.diverged_runs;
      } else {
        const auto& last = rec.rows.back();
        trl.push_back(last.train_loss);
        tra.push_back(last.train_acc);
        tel.push_back(last.test_loss);
        tea.push_back(last.test_acc);
      }
      entry.runs.push_back(std::move(rec));
    }
    entry.train_loss = detail::summarize(trl);
    entry.train_acc = detail::summarize(tra);
    entry.test_loss = detail::summarize(tel);
    entry.test_acc = detail::summarize(tea);

    for (int e = 1; e <= base.epochs; ++e) {
      EpochRow mean{e, 0, 0, 0, 0, 0, 0};
      int count = 0;
      for (const auto& run : entry.runs) {
        if (static_cast<int>(run.rows.size()) < e) continue;
        const auto& r = run.rows[static_cast<std::size_t>(e - 1)];
        mean.eta += r.eta;
        mean.train_loss += r.train_loss;
        mean.train_acc += r.train_acc;
        mean.test_loss += r.test_loss;
        mean.test_acc += r.test_acc;
        mean.wall_secs += r.wall_secs;
        ++count;
      }
      if (count == 0) break;
      for (double* f : {&mean.eta, &mean.train_loss, &mean.train_acc, &mean.test_loss, &mean.test_acc, &mean.wall_secs})
        *f /= count;
      entry.mean_curve.push_back(mean);
    }
    table.entries.push_back(std::move(entry));
  }
  if (!combined_csv.empty()) detail::write_text(combined_csv, table.to_csv());
  return table;
}

}  // namespace asgld

#endif  // ASGLD_HARNESS_HPP
