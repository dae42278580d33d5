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

#ifndef ASGLD_CLI_HPP
#define ASGLD_CLI_HPP

// Command-line front end. Everything here is a thin layer over the library:
// each verb resolves configs, calls one harness entry point and reports.
//
// Exit codes: 0 success, 1 runtime or validation failure, 2 usage error.

#include <glob.h>

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "asgld/config.hpp"
#include "asgld/harness.hpp"
#include "asgld/problems.hpp"
#include "asgld/svg_plot.hpp"

namespace asgld::cli {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Verb { run, sweep, compare, plot, gradcheck };

struct CliCommand {
  Verb verb = Verb::run;
  std::vector<std::string> configs;
  std::vector<std::pair<std::string, std::string>> overrides;  // in command-line order
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::string metric = "test_acc";
  std::vector<std::string> files;  // plot inputs after glob expansion
  bool corrupt_grad = false;       // gradcheck negative control
};

namespace detail {

inline bool has_glob_chars(const std::string& s) { return s.find_first_of("*?[") != std::string::npos; }

inline std::vector<std::string> expand_glob(const std::string& pattern) {
  glob_t g{};
  std::vector<std::string> out;
  if (::glob(pattern.c_str(), 0, nullptr, &g) == 0)
    for (std::size_t i = 0; i < g.gl_pathc; ++i) out.emplace_back(g.gl_pathv[i]);
  ::globfree(&g);
  return out;
}

}  // namespace detail

/**
 * Parses argv (program name excluded). Throws UsageError for anything that
 * is wrong with the command line itself, including unknown override keys,
 * and std::runtime_error for paths that do not exist. No experiment work
 * happens here.
 */
inline CliCommand parse_args(const std::vector<std::string>& argv) {
  CliCommand cmd;
  std::vector<std::string> sets;
  std::vector<std::string> positional;

  CLI::App app{"Adaptively preconditioned SGLD experiments", "asgld"};
  app.require_subcommand(1, 1);
  auto add_common = [&](CLI::App* sub, bool runs) {
    sub->add_option("--config,-c", cmd.configs, "config file (repeatable for compare)");
    sub->add_option("--set", sets, "override, key=value (repeatable)");
    sub->add_option("--out,-o", cmd.out, "output directory");
    if (runs) sub->add_option("--seed", cmd.seed, "override run.seed");
  };
  auto* run = app.add_subcommand("run", "run one experiment");
  auto* sweep = app.add_subcommand("sweep", "log-grid step size search");
  auto* comp = app.add_subcommand("compare", "multi-seed comparison of several configs");
  auto* plot = app.add_subcommand("plot", "SVG training curves from run record CSVs");
  auto* grad = app.add_subcommand("gradcheck", "finite-difference gradient check");
  add_common(run, true);
  add_common(sweep, true);
  add_common(comp, true);
  add_common(grad, true);
  grad->add_flag("--corrupt-grad", cmd.corrupt_grad, "scale one gradient coordinate by 1.01 (test hook)");
  plot->add_option("files", positional, "run record CSV files or glob patterns")->required();
  plot->add_option("--metric", cmd.metric, "column to plot");
  plot->add_option("--out,-o", cmd.out, "output SVG path");

  static const std::vector<std::string> verbs = {"run", "sweep", "compare", "plot", "gradcheck"};
  if (!argv.empty() && !argv.front().starts_with("-") &&
      std::find(verbs.begin(), verbs.end(), argv.front()) == verbs.end())
    throw UsageError("unknown verb '" + argv.front() + "'");

  try {
    std::vector<std::string> rev(argv.rbegin(), argv.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    throw;
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  if (run->parsed()) cmd.verb = Verb::run;
  else if (sweep->parsed()) cmd.verb = Verb::sweep;
  else if (comp->parsed()) cmd.verb = Verb::compare;
  else if (plot->parsed()) cmd.verb = Verb::plot;
  else cmd.verb = Verb::gradcheck;

  for (const auto& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("malformed override '" + s + "' (expected key=value)");
    const std::string key = s.substr(0, eq);
    if (!find_key(key)) throw UsageError("unknown override key '" + key + "'");
    try {
      check_value(key, s.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw UsageError(e.what());
    }
    cmd.overrides.emplace_back(key, s.substr(eq + 1));
  }

  const bool needs_config = cmd.verb == Verb::run || cmd.verb == Verb::sweep || cmd.verb == Verb::compare;
  if (needs_config && cmd.configs.empty()) throw UsageError("missing --config");
  if (cmd.verb != Verb::compare && cmd.configs.size() > 1) throw UsageError("only one --config allowed here");
  for (const auto& c : cmd.configs)
    if (!std::filesystem::exists(c)) throw std::runtime_error("config file '" + c + "' does not exist");

  if (cmd.verb == Verb::plot) {
    static const std::vector<std::string> metrics = {"eta", "train_loss", "train_acc", "test_loss", "test_acc",
                                                     "wall_secs"};
    if (std::find(metrics.begin(), metrics.end(), cmd.metric) == metrics.end())
      throw UsageError("unknown metric '" + cmd.metric + "'");
    for (const auto& p : positional) {
      if (detail::has_glob_chars(p)) {
        auto matched = detail::expand_glob(p);
        if (matched.empty()) throw std::runtime_error("no files match '" + p + "'");
        cmd.files.insert(cmd.files.end(), matched.begin(), matched.end());
      } else {
        if (!std::filesystem::exists(p)) throw std::runtime_error("record file '" + p + "' does not exist");
        cmd.files.push_back(p);
      }
    }
  }
  return cmd;
}

/// Config file(s) plus overrides, in precedence order defaults < file < --set < --seed.
inline ConfigMap build_config_map(const CliCommand& cmd, const std::string& path) {
  ConfigMap m = path.empty() ? ConfigMap{} : load_config_file(path);
  for (const auto& [k, v] : cmd.overrides) m.set(k, v);
  if (cmd.seed) m.set("run.seed", std::to_string(*cmd.seed));
  return m;
}

inline std::filesystem::path output_dir(const CliCommand& cmd) {
  if (cmd.out) return *cmd.out;
  if (const char* env = std::getenv("ASGLD_OUT_DIR"); env && *env) return env;
  return "results";
}

inline std::filesystem::path run_record_path(const std::filesystem::path& dir, const ExperimentConfig& cfg) {
  return dir / (cfg.display_label() + "_seed" + std::to_string(cfg.seed) + ".csv");
}

namespace detail {

inline std::string fmt(double v, const char* spec = "%.6g") {
  char buf[48];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

inline int cmd_run(const CliCommand& cmd, std::ostream& out, std::ostream& err) {
  ResolvedConfig rc = resolve_config(build_config_map(cmd, cmd.configs.front()));
  rc.experiment.output = run_record_path(output_dir(cmd), rc.experiment);
  const RunRecord rec = run_experiment(rc.experiment);
  out << "wrote " << rc.experiment.output.string() << "\n";
  if (!rec.rows.empty()) {
    const auto& last = rec.rows.back();
    out << "epoch " << last.epoch << ": train_loss " << fmt(last.train_loss) << " train_acc " << fmt(last.train_acc)
        << " test_loss " << fmt(last.test_loss) << " test_acc " << fmt(last.test_acc) << "\n";
  }
  if (rec.diverged()) {
    err << "run diverged at epoch " << *rec.diverged_at << "\n";
    return 1;
  }
  return 0;
}

inline int cmd_sweep(const CliCommand& cmd, std::ostream& out, std::ostream&) {
  const ResolvedConfig rc = resolve_config(build_config_map(cmd, cmd.configs.front()));
  const auto dir = output_dir(cmd);
  const GridSearchResult res = grid_search(rc.experiment, rc.grid, rc.grid_metric, dir);
  std::string csv = "eta,score\n";
  for (std::size_t i = 0; i < res.outcome.etas.size(); ++i)
    csv += asgld::detail::fmt9(res.outcome.etas[i]) + "," +
           (res.outcome.scores[i] ? asgld::detail::fmt9(*res.outcome.scores[i]) : std::string("diverged")) + "\n";
  const auto summary = dir / (rc.experiment.display_label() + "_sweep.csv");
  asgld::detail::write_text(summary, csv);
  out << "wrote " << summary.string() << "\n";
  out << "best eta " << fmt(res.outcome.best_eta) << " (score " << fmt(res.outcome.best_score) << ", "
      << res.outcome.etas.size() << " runs, " << res.outcome.extensions << " extensions)\n";
  if (res.outcome.boundary_capped) out << "warning: best eta is on the grid boundary and extensions are exhausted\n";
  return 0;
}

inline int cmd_compare(const CliCommand& cmd, std::ostream& out, std::ostream&) {
  if (cmd.configs.size() < 2) throw std::invalid_argument("compare needs at least two --config files");
  std::vector<ExperimentConfig> cfgs;
  int seeds = 5;
  for (const auto& path : cmd.configs) {
    ResolvedConfig rc = resolve_config(build_config_map(cmd, path));
    if (cfgs.empty()) seeds = rc.seeds;
    cfgs.push_back(rc.experiment);
  }
  const auto dir = output_dir(cmd);
  const ComparisonTable table = compare(cfgs, seeds, dir / "comparison.csv");
  for (const auto& e : table.entries)
    for (const auto& run : e.runs) run.save(dir / (e.label + "_seed" + std::to_string(run.seed) + ".csv"));
  out << "wrote " << (dir / "comparison.csv").string() << "\n";
  out << "optimizer,train_loss_mean,train_loss_std,test_acc_mean,test_acc_std,diverged\n";
  for (const auto& e : table.entries)
    out << e.label << "," << fmt(e.train_loss.mean) << "," << fmt(e.train_loss.std) << "," << fmt(e.test_acc.mean)
        << "," << fmt(e.test_acc.std) << "," << e.diverged_runs << "\n";
  return 0;
}

inline int cmd_plot(const CliCommand& cmd, std::ostream& out, std::ostream&) {
  std::filesystem::path target;
  if (cmd.out) target = *cmd.out;
  else target = output_dir(cmd) / "curves.svg";
  std::vector<std::filesystem::path> files(cmd.files.begin(), cmd.files.end());
  emit_plot(files, cmd.metric, target);
  out << "wrote " << target.string() << "\n";
  return 0;
}

inline int cmd_gradcheck(const CliCommand& cmd, std::ostream& out, std::ostream&) {
  const ResolvedConfig rc = resolve_config(build_config_map(cmd, cmd.configs.empty() ? "" : cmd.configs.front()));
  const auto& e = rc.experiment;
  ProblemPtr p = make_problem(e.problem, mix_seed(e.seed, 2));
  if (cmd.corrupt_grad) p = std::make_shared<ScaledGradientProblem>(p, 0, 1.01);
  const double worst = gradient_check(*p, 20, e.seed);
  out << "problem " << e.problem.kind << " (dim " << p->dim() << "): max relative error " << fmt(worst, "%.3e")
      << " over 20 points\n";
  return worst < 1e-5 ? 0 : 1;
}

}  // namespace detail

/// Full CLI entry point; returns the process exit code.
inline int run_cli(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  CliCommand cmd;
  try {
    cmd = parse_args(argv);
  } catch (const CLI::CallForHelp&) {
    out << "usage: asgld {run|sweep|compare|plot|gradcheck} [options]\n"
           "  run|sweep|compare  --config FILE [--set key=value]... [--seed N] [--out DIR]\n"
           "  plot               FILE... [--metric COLUMN] [--out FILE.svg]\n"
           "  gradcheck          [--config FILE] [--set key=value]... [--seed N]\n";
    return 0;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  try {
    switch (cmd.verb) {
      case Verb::run: return detail::cmd_run(cmd, out, err);
      case Verb::sweep: return detail::cmd_sweep(cmd, out, err);
      case Verb::compare: return detail::cmd_compare(cmd, out, err);
      case Verb::plot: return detail::cmd_plot(cmd, out, err);
      case Verb::gradcheck: return detail::cmd_gradcheck(cmd, out, err);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace asgld::cli

#endif  // ASGLD_CLI_HPP
