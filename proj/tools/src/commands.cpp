// Copyright 2026 The qsl Authors
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

#include "qsl/cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "qsl/bound.hpp"
#include "qsl/cli/format.hpp"
#include "qsl/cli/schedule_json.hpp"
#include "qsl/cli/selftest.hpp"
#include "qsl/cli/surface.hpp"
#include "qsl/errors.hpp"
#include "qsl/mintime.hpp"
#include "qsl/model.hpp"

namespace qsl::cli {
namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Settings {
  int n = 0;
  int m = 0;
  std::string n_range = "2:15";
  std::string m_range = "1:14";
  std::string mode = "bound";
  std::uint64_t seed = 0;
  int restarts = 20;
  int slots = 0;
  double threshold = 1e-4;
  std::string out;
  std::string format;
  int jobs = 1;
  double budget_seconds = 0.0;
  std::string config;
  int grape_restarts = 8;
  int grape_iters = 500;
  double t_rel_tol = 0.02;
  double t_init = 0.0;
  std::string schedule_out;
  bool both_algorithms = false;
  bool timing = false;
  double drift_perturbation = 0.0;
};

// A flag together with the way its config-file value is applied.
struct Binding {
  CLI::Option* option = nullptr;
  std::function<void(const json&)> from_json;
};

using Bindings = std::map<std::string, Binding>;

template <typename T>
void bind_option(CLI::App* app, Bindings& bindings, const std::string& key, T& target,
          const std::string& help) {
  CLI::Option* option = app->add_option("--" + key, target, help);
  bindings[key] = {option, [&target](const json& j) { target = j.get<T>(); }};
}

void bind_flag(CLI::App* app, Bindings& bindings, const std::string& key, bool& target,
               const std::string& help) {
  CLI::Option* option = app->add_flag("--" + key, target, help);
  bindings[key] = {option, [&target](const json& j) { target = j.get<bool>(); }};
}

// Ranges may be given as "A:B" or, in a config file, as [A, B].
void bind_range(CLI::App* app, Bindings& bindings, const std::string& key, std::string& target,
                const std::string& help) {
  CLI::Option* option = app->add_option("--" + key, target, help);
  bindings[key] = {option, [&target](const json& j) {
                     if (j.is_array() && j.size() == 2) {
                       target = std::to_string(j[0].get<int>()) + ":" +
                                std::to_string(j[1].get<int>());
                     } else {
                       target = j.get<std::string>();
                     }
                   }};
}

// Fills every setting whose flag was not given on the command line from the JSON
// config file.
void apply_config(const std::string& path, Bindings& bindings) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file '" + path + "'");
  json config;
  try {
    config = json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  if (!config.is_object()) throw UsageError("config file '" + path + "' must hold a JSON object");
  for (const auto& [key, value] : config.items()) {
    const auto it = bindings.find(key);
    if (it == bindings.end() || key == "config") {
      throw UsageError("config file '" + path + "': unknown key '" + key + "'");
    }
    if (it->second.option->count() > 0) continue;
    try {
      it->second.from_json(value);
    } catch (const json::exception&) {
      throw UsageError("config file '" + path + "': bad value for '" + key + "'");
    }
  }
}

std::pair<int, int> parse_range(const std::string& text, const std::string& flag) {
  const auto colon = text.find(':');
  int lo = 0;
  int hi = 0;
  try {
    if (colon == std::string::npos) throw std::invalid_argument(text);
    std::size_t used_lo = 0;
    std::size_t used_hi = 0;
    const std::string a = text.substr(0, colon);
    const std::string b = text.substr(colon + 1);
    lo = std::stoi(a, &used_lo);
    hi = std::stoi(b, &used_hi);
    if (used_lo != a.size() || used_hi != b.size()) throw std::invalid_argument(text);
  } catch (const std::logic_error&) {
    throw UsageError("--" + flag + " expects A:B with integers A <= B, got '" + text + "'");
  }
  if (lo > hi) throw UsageError("--" + flag + " expects A <= B, got '" + text + "'");
  return {lo, hi};
}

void require(bool condition, const std::string& message) {
  if (!condition) throw UsageError(message);
}

void check_instance(const Settings& s) {
  require(s.n >= 2, "--n must be at least 2 (got " + std::to_string(s.n) + ")");
  require(s.m >= 1 && s.m <= s.n - 1, "--m must satisfy 1 <= M <= N - 1 (got N=" +
                                           std::to_string(s.n) + ", M=" + std::to_string(s.m) +
                                           ")");
}

void check_common(const Settings& s) {
  require(s.restarts >= 1, "--restarts must be at least 1");
  require(s.jobs >= 1, "--jobs must be at least 1");
}

void check_grape(const Settings& s) {
  require(s.slots >= 0, "--slots must be non-negative (0 selects the default)");
  require(s.threshold > 0.0, "--threshold must be positive");
  require(s.grape_restarts >= 1, "--grape-restarts must be at least 1");
  require(s.grape_iters >= 1, "--grape-iters must be at least 1");
  require(s.t_rel_tol > 0.0 && s.t_rel_tol < 1.0, "--t-rel-tol must lie in (0, 1)");
  require(s.t_init >= 0.0, "--t-init must be non-negative (0 selects the bound)");
}

void check_format(const std::string& format, std::initializer_list<const char*> allowed) {
  for (const char* a : allowed) {
    if (format == a) return;
  }
  std::string list;
  for (const char* a : allowed) list += std::string(list.empty() ? "" : "|") + a;
  throw UsageError("--format must be one of " + list + " (got '" + format + "')");
}

BoundConfig bound_config(const Settings& s) {
  BoundConfig config;
  config.restarts = s.restarts;
  config.seed = s.seed;
  config.both_algorithms = s.both_algorithms;
  return config;
}

MinTimeConfig mintime_config(const Settings& s) {
  MinTimeConfig config;
  config.threshold = s.threshold;
  config.t_rel_tol = s.t_rel_tol;
  if (s.t_init > 0.0) config.t_init = s.t_init;
  config.grape.n_slots = s.slots;
  config.grape.restarts = s.grape_restarts;
  config.grape.max_iters = s.grape_iters;
  config.grape.seed = s.seed;
  config.bound = bound_config(s);
  return config;
}

void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty()) {
    out << content;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw UsageError("cannot write output file '" + path + "'");
  file << content;
  if (!file.flush()) throw UsageError("failed writing output file '" + path + "'");
}

std::string yes_no(bool b) { return b ? "yes" : "no"; }

// Two-column text report.
class Report {
 public:
  void add(const std::string& label, const std::string& value) { rows_.emplace_back(label, value); }
  std::string str() const {
    std::size_t width = 0;
    for (const auto& row : rows_) width = std::max(width, row.first.size());
    std::ostringstream out;
    for (const auto& [label, value] : rows_) {
      out << label << std::string(width + 2 - label.size(), ' ') << value << '\n';
    }
    return out.str();
  }

 private:
  std::vector<std::pair<std::string, std::string>> rows_;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int cmd_bound(Settings s, std::ostream& out) {
  check_instance(s);
  check_common(s);
  if (s.format.empty()) s.format = "text";
  check_format(s.format, {"text", "json"});
  const auto start = Clock::now();
  BoundConfig config = bound_config(s);
  config.jobs = s.jobs;
  const BoundResult r = maximize_bound(build_swap_goal(s.n), make_chain_system(s.n, s.m), config);
  const double anchor = analytic_reference(s.n);
  const double previous = previous_bound_reference();
  const double elapsed = seconds_since(start);

  if (s.format == "json") {
    json j = {{"N", s.n},
              {"M", s.m},
              {"bound_value", round_significant(r.value)},
              {"analytic_anchor", round_significant(anchor)},
              {"previous_bound", round_significant(previous)},
              {"exceeds_previous", r.value > previous},
              {"seed", s.seed},
              {"restarts", s.restarts},
              {"best_start", r.best_start}};
    if (s.timing) j["wall_time_seconds"] = round_significant(elapsed);
    emit(s.out, j.dump(2) + "\n", out);
  } else {
    Report report;
    report.add("N", std::to_string(s.n));
    report.add("M", std::to_string(s.m));
    report.add("bound_value", format_number(r.value));
    report.add("analytic_anchor", format_number(anchor));
    report.add("previous_bound", format_number(previous));
    report.add("exceeds_previous", yes_no(r.value > previous));
    report.add("seed", std::to_string(s.seed));
    report.add("restarts", std::to_string(s.restarts));
    report.add("best_start", std::to_string(r.best_start));
    if (s.timing) report.add("wall_time_seconds", format_number(elapsed));
    emit(s.out, report.str(), out);
  }
  return kExitOk;
}

int cmd_mintime(Settings s, std::ostream& out, std::ostream& err) {
  check_instance(s);
  check_common(s);
  check_grape(s);
  if (s.format.empty()) s.format = "text";
  check_format(s.format, {"text", "json"});
  const auto start = Clock::now();
  MinTimeConfig config = mintime_config(s);
  config.bound.jobs = s.jobs;
  config.grape.jobs = s.jobs;
  const MinTimeResult r = find_min_time(make_chain_system(s.n, s.m), build_swap_goal(s.n), config);
  const double elapsed = seconds_since(start);

  if (!s.schedule_out.empty()) emit(s.schedule_out, schedule_to_json(r.schedule).dump() + "\n", out);
  if (s.format == "json") {
    json j = {{"N", s.n},
              {"M", s.m},
              {"t_min", round_significant(r.t_min)},
              {"t_lo", round_significant(r.t_lo)},
              {"t_hi", round_significant(r.t_hi)},
              {"grape_error_at_t_min", round_significant(r.error_at_t_min)},
              {"bound_value", round_significant(r.bound_value)},
              {"analytic_anchor", round_significant(analytic_reference(s.n))},
              {"consistent", r.consistent},
              {"grape_runs", r.evaluations},
              {"threshold", round_significant(s.threshold)},
              {"seed", s.seed}};
    if (s.timing) j["wall_time_seconds"] = round_significant(elapsed);
    emit(s.out, j.dump(2) + "\n", out);
  } else {
    Report report;
    report.add("N", std::to_string(s.n));
    report.add("M", std::to_string(s.m));
    report.add("t_min", format_number(r.t_min));
    report.add("bracket", "(" + format_number(r.t_lo) + ", " + format_number(r.t_hi) + "]");
    report.add("grape_error_at_t_min", format_number(r.error_at_t_min));
    report.add("bound_value", format_number(r.bound_value));
    report.add("analytic_anchor", format_number(analytic_reference(s.n)));
    report.add("consistent", yes_no(r.consistent));
    report.add("grape_runs", std::to_string(r.evaluations));
    report.add("threshold", format_number(s.threshold));
    report.add("seed", std::to_string(s.seed));
    if (s.timing) report.add("wall_time_seconds", format_number(elapsed));
    emit(s.out, report.str(), out);
  }
  if (!r.consistent) {
    err << "error: t_min " << format_number(r.t_min) << " is below the speed-limit bound "
        << format_number(r.bound_value) << " beyond the search tolerance\n";
    return kExitNumerical;
  }
  return kExitOk;
}

int cmd_surface(Settings s, std::ostream& out, std::ostream& err) {
  check_common(s);
  if (s.format.empty()) s.format = "csv";
  check_format(s.format, {"csv", "json"});
  SurfaceOptions options;
  options.n_range = parse_range(s.n_range, "n-range");
  options.m_range = parse_range(s.m_range, "m-range");
  require(options.n_range.first >= 2, "--n-range must start at N >= 2");
  require(options.m_range.first >= 1, "--m-range must start at M >= 1");
  if (s.mode == "bound") {
    options.mode = SurfaceMode::kBound;
  } else if (s.mode == "mintime") {
    options.mode = SurfaceMode::kMintime;
  } else if (s.mode == "both") {
    options.mode = SurfaceMode::kBoth;
  } else {
    throw UsageError("--mode must be one of bound|mintime|both (got '" + s.mode + "')");
  }
  if (options.mode != SurfaceMode::kBound) check_grape(s);
  require(s.budget_seconds >= 0.0, "--budget-seconds must be non-negative");
  options.bound = bound_config(s);
  options.mintime = mintime_config(s);
  options.jobs = s.jobs;
  options.budget_seconds = s.budget_seconds;
  options.record_timing = s.timing;
  if (surface_grid(options.n_range, options.m_range).empty()) {
    throw UsageError("the ranges contain no grid point with 1 <= M <= N - 1");
  }

  const SurfaceOutcome outcome = run_surface(options);
  std::ostringstream body;
  if (s.format == "json") {
    body << records_to_json(outcome.records).dump(2) << '\n';
  } else {
    write_csv(outcome.records, body);
  }
  emit(s.out, body.str(), out);

  for (const auto& failure : outcome.failures) err << "error: " << failure << '\n';
  if (outcome.budget_exceeded) {
    err << "warning: budget of " << format_number(s.budget_seconds) << " s exceeded; "
        << outcome.skipped << " grid point(s) skipped, output is partial\n";
  }
  if (!outcome.failures.empty()) return kExitNumerical;
  if (outcome.budget_exceeded) return kExitBudget;
  return kExitOk;
}

int cmd_selftest(const Settings& s, std::ostream& out) {
  SelftestOptions options;
  options.seed = s.seed;
  options.drift_perturbation = s.drift_perturbation;
  std::ostringstream report;
  const bool passed = report_selftest(run_selftest(options), report);
  emit(s.out, report.str(), out);
  return passed ? kExitOk : kExitNumerical;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Settings s;
  CLI::App app{"Quantum speed limits for the N-level SWAP gate"};
  app.name("qsl");
  app.require_subcommand(1);

  std::map<CLI::App*, Bindings> bindings;
  auto add_instance = [&](CLI::App* sub) {
    bind_option(sub, bindings[sub], "n", s.n, "number of levels N (>= 2)");
    bind_option(sub, bindings[sub], "m", s.m, "number of controls M (1 <= M <= N - 1)");
  };
  auto add_bound = [&](CLI::App* sub) {
    auto& b = bindings[sub];
    bind_option(sub, b, "seed", s.seed, "random seed (default 0)");
    bind_option(sub, b, "restarts", s.restarts, "bound maximization starts (default 20)");
    bind_option(sub, b, "jobs", s.jobs, "worker threads (default 1)");
    bind_option(sub, b, "out", s.out, "write the report to this file instead of stdout");
    bind_flag(sub, b, "both-algorithms", s.both_algorithms,
              "also run L-BFGS from every start and keep the best");
    bind_flag(sub, b, "timing", s.timing, "include wall-clock times (output no longer reproducible)");
    sub->add_option("--config", s.config, "JSON file whose keys mirror the flag names");
  };
  auto add_grape = [&](CLI::App* sub) {
    auto& b = bindings[sub];
    bind_option(sub, b, "threshold", s.threshold, "gate error threshold (default 1e-4)");
    bind_option(sub, b, "slots", s.slots, "GRAPE time slots (default max(40, ceil(10 T)))");
    bind_option(sub, b, "grape-restarts", s.grape_restarts, "GRAPE restarts per duration (default 8)");
    bind_option(sub, b, "grape-iters", s.grape_iters, "GRAPE iterations per restart (default 500)");
    bind_option(sub, b, "t-rel-tol", s.t_rel_tol, "relative bisection tolerance (default 0.02)");
  };

  CLI::App* bound_cmd = app.add_subcommand("bound", "maximize the speed-limit bound for one (N, M)");
  add_instance(bound_cmd);
  add_bound(bound_cmd);
  bind_option(bound_cmd, bindings[bound_cmd], "format", s.format, "text|json (default text)");

  CLI::App* mintime_cmd =
      app.add_subcommand("mintime", "estimate the minimum SWAP time for one (N, M) with GRAPE");
  add_instance(mintime_cmd);
  add_bound(mintime_cmd);
  add_grape(mintime_cmd);
  bind_option(mintime_cmd, bindings[mintime_cmd], "format", s.format, "text|json (default text)");
  bind_option(mintime_cmd, bindings[mintime_cmd], "t-init", s.t_init,
       "first duration tried (default: the bound)");
  bind_option(mintime_cmd, bindings[mintime_cmd], "schedule-out", s.schedule_out,
       "write the pulse schedule found at t_min as JSON");

  CLI::App* surface_cmd = app.add_subcommand("surface", "sweep an (N, M) grid");
  add_bound(surface_cmd);
  add_grape(surface_cmd);
  bind_range(surface_cmd, bindings[surface_cmd], "n-range", s.n_range, "A:B (default 2:15)");
  bind_range(surface_cmd, bindings[surface_cmd], "m-range", s.m_range, "A:B (default 1:14)");
  bind_option(surface_cmd, bindings[surface_cmd], "mode", s.mode, "bound|mintime|both (default bound)");
  bind_option(surface_cmd, bindings[surface_cmd], "format", s.format, "csv|json (default csv)");
  bind_option(surface_cmd, bindings[surface_cmd], "budget-seconds", s.budget_seconds,
       "stop starting new grid points after this many seconds (0 = unlimited)");

  CLI::App* selftest_cmd = app.add_subcommand("selftest", "run the numerical invariant checks");
  bind_option(selftest_cmd, bindings[selftest_cmd], "seed", s.seed, "random seed (default 0)");
  bind_option(selftest_cmd, bindings[selftest_cmd], "out", s.out, "write the report to this file");
  bind_option(selftest_cmd, bindings[selftest_cmd], "inject-drift-perturbation", s.drift_perturbation,
       "test hook: perturb the drift to make the anchor checks fail");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    err << "usage error: " << e.what() << "\n" << "run 'qsl --help' for usage\n";
    return kExitUsage;
  }

  try {
    CLI::App* chosen = app.get_subcommands().front();
    if (!s.config.empty()) apply_config(s.config, bindings[chosen]);
    if (chosen == bound_cmd) return cmd_bound(s, out);
    if (chosen == mintime_cmd) return cmd_mintime(s, out, err);
    if (chosen == surface_cmd) return cmd_surface(s, out, err);
    return cmd_selftest(s, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InvalidArgument& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace qsl::cli
