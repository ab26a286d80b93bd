// Copyright 2026 The bellab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// bellab: simulate, analyze and bound Bell-test runs.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "bellab/error.hpp"
#include "bellab/event_model.hpp"
#include "bellab/oracle.hpp"
#include "bellab/pair_source.hpp"
#include "bellab/report.hpp"
#include "bellab/run_config.hpp"

namespace fs = std::filesystem;
using namespace bellab;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr const char* kOutDirEnv = "BELLAB_OUT_DIR";

enum Exit : int { kOk = 0, kUsage = 1, kIo = 2, kInternal = 3 };

fs::path out_dir() {
  const char* env = std::getenv(kOutDirEnv);
  return env && *env ? fs::path(env) : fs::path(".");
}

// Relative paths from a config land in the default output directory; explicit --out is used as given.
fs::path resolve_out(const std::string& flag, const std::string& from_config, const std::string& fallback) {
  if (!flag.empty()) return flag;
  const fs::path p = from_config.empty() ? fs::path(fallback) : fs::path(from_config);
  return p.is_absolute() ? p : out_dir() / p;
}

void write_text(const fs::path& path, const std::string& data) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory '" + path.parent_path().string() + "': " + ec.message());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  out.flush();
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string hex(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

struct SimulateArgs {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
};

int cmd_simulate(const SimulateArgs& args) {
  auto rc = load_run_config(args.config);
  if (args.seed) {
    rc.experiment.seed = *args.seed;
    rc.seed_given = true;
  }
  if (!rc.seed_given) throw ConfigError("run.seed", "a seed is required (config or --seed)");
  if (args.threads) rc.experiment.threads = *args.threads;
  validate(rc.experiment);

  const auto path = resolve_out(args.out, rc.log_path, fs::path(args.config).stem().string() + ".csv");
  const auto log = run_experiment(rc.experiment);
  const std::string data = encode_log(log);
  write_text(path, data);

  std::ostringstream m;
  m << "bellab_version=" << kVersion << '\n';
  m << "config=" << args.config << '\n';
  m << "config_hash=" << hex(fnv1a64(rc.canonical)) << '\n';
  m << "seed=" << rc.experiment.seed << '\n';
  m << "threads=" << rc.experiment.threads << '\n';
  m << "log=" << path.string() << '\n';
  m << "log_hash=" << hex(fnv1a64(data)) << '\n';
  m << "events=" << log.events.size() << '\n';
  write_text(path.string() + ".manifest", m.str());

  std::cout << "wrote " << log.events.size() << " events to " << path.string() << " (seed " << rc.experiment.seed
            << ", log hash " << hex(fnv1a64(data)) << ")\n";
  return kOk;
}

struct AnalyzeArgs {
  std::string config;
  std::string log;
  std::string out;
};

int cmd_analyze(const AnalyzeArgs& args) {
  const auto rc = load_run_config(args.config);
  EventLog log;
  try {
    log = read_log_file(args.log);
  } catch (const ParseError& e) {
    throw IoError("malformed log '" + args.log + "': " + e.what());
  } catch (const ValidationError& e) {
    throw IoError("invalid log '" + args.log + "': " + e.what());
  }
  const auto report = analyze_log(log, rc.coincidence, rc.analysis);
  const auto path = resolve_out(args.out, rc.report_path, fs::path(args.log).stem().string() + ".report");
  write_text(path, format_report_kv(report));
  const auto text = format_report_text(report);
  write_text(path.string() + ".txt", text);
  std::cout << text;
  return kOk;
}

struct OracleArgs {
  std::string task;
  std::string out;
  int points = 20;
  int slots = 6;
  int window = 1;
  double lo = 0;
  std::uint64_t seed = 1;
  int starts = 64;
};

int cmd_oracle(const OracleArgs& args) {
  OracleOutput res;
  if (args.task == "efficiency-curve") {
    res = oracle_efficiency_curve(args.points, args.lo > 0 ? args.lo : 0.5);
  } else if (args.task == "coincidence-curve") {
    res = oracle_coincidence_curve(args.slots, args.window, args.points, args.lo > 0 ? args.lo : 0.6);
  } else {
    MultiStartOptions opt;
    opt.seed = args.seed;
    opt.starts = args.starts;
    res = oracle_eberhard(args.points, opt);
  }
  const fs::path dir = args.out.empty() ? out_dir() / args.task : fs::path(args.out);
  write_text(dir / "curve.csv", res.csv);
  for (const auto& [name, data] : res.witnesses) write_text(dir / name, data);
  std::cout << res.csv;
  std::cout << "wrote curve and " << res.witnesses.size() << " files to " << dir.string() << '\n';
  return kOk;
}

int cmd_report(const std::vector<std::string>& files, const std::string& out) {
  std::vector<std::pair<std::string, ReportEntries>> reports;
  for (const auto& f : files) {
    try {
      reports.emplace_back(fs::path(f).stem().string(), parse_report_kv(read_text(f)));
    } catch (const ParseError& e) {
      throw IoError("malformed report '" + f + "': " + e.what());
    }
  }
  const auto text = merge_reports(reports);
  if (!out.empty()) write_text(out, text);
  std::cout << text;
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bellab: Bell-test simulation and loophole analysis"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "run a configured experiment and write its event log");
  s->add_option("--config", sim.config, "run config (section.key = value)")->required()->check(CLI::ExistingFile);
  s->add_option("--seed", sim.seed, "override run.seed");
  s->add_option("--out", sim.out, "event log path");
  s->add_option("--threads", sim.threads, "worker threads; output does not depend on it");

  AnalyzeArgs ana;
  auto* a = app.add_subcommand("analyze", "pair, tabulate and test an event log");
  a->add_option("--config", ana.config, "analysis config")->required()->check(CLI::ExistingFile);
  a->add_option("--log", ana.log, "event log")->required();
  a->add_option("--out", ana.out, "report path (key=value); text form goes to <out>.txt");

  OracleArgs ora;
  auto* o = app.add_subcommand("oracle", "optimize over local strategies and emit curves and witnesses");
  o->add_option("task", ora.task, "efficiency-curve | coincidence-curve | eberhard")
      ->required()
      ->check(CLI::IsMember({"efficiency-curve", "coincidence-curve", "eberhard"}));
  o->add_option("--points", ora.points, "grid points")->check(CLI::Range(2, 10000));
  o->add_option("--slots", ora.slots, "delay slots d (coincidence-curve)")->check(CLI::Range(2, 8));
  o->add_option("--window", ora.window, "window half-width w in slots (coincidence-curve)")->check(CLI::Range(0, 7));
  o->add_option("--from", ora.lo, "lower end of the eta or gamma grid");
  o->add_option("--seed", ora.seed, "multi-start seed (eberhard)");
  o->add_option("--starts", ora.starts, "multi-start count (eberhard)")->check(CLI::Range(1, 100000));
  o->add_option("--out", ora.out, "output directory");

  std::vector<std::string> files;
  std::string report_out;
  auto* r = app.add_subcommand("report", "merge key=value reports into one comparison table");
  r->add_option("reports", files, "report files")->required();
  r->add_option("--out", report_out, "write the table here as well");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*s) return cmd_simulate(sim);
    if (*a) return cmd_analyze(ana);
    if (*o) return cmd_oracle(ora);
    if (*r) return cmd_report(files, report_out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kUsage;
  } catch (const ParseError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kUsage;
  } catch (const MissingDataError& e) {
    std::cerr << "missing data: " << e.what() << '\n';
    return kUsage;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kInternal;
}
