#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "subratio/config_io.hpp"
#include "subratio/csi_sim.hpp"
#include "subratio/error.hpp"
#include "subratio/gass.hpp"
#include "subratio/pipeline.hpp"
#include "subratio/scenario.hpp"
#include "subratio/sweeps.hpp"
#include "subratio/trace_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace subratio;

namespace {

struct CommonArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = "out";
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config, "JSON configuration file (defaults when omitted)");
  cmd->add_option("--seed", args.seed, "master seed for impairments and the search");
  cmd->add_option("--out", args.out, "output directory")->capture_default_str();
}

AppConfig load(const CommonArgs& args) {
  AppConfig cfg = args.config.empty() ? AppConfig{} : load_config(args.config);
  if (args.seed) apply_seed(cfg, *args.seed);
  return cfg;
}

fs::path prepare_out(const CommonArgs& args) {
  const fs::path dir(args.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
  return dir;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot write " + path.string());
  return os;
}

void write_json(const fs::path& path, const json& j) {
  auto os = open_out(path);
  os << j.dump(2) << '\n';
}

TruthFn scenario_truth(const ScenarioConfig& sc) {
  return [sc](double t0, double t1) { return mean_rate_bpm(sc.respiration, t0, t1, sc.duration_s); };
}

CsiTrace obtain_trace(const AppConfig& cfg, const std::string& trace_path) {
  if (!trace_path.empty()) return read_trace_file(trace_path);
  return simulate(cfg.scenario, cfg.impairments, make_grid(cfg.grid));
}

int cmd_simulate(const CommonArgs& args) {
  const AppConfig cfg = load(args);
  const fs::path dir = prepare_out(args);
  const CsiTrace trace = simulate(cfg.scenario, cfg.impairments, make_grid(cfg.grid));
  write_trace_file(dir / "trace.csv", trace);
  write_json(dir / "summary.json", {{"frames", trace.frame_count()},
                                    {"subcarriers", trace.subcarrier_count()},
                                    {"sample_rate_hz", trace.sample_rate_hz()},
                                    {"impairment_seed", cfg.impairments.seed}});
  std::cout << "wrote " << trace.frame_count() << " frames x " << trace.subcarrier_count()
            << " subcarriers to " << (dir / "trace.csv").string() << '\n';
  return 0;
}

int cmd_run(const CommonArgs& args, const std::string& trace_path) {
  const AppConfig cfg = load(args);
  const fs::path dir = prepare_out(args);
  const CsiTrace raw = obtain_trace(cfg, trace_path);
  const TruthFn truth = trace_path.empty() ? scenario_truth(cfg.scenario) : TruthFn{};
  const PipelineResult result = run_pipeline(raw, cfg.pipeline, truth);
  if (result.windows.empty()) {
    throw NoWindowError("no window of " + std::to_string(cfg.pipeline.segmentation.window_frames) +
                        " consecutive motion-free frames in the trace");
  }

  auto jsonl = open_out(dir / "estimates.jsonl");
  auto waves = open_out(dir / "waveforms.csv");
  waves << "window_id,k,t_s,value\n";
  std::size_t estimated = 0;
  std::size_t scored = 0;
  std::size_t detected = 0;
  for (const auto& w : result.windows) {
    jsonl << to_json(w, raw.grid()).dump() << '\n';
    const double rate = result.effective_rate_hz;
    for (std::size_t k = 0; k < w.waveform.size(); ++k) {
      char buf[96];
      std::snprintf(buf, sizeof buf, ",%zu,%.17g,%.17g\n", k, w.t_start_s + static_cast<double>(k) / rate,
                    w.waveform[k]);
      waves << w.window_id << buf;
    }
    if (w.has_estimate()) ++estimated;
    if (std::isfinite(w.truth_bpm)) {
      ++scored;
      if (w.has_estimate() && std::abs(w.estimate.f_bpm - w.truth_bpm) < cfg.snr_sweep.tolerance_bpm) {
        ++detected;
      }
    }
  }
  json summary = {{"windows", result.windows.size()},
                  {"estimated", estimated},
                  {"phase_block", result.phase_block},
                  {"effective_rate_hz", result.effective_rate_hz},
                  {"motion_frames", std::count(result.plan.accepted.begin(), result.plan.accepted.end(), false)}};
  if (scored > 0) {
    summary["detection_rate_percent"] = 100.0 * static_cast<double>(detected) / static_cast<double>(scored);
  }
  write_json(dir / "summary.json", summary);
  std::cout << estimated << " of " << result.windows.size() << " windows estimated\n";
  return 0;
}

int cmd_blindspot(const CommonArgs& args) {
  const AppConfig cfg = load(args);
  const fs::path dir = prepare_out(args);
  const EvaluationReport report = blind_spot_sweep(make_blindspot_config(cfg), *make_grid(cfg.grid));
  {
    auto os = open_out(dir / "blindspot.csv");
    write_blindspot_csv(os, report);
  }
  write_json(dir / "summary.json", to_json(report));
  for (Estimator e : kEstimators) {
    std::cout << to_string(e) << ": " << report.detectability_percent[static_cast<std::size_t>(e)]
              << "% detectable\n";
  }
  return 0;
}

int cmd_snr(const CommonArgs& args) {
  const AppConfig cfg = load(args);
  const fs::path dir = prepare_out(args);
  const EvaluationReport report = snr_sweep(make_snr_sweep_config(cfg), *make_grid(cfg.grid));
  {
    auto os = open_out(dir / "snr.csv");
    write_snr_csv(os, report);
  }
  write_json(dir / "summary.json", to_json(report));
  for (const auto& l : report.levels) {
    std::cout << "noise " << l.noise_std << ": "
              << l.tally[static_cast<std::size_t>(Estimator::full)].rate_percent() << "% detected\n";
  }
  return 0;
}

int cmd_gass_audit(const CommonArgs& args, const std::string& trace_path, std::size_t window_index) {
  const AppConfig cfg = load(args);
  const fs::path dir = prepare_out(args);
  const CsiTrace raw = obtain_trace(cfg, trace_path);
  const std::size_t block = resolve_phase_block(cfg.pipeline, raw.sample_rate_hz());
  if (raw.frame_count() < block) throw NoWindowError("trace shorter than one averaging block");
  const CsiTrace averaged = average_phase_blocks(raw, block);
  const WindowPlan plan = segment(averaged, cfg.pipeline.segmentation, cfg.pipeline.reference);
  if (window_index >= plan.window_starts.size()) {
    throw NoWindowError("window " + std::to_string(window_index) + " requested but only " +
                        std::to_string(plan.window_starts.size()) + " windows exist");
  }
  const CsiTrace window =
      averaged.slice(plan.window_starts[window_index] * plan.frame_length, plan.window_length);
  const GassSolution sol = optimize(window, cfg.pipeline.gass);

  {
    auto os = open_out(dir / "gass_history.csv");
    os << "generation,best_fitness\n";
    for (std::size_t g = 0; g < sol.history.size(); ++g) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%zu,%.17g\n", g, sol.history[g]);
      os << buf;
    }
  }
  json j = to_json(sol, window.grid());
  j["window_id"] = plan.window_starts[window_index];
  j["t_start"] = window.timestamp(0);
  write_json(dir / "solution.json", j);
  std::cout << "best fitness " << sol.fitness << " after " << sol.history.size() - 1
            << " generations (" << sol.evaluations << " evaluations)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Respiration rate estimation from cross-subcarrier CSI ratios"};
  app.require_subcommand(1);

  CommonArgs sim_args, run_args, blind_args, snr_args, audit_args;
  std::string run_trace, audit_trace;
  std::size_t audit_window = 0;

  auto* sim = app.add_subcommand("simulate", "simulate a scenario and write trace.csv");
  add_common(sim, sim_args);
  auto* run = app.add_subcommand("run", "estimate the breathing rate per window (estimates.jsonl)");
  add_common(run, run_args);
  run->add_option("--trace", run_trace, "trace CSV; the configured scenario is simulated when omitted");
  auto* blind = app.add_subcommand("sweep-blindspot", "detectability versus target position");
  add_common(blind, blind_args);
  auto* snr = app.add_subcommand("sweep-snr", "detection rate versus noise level");
  add_common(snr, snr_args);
  auto* audit = app.add_subcommand("gass-audit", "run the subcarrier search on one window and dump its history");
  add_common(audit, audit_args);
  audit->add_option("--trace", audit_trace, "trace CSV; the configured scenario is simulated when omitted");
  audit->add_option("--window", audit_window, "index of the window to search")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*sim) return cmd_simulate(sim_args);
    if (*run) return cmd_run(run_args, run_trace);
    if (*blind) return cmd_blindspot(blind_args);
    if (*snr) return cmd_snr(snr_args);
    if (*audit) return cmd_gass_audit(audit_args, audit_trace, audit_window);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
