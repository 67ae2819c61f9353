#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "subratio/gass.hpp"
#include "subratio/grid.hpp"
#include "subratio/pipeline.hpp"
#include "subratio/scenario.hpp"
#include "subratio/sweeps.hpp"

// JSON configuration files (schema in docs/config.md) and JSON renderings of
// results. Unknown keys are rejected so that typos surface as config errors.

namespace subratio {

struct GridSpec {
  std::string preset = "combined_40mhz";  // combined_40mhz | ht_ltf_40mhz | l_ltf_40mhz | custom
  LtfField field = LtfField::ht_ltf;      // custom grids only
  std::vector<int> indices;               // custom grids only
  double center_hz = kChannel11Ht40CenterHz;
};

struct BlindSpotSettings {
  std::size_t positions = 32;
  double span_m = 0;
  double tolerance_bpm = 1.0;
  bool parallel = true;
};

struct SnrSweepSettings {
  std::vector<double> noise_levels{0.0, 0.05, 0.1, 0.2, 0.4};
  std::size_t seeds = 10;
  double tolerance_bpm = 1.0;
  bool parallel = true;
  bool include_phase_only = false;
};

struct AppConfig {
  GridSpec grid;
  ScenarioConfig scenario;
  ImpairmentConfig impairments;
  PipelineConfig pipeline;
  BlindSpotSettings blindspot;
  SnrSweepSettings snr_sweep;
};

/// Throws ConfigError on unknown keys, wrong types or invalid values.
AppConfig parse_config(const nlohmann::json& doc);
AppConfig parse_config_text(std::string_view text);
/// Throws InputFormatError when the file is missing or not JSON.
AppConfig load_config(const std::filesystem::path& path);

std::shared_ptr<const SubcarrierGrid> make_grid(const GridSpec& spec);

/// One master seed drives the impairment draws and the search.
void apply_seed(AppConfig& config, std::uint64_t seed);

BlindSpotConfig make_blindspot_config(const AppConfig& config);
SnrSweepConfig make_snr_sweep_config(const AppConfig& config);

nlohmann::json to_json(const GassSolution& solution, const SubcarrierGrid& grid);
/// One estimate record: window_id, t_start, f_bpm (null unless estimated),
/// confidence, flags, plus stage SSNRs and the selected genome.
nlohmann::json to_json(const WindowResult& window, const SubcarrierGrid& grid);
nlohmann::json to_json(const EvaluationReport& report);

}  // namespace subratio
