#include "subratio/config_io.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <type_traits>

#include "subratio/error.hpp"
#include "subratio/signal_util.hpp"

namespace subratio {

using nlohmann::json;

namespace {

// Reads one JSON object, remembering which keys were consumed so leftovers can be rejected.
class Section {
 public:
  Section(const json* node, std::string path) : node_(node), path_(std::move(path)) {
    if (node_ && !node_->is_object()) throw ConfigError(path_ + ": expected an object");
  }

  bool has(const char* key) const { return node_ && node_->contains(key); }

  template <typename T>
  void get(const char* key, T& out) {
    if (!has(key)) return;
    used_.insert(key);
    const json& v = (*node_)[key];
    const std::string where = path_ + "." + key;
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError(where + ": expected true/false");
      out = v.get<bool>();
    } else if constexpr (std::is_integral_v<T> && std::is_unsigned_v<T>) {
      if (!v.is_number_unsigned()) throw ConfigError(where + ": expected a non-negative integer");
      out = v.get<T>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw ConfigError(where + ": expected an integer");
      out = v.get<T>();
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw ConfigError(where + ": expected a number");
      out = v.get<T>();
      if (!std::isfinite(out)) throw ConfigError(where + ": must be finite");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError(where + ": expected a string");
      out = v.get<std::string>();
    } else {
      static_assert(sizeof(T) == 0, "unsupported config field type");
    }
  }

  template <typename T>
  void get_optional(const char* key, std::optional<T>& out) {
    if (!has(key)) return;
    if ((*node_)[key].is_null()) {
      used_.insert(key);
      out.reset();
      return;
    }
    T v{};
    get(key, v);
    out = v;
  }

  Section sub(const char* key) {
    if (!has(key)) return Section(nullptr, path_ + "." + key);
    used_.insert(key);
    return Section(&(*node_)[key], path_ + "." + key);
  }

  const json* raw(const char* key) {
    if (!has(key)) return nullptr;
    used_.insert(key);
    return &(*node_)[key];
  }

  const std::string& path() const { return path_; }

  void finish() const {
    if (!node_) return;
    for (auto it = node_->begin(); it != node_->end(); ++it) {
      if (!used_.count(it.key())) throw ConfigError("unknown config key " + path_ + "." + it.key());
    }
  }

 private:
  const json* node_;
  std::string path_;
  std::set<std::string> used_;
};

BreathingPattern parse_pattern(const std::string& s, const std::string& where) {
  if (s == "sinusoid") return BreathingPattern::sinusoid;
  if (s == "chirp") return BreathingPattern::chirp;
  if (s == "step") return BreathingPattern::step;
  throw ConfigError(where + ": unknown breathing pattern '" + s + "'");
}

void read_ssnr(Section s, SsnrOptions& o) {
  std::string window = o.window == SpectralWindow::hann ? "hann" : "rectangular";
  s.get("window", window);
  if (window == "hann") {
    o.window = SpectralWindow::hann;
  } else if (window == "rectangular") {
    o.window = SpectralWindow::rectangular;
  } else {
    throw ConfigError(s.path() + ".window: expected hann or rectangular");
  }
  s.get("min_pad_factor", o.min_pad_factor);
  s.get("pow2_length", o.pow2_length);
  s.get("band_low_hz", o.band_low_hz);
  s.get("band_high_hz", o.band_high_hz);
  s.get("infinite_floor", o.infinite_floor);
  if (!(o.band_low_hz > 0 && o.band_high_hz > o.band_low_hz)) {
    throw ConfigError(s.path() + ": band edges must satisfy 0 < low < high");
  }
  s.finish();
}

void read_scenario(Section s, ScenarioConfig& c) {
  s.get("sample_rate_hz", c.sample_rate_hz);
  s.get("duration_s", c.duration_s);
  if (const json* paths = s.raw("static_paths")) {
    if (!paths->is_array()) throw ConfigError(s.path() + ".static_paths: expected an array");
    c.static_paths.clear();
    for (std::size_t i = 0; i < paths->size(); ++i) {
      Section p(&(*paths)[i], s.path() + ".static_paths[" + std::to_string(i) + "]");
      StaticPathConfig sp;
      p.get("amplitude", sp.amplitude);
      p.get("length_m", sp.length_m);
      p.finish();
      c.static_paths.push_back(sp);
    }
  }
  s.get("dynamic_amplitude", c.dynamic_amplitude);
  s.get("dynamic_base_length_m", c.dynamic_base_length_m);
  s.get("geometric_factor", c.geometric_factor);
  s.get("frequency_ripple", c.frequency_ripple);
  s.get("ripple_seed", c.ripple_seed);
  {
    Section r = s.sub("respiration");
    std::string pattern = "sinusoid";
    r.get("pattern", pattern);
    c.respiration.pattern = parse_pattern(pattern, r.path() + ".pattern");
    r.get("rate_bpm", c.respiration.rate_bpm);
    r.get("depth_m", c.respiration.depth_m);
    r.get("phase_rad", c.respiration.phase_rad);
    r.get("end_rate_bpm", c.respiration.end_rate_bpm);
    r.get("step_time_s", c.respiration.step_time_s);
    r.finish();
  }
  s.finish();
}

void read_impairments(Section s, ImpairmentConfig& c) {
  s.get("pbd_noise_std", c.pbd_noise_std);
  s.get("sfo_slope", c.sfo_slope);
  s.get("gaussian_noise_std", c.gaussian_noise_std);
  s.get("seed", c.seed);
  {
    Section f = s.sub("cfo");
    f.get("step_std_rad", c.cfo.step_std_rad);
    f.get("bound_rad", c.cfo.bound_rad);
    f.get("initial_rad", c.cfo.initial_rad);
    f.finish();
  }
  {
    Section i = s.sub("impulse");
    i.get("jump_rate_hz", c.impulse.jump_rate_hz);
    i.get("level_log_std", c.impulse.level_log_std);
    i.get("correlation", c.impulse.correlation);
    i.finish();
  }
  if (const json* arts = s.raw("artifacts")) {
    if (!arts->is_array()) throw ConfigError(s.path() + ".artifacts: expected an array");
    c.artifacts.clear();
    for (std::size_t i = 0; i < arts->size(); ++i) {
      Section a(&(*arts)[i], s.path() + ".artifacts[" + std::to_string(i) + "]");
      MotionArtifact m;
      a.get("start_s", m.start_s);
      a.get("duration_s", m.duration_s);
      a.get("phase_jump_rad", m.phase_jump_rad);
      a.finish();
      c.artifacts.push_back(m);
    }
  }
  s.finish();
  c.validate();
}

void read_guard(Section s, DenominatorGuard& g) {
  s.get("relative", g.relative);
  s.get("max_flagged_fraction", g.max_flagged_fraction);
  s.finish();
}

void read_pipeline(Section s, PipelineConfig& c) {
  s.get("phase_block", c.phase_block);
  s.get("gass_enabled", c.gass_enabled);
  s.get("reuse_solution", c.reuse_solution);
  s.get("reuse_tolerance", c.reuse_tolerance);
  {
    Section g = s.sub("segmentation");
    g.get("frame_s", c.segmentation.frame_s);
    g.get("window_frames", c.segmentation.window_frames);
    g.get("stride_frames", c.segmentation.stride_frames);
    g.get("motion_threshold_rad", c.segmentation.motion_threshold_rad);
    g.finish();
    if (c.segmentation.window_frames == 0 || c.segmentation.stride_frames == 0) {
      throw ConfigError(g.path() + ": window_frames and stride_frames must be >= 1");
    }
  }
  {
    Section r = s.sub("reference");
    r.get_optional("numerator", c.reference.numerator);
    r.get_optional("denominator", c.reference.denominator);
    r.finish();
  }
  {
    Section g = s.sub("gass");
    GassParams& p = c.gass;
    g.get("numerator_count", p.numerator_count);
    g.get("population", p.population);
    g.get("generations", p.generations);
    g.get("tournament", p.tournament);
    g.get("crossover_prob", p.crossover_prob);
    g.get("mutation_prob", p.mutation_prob);
    g.get("weight_sigma", p.weight_sigma);
    g.get("elite", p.elite);
    g.get("stagnation_limit", p.stagnation_limit);
    g.get("seed_pairs", p.seed_pairs);
    g.get("pair_pool", p.pair_pool);
    g.get("seed", p.seed);
    g.get("parallel", p.parallel);
    g.finish();
    p.validate();
  }
  {
    Section st = s.sub("streams");
    st.get("include_numerator_subcarriers", c.streams.include_numerator_subcarriers);
    st.finish();
  }
  {
    Section cb = s.sub("combiner");
    cb.get("gain_window", c.combiner.gain_window);
    cb.get("threshold", c.combiner.threshold);
    cb.get("normalize_by_gain", c.combiner.normalize_by_gain);
    cb.get("smoothing_window", c.combiner.smoothing_window);
    cb.get("parallel", c.combiner.parallel);
    std::string mode = c.combiner.smoothing == SmoothingMode::sliding ? "sliding" : "block";
    cb.get("smoothing", mode);
    if (mode == "sliding") {
      c.combiner.smoothing = SmoothingMode::sliding;
    } else if (mode == "block") {
      c.combiner.smoothing = SmoothingMode::block;
    } else {
      throw ConfigError(cb.path() + ".smoothing: expected sliding or block");
    }
    cb.finish();
    if (c.combiner.threshold < 0 || c.combiner.threshold > 1) {
      throw ConfigError(cb.path() + ".threshold must lie in [0, 1]");
    }
  }
  {
    Section p = s.sub("projection");
    p.get("grid_points", c.projection.grid_points);
    p.get("refine", c.projection.refine);
    p.finish();
    if (c.projection.grid_points == 0) throw ConfigError(p.path() + ".grid_points must be >= 1");
  }
  {
    Section w = s.sub("waveform");
    w.get("hampel_half_width", c.waveform.hampel_half_width);
    w.get("hampel_threshold", c.waveform.hampel_threshold);
    w.get("sg_length", c.waveform.sg_length);
    w.get("sg_order", c.waveform.sg_order);
    w.finish();
    if (c.waveform.sg_length != 0 && c.waveform.sg_length % 2 == 0) {
      throw ConfigError(w.path() + ".sg_length must be odd");
    }
    if (!(c.waveform.hampel_threshold > 0)) throw ConfigError(w.path() + ".hampel_threshold must be > 0");
  }
  {
    Section r = s.sub("rate");
    r.get("prominence_fraction", c.rate.prominence_fraction);
    r.get("min_spacing_fraction", c.rate.min_spacing_fraction);
    r.get("refine", c.rate.refine);
    r.get("band_tolerance_bpm", c.rate.band_tolerance_bpm);
    r.get("min_duration_s", c.rate.min_duration_s);
    r.finish();
  }
  {
    DenominatorGuard guard = c.gass.guard;
    read_guard(s.sub("guard"), guard);
    c.gass.guard = guard;
    c.streams.guard = guard;
  }
  {
    SsnrOptions so = c.gass.ssnr;
    read_ssnr(s.sub("ssnr"), so);
    c.gass.ssnr = so;
    c.combiner.ssnr = so;
    c.projection.ssnr = so;
  }
  s.finish();
}

void read_grid(const json* node, GridSpec& g) {
  if (!node) return;
  if (node->is_string()) {
    g.preset = node->get<std::string>();
  } else {
    Section s(node, "grid");
    s.get("preset", g.preset);
    std::string field = std::string(to_string(g.field));
    s.get("field", field);
    try {
      g.field = parse_ltf_field(field);
    } catch (const Error&) {
      throw ConfigError("grid.field: expected HT-LTF or L-LTF");
    }
    if (const json* idx = s.raw("indices")) {
      if (!idx->is_array()) throw ConfigError("grid.indices: expected an array of integers");
      g.indices.clear();
      for (const auto& v : *idx) {
        if (!v.is_number_integer()) throw ConfigError("grid.indices: expected integers");
        g.indices.push_back(v.get<int>());
      }
      if (!s.has("preset")) g.preset = "custom";
    }
    s.get("center_hz", g.center_hz);
    s.finish();
  }
  if (g.preset != "combined_40mhz" && g.preset != "ht_ltf_40mhz" && g.preset != "l_ltf_40mhz" &&
      g.preset != "custom") {
    throw ConfigError("grid: unknown preset '" + g.preset + "'");
  }
}

}  // namespace

AppConfig parse_config(const json& doc) {
  AppConfig c;
  Section root(&doc, "config");
  read_grid(root.raw("grid"), c.grid);
  read_scenario(root.sub("scenario"), c.scenario);
  read_impairments(root.sub("impairments"), c.impairments);
  read_pipeline(root.sub("pipeline"), c.pipeline);
  {
    Section b = root.sub("blindspot");
    b.get("positions", c.blindspot.positions);
    b.get("span_m", c.blindspot.span_m);
    b.get("tolerance_bpm", c.blindspot.tolerance_bpm);
    b.get("parallel", c.blindspot.parallel);
    b.finish();
  }
  {
    Section n = root.sub("snr_sweep");
    if (const json* levels = n.raw("noise_levels")) {
      if (!levels->is_array()) throw ConfigError("snr_sweep.noise_levels: expected an array");
      c.snr_sweep.noise_levels.clear();
      for (const auto& v : *levels) {
        if (!v.is_number()) throw ConfigError("snr_sweep.noise_levels: expected numbers");
        c.snr_sweep.noise_levels.push_back(v.get<double>());
      }
    }
    n.get("seeds", c.snr_sweep.seeds);
    n.get("tolerance_bpm", c.snr_sweep.tolerance_bpm);
    n.get("parallel", c.snr_sweep.parallel);
    n.get("include_phase_only", c.snr_sweep.include_phase_only);
    n.finish();
  }
  root.finish();
  return c;
}

AppConfig parse_config_text(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(doc);
}

AppConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InputFormatError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config_text(ss.str());
}

std::shared_ptr<const SubcarrierGrid> make_grid(const GridSpec& spec) {
  if (spec.preset == "combined_40mhz") {
    return std::make_shared<const SubcarrierGrid>(SubcarrierGrid::combined_40mhz(spec.center_hz));
  }
  if (spec.preset == "ht_ltf_40mhz") {
    return std::make_shared<const SubcarrierGrid>(SubcarrierGrid::ht_ltf_40mhz(spec.center_hz));
  }
  if (spec.preset == "l_ltf_40mhz") {
    return std::make_shared<const SubcarrierGrid>(SubcarrierGrid::l_ltf_40mhz(spec.center_hz));
  }
  if (spec.indices.empty()) throw ConfigError("grid: custom preset needs indices");
  return std::make_shared<const SubcarrierGrid>(
      SubcarrierGrid::from_physical_indices(spec.field, spec.indices, spec.center_hz));
}

void apply_seed(AppConfig& config, std::uint64_t seed) {
  config.impairments.seed = seed;
  config.pipeline.gass.seed = derive_seed(seed, 0x9a55);
}

BlindSpotConfig make_blindspot_config(const AppConfig& c) {
  BlindSpotConfig b;
  b.scenario = c.scenario;
  b.impairments = c.impairments;
  b.pipeline = c.pipeline;
  b.positions = c.blindspot.positions;
  b.span_m = c.blindspot.span_m;
  b.tolerance_bpm = c.blindspot.tolerance_bpm;
  b.parallel = c.blindspot.parallel;
  return b;
}

SnrSweepConfig make_snr_sweep_config(const AppConfig& c) {
  SnrSweepConfig s;
  s.scenario = c.scenario;
  s.impairments = c.impairments;
  s.pipeline = c.pipeline;
  s.noise_levels = c.snr_sweep.noise_levels;
  s.seeds = c.snr_sweep.seeds;
  s.tolerance_bpm = c.snr_sweep.tolerance_bpm;
  s.parallel = c.snr_sweep.parallel;
  s.include_phase_only = c.snr_sweep.include_phase_only;
  return s;
}

json to_json(const GassSolution& sol, const SubcarrierGrid& grid) {
  json weights = json::array();
  json numerator = json::array();
  json numerator_n = json::array();
  for (std::size_t i = 0; i < sol.genome.size(); ++i) {
    weights.push_back({{"re", sol.genome.weights[i].real()}, {"im", sol.genome.weights[i].imag()}});
    numerator.push_back(sol.genome.numerator[i]);
    numerator_n.push_back(grid[sol.genome.numerator[i]].physical_index);
  }
  json seeded = json::array();
  for (std::size_t i = 0; i < sol.seeded_pairs.size(); ++i) {
    seeded.push_back({{"numerator", sol.seeded_pairs[i].numerator.front()},
                      {"denominator", sol.seeded_pairs[i].denominator},
                      {"fitness", sol.seeded_fitness[i]}});
  }
  return {{"weights", weights},
          {"numerator", numerator},
          {"numerator_n", numerator_n},
          {"denominator", sol.genome.denominator},
          {"denominator_n", grid[sol.genome.denominator].physical_index},
          {"fitness", sol.fitness},
          {"generation_found", sol.generation_found},
          {"evaluations", sol.evaluations},
          {"history", sol.history},
          {"seeded_pairs", seeded}};
}

json to_json(const WindowResult& w, const SubcarrierGrid& grid) {
  json flags = json::array();
  if (!w.has_estimate()) flags.push_back(w.reason.empty() ? "no_estimate" : w.reason);
  if (w.reused_solution) flags.push_back("reused_solution");
  if (w.hampel_replacements > 0) flags.push_back("hampel_replaced");

  json j = {{"window_id", w.window_id},
            {"t_start", w.t_start_s},
            {"t_end", w.t_end_s},
            {"f_bpm", w.has_estimate() ? json(w.estimate.f_bpm) : json(nullptr)},
            {"confidence", w.estimate.confidence},
            {"flags", flags},
            {"status", std::string(to_string(w.estimate.status))},
            {"reason", w.reason},
            {"raw_bpm", w.estimate.raw_bpm},
            {"lag_samples", w.estimate.lag},
            {"k_p1", w.estimate.k_p1},
            {"k_p2", w.estimate.k_p2},
            {"projection_angle", w.projection_angle},
            {"streams_built", w.streams_built},
            {"streams_combined", w.streams_combined},
            {"hampel_replacements", w.hampel_replacements},
            {"ssnr",
             {{"gass", w.ssnr.gass},
              {"reference", w.ssnr.reference},
              {"combined", w.ssnr.combined},
              {"smoothed", w.ssnr.smoothed},
              {"projected", w.ssnr.projected},
              {"filtered", w.ssnr.filtered}}}};
  if (std::isfinite(w.truth_bpm)) {
    j["truth_bpm"] = w.truth_bpm;
    j["error_bpm"] = w.has_estimate() ? json(w.estimate.f_bpm - w.truth_bpm) : json(nullptr);
  }
  if (w.solution) j["gass"] = to_json(*w.solution, grid);
  return j;
}

json to_json(const EvaluationReport& report) {
  json j = json::object();
  if (!report.positions.empty()) {
    json ratios = json::object();
    for (Estimator e : kEstimators) {
      ratios[std::string(to_string(e))] = report.detectability_percent[static_cast<std::size_t>(e)];
    }
    j["detectability_percent"] = ratios;
    json failures = json::object();
    for (Estimator e : kEstimators) {
      json list = json::array();
      for (const auto& p : report.positions) {
        if (!p.tally[static_cast<std::size_t>(e)].detectable()) list.push_back(p.index);
      }
      failures[std::string(to_string(e))] = list;
    }
    j["undetectable_positions"] = failures;
    j["positions"] = report.positions.size();
  }
  if (!report.levels.empty()) {
    json levels = json::array();
    for (const auto& l : report.levels) {
      json row = {{"noise_std", l.noise_std}};
      for (Estimator e : kEstimators) {
        const auto& t = l.tally[static_cast<std::size_t>(e)];
        if (t.windows == 0) continue;
        row[std::string(to_string(e))] = {{"windows", t.windows},
                                          {"detected", t.detected},
                                          {"rate_percent", t.rate_percent()}};
      }
      levels.push_back(row);
    }
    j["levels"] = levels;
  }
  return j;
}

}  // namespace subratio
