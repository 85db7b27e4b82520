#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "beliefroute/ekf.hpp"
#include "beliefroute/montecarlo.hpp"
#include "beliefroute/planner.hpp"

namespace beliefroute {

/// Everything one pipeline invocation needs. Loaded from a JSON config file;
/// every key can be overridden from the command line.
struct RunConfig {
  std::filesystem::path map_path;
  std::uint64_t seed = 0;
  std::size_t nodes = 12;
  std::size_t knn = 5;
  double forward_bias = 3.0;
  std::size_t sampling_attempts = 10'000;
  std::size_t candidates = 80;
  double cruise = 0.5;
  double rho = 0.0;    // max flight time, s
  double delta = 10.0;  // PEC threshold, m^2
  PecNorm pec_norm = PecNorm::kSpectral;
  RateSchedule rates;
  NoiseConfig noise;
  JitterConfig jitter;
  MeasurementOptions measurement;  // mode, dropout, outliers
  std::size_t mc_runs = 10;
  std::vector<std::string> selections{"best", "worst", "second_best",
                                      "second_worst"};
  std::filesystem::path output_dir = "out";
  unsigned threads = 0;  // 0 = all cores

  KinematicProfile kinematics() const;
  PlannerOptions planner_options() const;
  void validate() const;
};

/// Parses a config document. Relative paths resolve against `base_dir`.
/// `seed` and `rho_s` are required.
RunConfig config_from_json(const nlohmann::json& doc,
                           const std::filesystem::path& base_dir);
nlohmann::json config_to_json(const RunConfig& cfg);

/// Applies "dotted.key=value" overrides to a config document. The value is
/// parsed as JSON when possible, otherwise taken as a string.
void apply_overrides(nlohmann::json& doc,
                     const std::vector<std::string>& overrides);

RunConfig load_config(const std::filesystem::path& path,
                      const std::vector<std::string>& overrides = {});

const char* to_string(PecNorm norm);
const char* to_string(MeasurementMode mode);
MeasurementMode parse_mode(const std::string& text);

}  // namespace beliefroute
