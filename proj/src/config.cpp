#include "beliefroute/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "beliefroute/errors.hpp"

namespace beliefroute {
namespace {

using nlohmann::json;

[[noreturn]] void config_error(const std::string& what) {
  throw ParseError(ErrorCategory::kConfig, "config: " + what);
}

template <typename T>
T get_or(const json& node, const char* key, T fallback) {
  if (!node.contains(key)) return fallback;
  try {
    return node.at(key).get<T>();
  } catch (const json::exception&) {
    config_error(std::string("bad value for '") + key + "'");
  }
}

template <int N>
Eigen::Matrix<double, N, N> read_matrix(const json& node, const char* key,
                                        const Eigen::Matrix<double, N, N>& fallback) {
  if (!node.contains(key)) return fallback;
  const auto& arr = node.at(key);
  Eigen::Matrix<double, N, N> m;
  if (arr.is_array() && arr.size() == static_cast<std::size_t>(N * N)) {
    for (int i = 0; i < N * N; ++i) {
      if (!arr[i].is_number()) config_error(std::string(key) + " must be numeric");
      m(i / N, i % N) = arr[i].get<double>();  // row-major
    }
    return m;
  }
  if (arr.is_array() && arr.size() == static_cast<std::size_t>(N)) {
    m.setZero();
    for (int i = 0; i < N; ++i) {
      if (!arr[i].is_number()) config_error(std::string(key) + " must be numeric");
      m(i, i) = arr[i].get<double>();
    }
    return m;
  }
  config_error(std::string(key) + " must hold " + std::to_string(N * N) +
               " (row-major) or " + std::to_string(N) + " (diagonal) numbers");
}

template <int N>
json matrix_json(const Eigen::Matrix<double, N, N>& m) {
  json arr = json::array();
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) arr.push_back(m(i, j));
  }
  return arr;
}

double read_rho(const json& doc) {
  if (!doc.contains("rho_s")) {
    config_error("'rho_s' (maximum flight time, seconds) is required");
  }
  const auto& v = doc.at("rho_s");
  if (v.is_string() && v.get<std::string>() == "inf") {
    return std::numeric_limits<double>::infinity();
  }
  if (!v.is_number()) config_error("'rho_s' must be a number or \"inf\"");
  return v.get<double>();
}

}  // namespace

const char* to_string(PecNorm norm) {
  return norm == PecNorm::kFrobenius ? "frobenius" : "spectral";
}

const char* to_string(MeasurementMode mode) {
  return mode == MeasurementMode::kPerfect ? "perfect" : "noisy";
}

MeasurementMode parse_mode(const std::string& text) {
  if (text == "perfect") return MeasurementMode::kPerfect;
  if (text == "noisy") return MeasurementMode::kNoisy;
  config_error("unknown mode '" + text + "' (expected noisy or perfect)");
}

KinematicProfile RunConfig::kinematics() const {
  KinematicProfile k;
  k.cruise = cruise;
  return k;
}

PlannerOptions RunConfig::planner_options() const {
  PlannerOptions o;
  o.kinematics = kinematics();
  o.rates = rates;
  o.noise = noise;
  o.noise.ts = rates.ts();
  o.norm = pec_norm;
  return o;
}

void RunConfig::validate() const {
  auto fail = [](const std::string& what) {
    throw ValidationError(ErrorCategory::kConfig, "config: " + what);
  };
  if (nodes < 2) fail("nodes must be >= 2");
  if (knn < 1) fail("knn must be >= 1");
  if (candidates < 1) fail("candidates must be >= 1");
  if (mc_runs < 1) fail("mc_runs must be >= 1");
  if (sampling_attempts < 1) fail("sampling_attempts must be >= 1");
  if (!(forward_bias >= 1.0)) fail("forward_bias must be >= 1");
  if (!(cruise > 0.0)) fail("cruise_mps must be > 0");
  if (!(rho > 0.0)) fail("rho_s must be > 0");
  if (!(delta > 0.0)) fail("delta_m2 must be > 0");
  if (!(measurement.dropout >= 0.0 && measurement.dropout <= 1.0)) {
    fail("dropout must be in [0, 1]");
  }
  if (!(measurement.outlier_probability >= 0.0 &&
        measurement.outlier_probability <= 1.0)) {
    fail("outliers.probability must be in [0, 1]");
  }
  if (!(jitter.cross_track_sigma >= 0.0 && jitter.speed_sigma >= 0.0 &&
        jitter.time_constant > 0.0)) {
    fail("jitter sigmas must be >= 0 and time constant > 0");
  }
  rates.validate();
  noise.validate();
}

RunConfig config_from_json(const json& doc,
                           const std::filesystem::path& base_dir) {
  if (!doc.is_object()) config_error("document must be an object");
  RunConfig cfg;
  if (!doc.contains("map")) config_error("'map' (map file path) is required");
  cfg.map_path = get_or<std::string>(doc, "map", "");
  if (cfg.map_path.is_relative()) cfg.map_path = base_dir / cfg.map_path;
  if (!doc.contains("seed")) config_error("'seed' is required");
  cfg.seed = get_or<std::uint64_t>(doc, "seed", 0);
  cfg.nodes = get_or<std::size_t>(doc, "nodes", cfg.nodes);
  cfg.knn = get_or<std::size_t>(doc, "knn", cfg.knn);
  cfg.forward_bias = get_or<double>(doc, "forward_bias", cfg.forward_bias);
  cfg.sampling_attempts =
      get_or<std::size_t>(doc, "sampling_attempts", cfg.sampling_attempts);
  cfg.candidates = get_or<std::size_t>(doc, "candidates", cfg.candidates);
  cfg.cruise = get_or<double>(doc, "cruise_mps", cfg.cruise);
  cfg.rho = read_rho(doc);
  cfg.delta = get_or<double>(doc, "delta_m2", cfg.delta);
  cfg.mc_runs = get_or<std::size_t>(doc, "mc_runs", cfg.mc_runs);
  cfg.threads = get_or<unsigned>(doc, "threads", cfg.threads);
  if (doc.contains("output_dir")) {
    cfg.output_dir = get_or<std::string>(doc, "output_dir", "out");
  }

  const auto norm = get_or<std::string>(doc, "pec_norm", "spectral");
  if (norm == "spectral") {
    cfg.pec_norm = PecNorm::kSpectral;
  } else if (norm == "frobenius") {
    cfg.pec_norm = PecNorm::kFrobenius;
  } else {
    config_error("pec_norm must be 'spectral' or 'frobenius'");
  }

  if (doc.contains("selections")) {
    cfg.selections = get_or<std::vector<std::string>>(doc, "selections", {});
  }

  if (doc.contains("rates")) {
    const auto& r = doc.at("rates");
    cfg.rates.predict_hz = get_or<double>(r, "predict_hz", cfg.rates.predict_hz);
    cfg.rates.alt_hz = get_or<double>(r, "alt_hz", cfg.rates.alt_hz);
    cfg.rates.uwb_hz = get_or<double>(r, "uwb_hz", cfg.rates.uwb_hz);
    cfg.rates.cam_hz = get_or<double>(r, "cam_hz", cfg.rates.cam_hz);
    cfg.rates.lidar_hz = get_or<double>(r, "lidar_hz", cfg.rates.lidar_hz);
  }

  if (doc.contains("noise")) {
    const auto& n = doc.at("noise");
    cfg.noise.Q = read_matrix<6>(n, "Q", cfg.noise.Q);
    cfg.noise.r_alt = get_or<double>(n, "r_alt", cfg.noise.r_alt);
    cfg.noise.r_uwb = get_or<double>(n, "r_uwb", cfg.noise.r_uwb);
    cfg.noise.R_cam = read_matrix<3>(n, "R_cam", cfg.noise.R_cam);
    cfg.noise.R_lidar = read_matrix<3>(n, "R_lidar", cfg.noise.R_lidar);
    if (n.contains("gamma")) {
      const auto& g = n.at("gamma");
      const auto model = get_or<std::string>(g, "model", "inverse_square");
      if (model == "inverse_square") {
        cfg.noise.gamma_model.kind = GammaModel::Kind::kInverseSquare;
      } else if (model == "constant") {
        cfg.noise.gamma_model.kind = GammaModel::Kind::kConstant;
      } else {
        config_error("noise.gamma.model must be 'inverse_square' or 'constant'");
      }
      auto& gm = cfg.noise.gamma_model;
      gm.reference_range =
          get_or<double>(g, "reference_range_m", gm.reference_range);
      gm.max_gamma = get_or<double>(g, "max", gm.max_gamma);
      gm.constant = get_or<double>(g, "value", gm.constant);
    }
  }
  cfg.noise.ts = cfg.rates.ts();

  if (doc.contains("jitter")) {
    const auto& j = doc.at("jitter");
    cfg.jitter.cross_track_sigma =
        get_or<double>(j, "cross_track_sigma_m", cfg.jitter.cross_track_sigma);
    cfg.jitter.speed_sigma =
        get_or<double>(j, "speed_sigma_mps", cfg.jitter.speed_sigma);
    cfg.jitter.time_constant =
        get_or<double>(j, "time_constant_s", cfg.jitter.time_constant);
  }

  cfg.measurement.mode = parse_mode(get_or<std::string>(doc, "mode", "noisy"));
  cfg.measurement.dropout =
      get_or<double>(doc, "dropout", cfg.measurement.dropout);
  if (doc.contains("outliers")) {
    const auto& o = doc.at("outliers");
    cfg.measurement.outliers = get_or<bool>(o, "enabled", false);
    cfg.measurement.outlier_probability =
        get_or<double>(o, "probability", cfg.measurement.outlier_probability);
    cfg.measurement.outlier_scale =
        get_or<double>(o, "scale", cfg.measurement.outlier_scale);
  }

  cfg.validate();
  return cfg;
}

json config_to_json(const RunConfig& cfg) {
  const auto& gm = cfg.noise.gamma_model;
  json gamma = {
      {"model", gm.kind == GammaModel::Kind::kConstant ? "constant"
                                                       : "inverse_square"},
      {"reference_range_m", gm.reference_range},
      {"max", gm.max_gamma},
      {"value", gm.constant}};
  json rho = std::isfinite(cfg.rho) ? json(cfg.rho) : json("inf");
  return {
      {"map", cfg.map_path.string()},
      {"seed", cfg.seed},
      {"nodes", cfg.nodes},
      {"knn", cfg.knn},
      {"forward_bias", cfg.forward_bias},
      {"sampling_attempts", cfg.sampling_attempts},
      {"candidates", cfg.candidates},
      {"cruise_mps", cfg.cruise},
      {"rho_s", rho},
      {"delta_m2", cfg.delta},
      {"pec_norm", to_string(cfg.pec_norm)},
      {"mc_runs", cfg.mc_runs},
      {"selections", cfg.selections},
      {"output_dir", cfg.output_dir.string()},
      {"threads", cfg.threads},
      {"rates",
       {{"predict_hz", cfg.rates.predict_hz},
        {"alt_hz", cfg.rates.alt_hz},
        {"uwb_hz", cfg.rates.uwb_hz},
        {"cam_hz", cfg.rates.cam_hz},
        {"lidar_hz", cfg.rates.lidar_hz}}},
      {"noise",
       {{"Q", matrix_json<6>(cfg.noise.Q)},
        {"r_alt", cfg.noise.r_alt},
        {"r_uwb", cfg.noise.r_uwb},
        {"R_cam", matrix_json<3>(cfg.noise.R_cam)},
        {"R_lidar", matrix_json<3>(cfg.noise.R_lidar)},
        {"gamma", gamma}}},
      {"jitter",
       {{"cross_track_sigma_m", cfg.jitter.cross_track_sigma},
        {"speed_sigma_mps", cfg.jitter.speed_sigma},
        {"time_constant_s", cfg.jitter.time_constant}}},
      {"mode", to_string(cfg.measurement.mode)},
      {"dropout", cfg.measurement.dropout},
      {"outliers",
       {{"enabled", cfg.measurement.outliers},
        {"probability", cfg.measurement.outlier_probability},
        {"scale", cfg.measurement.outlier_scale}}},
  };
}

void apply_overrides(json& doc, const std::vector<std::string>& overrides) {
  for (const auto& item : overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      config_error("override '" + item + "' must look like key.path=value");
    }
    const std::string key = item.substr(0, eq);
    const std::string text = item.substr(eq + 1);
    json value = json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (value.is_discarded()) value = text;

    json* node = &doc;
    std::size_t start = 0;
    for (;;) {
      const auto dot = key.find('.', start);
      const std::string part = key.substr(start, dot - start);
      if (part.empty()) config_error("override key '" + key + "' is malformed");
      if (!node->is_object()) *node = json::object();
      if (dot == std::string::npos) {
        (*node)[part] = value;
        break;
      }
      node = &(*node)[part];
      start = dot + 1;
    }
  }
}

RunConfig load_config(const std::filesystem::path& path,
                      const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) config_error("cannot open '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    config_error("malformed file '" + path.string() + "': " + e.what());
  }
  apply_overrides(doc, overrides);
  return config_from_json(doc, path.parent_path());
}

}  // namespace beliefroute
