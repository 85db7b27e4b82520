#include "beliefroute/artifacts.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "beliefroute/errors.hpp"

namespace beliefroute {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";  // folds -0
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string cell(double v) { return format_number(v); }
std::string cell(std::size_t v) { return std::to_string(v); }
std::string cell(bool v) { return v ? "1" : "0"; }

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

CsvTable& CsvTable::row(std::vector<std::string> cells) {
  if (cells.size() != header_.size()) {
    throw Error(ErrorCategory::kArtifact, "csv: row width does not match header");
  }
  rows_.push_back(std::move(cells));
  return *this;
}

std::string CsvTable::str() const {
  std::string out;
  auto emit = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  emit(header_);
  for (const auto& r : rows_) emit(r);
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorCategory::kArtifact, "cannot write '" + path.string() + "'");
  }
  out << text;
  if (!out) {
    throw Error(ErrorCategory::kArtifact, "write failed for '" + path.string() + "'");
  }
}

void write_json(const std::filesystem::path& path, const nlohmann::json& doc) {
  write_text(path, doc.dump(2) + "\n");
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw MissingArtifactError("missing artifact '" + path.string() + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json read_json(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  auto doc = nlohmann::json::parse(text, nullptr, false);
  if (doc.is_discarded()) {
    throw MissingArtifactError("corrupted artifact '" + path.string() +
                               "' (not valid JSON)");
  }
  return doc;
}

std::string scores_csv(const std::vector<PathScore>& scores,
                       const std::vector<Circuit>& circuits) {
  std::unordered_map<std::size_t, const Circuit*> by_run;
  for (const auto& c : circuits) by_run[c.run_index] = &c;
  CsvTable t({"circuit", "length_m", "flight_time_s", "duplicate", "total_pec",
              "rms_pec", "max_pec", "mean_pec", "median_pec", "sigma_pec",
              "cam_updates", "lidar_updates", "skipped_updates",
              "threshold_ok"});
  for (const auto& s : scores) {
    const auto it = by_run.find(s.circuit_index);
    const Circuit* c = it == by_run.end() ? nullptr : it->second;
    t.row({cell(s.circuit_index), cell(c ? c->length : 0.0),
           cell(c ? c->flight_time : 0.0), cell(c ? c->duplicate : false),
           cell(s.total), cell(s.stats.rms), cell(s.max_pec),
           cell(s.stats.mean), cell(s.stats.median), cell(s.stats.sigma),
           cell(s.cam_update_count), cell(s.lidar_update_count),
           cell(s.skipped_updates), cell(s.threshold_ok)});
  }
  return t.str();
}

std::string pec_series_csv(const PathScore& score) {
  CsvTable t({"t_s", "pec_m2", "cam_fired", "lidar_fired"});
  for (const auto& p : score.pec_series) {
    t.row({cell(p.t), cell(p.pec), cell(p.cam_fired), cell(p.lidar_fired)});
  }
  return t.str();
}

std::string run_csv(const OnlineResult& online, const TruthTrajectory& truth) {
  CsvTable t({"t_s", "truth_n", "truth_e", "truth_d", "est_n", "est_e", "est_d",
              "err_3d_m", "pec_m2"});
  for (const auto& e : online.track) {
    const Vec3 p = truth_position_at(truth, e.t);
    t.row({cell(e.t), cell(p.x()), cell(p.y()), cell(p.z()),
           cell(e.position.x()), cell(e.position.y()), cell(e.position.z()),
           cell((e.position - p).norm()), cell(e.pec)});
  }
  return t.str();
}

std::string summary_csv(const std::vector<RunStats>& runs) {
  CsvTable t({"run", "median", "mean", "rms", "mpe", "sigma", "x_rms", "y_rms",
              "z_rms", "flight_time_s", "lidar_updates", "cam_updates"});
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& r = runs[i];
    t.row({cell(i + 1), cell(r.median), cell(r.mean), cell(r.rms_3d),
           cell(r.max_pos_err), cell(r.sigma), cell(r.x_rms), cell(r.y_rms),
           cell(r.z_rms), cell(r.flight_time), cell(r.lidar_updates),
           cell(r.cam_updates)});
  }
  return t.str();
}

nlohmann::json series_stats_json(const SeriesStats& s) {
  return {{"rms", s.rms},
          {"max", s.max},
          {"sigma", s.sigma},
          {"mean", s.mean},
          {"median", s.median}};
}

nlohmann::json run_stats_json(const RunStats& s) {
  return {{"flight_time_s", s.flight_time},
          {"x_rms_m", s.x_rms},
          {"y_rms_m", s.y_rms},
          {"z_rms_m", s.z_rms},
          {"rms_3d_m", s.rms_3d},
          {"max_pos_err_m", s.max_pos_err},
          {"sigma_m", s.sigma},
          {"mean_m", s.mean},
          {"median_m", s.median},
          {"lidar_updates", s.lidar_updates},
          {"cam_updates", s.cam_updates}};
}

}  // namespace beliefroute
