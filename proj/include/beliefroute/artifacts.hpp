#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "beliefroute/euler_cpp.hpp"
#include "beliefroute/montecarlo.hpp"
#include "beliefroute/planner.hpp"

namespace beliefroute {

/// Shortest decimal text that reads back to the same double.
std::string format_number(double v);

/// Minimal CSV builder. Cells are written verbatim (no quoting is needed for
/// the numeric and identifier content produced here).
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  CsvTable& row(std::vector<std::string> cells);
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

std::string cell(double v);
std::string cell(std::size_t v);
std::string cell(bool v);

/// Writes atomically enough for our purposes (whole buffer, binary mode).
/// Throws Error(kArtifact) on I/O failure.
void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

/// Throws MissingArtifactError naming the file when it is absent,
/// unreadable or not valid JSON.
std::string read_text(const std::filesystem::path& path);
nlohmann::json read_json(const std::filesystem::path& path);

std::string scores_csv(const std::vector<PathScore>& scores,
                       const std::vector<Circuit>& circuits);
std::string pec_series_csv(const PathScore& score);

/// One row per estimate: t_s, truth_n/e/d, est_n/e/d, err_3d_m, pec_m2.
std::string run_csv(const OnlineResult& online, const TruthTrajectory& truth);
std::string summary_csv(const std::vector<RunStats>& runs);

nlohmann::json series_stats_json(const SeriesStats& s);
nlohmann::json run_stats_json(const RunStats& s);

}  // namespace beliefroute
