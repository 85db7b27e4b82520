#pragma once

#include <string>
#include <vector>

#include "beliefroute/map_env.hpp"
#include "beliefroute/montecarlo.hpp"
#include "beliefroute/planner.hpp"

namespace beliefroute {

/// Bar per candidate total. Best is green, worst red, second best gold,
/// second worst black, the rest grey.
std::string totals_bar_chart(const std::vector<PathScore>& scores,
                             const RankingReport& ranking);

/// Top-down (N horizontal, E vertical) truth and estimate of one run over
/// the obstacle footprints.
std::string estimate_overlay_svg(const EnvironmentMap& map,
                                 const TruthTrajectory& truth,
                                 const OnlineResult& online,
                                 const std::string& title);

/// Top-down truth tracks of several runs of one circuit.
std::string truth_overlay_svg(const EnvironmentMap& map,
                              const std::vector<TruthTrajectory>& runs,
                              const std::string& title);

}  // namespace beliefroute
