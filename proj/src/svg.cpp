#include "beliefroute/svg.hpp"

#include <algorithm>
#include <cstdio>

namespace beliefroute {
namespace {

constexpr std::size_t kTrackStride = 25;  // plot every 25th sample (0.5 s)

std::string fixed(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string s(buf);
  if (s == "-0.00") s = "0.00";
  return s;
}

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string header(double w, double h) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fixed(w) +
         "\" height=\"" + fixed(h) + "\" viewBox=\"0 0 " + fixed(w) + " " +
         fixed(h) + "\" font-family=\"sans-serif\" font-size=\"12\">\n"
         "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

std::string text(double x, double y, const std::string& s,
                 const char* anchor = "start") {
  return "<text x=\"" + fixed(x) + "\" y=\"" + fixed(y) + "\" text-anchor=\"" +
         anchor + "\">" + escape(s) + "</text>\n";
}

// Maps the map's N-E footprint into a plot box. N grows to the right, E grows
// downward, matching a top-down view in NED.
struct TopDown {
  double n0, e0, scale, left, top;

  TopDown(const EnvironmentMap& map, double width, double left_, double top_)
      : n0(map.bounds_min().x()),
        e0(map.bounds_min().y()),
        scale(width / (map.bounds_max().x() - map.bounds_min().x())),
        left(left_),
        top(top_) {}

  double x(double n) const { return left + (n - n0) * scale; }
  double y(double e) const { return top + (e - e0) * scale; }
};

std::string scene(const EnvironmentMap& map, const TopDown& td) {
  std::string out;
  const Vec3 lo = map.bounds_min();
  const Vec3 hi = map.bounds_max();
  out += "<rect x=\"" + fixed(td.x(lo.x())) + "\" y=\"" + fixed(td.y(lo.y())) +
         "\" width=\"" + fixed((hi.x() - lo.x()) * td.scale) + "\" height=\"" +
         fixed((hi.y() - lo.y()) * td.scale) +
         "\" fill=\"none\" stroke=\"black\"/>\n";
  for (const auto& box : map.obstacles()) {
    out += "<rect x=\"" + fixed(td.x(box.min_corner.x())) + "\" y=\"" +
           fixed(td.y(box.min_corner.y())) + "\" width=\"" +
           fixed((box.max_corner.x() - box.min_corner.x()) * td.scale) +
           "\" height=\"" +
           fixed((box.max_corner.y() - box.min_corner.y()) * td.scale) +
           "\" fill=\"#d0d0d0\" stroke=\"#808080\"/>\n";
  }
  const Vec3 ugv = map.rig().position;
  out += "<circle cx=\"" + fixed(td.x(ugv.x())) + "\" cy=\"" +
         fixed(td.y(ugv.y())) + "\" r=\"5\" fill=\"black\"/>\n";
  return out;
}

template <typename Get>
std::string polyline(std::size_t n, Get get, const TopDown& td,
                     const char* color, double width, double opacity = 1.0) {
  std::string pts;
  for (std::size_t i = 0; i < n; i += kTrackStride) {
    const Vec3 p = get(i);
    pts += fixed(td.x(p.x())) + "," + fixed(td.y(p.y())) + " ";
  }
  if (n > 0 && (n - 1) % kTrackStride != 0) {
    const Vec3 p = get(n - 1);
    pts += fixed(td.x(p.x())) + "," + fixed(td.y(p.y())) + " ";
  }
  if (!pts.empty()) pts.pop_back();
  return "<polyline fill=\"none\" stroke=\"" + std::string(color) +
         "\" stroke-width=\"" + fixed(width) + "\" stroke-opacity=\"" +
         fixed(opacity) + "\" points=\"" + pts + "\"/>\n";
}

}  // namespace

std::string totals_bar_chart(const std::vector<PathScore>& scores,
                             const RankingReport& ranking) {
  const double left = 80, top = 40, plot_h = 300;
  const double bar_w = 8, gap = 2;
  const double plot_w = std::max(1.0, scores.size() * (bar_w + gap));
  const double width = left + plot_w + 40, height = top + plot_h + 60;
  double peak = 0.0;
  for (const auto& s : scores) peak = std::max(peak, s.total);
  if (peak <= 0.0) peak = 1.0;

  std::string out = header(width, height);
  out += text(width / 2, 20, "Sum of PEC per candidate circuit (m^2)", "middle");
  out += "<line x1=\"" + fixed(left) + "\" y1=\"" + fixed(top + plot_h) +
         "\" x2=\"" + fixed(left + plot_w) + "\" y2=\"" + fixed(top + plot_h) +
         "\" stroke=\"black\"/>\n";
  out += "<line x1=\"" + fixed(left) + "\" y1=\"" + fixed(top) + "\" x2=\"" +
         fixed(left) + "\" y2=\"" + fixed(top + plot_h) + "\" stroke=\"black\"/>\n";
  for (int tick = 0; tick <= 4; ++tick) {
    const double v = peak * tick / 4.0;
    const double y = top + plot_h - plot_h * tick / 4.0;
    out += text(left - 6, y + 4, fixed(v), "end");
  }
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const auto& s = scores[i];
    const char* color = "#a0a0a0";
    if (s.circuit_index == ranking.best) {
      color = "green";
    } else if (s.circuit_index == ranking.worst) {
      color = "red";
    } else if (ranking.second_best && s.circuit_index == *ranking.second_best) {
      color = "gold";
    } else if (ranking.second_worst && s.circuit_index == *ranking.second_worst) {
      color = "black";
    }
    const double h = plot_h * s.total / peak;
    const double x = left + i * (bar_w + gap) + gap / 2;
    out += "<rect x=\"" + fixed(x) + "\" y=\"" + fixed(top + plot_h - h) +
           "\" width=\"" + fixed(bar_w) + "\" height=\"" + fixed(h) +
           "\" fill=\"" + color + "\"><title>circuit " +
           std::to_string(s.circuit_index) + ": " + fixed(s.total) +
           "</title></rect>\n";
  }
  out += text(left + plot_w / 2, top + plot_h + 30, "candidate circuit", "middle");
  out += "</svg>\n";
  return out;
}

std::string estimate_overlay_svg(const EnvironmentMap& map,
                                 const TruthTrajectory& truth,
                                 const OnlineResult& online,
                                 const std::string& title) {
  const double plot_w = 900;
  TopDown td(map, plot_w, 40, 50);
  const double plot_h =
      (map.bounds_max().y() - map.bounds_min().y()) * td.scale;
  std::string out = header(plot_w + 80, plot_h + 110);
  out += text(40, 25, title);
  out += scene(map, td);
  out += polyline(
      truth.samples.size(), [&](std::size_t i) { return truth.samples[i].position; },
      td, "blue", 1.5);
  out += polyline(
      online.track.size(), [&](std::size_t i) { return online.track[i].position; },
      td, "red", 1.0);
  const double ly = 50 + plot_h + 30;
  out += "<line x1=\"40\" y1=\"" + fixed(ly) + "\" x2=\"70\" y2=\"" + fixed(ly) +
         "\" stroke=\"blue\" stroke-width=\"1.50\"/>\n";
  out += text(76, ly + 4, "truth");
  out += "<line x1=\"140\" y1=\"" + fixed(ly) + "\" x2=\"170\" y2=\"" +
         fixed(ly) + "\" stroke=\"red\"/>\n";
  out += text(176, ly + 4, "EKF estimate");
  out += text(40, ly + 24, "top view: N to the right, E downward (m)");
  out += "</svg>\n";
  return out;
}

std::string truth_overlay_svg(const EnvironmentMap& map,
                              const std::vector<TruthTrajectory>& runs,
                              const std::string& title) {
  static const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                   "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
                                   "#bcbd22", "#17becf"};
  const double plot_w = 900;
  TopDown td(map, plot_w, 40, 50);
  const double plot_h =
      (map.bounds_max().y() - map.bounds_min().y()) * td.scale;
  std::string out = header(plot_w + 80, plot_h + 90);
  out += text(40, 25, title);
  out += scene(map, td);
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const auto& s = runs[r].samples;
    out += polyline(
        s.size(), [&](std::size_t i) { return s[i].position; }, td,
        kPalette[r % std::size(kPalette)], 1.0, 0.8);
  }
  out += text(40, 50 + plot_h + 30,
              std::to_string(runs.size()) + " runs, top view (m)");
  out += "</svg>\n";
  return out;
}

}  // namespace beliefroute
