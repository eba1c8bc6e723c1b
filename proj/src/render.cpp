#include "minesim/render.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace minesim::render {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 600.0;
constexpr double kMargin = 60.0;

constexpr std::array kPalette = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                 "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string escape(std::string_view text) {
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

struct Frame {
  double min_x, min_y, scale;

  Vec2 map(Vec2 p) const {
    return {kMargin + (p.x - min_x) * scale, kHeight - kMargin - (p.y - min_y) * scale};
  }
};

Frame fit(const MineConfig& config) {
  double lo_x = config.charging.position.x, hi_x = lo_x;
  double lo_y = config.charging.position.y, hi_y = lo_y;
  auto grow = [&](Vec2 p) {
    lo_x = std::min(lo_x, p.x);
    hi_x = std::max(hi_x, p.x);
    lo_y = std::min(lo_y, p.y);
    hi_y = std::max(hi_y, p.y);
  };
  for (const auto& s : config.load_sites) grow(s.position);
  for (const auto& s : config.dump_sites) grow(s.position);
  const double scale = std::min((kWidth - 2 * kMargin) / std::max(hi_x - lo_x, 1e-9),
                                (kHeight - 2 * kMargin) / std::max(hi_y - lo_y, 1e-9));
  return {lo_x, lo_y, scale};
}

}  // namespace

std::string_view state_color(TruckState state) {
  switch (state) {
    case TruckState::AtCharging: return "#7f7f7f";
    case TruckState::EmptyRun: return "#1f77b4";
    case TruckState::WaitingForLoading: return "#ff7f0e";
    case TruckState::Loading: return "#8c564b";
    case TruckState::FullRun: return "#2ca02c";
    case TruckState::WaitingForUnloading: return "#e377c2";
    case TruckState::Unloading: return "#17becf";
    case TruckState::UnderRepair: return "#bcbd22";
    case TruckState::Broken: return "#d62728";
  }
  return "#000000";
}

std::string frame_file_name(std::size_t tick_index) {
  return fmt::format("frame_{:05d}.svg", tick_index);
}

std::string render_frame(const ticklog::TickRecord& record, const MineConfig& config) {
  const Frame f = fit(config);
  std::string out;
  out += fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" "
      "viewBox=\"0 0 {0} {1}\">\n",
      kWidth, kHeight);
  out += fmt::format("<rect width=\"{}\" height=\"{}\" fill=\"#fafafa\"/>\n", kWidth, kHeight);
  out += fmt::format("<text x=\"10\" y=\"20\" font-size=\"14\">{} t={:.0f} min</text>\n",
                     escape(config.name), record.time);

  const Vec2 charging = f.map(config.charging.position);
  for (std::size_t i = 0; i < config.load_sites.size(); ++i) {
    const Vec2 a = f.map(config.load_sites[i].position);
    const bool busy = i < record.roads.size() && record.roads[i].occupancy > 0;
    out += fmt::format(
        "<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" stroke=\"{}\" "
        "stroke-width=\"1\"/>\n",
        charging.x, charging.y, a.x, a.y, busy ? "#999" : "#ddd");
  }
  const std::size_t loads = config.load_sites.size();
  for (std::size_t i = 0; i < loads; ++i) {
    for (std::size_t k = 0; k < config.dump_sites.size(); ++k) {
      const std::size_t road = loads + i * config.dump_sites.size() + k;
      const Vec2 a = f.map(config.load_sites[i].position);
      const Vec2 b = f.map(config.dump_sites[k].position);
      std::string_view colour = "#ddd";
      if (road < record.roads.size()) {
        const auto& r = record.roads[road];
        if (r.jammed) {
          colour = "#d62728";
        } else if (r.status == RoadStatus::UnderMaintenance) {
          colour = "#ff7f0e";
        } else if (r.occupancy > 0) {
          colour = "#999";
        }
      }
      out += fmt::format(
          "<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" stroke=\"{}\" "
          "stroke-width=\"1\"/>\n",
          a.x, a.y, b.x, b.y, colour);
    }
  }

  out += fmt::format(
      "<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"14\" height=\"14\" fill=\"#444\"/>\n",
      charging.x - 7, charging.y - 7);
  for (std::size_t i = 0; i < loads; ++i) {
    const Vec2 p = f.map(config.load_sites[i].position);
    out += fmt::format(
        "<polygon points=\"{:.1f},{:.1f} {:.1f},{:.1f} {:.1f},{:.1f}\" fill=\"#8c564b\"/>\n",
        p.x, p.y - 10, p.x - 9, p.y + 7, p.x + 9, p.y + 7);
    std::uint32_t queued = 0;
    if (i < record.load_sites.size()) {
      queued = record.load_sites[i].parking;
      for (const auto& s : record.load_sites[i].shovels) queued += s.queue;
    }
    out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" font-size=\"11\">{} q={}</text>\n",
                       p.x + 11, p.y - 8, escape(config.load_sites[i].name), queued);
  }
  for (std::size_t k = 0; k < config.dump_sites.size(); ++k) {
    const Vec2 p = f.map(config.dump_sites[k].position);
    out += fmt::format(
        "<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"16\" height=\"16\" fill=\"#7f7f7f\"/>\n",
        p.x - 8, p.y - 8);
    std::uint32_t queued = 0;
    if (k < record.dump_sites.size()) {
      queued = record.dump_sites[k].parking;
      for (const auto& s : record.dump_sites[k].spots) queued += s.queue;
    }
    out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" font-size=\"11\">{} q={}</text>\n",
                       p.x + 11, p.y - 8, escape(config.dump_sites[k].name), queued);
  }

  for (const auto& t : record.trucks) {
    const Vec2 p = f.map(t.position);
    out += fmt::format("<circle cx=\"{:.1f}\" cy=\"{:.1f}\" r=\"3\" fill=\"{}\"/>\n", p.x, p.y,
                       state_color(t.state));
  }

  double y = kHeight - 12.0 * kAllTruckStates.size() - 8.0;
  for (auto s : kAllTruckStates) {
    out += fmt::format("<circle cx=\"14\" cy=\"{:.1f}\" r=\"4\" fill=\"{}\"/>", y, state_color(s));
    out += fmt::format("<text x=\"22\" y=\"{:.1f}\" font-size=\"10\">{}</text>\n", y + 3,
                       to_string(s));
    y += 12.0;
  }
  out += "</svg>\n";
  return out;
}

std::string render_line_chart(const std::vector<NamedSeries>& series, std::string_view title,
                              std::string_view x_label, std::string_view y_label) {
  double max_x = 0.0;
  double max_y = 0.0;
  for (const auto& s : series) {
    for (const auto& p : s.points) {
      max_x = std::max(max_x, p.time);
      max_y = std::max(max_y, p.value);
    }
  }
  if (max_x <= 0.0) max_x = 1.0;
  if (max_y <= 0.0) max_y = 1.0;
  const double left = 70.0, right = kWidth - 170.0, top = 40.0, bottom = kHeight - 50.0;
  auto px = [&](double x) { return left + x / max_x * (right - left); };
  auto py = [&](double v) { return bottom - v / max_y * (bottom - top); };

  std::string out;
  out += fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" "
      "viewBox=\"0 0 {0} {1}\">\n",
      kWidth, kHeight);
  out += fmt::format("<rect width=\"{}\" height=\"{}\" fill=\"white\"/>\n", kWidth, kHeight);
  out += fmt::format("<text x=\"{}\" y=\"24\" font-size=\"16\">{}</text>\n", left,
                     escape(title));
  out += fmt::format(
      "<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"black\"/>\n"
      "<line x1=\"{0}\" y1=\"{3}\" x2=\"{0}\" y2=\"{1}\" stroke=\"black\"/>\n",
      left, bottom, right, top);
  for (int i = 0; i <= 4; ++i) {
    const double xv = max_x * i / 4.0;
    const double yv = max_y * i / 4.0;
    out += fmt::format(
        "<text x=\"{:.1f}\" y=\"{:.1f}\" font-size=\"10\" text-anchor=\"middle\">{:.0f}</text>\n",
        px(xv), bottom + 14, xv);
    out += fmt::format(
        "<text x=\"{:.1f}\" y=\"{:.1f}\" font-size=\"10\" text-anchor=\"end\">{:.0f}</text>\n",
        left - 4, py(yv) + 3, yv);
  }
  out += fmt::format(
      "<text x=\"{:.1f}\" y=\"{:.1f}\" font-size=\"12\" text-anchor=\"middle\">{}</text>\n",
      (left + right) / 2, kHeight - 14, escape(x_label));
  out += fmt::format(
      "<text x=\"16\" y=\"{:.1f}\" font-size=\"12\" transform=\"rotate(-90 16 {:.1f})\" "
      "text-anchor=\"middle\">{}</text>\n",
      (top + bottom) / 2, (top + bottom) / 2, escape(y_label));

  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto colour = kPalette[i % kPalette.size()];
    std::string points;
    double last = 0.0;
    bool first = true;
    for (const auto& p : series[i].points) {
      if (!first) points += fmt::format("{:.2f},{:.2f} ", px(p.time), py(last));
      points += fmt::format("{:.2f},{:.2f} ", px(p.time), py(p.value));
      last = p.value;
      first = false;
    }
    if (!series[i].points.empty()) points += fmt::format("{:.2f},{:.2f}", px(max_x), py(last));
    out += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
                       colour, points);
    const double ly = top + 16.0 * static_cast<double>(i);
    out += fmt::format(
        "<line x1=\"{0:.1f}\" y1=\"{1:.1f}\" x2=\"{2:.1f}\" y2=\"{1:.1f}\" stroke=\"{3}\" "
        "stroke-width=\"2\"/>",
        right + 10, ly, right + 28, colour);
    out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" font-size=\"11\">{}</text>\n", right + 32,
                       ly + 4, escape(series[i].name));
  }
  out += "</svg>\n";
  return out;
}

}  // namespace minesim::render
