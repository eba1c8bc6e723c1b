#include "minesim/report.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include <fmt/format.h>

namespace minesim::kpi {

ReportRow row_for(const SimResult& run) {
  ReportRow row;
  row.name = run.policy;
  row.seed = run.seed;
  row.produced_tons = run.kpis.produced_tons;
  row.match_factor = run.kpis.match_factor;
  row.total_wait_time = run.kpis.total_wait_time;
  row.road_jams = static_cast<double>(run.kpis.road_jams);
  row.adl = run.kpis.adl;
  row.custom = run.kpis.custom;
  return row;
}

namespace {

std::optional<double> mean_of(const std::vector<std::optional<double>>& values) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& v : values) {
    if (v) {
      sum += *v;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

std::string opt(const std::optional<double>& v, int precision) {
  return v ? fmt::format("{:.{}f}", *v, precision) : std::string("-");
}

std::vector<std::string> custom_columns(std::span<const ReportRow> rows) {
  std::set<std::string> names;
  for (const auto& r : rows) {
    for (const auto& [name, _] : r.custom) names.insert(name);
  }
  return {names.begin(), names.end()};
}

}  // namespace

ComparisonReport summary_report(std::span<const SimResult> runs) {
  if (runs.empty()) throw std::invalid_argument("summary report needs at least one run");
  ComparisonReport report;
  std::vector<std::string> order;
  for (const auto& run : runs) {
    report.per_seed.push_back(row_for(run));
    if (std::find(order.begin(), order.end(), run.policy) == order.end()) {
      order.push_back(run.policy);
    }
  }
  for (const auto& name : order) {
    ReportRow row;
    row.name = name;
    row.runs = 0;
    std::vector<std::optional<double>> mf;
    std::vector<std::optional<double>> adl;
    std::map<std::string, std::vector<std::optional<double>>> custom;
    for (const auto& r : report.per_seed) {
      if (r.name != name) continue;
      ++row.runs;
      row.produced_tons += r.produced_tons;
      row.total_wait_time += r.total_wait_time;
      row.road_jams += r.road_jams;
      mf.push_back(r.match_factor);
      adl.push_back(r.adl);
      for (const auto& [k, v] : r.custom) custom[k].push_back(v);
    }
    const double n = static_cast<double>(row.runs);
    row.produced_tons /= n;
    row.total_wait_time /= n;
    row.road_jams /= n;
    row.match_factor = mean_of(mf);
    row.adl = mean_of(adl);
    for (const auto& [k, v] : custom) {
      if (auto m = mean_of(v)) row.custom[k] = *m;
    }
    report.rows.push_back(std::move(row));
  }
  std::stable_sort(report.rows.begin(), report.rows.end(),
                   [](const ReportRow& a, const ReportRow& b) {
                     return a.produced_tons > b.produced_tons;
                   });
  return report;
}

std::string to_csv(std::span<const ReportRow> rows) {
  const auto extra = custom_columns(rows);
  std::string out = "policy,seed,runs,produced_tons,match_factor,total_wait_time,road_jams,adl_ms";
  for (const auto& c : extra) out += "," + c;
  out += '\n';
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{:.4f},{},{:.4f},{:.4f},{}", r.name,
                       r.seed ? std::to_string(*r.seed) : std::string(), r.runs, r.produced_tons,
                       r.match_factor ? fmt::format("{:.6f}", *r.match_factor) : std::string(),
                       r.total_wait_time, r.road_jams,
                       r.adl ? fmt::format("{:.6f}", *r.adl * 1000.0) : std::string());
    for (const auto& c : extra) {
      auto it = r.custom.find(c);
      out += it == r.custom.end() ? std::string(",") : fmt::format(",{:.6f}", it->second);
    }
    out += '\n';
  }
  return out;
}

std::string to_markdown(std::span<const ReportRow> rows) {
  const auto extra = custom_columns(rows);
  std::string out = "| Policy | Runs | Produced tons | Match factor | Total wait (min) | Road jams | ADL (ms) |";
  for (const auto& c : extra) out += fmt::format(" {} |", c);
  out += "\n|---|---:|---:|---:|---:|---:|---:|";
  for (std::size_t i = 0; i < extra.size(); ++i) out += "---:|";
  out += '\n';
  for (const auto& r : rows) {
    const std::string name = r.seed ? fmt::format("{} (seed {})", r.name, *r.seed) : r.name;
    const std::optional<double> adl_ms =
        r.adl ? std::optional<double>(*r.adl * 1000.0) : std::nullopt;
    out += fmt::format("| {} | {} | {:.2f} | {} | {:.1f} | {:.1f} | {} |", name, r.runs,
                       r.produced_tons, opt(r.match_factor, 3), r.total_wait_time, r.road_jams,
                       opt(adl_ms, 4));
    for (const auto& c : extra) {
      auto it = r.custom.find(c);
      out += it == r.custom.end() ? std::string(" - |") : fmt::format(" {:.3f} |", it->second);
    }
    out += '\n';
  }
  return out;
}

}  // namespace minesim::kpi
