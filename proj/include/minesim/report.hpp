#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "minesim/simulation.hpp"

namespace minesim::kpi {

struct ReportRow {
  std::string name;
  std::optional<std::uint64_t> seed;  // absent for per-policy means
  std::size_t runs{1};
  double produced_tons{0.0};
  std::optional<double> match_factor;
  double total_wait_time{0.0};
  double road_jams{0.0};
  std::optional<double> adl;  // seconds
  std::map<std::string, double> custom;
};

struct ComparisonReport {
  std::vector<ReportRow> rows;      // one per policy, sorted by produced tons desc
  std::vector<ReportRow> per_seed;  // one per run, in input order
};

// Groups runs by policy name and averages every column. Throws
// std::invalid_argument on an empty list.
ComparisonReport summary_report(std::span<const SimResult> runs);

ReportRow row_for(const SimResult& run);

std::string to_csv(std::span<const ReportRow> rows);
std::string to_markdown(std::span<const ReportRow> rows);

}  // namespace minesim::kpi
