#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <thread>

#include <fmt/format.h>
#include <spdlog/sinks/basic_file_sink.h>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "minesim/cli.hpp"
#include "minesim/render.hpp"

namespace minesim::cli {

namespace fs = std::filesystem;

namespace {

void write_text(const fs::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot write {}", path.string()));
  out << text;
}

}  // namespace

FrameRange parse_frame_range(const std::string& text) {
  const auto dots = text.find("..");
  if (dots == std::string::npos) {
    throw UsageError(fmt::format("frame range '{}' must look like A..B", text));
  }
  auto number = [&](std::string_view part) {
    if (part.empty() || !std::all_of(part.begin(), part.end(), ::isdigit)) {
      throw UsageError(fmt::format("frame range '{}' must look like A..B", text));
    }
    return static_cast<std::size_t>(std::stoull(std::string(part)));
  };
  FrameRange r{number(std::string_view(text).substr(0, dots)),
               number(std::string_view(text).substr(dots + 2))};
  if (r.first > r.last) {
    throw UsageError(fmt::format("frame range '{}' is inverted", text));
  }
  return r;
}

std::string run_id(std::string_view policy, std::uint64_t seed) {
  return fmt::format("{}-seed{}", policy, seed);
}

spdlog::level::level_enum log_level_from_env() {
  const char* value = std::getenv("MINESIM_LOG_LEVEL");
  if (!value || !*value) return spdlog::level::info;
  const auto level = spdlog::level::from_str(value);
  // from_str maps unknown names to off; only accept it when asked for.
  if (level == spdlog::level::off && std::string_view(value) != "off") return spdlog::level::info;
  return level;
}

SimResult run_to_directory(const MineConfig& config, const std::string& policy_name,
                           std::uint64_t seed, double duration, const fs::path& dir,
                           std::optional<FrameRange> frames) {
  fs::create_directories(dir);
  write_text(dir / "config.json", emit_config(config));

  auto file_sink = std::make_shared<spdlog::sinks::basic_file_sink_mt>((dir / "run.log").string(),
                                                                       true);
  auto err_sink = std::make_shared<spdlog::sinks::stderr_sink_mt>();
  err_sink->set_level(spdlog::level::warn);
  auto logger = std::make_shared<spdlog::logger>(run_id(policy_name, seed),
                                                 spdlog::sinks_init_list{file_sink, err_sink});
  logger->set_level(log_level_from_env());
  logger->set_pattern("[%l] %n: %v");

  auto policy = dispatch::make_policy(policy_name);
  RunOptions options;
  options.logger = logger;
  SimResult result = run_simulation(config, *policy, seed, duration, options);

  ticklog::write_archive(dir / "ticks.ndjson", result.ticks);
  {
    std::ofstream events(dir / "events.ndjson", std::ios::binary);
    write_event_pool(events, result.events);
  }
  const std::vector<kpi::ReportRow> rows{kpi::row_for(result)};
  write_text(dir / "summary.csv", kpi::to_csv(rows));
  write_text(dir / "summary.md", kpi::to_markdown(rows));

  const fs::path frame_dir = dir / "frames";
  fs::create_directories(frame_dir);
  if (!result.ticks.records.empty()) {
    FrameRange range{0, result.ticks.records.size() - 1};
    if (frames) {
      if (frames->last >= result.ticks.records.size()) {
        throw UsageError(fmt::format("frame range {}..{} outside archive of {} ticks",
                                     frames->first, frames->last, result.ticks.records.size()));
      }
      range = *frames;
    }
    for (std::size_t i = range.first; i <= range.last; ++i) {
      write_text(frame_dir / render::frame_file_name(i),
                 render::render_frame(result.ticks.records[i], config));
    }
  }
  logger->flush();
  return result;
}

std::vector<SimResult> run_grid(const MineConfig& config, const CompareOptions& options) {
  if (options.policies.empty()) throw UsageError("compare needs at least one policy");
  if (options.seeds.empty()) throw UsageError("compare needs at least one seed");
  for (const auto& name : options.policies) dispatch::make_policy(name);  // fail fast

  const std::size_t cells = options.policies.size() * options.seeds.size();
  std::vector<std::optional<SimResult>> results(cells);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (std::size_t i = next++; i < cells; i = next++) {
      try {
        const auto& name = options.policies[i / options.seeds.size()];
        const auto seed = options.seeds[i % options.seeds.size()];
        auto policy = dispatch::make_policy(name);
        RunOptions run_options;
        run_options.record_ticks = false;
        results[i] = run_simulation(config, *policy, seed, options.duration, run_options);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  unsigned threads = options.threads ? options.threads : std::thread::hardware_concurrency();
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(cells)));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  std::vector<SimResult> out;
  out.reserve(cells);
  for (auto& r : results) out.push_back(std::move(*r));
  return out;
}

kpi::ComparisonReport write_comparison(const std::vector<SimResult>& runs, double duration,
                                       const fs::path& dir) {
  fs::create_directories(dir);
  auto report = kpi::summary_report(runs);
  write_text(dir / "summary.csv", kpi::to_csv(report.rows));
  write_text(dir / "summary.md", kpi::to_markdown(report.rows));
  write_text(dir / "per_seed.csv", kpi::to_csv(report.per_seed));
  write_text(dir / "per_seed.md", kpi::to_markdown(report.per_seed));

  // Mean curves on the minute grid, one column per policy.
  std::vector<std::string> names;
  for (const auto& r : runs) {
    if (std::find(names.begin(), names.end(), r.policy) == names.end()) names.push_back(r.policy);
  }
  const long minutes = static_cast<long>(duration);
  std::vector<render::NamedSeries> production;
  std::vector<render::NamedSeries> waiting;
  for (const auto& name : names) {
    render::NamedSeries p{name, {}};
    render::NamedSeries w{name, {}};
    for (long m = 0; m <= minutes; ++m) {
      double tons = 0.0;
      double queued = 0.0;
      std::size_t n = 0;
      for (const auto& r : runs) {
        if (r.policy != name) continue;
        tons += kpi::value_at(r.kpis.production_curve, static_cast<double>(m));
        queued += kpi::value_at(r.kpis.waiting_curve, static_cast<double>(m));
        ++n;
      }
      p.points.push_back({static_cast<double>(m), tons / static_cast<double>(n)});
      w.points.push_back({static_cast<double>(m), queued / static_cast<double>(n)});
    }
    production.push_back(std::move(p));
    waiting.push_back(std::move(w));
  }
  auto curve_csv = [&](const std::vector<render::NamedSeries>& series) {
    std::string out = "minute";
    for (const auto& s : series) out += "," + s.name;
    out += '\n';
    for (long m = 0; m <= minutes; ++m) {
      out += std::to_string(m);
      for (const auto& s : series) out += fmt::format(",{:.4f}", s.points[m].value);
      out += '\n';
    }
    return out;
  };
  write_text(dir / "production_curve.csv", curve_csv(production));
  write_text(dir / "waiting_curve.csv", curve_csv(waiting));
  write_text(dir / "production_curve.svg",
             render::render_line_chart(production, "Mean production", "minute", "tons"));
  write_text(dir / "waiting_curve.svg",
             render::render_line_chart(waiting, "Mean waiting trucks", "minute", "trucks"));
  return report;
}

std::size_t visualize(const fs::path& ticks, const MineConfig& config,
                      std::optional<FrameRange> range, const fs::path& dir) {
  const auto archive = ticklog::replay(ticks);
  const std::size_t n = archive.records.size();
  FrameRange r{0, n == 0 ? 0 : n - 1};
  if (range) {
    if (range->first > range->last) throw UsageError("frame range is inverted");
    if (range->last >= n) {
      throw UsageError(fmt::format("frame range {}..{} outside archive of {} ticks", range->first,
                                   range->last, n));
    }
    r = *range;
  }
  if (n == 0) return 0;
  fs::create_directories(dir);
  for (std::size_t i = r.first; i <= r.last; ++i) {
    write_text(dir / render::frame_file_name(i), render::render_frame(archive.records[i], config));
  }
  return r.last - r.first + 1;
}

}  // namespace minesim::cli
