#include <fstream>
#include <ostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "minesim/cli.hpp"

namespace minesim::cli {

namespace fs = std::filesystem;

namespace {

const std::vector<std::string> kBaselines = {
    "FixedGroupDispatcher", "SQDispatcher",      "SPTFDispatcher",
    "RandomDispatcher",     "NearestDispatcher", "NaiveDispatcher",
};

void print_policies(std::ostream& out) {
  for (const auto& name : dispatch::registered_policies()) out << name << '\n';
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Open-pit mine truck dispatch simulator", "minesim"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> dispatchers;
  std::vector<std::uint64_t> seeds;
  std::optional<double> duration;
  std::string out_dir = "out";
  std::string frames_text;
  std::size_t seed_count = 10;
  unsigned threads = 0;
  std::string ticks_path;
  std::string emit_path;

  auto* run = app.add_subcommand("run", "Run one simulation per (dispatcher, seed)");
  run->add_option("-f,--config", config_path, "Mine config (JSON)")->required();
  run->add_option("-d,--dispatcher", dispatchers, "Dispatch policy name (repeatable)")
      ->required();
  run->add_option("--seed", seeds, "Seed (repeatable); default from config");
  run->add_option("-t,--duration-minutes", duration, "Simulated minutes; default from config");
  run->add_option("-o,--out", out_dir, "Output root");
  run->add_option("--frames", frames_text, "Frame range A..B (default: all ticks)");

  auto* compare = app.add_subcommand("compare", "Compare policies over several seeds");
  compare->add_option("-f,--config", config_path, "Mine config (JSON)")->required();
  compare->add_option("-d,--dispatcher", dispatchers,
                      "Dispatch policy name (repeatable); default: the six baselines");
  compare->add_option("--seed", seeds, "Seed (repeatable)");
  compare->add_option("--seeds", seed_count,
                      "Number of consecutive seeds from the config seed when --seed is absent");
  compare->add_option("-t,--duration-minutes", duration, "Simulated minutes; default from config");
  compare->add_option("-o,--out", out_dir, "Output root; reports go to <out>/compare");
  compare->add_option("-j,--jobs", threads, "Worker threads (0 = all cores)");

  auto* vis = app.add_subcommand("visualize", "Render SVG frames from a tick archive");
  vis->add_option("ticks", ticks_path, "ticks.ndjson")->required();
  vis->add_option("-f,--config", config_path, "Mine config; default: config.json next to ticks");
  vis->add_option("--frames", frames_text, "Frame range A..B");
  vis->add_option("-o,--out", out_dir, "Frame directory; default: frames/ next to ticks");

  auto* emit = app.add_subcommand("config-emit", "Print a config in canonical form");
  emit->add_option("-f,--config", config_path, "Mine config (JSON)")->required();
  emit->add_option("-o,--out", emit_path, "Write to this file instead of stdout");

  auto* policies = app.add_subcommand("policies", "List registered dispatch policies");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kValidationError;
  }

  try {
    if (policies->parsed()) {
      print_policies(out);
      return kOk;
    }

    if (vis->parsed()) {
      const fs::path ticks = ticks_path;
      const fs::path cfg = config_path.empty() ? ticks.parent_path() / "config.json"
                                               : fs::path(config_path);
      const fs::path dir = vis->count("--out") ? fs::path(out_dir) : ticks.parent_path() / "frames";
      std::optional<FrameRange> range;
      if (!frames_text.empty()) range = parse_frame_range(frames_text);
      const auto n = visualize(ticks, parse_config(cfg), range, dir);
      out << fmt::format("wrote {} frames to {}\n", n, dir.string());
      return kOk;
    }

    const MineConfig config = parse_config(config_path);

    if (emit->parsed()) {
      const std::string text = emit_config(config);
      if (emit_path.empty()) {
        out << text;
      } else {
        std::ofstream file(emit_path, std::ios::binary);
        if (!file) throw std::runtime_error(fmt::format("cannot write {}", emit_path));
        file << text;
      }
      return kOk;
    }

    const double minutes = duration.value_or(static_cast<double>(config.simulation.duration));
    if (!(minutes > 0.0)) throw UsageError("duration must be > 0");

    if (run->parsed()) {
      if (seeds.empty()) seeds.push_back(config.simulation.seed);
      std::optional<FrameRange> range;
      if (!frames_text.empty()) range = parse_frame_range(frames_text);
      for (const auto& name : dispatchers) dispatch::make_policy(name);
      std::vector<kpi::ReportRow> rows;
      for (const auto& name : dispatchers) {
        for (auto seed : seeds) {
          const fs::path dir = fs::path(out_dir) / run_id(name, seed);
          auto result = run_to_directory(config, name, seed, minutes, dir, range);
          rows.push_back(kpi::row_for(result));
          out << fmt::format("{} -> {}\n", run_id(name, seed), dir.string());
        }
      }
      out << kpi::to_markdown(rows);
      return kOk;
    }

    if (compare->parsed()) {
      CompareOptions options;
      options.policies = dispatchers.empty() ? kBaselines : dispatchers;
      if (seeds.empty()) {
        for (std::size_t i = 0; i < seed_count; ++i) seeds.push_back(config.simulation.seed + i);
      }
      options.seeds = seeds;
      options.duration = minutes;
      options.threads = threads;
      const auto runs = run_grid(config, options);
      const fs::path dir = fs::path(out_dir) / "compare";
      const auto report = write_comparison(runs, minutes, dir);
      out << kpi::to_markdown(report.rows);
      out << fmt::format("reports in {}\n", dir.string());
      return kOk;
    }
  } catch (const ConfigError& e) {
    err << "invalid config:\n";
    for (const auto& line : e.errors()) err << "  " << line << '\n';
    return kValidationError;
  } catch (const dispatch::UnknownPolicyError& e) {
    err << e.what() << "\nregistered policies:\n";
    print_policies(err);
    return kValidationError;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kValidationError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kOk;
}

}  // namespace minesim::cli
