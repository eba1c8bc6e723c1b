#include "minesim/config.hpp"

#include <fstream>
#include <initializer_list>
#include <numeric>
#include <set>
#include <sstream>

#include <fmt/format.h>

namespace minesim {

using nlohmann::json;

namespace {

std::string join_errors(const std::vector<std::string>& errors) {
  std::string msg = fmt::format("invalid mine config ({} error{})", errors.size(),
                                errors.size() == 1 ? "" : "s");
  for (const auto& e : errors) msg += "\n  " + e;
  return msg;
}

std::string child(const std::string& path, std::string_view key) {
  return path + "/" + std::string(key);
}

std::string child(const std::string& path, std::size_t index) {
  return path + "/" + std::to_string(index);
}

// Reads typed fields out of a JSON document, collecting every problem instead
// of stopping at the first one.
class Reader {
 public:
  std::vector<std::string> errors;

  bool expect_object(const json& j, const std::string& path,
                     std::initializer_list<std::string_view> known) {
    if (!j.is_object()) {
      errors.push_back(fmt::format("{}: expected an object", path.empty() ? "/" : path));
      return false;
    }
    for (const auto& [key, value] : j.items()) {
      bool ok = false;
      for (auto k : known) ok = ok || key == k;
      if (!ok) errors.push_back(fmt::format("{}: unknown field", child(path, key)));
    }
    return true;
  }

  const json* field(const json& obj, const std::string& path, std::string_view key,
                    bool required) {
    auto it = obj.find(std::string(key));
    if (it == obj.end()) {
      if (required) errors.push_back(fmt::format("{}: missing required field", child(path, key)));
      return nullptr;
    }
    return &*it;
  }

  double number(const json& obj, const std::string& path, std::string_view key, double fallback,
                bool required = true) {
    const json* v = field(obj, path, key, required);
    if (!v) return fallback;
    if (!v->is_number()) {
      errors.push_back(fmt::format("{}: expected a number", child(path, key)));
      return fallback;
    }
    return v->get<double>();
  }

  int integer(const json& obj, const std::string& path, std::string_view key, int fallback,
              bool required = true) {
    const json* v = field(obj, path, key, required);
    if (!v) return fallback;
    if (!v->is_number_integer()) {
      errors.push_back(fmt::format("{}: expected an integer", child(path, key)));
      return fallback;
    }
    return v->get<int>();
  }

  std::uint64_t unsigned_integer(const json& obj, const std::string& path, std::string_view key,
                                 std::uint64_t fallback, bool required = true) {
    const json* v = field(obj, path, key, required);
    if (!v) return fallback;
    if (!v->is_number_unsigned()) {
      errors.push_back(fmt::format("{}: expected a non-negative integer", child(path, key)));
      return fallback;
    }
    return v->get<std::uint64_t>();
  }

  std::string string(const json& obj, const std::string& path, std::string_view key,
                     bool required = true) {
    const json* v = field(obj, path, key, required);
    if (!v) return {};
    if (!v->is_string()) {
      errors.push_back(fmt::format("{}: expected a string", child(path, key)));
      return {};
    }
    return v->get<std::string>();
  }

  bool boolean(const json& obj, const std::string& path, std::string_view key, bool fallback) {
    const json* v = field(obj, path, key, false);
    if (!v) return fallback;
    if (!v->is_boolean()) {
      errors.push_back(fmt::format("{}: expected a boolean", child(path, key)));
      return fallback;
    }
    return v->get<bool>();
  }

  Vec2 position(const json& obj, const std::string& path) {
    const json* v = field(obj, path, "position", true);
    if (!v) return {};
    if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number() || !(*v)[1].is_number()) {
      errors.push_back(fmt::format("{}: expected [x, y] in km", child(path, "position")));
      return {};
    }
    return {(*v)[0].get<double>(), (*v)[1].get<double>()};
  }

  const json* array(const json& obj, const std::string& path, std::string_view key,
                    bool required = true) {
    const json* v = field(obj, path, key, required);
    if (!v) return nullptr;
    if (!v->is_array()) {
      errors.push_back(fmt::format("{}: expected an array", child(path, key)));
      return nullptr;
    }
    return v;
  }

  events::HazardParams hazard(const json& obj, const std::string& path, std::string_view key) {
    events::HazardParams h;
    const json* v = field(obj, path, key, false);
    if (!v) return h;
    const auto p = child(path, key);
    if (!expect_object(*v, p, {"lambda", "repair_mean", "repair_std", "breakdown_probability"})) {
      return h;
    }
    h.lambda = number(*v, p, "lambda", h.lambda);
    h.repair_mean = number(*v, p, "repair_mean", h.repair_mean);
    h.repair_std = number(*v, p, "repair_std", h.repair_std, false);
    h.breakdown_probability = number(*v, p, "breakdown_probability", 0.0, false);
    return h;
  }
};

void check_hazard(std::vector<std::string>& errors, const std::string& path,
                  const events::HazardParams& h) {
  if (!(h.lambda >= 0.0)) errors.push_back(fmt::format("{}/lambda: must be >= 0", path));
  if (!(h.repair_mean > 0.0)) errors.push_back(fmt::format("{}/repair_mean: must be > 0", path));
  if (!(h.repair_std >= 0.0)) errors.push_back(fmt::format("{}/repair_std: must be >= 0", path));
  if (!(h.breakdown_probability >= 0.0 && h.breakdown_probability <= 1.0)) {
    errors.push_back(fmt::format("{}/breakdown_probability: must be in [0, 1]", path));
  }
}

json hazard_json(const events::HazardParams& h) {
  return json{{"lambda", h.lambda},
              {"repair_mean", h.repair_mean},
              {"repair_std", h.repair_std},
              {"breakdown_probability", h.breakdown_probability}};
}

json position_json(Vec2 p) { return json::array({p.x, p.y}); }

}  // namespace

int MineConfig::truck_count() const {
  int n = 0;
  for (const auto& f : charging.fleets) n += f.count;
  return n;
}

int MineConfig::shovel_count() const {
  int n = 0;
  for (const auto& site : load_sites) {
    for (const auto& s : site.shovels) n += s.count;
  }
  return n;
}

int MineConfig::spot_count() const {
  int n = 0;
  for (const auto& site : dump_sites) {
    for (const auto& s : site.spots) n += s.count;
  }
  return n;
}

ConfigError::ConfigError(std::vector<std::string> errors)
    : std::runtime_error(join_errors(errors)), errors_(std::move(errors)) {}

MineConfig parse_config_json(const json& doc) {
  Reader r;
  MineConfig cfg;
  const std::string root;
  if (!r.expect_object(doc, root, {"name", "synthetic", "charging_site", "load_sites",
                                   "dump_sites", "roads", "simulation"})) {
    throw ConfigError(r.errors);
  }
  cfg.name = r.string(doc, root, "name");
  cfg.synthetic = r.boolean(doc, root, "synthetic", false);

  if (const json* cs = r.field(doc, root, "charging_site", true)) {
    const std::string p = "/charging_site";
    if (r.expect_object(*cs, p, {"name", "position", "fleets"})) {
      cfg.charging.name = r.string(*cs, p, "name");
      cfg.charging.position = r.position(*cs, p);
      if (const json* fleets = r.array(*cs, p, "fleets")) {
        for (std::size_t i = 0; i < fleets->size(); ++i) {
          const auto fp = child(child(p, "fleets"), i);
          const json& f = (*fleets)[i];
          if (!r.expect_object(f, fp, {"type", "count", "capacity", "speed", "hazard"})) continue;
          TruckFleetConfig fleet;
          fleet.type = r.string(f, fp, "type");
          fleet.count = r.integer(f, fp, "count", 0);
          fleet.capacity = r.number(f, fp, "capacity", 0.0);
          fleet.speed = r.number(f, fp, "speed", 0.0);
          fleet.hazard = r.hazard(f, fp, "hazard");
          cfg.charging.fleets.push_back(std::move(fleet));
        }
      }
    }
  }

  if (const json* sites = r.array(doc, root, "load_sites")) {
    for (std::size_t i = 0; i < sites->size(); ++i) {
      const auto sp = child("/load_sites", i);
      const json& s = (*sites)[i];
      if (!r.expect_object(s, sp, {"name", "position", "shovels", "parking_capacity"})) continue;
      LoadSiteConfig site;
      site.name = r.string(s, sp, "name");
      site.position = r.position(s, sp);
      site.parking_capacity = r.integer(s, sp, "parking_capacity", 0, false);
      if (const json* shovels = r.array(s, sp, "shovels")) {
        for (std::size_t k = 0; k < shovels->size(); ++k) {
          const auto vp = child(child(sp, "shovels"), k);
          const json& v = (*shovels)[k];
          if (!r.expect_object(v, vp, {"type", "count", "bucket_size", "cycle_time", "hazard"})) {
            continue;
          }
          ShovelConfig shovel;
          shovel.type = r.string(v, vp, "type");
          shovel.count = r.integer(v, vp, "count", 0);
          shovel.bucket_size = r.number(v, vp, "bucket_size", 0.0);
          shovel.cycle_time = r.number(v, vp, "cycle_time", 0.0);
          shovel.hazard = r.hazard(v, vp, "hazard");
          site.shovels.push_back(std::move(shovel));
        }
      }
      cfg.load_sites.push_back(std::move(site));
    }
  }

  if (const json* sites = r.array(doc, root, "dump_sites")) {
    for (std::size_t i = 0; i < sites->size(); ++i) {
      const auto sp = child("/dump_sites", i);
      const json& s = (*sites)[i];
      if (!r.expect_object(s, sp, {"name", "position", "spots"})) continue;
      DumpSiteConfig site;
      site.name = r.string(s, sp, "name");
      site.position = r.position(s, sp);
      if (const json* spots = r.array(s, sp, "spots")) {
        for (std::size_t k = 0; k < spots->size(); ++k) {
          const auto vp = child(child(sp, "spots"), k);
          const json& v = (*spots)[k];
          if (!r.expect_object(v, vp, {"count", "unload_time"})) continue;
          DumpSpotConfig spot;
          spot.count = r.integer(v, vp, "count", 0);
          spot.unload_time = r.number(v, vp, "unload_time", 0.0);
          site.spots.push_back(spot);
        }
      }
      cfg.dump_sites.push_back(std::move(site));
    }
  }

  if (const json* roads = r.field(doc, root, "roads", false)) {
    const std::string p = "/roads";
    if (r.expect_object(*roads, p, {"charging_to_load", "load_to_dump", "jam", "maintenance"})) {
      if (const json* ctl = r.array(*roads, p, "charging_to_load", false)) {
        std::vector<double> d;
        for (std::size_t i = 0; i < ctl->size(); ++i) {
          if (!(*ctl)[i].is_number()) {
            r.errors.push_back(fmt::format("{}: expected a number",
                                           child(child(p, "charging_to_load"), i)));
            continue;
          }
          d.push_back((*ctl)[i].get<double>());
        }
        cfg.roads.charging_to_load = std::move(d);
      }
      if (const json* ltd = r.array(*roads, p, "load_to_dump", false)) {
        std::vector<std::vector<double>> m;
        for (std::size_t i = 0; i < ltd->size(); ++i) {
          const auto rp = child(child(p, "load_to_dump"), i);
          const json& row = (*ltd)[i];
          if (!row.is_array()) {
            r.errors.push_back(fmt::format("{}: expected an array", rp));
            continue;
          }
          std::vector<double> out;
          for (std::size_t k = 0; k < row.size(); ++k) {
            if (!row[k].is_number()) {
              r.errors.push_back(fmt::format("{}: expected a number", child(rp, k)));
              continue;
            }
            out.push_back(row[k].get<double>());
          }
          m.push_back(std::move(out));
        }
        cfg.roads.load_to_dump = std::move(m);
      }
      if (const json* jam = r.field(*roads, p, "jam", false)) {
        const auto jp = child(p, "jam");
        if (r.expect_object(*jam, jp, {"mu", "sigma", "jam_probability", "weibull_shape",
                                       "weibull_scale"})) {
          auto& j = cfg.roads.jam;
          j.mu = r.number(*jam, jp, "mu", 0.0, false);
          j.sigma = r.number(*jam, jp, "sigma", j.sigma);
          j.jam_probability = r.number(*jam, jp, "jam_probability", 0.0);
          j.weibull_shape = r.number(*jam, jp, "weibull_shape", j.weibull_shape);
          j.weibull_scale = r.number(*jam, jp, "weibull_scale", j.weibull_scale);
        }
      }
      if (const json* m = r.field(*roads, p, "maintenance", false)) {
        const auto mp = child(p, "maintenance");
        if (r.expect_object(*m, mp, {"lambda", "repair_mean", "repair_std", "penalty_mean",
                                     "penalty_std"})) {
          auto& h = cfg.roads.maintenance;
          h.lambda = r.number(*m, mp, "lambda", 0.0);
          h.repair_mean = r.number(*m, mp, "repair_mean", h.repair_mean);
          h.repair_std = r.number(*m, mp, "repair_std", 0.0, false);
          cfg.roads.penalty_mean = r.number(*m, mp, "penalty_mean", 0.0);
          cfg.roads.penalty_std = r.number(*m, mp, "penalty_std", 0.0, false);
        }
      }
    }
  }

  if (const json* sim = r.field(doc, root, "simulation", true)) {
    const std::string p = "/simulation";
    if (r.expect_object(*sim, p, {"duration", "tick_interval", "seed"})) {
      cfg.simulation.duration = r.number(*sim, p, "duration", 0.0);
      cfg.simulation.tick_interval = r.integer(*sim, p, "tick_interval", 1, false);
      cfg.simulation.seed = r.unsigned_integer(*sim, p, "seed", 0, false);
    }
  }

  auto errors = std::move(r.errors);
  for (auto& e : validate(cfg)) errors.push_back(std::move(e));
  if (!errors.empty()) throw ConfigError(std::move(errors));
  return cfg;
}

std::vector<std::string> validate(const MineConfig& cfg) {
  std::vector<std::string> errors;
  auto err = [&](std::string path, std::string_view what) {
    errors.push_back(fmt::format("{}: {}", path, what));
  };

  if (cfg.charging.fleets.empty()) err("/charging_site/fleets", "at least one fleet required");
  std::set<std::string> names;
  auto unique_name = [&](const std::string& name, const std::string& path) {
    if (name.empty()) {
      err(path, "must not be empty");
    } else if (!names.insert(name).second) {
      err(path, fmt::format("duplicate id '{}'", name));
    }
  };
  unique_name(cfg.charging.name, "/charging_site/name");

  std::set<std::string> fleet_types;
  for (std::size_t i = 0; i < cfg.charging.fleets.size(); ++i) {
    const auto& f = cfg.charging.fleets[i];
    const auto p = child("/charging_site/fleets", i);
    if (f.type.empty()) err(child(p, "type"), "must not be empty");
    else if (!fleet_types.insert(f.type).second) err(child(p, "type"), "duplicate fleet type");
    if (f.count <= 0) err(child(p, "count"), "must be > 0");
    if (!(f.capacity > 0.0)) err(child(p, "capacity"), "must be > 0");
    if (!(f.speed > 0.0)) err(child(p, "speed"), "must be > 0");
    check_hazard(errors, child(p, "hazard"), f.hazard);
  }

  if (cfg.load_sites.empty()) err("/load_sites", "at least one load site required");
  for (std::size_t i = 0; i < cfg.load_sites.size(); ++i) {
    const auto& s = cfg.load_sites[i];
    const auto p = child("/load_sites", i);
    unique_name(s.name, child(p, "name"));
    if (s.parking_capacity < 0) err(child(p, "parking_capacity"), "must be >= 0");
    if (s.shovels.empty()) err(child(p, "shovels"), "at least one shovel required");
    for (std::size_t k = 0; k < s.shovels.size(); ++k) {
      const auto& v = s.shovels[k];
      const auto vp = child(child(p, "shovels"), k);
      if (v.type.empty()) err(child(vp, "type"), "must not be empty");
      if (v.count <= 0) err(child(vp, "count"), "must be > 0");
      if (!(v.bucket_size > 0.0)) err(child(vp, "bucket_size"), "must be > 0");
      if (!(v.cycle_time > 0.0)) err(child(vp, "cycle_time"), "must be > 0");
      check_hazard(errors, child(vp, "hazard"), v.hazard);
    }
  }

  if (cfg.dump_sites.empty()) err("/dump_sites", "at least one dump site required");
  for (std::size_t i = 0; i < cfg.dump_sites.size(); ++i) {
    const auto& s = cfg.dump_sites[i];
    const auto p = child("/dump_sites", i);
    unique_name(s.name, child(p, "name"));
    if (s.spots.empty()) err(child(p, "spots"), "at least one dump spot required");
    for (std::size_t k = 0; k < s.spots.size(); ++k) {
      const auto& v = s.spots[k];
      const auto vp = child(child(p, "spots"), k);
      if (v.count <= 0) err(child(vp, "count"), "must be > 0");
      if (!(v.unload_time > 0.0)) err(child(vp, "unload_time"), "must be > 0");
    }
  }

  // Road lengths: explicit matrix when given, coordinates otherwise.
  const auto& roads = cfg.roads;
  if (roads.charging_to_load) {
    if (roads.charging_to_load->size() != cfg.load_sites.size()) {
      err("/roads/charging_to_load", "needs one distance per load site");
    }
    for (std::size_t i = 0; i < roads.charging_to_load->size(); ++i) {
      if (!((*roads.charging_to_load)[i] > 0.0)) {
        err(child("/roads/charging_to_load", i), "distance must be > 0");
      }
    }
  } else {
    for (std::size_t i = 0; i < cfg.load_sites.size(); ++i) {
      if (!(distance(cfg.charging.position, cfg.load_sites[i].position) > 0.0)) {
        err(child("/load_sites", i) + "/position", "co-located with the charging site");
      }
    }
  }
  if (roads.load_to_dump) {
    const auto& m = *roads.load_to_dump;
    if (m.size() != cfg.load_sites.size()) err("/roads/load_to_dump", "needs one row per load site");
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (m[i].size() != cfg.dump_sites.size()) {
        err(child("/roads/load_to_dump", i), "needs one distance per dump site");
      }
      for (std::size_t k = 0; k < m[i].size(); ++k) {
        if (!(m[i][k] > 0.0)) err(child(child("/roads/load_to_dump", i), k), "distance must be > 0");
      }
    }
  } else {
    for (std::size_t i = 0; i < cfg.load_sites.size(); ++i) {
      for (std::size_t k = 0; k < cfg.dump_sites.size(); ++k) {
        if (!(distance(cfg.load_sites[i].position, cfg.dump_sites[k].position) > 0.0)) {
          err(child("/dump_sites", k) + "/position",
              fmt::format("co-located with load site '{}'", cfg.load_sites[i].name));
        }
      }
    }
  }

  const auto& j = roads.jam;
  if (!(j.sigma > 0.0)) err("/roads/jam/sigma", "must be > 0");
  if (!(j.jam_probability >= 0.0 && j.jam_probability <= 1.0)) {
    err("/roads/jam/jam_probability", "must be in [0, 1]");
  }
  if (!(j.weibull_shape > 0.0)) err("/roads/jam/weibull_shape", "must be > 0");
  if (!(j.weibull_scale > 0.0)) err("/roads/jam/weibull_scale", "must be > 0");
  check_hazard(errors, "/roads/maintenance", roads.maintenance);
  if (roads.maintenance.breakdown_probability != 0.0) {
    err("/roads/maintenance/breakdown_probability", "roads cannot break down");
  }
  if (!(roads.penalty_mean >= 0.0)) err("/roads/maintenance/penalty_mean", "must be >= 0");
  if (!(roads.penalty_std >= 0.0)) err("/roads/maintenance/penalty_std", "must be >= 0");

  if (!(cfg.simulation.duration > 0.0)) err("/simulation/duration", "must be > 0");
  if (cfg.simulation.tick_interval < 1) err("/simulation/tick_interval", "must be >= 1");
  return errors;
}

MineConfig parse_config_string(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError({fmt::format("/: not valid JSON ({})", e.what())});
  }
  return parse_config_json(doc);
}

MineConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({fmt::format("{}: cannot open file", path.string())});
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_string(buffer.str());
}

json to_json(const MineConfig& cfg) {
  json fleets = json::array();
  for (const auto& f : cfg.charging.fleets) {
    fleets.push_back({{"type", f.type},
                      {"count", f.count},
                      {"capacity", f.capacity},
                      {"speed", f.speed},
                      {"hazard", hazard_json(f.hazard)}});
  }
  json loads = json::array();
  for (const auto& s : cfg.load_sites) {
    json shovels = json::array();
    for (const auto& v : s.shovels) {
      shovels.push_back({{"type", v.type},
                         {"count", v.count},
                         {"bucket_size", v.bucket_size},
                         {"cycle_time", v.cycle_time},
                         {"hazard", hazard_json(v.hazard)}});
    }
    loads.push_back({{"name", s.name},
                     {"position", position_json(s.position)},
                     {"parking_capacity", s.parking_capacity},
                     {"shovels", std::move(shovels)}});
  }
  json dumps = json::array();
  for (const auto& s : cfg.dump_sites) {
    json spots = json::array();
    for (const auto& v : s.spots) spots.push_back({{"count", v.count}, {"unload_time", v.unload_time}});
    dumps.push_back(
        {{"name", s.name}, {"position", position_json(s.position)}, {"spots", std::move(spots)}});
  }
  json roads = {
      {"jam",
       {{"mu", cfg.roads.jam.mu},
        {"sigma", cfg.roads.jam.sigma},
        {"jam_probability", cfg.roads.jam.jam_probability},
        {"weibull_shape", cfg.roads.jam.weibull_shape},
        {"weibull_scale", cfg.roads.jam.weibull_scale}}},
      {"maintenance",
       {{"lambda", cfg.roads.maintenance.lambda},
        {"repair_mean", cfg.roads.maintenance.repair_mean},
        {"repair_std", cfg.roads.maintenance.repair_std},
        {"penalty_mean", cfg.roads.penalty_mean},
        {"penalty_std", cfg.roads.penalty_std}}},
  };
  if (cfg.roads.charging_to_load) roads["charging_to_load"] = *cfg.roads.charging_to_load;
  if (cfg.roads.load_to_dump) roads["load_to_dump"] = *cfg.roads.load_to_dump;

  return json{
      {"name", cfg.name},
      {"synthetic", cfg.synthetic},
      {"charging_site",
       {{"name", cfg.charging.name},
        {"position", position_json(cfg.charging.position)},
        {"fleets", std::move(fleets)}}},
      {"load_sites", std::move(loads)},
      {"dump_sites", std::move(dumps)},
      {"roads", std::move(roads)},
      {"simulation",
       {{"duration", cfg.simulation.duration},
        {"tick_interval", cfg.simulation.tick_interval},
        {"seed", cfg.simulation.seed}}},
  };
}

std::string emit_config(const MineConfig& config) { return to_json(config).dump(2) + "\n"; }

std::string config_hash(const MineConfig& config) {
  const std::string text = to_json(config).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

}  // namespace minesim
