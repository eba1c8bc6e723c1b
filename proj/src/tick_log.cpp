#include "minesim/tick_log.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include <fmt/format.h>

namespace minesim::ticklog {

using nlohmann::json;

namespace {

std::string_view site_kind_name(SiteKind kind) {
  switch (kind) {
    case SiteKind::Charging: return "charging";
    case SiteKind::Load: return "load";
    case SiteKind::Dump: return "dump";
  }
  return "?";
}

SiteRef site_from_json(const json& j) {
  const auto kind = j.at(0).get<std::string>();
  const auto index = j.at(1).get<std::uint32_t>();
  if (kind == "charging") return SiteRef::charging();
  if (kind == "load") return SiteRef::load(LoadSiteId(index));
  if (kind == "dump") return SiteRef::dump(DumpSiteId(index));
  throw std::runtime_error(fmt::format("unknown site kind '{}'", kind));
}

template <typename Enum, std::size_t N>
Enum enum_from(const std::string& text, const std::array<Enum, N>& all) {
  for (auto e : all) {
    if (to_string(e) == text) return e;
  }
  throw std::runtime_error(fmt::format("unknown status '{}'", text));
}

constexpr std::array kAvailability = {Availability::Up, Availability::UnderRepair,
                                      Availability::Broken};
constexpr std::array kRoadStatus = {RoadStatus::Up, RoadStatus::UnderMaintenance};

}  // namespace

TickRecord emit_tick(const Network& net, double now) {
  TickRecord rec;
  rec.time = now;
  rec.trucks.reserve(net.trucks.size());
  for (const auto& t : net.trucks) {
    TruckTick tt;
    tt.id = t.id.value;
    tt.state = t.state;
    if (t.journey) {
      tt.position = position_at(*t.journey, now);
      tt.target = t.journey->destination;
    } else {
      const SiteRef here = t.current_site.value_or(SiteRef::charging());
      tt.position = net.position_of(here);
      tt.target = here;
    }
    rec.trucks.push_back(tt);
  }
  for (const auto& site : net.load_sites) {
    LoadSiteTick lt;
    lt.id = site.id.value;
    lt.parking = static_cast<std::uint32_t>(site.parking_queue.size());
    lt.tons_loaded = site.tons_loaded;
    for (ShovelId sid : site.shovels) {
      const auto& s = net.shovels[sid.index()];
      lt.shovels.push_back({s.id.value, s.status, static_cast<std::uint32_t>(s.queue.size())});
    }
    rec.load_sites.push_back(std::move(lt));
  }
  for (const auto& site : net.dump_sites) {
    DumpSiteTick dt;
    dt.id = site.id.value;
    dt.parking = static_cast<std::uint32_t>(site.parking_queue.size());
    dt.tons = site.total_tons_received;
    for (SpotId sid : site.spots) {
      const auto& s = net.spots[sid.index()];
      dt.spots.push_back({s.id.value, static_cast<std::uint32_t>(s.queue.size())});
    }
    rec.dump_sites.push_back(std::move(dt));
  }
  for (const auto& road : net.roads) {
    RoadTick rt;
    rt.id = road.id.value;
    rt.status = road.status;
    rt.occupancy = static_cast<std::uint32_t>(road.trucks_on_road.size());
    rt.jam_count = road.jam_count;
    for (TruckId id : road.trucks_on_road) {
      const auto& t = net.trucks[id.index()];
      if (t.jam_from <= now && now < t.jam_to) rt.jammed = true;
    }
    rec.roads.push_back(rt);
  }
  return rec;
}

json to_json(const TickRecord& r) {
  json trucks = json::array();
  for (const auto& t : r.trucks) {
    json jt = {{"id", t.id},
               {"x", t.position.x},
               {"y", t.position.y},
               {"state", to_string(t.state)}};
    if (t.target) jt["target"] = {site_kind_name(t.target->kind), t.target->index};
    trucks.push_back(std::move(jt));
  }
  json loads = json::array();
  for (const auto& l : r.load_sites) {
    json shovels = json::array();
    for (const auto& s : l.shovels) {
      shovels.push_back({{"id", s.id}, {"status", to_string(s.status)}, {"queue", s.queue}});
    }
    loads.push_back(
        {{"id", l.id}, {"parking", l.parking}, {"tons", l.tons_loaded}, {"shovels", shovels}});
  }
  json dumps = json::array();
  for (const auto& d : r.dump_sites) {
    json spots = json::array();
    for (const auto& s : d.spots) spots.push_back({{"id", s.id}, {"queue", s.queue}});
    dumps.push_back({{"id", d.id}, {"parking", d.parking}, {"tons", d.tons}, {"spots", spots}});
  }
  json roads = json::array();
  for (const auto& rd : r.roads) {
    roads.push_back({{"id", rd.id},
                     {"status", to_string(rd.status)},
                     {"occupancy", rd.occupancy},
                     {"jams", rd.jam_count},
                     {"jammed", rd.jammed}});
  }
  return {{"t", r.time},
          {"trucks", std::move(trucks)},
          {"load_sites", std::move(loads)},
          {"dump_sites", std::move(dumps)},
          {"roads", std::move(roads)}};
}

json to_json(const TickHeader& h) {
  return {{"schema", h.schema},     {"config_hash", h.config_hash}, {"policy", h.policy},
          {"seed", h.seed},         {"duration", h.duration},       {"tick_interval", h.tick_interval}};
}

TickRecord tick_from_json(const json& j) {
  TickRecord r;
  r.time = j.at("t").get<double>();
  for (const auto& jt : j.at("trucks")) {
    TruckTick t;
    t.id = jt.at("id").get<std::uint32_t>();
    t.position = {jt.at("x").get<double>(), jt.at("y").get<double>()};
    const auto state = truck_state_from_string(jt.at("state").get<std::string>());
    if (!state) throw std::runtime_error("unknown truck state");
    t.state = *state;
    if (auto it = jt.find("target"); it != jt.end()) t.target = site_from_json(*it);
    r.trucks.push_back(t);
  }
  for (const auto& jl : j.at("load_sites")) {
    LoadSiteTick l;
    l.id = jl.at("id").get<std::uint32_t>();
    l.parking = jl.at("parking").get<std::uint32_t>();
    l.tons_loaded = jl.at("tons").get<double>();
    for (const auto& js : jl.at("shovels")) {
      l.shovels.push_back({js.at("id").get<std::uint32_t>(),
                           enum_from(js.at("status").get<std::string>(), kAvailability),
                           js.at("queue").get<std::uint32_t>()});
    }
    r.load_sites.push_back(std::move(l));
  }
  for (const auto& jd : j.at("dump_sites")) {
    DumpSiteTick d;
    d.id = jd.at("id").get<std::uint32_t>();
    d.parking = jd.at("parking").get<std::uint32_t>();
    d.tons = jd.at("tons").get<double>();
    for (const auto& js : jd.at("spots")) {
      d.spots.push_back({js.at("id").get<std::uint32_t>(), js.at("queue").get<std::uint32_t>()});
    }
    r.dump_sites.push_back(std::move(d));
  }
  for (const auto& jr : j.at("roads")) {
    RoadTick rd;
    rd.id = jr.at("id").get<std::uint32_t>();
    rd.status = enum_from(jr.at("status").get<std::string>(), kRoadStatus);
    rd.occupancy = jr.at("occupancy").get<std::uint32_t>();
    rd.jam_count = jr.at("jams").get<std::uint64_t>();
    rd.jammed = jr.at("jammed").get<bool>();
    r.roads.push_back(rd);
  }
  return r;
}

void write_archive(std::ostream& out, const TickArchive& archive) {
  out << to_json(archive.header).dump() << '\n';
  for (const auto& r : archive.records) out << to_json(r).dump() << '\n';
}

void write_archive(const std::filesystem::path& path, const TickArchive& archive) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(fmt::format("cannot write {}", path.string()));
  write_archive(out, archive);
}

ReplayError::ReplayError(const std::string& what, std::optional<double> at_time)
    : std::runtime_error(at_time ? fmt::format("{} (at t={})", what, *at_time) : what),
      time_(at_time) {}

TickReader::TickReader(std::istream& in) : in_(in) {
  std::string line;
  if (!std::getline(in_, line)) throw ReplayError("tick archive is empty", std::nullopt);
  ++line_;
  json j;
  try {
    j = json::parse(line);
    header_.schema = j.at("schema").get<std::string>();
    header_.config_hash = j.at("config_hash").get<std::string>();
    header_.policy = j.at("policy").get<std::string>();
    header_.seed = j.at("seed").get<std::uint64_t>();
    header_.duration = j.at("duration").get<double>();
    header_.tick_interval = j.at("tick_interval").get<int>();
  } catch (const std::exception& e) {
    throw ReplayError(fmt::format("bad tick header: {}", e.what()), std::nullopt);
  }
  if (header_.schema != kTickSchema) {
    throw ReplayError(fmt::format("unsupported schema '{}'", header_.schema), std::nullopt);
  }
  if (header_.tick_interval < 1) throw ReplayError("tick interval must be >= 1", std::nullopt);
}

std::optional<TickRecord> TickReader::next() {
  std::string line;
  const double expected = static_cast<double>(index_) * header_.tick_interval;
  if (!std::getline(in_, line)) return std::nullopt;
  ++line_;
  TickRecord r;
  try {
    r = tick_from_json(json::parse(line));
  } catch (const std::exception& e) {
    throw ReplayError(fmt::format("line {}: malformed tick: {}", line_, e.what()), expected);
  }
  if (last_time_ && !(r.time > *last_time_)) {
    throw ReplayError(fmt::format("line {}: tick time {} does not advance", line_, r.time),
                      r.time);
  }
  if (r.time != expected) {
    throw ReplayError(fmt::format("line {}: expected tick at {}, found {}", line_, expected, r.time),
                      expected);
  }
  last_time_ = r.time;
  ++index_;
  return r;
}

TickArchive replay(std::istream& in) {
  TickReader reader(in);
  TickArchive archive;
  archive.header = reader.header();
  while (auto r = reader.next()) archive.records.push_back(std::move(*r));
  const auto interval = archive.header.tick_interval;
  const auto last = static_cast<long>(std::floor(archive.header.duration)) / interval * interval;
  const std::size_t expected = static_cast<std::size_t>(last / interval) + 1;
  if (archive.records.size() < expected) {
    const double missing = static_cast<double>(archive.records.size()) * interval;
    throw ReplayError(fmt::format("archive truncated: {} of {} ticks", archive.records.size(),
                                  expected),
                      missing);
  }
  if (archive.records.size() > expected) {
    throw ReplayError("archive has ticks past the run duration", archive.records.back().time);
  }
  return archive;
}

TickArchive replay(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ReplayError(fmt::format("cannot open {}", path.string()), std::nullopt);
  return replay(in);
}

}  // namespace minesim::ticklog
