#pragma once

#include <filesystem>
#include <string>

#include "minesim/config.hpp"

namespace minesim::testing {

inline std::filesystem::path scenario(const std::string& name) {
  return std::filesystem::path(MINESIM_SCENARIO_DIR) / name;
}

// One fleet, one load site, one dump site; distances from coordinates.
inline MineConfig small_mine(int trucks = 1, int shovels = 1, int spots = 1) {
  MineConfig c;
  c.name = "small";
  c.synthetic = true;
  c.charging.position = {0, 0};
  c.charging.fleets.push_back({"T40", trucks, 40.0, 0.5, {}});
  LoadSiteConfig load;
  load.name = "load";
  load.position = {3, 4};
  load.shovels.push_back({"S10", shovels, 10.0, 1.0, {}});
  c.load_sites.push_back(load);
  DumpSiteConfig dump;
  dump.name = "dump";
  dump.position = {3, 8};
  dump.spots.push_back({spots, 2.0});
  c.dump_sites.push_back(dump);
  c.simulation.duration = 240;
  c.simulation.seed = 7;
  return c;
}

}  // namespace minesim::testing
