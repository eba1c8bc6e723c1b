#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "minesim/config.hpp"
#include "minesim/kpi.hpp"
#include "minesim/tick_log.hpp"

namespace minesim::render {

// Fill colour used for trucks in each state; distinct per state.
std::string_view state_color(TruckState state);

// Bird's-eye SVG of one tick: sites at config coordinates, trucks as
// state-coloured dots, queue-length badges at shovels and dump spots.
// Pure function of its inputs.
std::string render_frame(const ticklog::TickRecord& record, const MineConfig& config);

// "frame_00042.svg"
std::string frame_file_name(std::size_t tick_index);

struct NamedSeries {
  std::string name;
  kpi::Series points;
};

// Step-line chart of one or more series sharing the x axis.
std::string render_line_chart(const std::vector<NamedSeries>& series, std::string_view title,
                              std::string_view x_label, std::string_view y_label);

}  // namespace minesim::render
