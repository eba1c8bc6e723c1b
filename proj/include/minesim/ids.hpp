#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>

namespace minesim {

// Index-backed identifier. The tag keeps truck, shovel and site ids from
// being mixed up at call sites.
template <typename Tag>
struct Id {
  std::uint32_t value{};

  constexpr Id() = default;
  constexpr explicit Id(std::size_t v) : value(static_cast<std::uint32_t>(v)) {}

  constexpr std::size_t index() const { return value; }

  constexpr auto operator<=>(const Id&) const = default;
  constexpr bool operator==(const Id&) const = default;
};

using TruckId = Id<struct TruckTag>;
using ShovelId = Id<struct ShovelTag>;
using SpotId = Id<struct SpotTag>;
using LoadSiteId = Id<struct LoadSiteTag>;
using DumpSiteId = Id<struct DumpSiteTag>;
using RoadId = Id<struct RoadTag>;

enum class SiteKind : std::uint8_t { Charging, Load, Dump };

// A node of the road network. `index` is ignored for the charging site.
struct SiteRef {
  SiteKind kind{SiteKind::Charging};
  std::uint32_t index{};

  static constexpr SiteRef charging() { return {SiteKind::Charging, 0}; }
  static constexpr SiteRef load(LoadSiteId id) { return {SiteKind::Load, id.value}; }
  static constexpr SiteRef dump(DumpSiteId id) { return {SiteKind::Dump, id.value}; }

  constexpr auto operator<=>(const SiteRef&) const = default;
  constexpr bool operator==(const SiteRef&) const = default;
};

struct Vec2 {
  double x{};
  double y{};

  constexpr bool operator==(const Vec2&) const = default;
};

double distance(Vec2 a, Vec2 b);
Vec2 lerp(Vec2 a, Vec2 b, double t);

}  // namespace minesim
