#ifndef SHELFCHECK_DIRECTION_HPP_
#define SHELFCHECK_DIRECTION_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "shelfcheck/geometry.hpp"

namespace shelfcheck {

/// The eight shelf directions. N points toward smaller y (up in the image),
/// E toward larger x.
enum class Direction : std::uint8_t { N, NE, E, SE, S, SW, W, NW };

inline constexpr std::array<Direction, 8> kAllDirections = {
    Direction::N, Direction::NE, Direction::E, Direction::SE,
    Direction::S, Direction::SW, Direction::W, Direction::NW};

inline constexpr Direction opposite(Direction d) {
  switch (d) {
    case Direction::N:  return Direction::S;
    case Direction::NE: return Direction::SW;
    case Direction::E:  return Direction::W;
    case Direction::SE: return Direction::NW;
    case Direction::S:  return Direction::N;
    case Direction::SW: return Direction::NE;
    case Direction::W:  return Direction::E;
    case Direction::NW: return Direction::SE;
  }
  throw std::invalid_argument("opposite: bad direction");
}

inline std::string_view direction_name(Direction d) {
  switch (d) {
    case Direction::N:  return "N";
    case Direction::NE: return "NE";
    case Direction::E:  return "E";
    case Direction::SE: return "SE";
    case Direction::S:  return "S";
    case Direction::SW: return "SW";
    case Direction::W:  return "W";
    case Direction::NW: return "NW";
  }
  throw std::invalid_argument("direction_name: bad direction");
}

inline std::optional<Direction> parse_direction(std::string_view s) {
  for (Direction d : kAllDirections) {
    if (direction_name(d) == s) return d;
  }
  return std::nullopt;
}

/// Unit displacement of one step along d, image convention (y down).
inline Point unit_vector(Direction d) {
  constexpr double r = 0.7071067811865476;  // 1/sqrt(2)
  switch (d) {
    case Direction::N:  return {0.0, -1.0};
    case Direction::NE: return {r, -r};
    case Direction::E:  return {1.0, 0.0};
    case Direction::SE: return {r, r};
    case Direction::S:  return {0.0, 1.0};
    case Direction::SW: return {-r, r};
    case Direction::W:  return {-1.0, 0.0};
    case Direction::NW: return {-r, -r};
  }
  throw std::invalid_argument("unit_vector: bad direction");
}

/// Grid step of one move along d as (row delta, col delta). Rows grow
/// southward, columns grow eastward.
inline std::pair<int, int> grid_offset(Direction d) {
  switch (d) {
    case Direction::N:  return {-1, 0};
    case Direction::NE: return {-1, 1};
    case Direction::E:  return {0, 1};
    case Direction::SE: return {1, 1};
    case Direction::S:  return {1, 0};
    case Direction::SW: return {1, -1};
    case Direction::W:  return {0, -1};
    case Direction::NW: return {-1, -1};
  }
  throw std::invalid_argument("grid_offset: bad direction");
}

/// Direction whose grid step equals (drow, dcol), if any.
inline std::optional<Direction> direction_from_grid_offset(int drow, int dcol) {
  for (Direction d : kAllDirections) {
    auto [r, c] = grid_offset(d);
    if (r == drow && c == dcol) return d;
  }
  return std::nullopt;
}

}  // namespace shelfcheck

#endif  // SHELFCHECK_DIRECTION_HPP_
