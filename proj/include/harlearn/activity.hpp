#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace harlearn {

/// The fixed seven-activity label set. Order is part of the contract:
/// posterior vectors, confusion matrices and reports all use this order.
enum class ActivityClass : std::uint8_t {
  walking = 0,
  sitting,
  standing,
  jogging,
  biking,
  upstairs,
  downstairs,
};

inline constexpr std::size_t kActivityCount = 7;

inline constexpr std::array<ActivityClass, kActivityCount> kAllActivities = {
    ActivityClass::walking,  ActivityClass::sitting,  ActivityClass::standing,
    ActivityClass::jogging,  ActivityClass::biking,   ActivityClass::upstairs,
    ActivityClass::downstairs,
};

constexpr std::string_view to_string(ActivityClass a) {
  switch (a) {
    case ActivityClass::walking: return "walking";
    case ActivityClass::sitting: return "sitting";
    case ActivityClass::standing: return "standing";
    case ActivityClass::jogging: return "jogging";
    case ActivityClass::biking: return "biking";
    case ActivityClass::upstairs: return "upstairs";
    case ActivityClass::downstairs: return "downstairs";
  }
  return "?";
}

inline std::optional<ActivityClass> activity_from_string(std::string_view s) {
  for (ActivityClass a : kAllActivities) {
    if (to_string(a) == s) return a;
  }
  return std::nullopt;
}

enum class BodyPosition : std::uint8_t { arm = 0, waist, wrist };

inline constexpr std::array<BodyPosition, 3> kAllPositions = {
    BodyPosition::arm, BodyPosition::waist, BodyPosition::wrist};

constexpr std::string_view to_string(BodyPosition p) {
  switch (p) {
    case BodyPosition::arm: return "arm";
    case BodyPosition::waist: return "waist";
    case BodyPosition::wrist: return "wrist";
  }
  return "?";
}

inline std::optional<BodyPosition> position_from_string(std::string_view s) {
  for (BodyPosition p : kAllPositions) {
    if (to_string(p) == s) return p;
  }
  return std::nullopt;
}

}  // namespace harlearn
