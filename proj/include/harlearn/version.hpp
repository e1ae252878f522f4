#pragma once

namespace harlearn {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace harlearn
