#pragma once

namespace denjoy {

inline constexpr const char* kCoreVersion = "0.3.0";

}  // namespace denjoy
