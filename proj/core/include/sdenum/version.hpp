#pragma once

namespace sdenum {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace sdenum
