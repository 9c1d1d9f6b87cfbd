#pragma once

namespace ausn {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace ausn
