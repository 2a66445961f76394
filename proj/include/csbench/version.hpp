#pragma once

namespace csbench {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace csbench
