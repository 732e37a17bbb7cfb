#pragma once

namespace cbrw {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace cbrw
