#pragma once

namespace atomprune {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace atomprune
