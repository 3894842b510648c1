#pragma once

namespace mveg {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace mveg
