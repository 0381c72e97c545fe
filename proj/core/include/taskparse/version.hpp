#pragma once

namespace taskparse {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace taskparse
