#pragma once

namespace interfero {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace interfero
