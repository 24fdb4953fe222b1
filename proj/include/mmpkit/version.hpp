#pragma once

namespace mmpkit {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace mmpkit
