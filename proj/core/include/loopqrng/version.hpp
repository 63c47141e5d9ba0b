#pragma once

namespace loopqrng {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace loopqrng
