#pragma once

namespace growthlab {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace growthlab
