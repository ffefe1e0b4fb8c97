#pragma once

namespace statelp {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace statelp
