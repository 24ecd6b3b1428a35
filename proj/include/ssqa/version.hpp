#pragma once

namespace ssqa {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace ssqa
