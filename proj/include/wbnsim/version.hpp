#pragma once

namespace wbnsim {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace wbnsim
