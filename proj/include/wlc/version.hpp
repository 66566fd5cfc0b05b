#pragma once

namespace wlc {

inline constexpr const char* version = "0.1.0";

}  // namespace wlc
