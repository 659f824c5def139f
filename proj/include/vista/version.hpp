#pragma once

namespace vista {

inline constexpr const char* kToolVersion = "0.1.0";

} // namespace vista
