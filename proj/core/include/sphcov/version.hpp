#pragma once

namespace sphcov {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace sphcov
