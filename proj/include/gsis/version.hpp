#pragma once

namespace gsis {

inline constexpr const char* kVersion = "0.1.0";

} // namespace gsis
