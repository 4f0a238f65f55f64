#pragma once

#define CSE_VERSION_MAJOR 0
#define CSE_VERSION_MINOR 1
#define CSE_VERSION_PATCH 0
#define CSE_VERSION_STRING "0.1.0"

namespace cse {
inline constexpr const char* version() { return CSE_VERSION_STRING; }
}  // namespace cse
