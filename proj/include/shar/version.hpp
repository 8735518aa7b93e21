#pragma once

#define SHAR_VERSION_MAJOR 0
#define SHAR_VERSION_MINOR 1
#define SHAR_VERSION_PATCH 0

namespace shar {
inline constexpr const char* version = "0.1.0";
}
