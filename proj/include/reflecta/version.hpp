#pragma once

#define REFLECTA_VERSION "0.1.0"

namespace reflecta {
inline const char* version() { return REFLECTA_VERSION; }
}
