#pragma once

#include <cstdio>
#include <string>

namespace selfsim {

// 17 significant digits so every double round-trips through text.
inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace selfsim
