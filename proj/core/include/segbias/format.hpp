#pragma once

#include <cstdio>
#include <string>

namespace segbias {

/// 6 significant digits, "." decimal -- the report number format.
inline std::string format_sig6(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", value);
    return buf;
}

/// Quotes a CSV field only when it needs it.
inline std::string csv_field(const std::string& value) {
    if (value.find_first_of(",\"\n") == std::string::npos) return value;
    std::string quoted = "\"";
    for (char c : value) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

}  // namespace segbias
