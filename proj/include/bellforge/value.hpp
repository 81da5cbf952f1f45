#pragma once

#include <cstdio>
#include <string>
#include <variant>
#include <vector>

namespace bellforge {

// A discrete value in a variable's support: a signed unit / small integer
// label, an angle in radians on a declared grid, or a named label.
using Value = std::variant<int, double, std::string>;

inline std::string to_string(const Value& v) {
    if (std::holds_alternative<int>(v)) return std::to_string(std::get<int>(v));
    if (std::holds_alternative<double>(v)) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.17g", std::get<double>(v));
        return buf;
    }
    return std::get<std::string>(v);
}

// A variable assignment, used for witnesses and diagnostics.
using Binding = std::pair<std::string, Value>;

inline std::string to_string(const std::vector<Binding>& bindings) {
    std::string out;
    for (const auto& [name, value] : bindings) {
        if (!out.empty()) out += ", ";
        out += name + "=" + to_string(value);
    }
    return out;
}

} // namespace bellforge
