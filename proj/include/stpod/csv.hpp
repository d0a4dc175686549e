#pragma once

#include <cstdio>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace stpod::csv {

/// Round-trippable decimal form of a double.
inline std::string fmt(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

inline std::vector<std::string> split(const std::string& line, char sep = ',') {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(line);
    while (std::getline(in, item, sep)) out.push_back(item);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

/// Parses "k1=v1,k2=v2" into a map.
inline std::map<std::string, std::string> parse_pairs(const std::string& line) {
    std::map<std::string, std::string> out;
    for (const auto& item : split(line)) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) continue;
        out[item.substr(0, eq)] = item.substr(eq + 1);
    }
    return out;
}

}  // namespace stpod::csv
