#pragma once

// Flat key = value files with [experiment] sections. Keys before the first
// section are run-level settings (seed, out, format).

#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "params.hpp"

namespace qclab {

struct ConfigEntry {
    std::string value;
    std::size_t line = 0;
};

struct ConfigFile {
    std::string path;
    std::map<std::string, ConfigEntry> global;
    std::map<std::string, std::map<std::string, ConfigEntry>> sections;
};

/// Parses `path`, appending every syntax problem to `errors`.
inline ConfigFile read_config(const std::string& path, std::vector<std::string>& errors) {
    ConfigFile cfg;
    cfg.path = path;
    std::ifstream in(path);
    if (!in) {
        errors.push_back(path + ": cannot open config file");
        return cfg;
    }
    std::string line, section;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string where = path + ":" + std::to_string(lineno);
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                errors.push_back(where + ": malformed section header");
                continue;
            }
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) errors.push_back(where + ": empty section name");
            if (cfg.sections.count(section)) errors.push_back(where + ": section [" + section + "] repeated");
            cfg.sections[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            errors.push_back(where + ": expected 'key = value'");
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            errors.push_back(where + ": missing key");
            continue;
        }
        auto& table = section.empty() ? cfg.global : cfg.sections[section];
        if (table.count(key)) {
            errors.push_back(where + ": key '" + key + "' repeated");
            continue;
        }
        table[key] = {value, lineno};
    }
    return cfg;
}

}  // namespace qclab
