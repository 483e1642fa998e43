#pragma once

// Flat key-value config with [section] headers, '#' comments.

#include "bregman/core.hpp"

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>

namespace bregman {

class ConfigError : public Error {
public:
    using Error::Error;
};

struct ConfigSection {
    std::string name;
    std::map<std::string, std::string> values;

    bool has(const std::string& key) const { return values.count(key) > 0; }

    std::string get(const std::string& key) const {
        auto it = values.find(key);
        if (it == values.end()) throw ConfigError("[" + name + "] missing key '" + key + "'");
        return it->second;
    }
    std::string get(const std::string& key, const std::string& def) const { return has(key) ? get(key) : def; }

    double get_double(const std::string& key) const { return parse_double(key, get(key)); }
    double get_double(const std::string& key, double def) const { return has(key) ? get_double(key) : def; }

    long get_int(const std::string& key, long def) const {
        if (!has(key)) return def;
        const std::string s = get(key);
        std::size_t pos = 0;
        long v = 0;
        try {
            v = std::stol(s, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos != s.size() || s.empty()) throw ConfigError("[" + name + "] '" + key + "' is not an integer: " + s);
        return v;
    }

    bool get_bool(const std::string& key, bool def) const {
        if (!has(key)) return def;
        const std::string s = get(key);
        if (s == "true" || s == "1" || s == "yes") return true;
        if (s == "false" || s == "0" || s == "no") return false;
        throw ConfigError("[" + name + "] '" + key + "' is not a boolean: " + s);
    }

    /// Whitespace- or comma-separated numbers.
    std::vector<double> get_list(const std::string& key) const {
        std::string s = get(key);
        for (char& c : s)
            if (c == ',') c = ' ';
        std::istringstream in(s);
        std::vector<double> out;
        std::string tok;
        while (in >> tok) out.push_back(parse_double(key, tok));
        return out;
    }

    /// Points separated by ';', coordinates by whitespace or ','.
    std::vector<Vector> get_points(const std::string& key) const {
        std::vector<Vector> pts;
        std::stringstream ss(get(key));
        std::string item;
        while (std::getline(ss, item, ';')) {
            ConfigSection tmp{name, {{key, item}}};
            const auto xs = tmp.get_list(key);
            if (xs.empty()) continue;
            pts.push_back(Eigen::Map<const Vector>(xs.data(), static_cast<Eigen::Index>(xs.size())));
        }
        return pts;
    }

private:
    double parse_double(const std::string& key, const std::string& s) const {
        std::size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos != s.size() || s.empty()) throw ConfigError("[" + name + "] '" + key + "' is not a number: " + s);
        return v;
    }
};

struct Config {
    ConfigSection global{"global", {}};
    std::vector<ConfigSection> sections;

    const ConfigSection* find(const std::string& name) const {
        for (const auto& s : sections)
            if (s.name == name) return &s;
        return nullptr;
    }
};

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline Config parse_config(std::istream& in) {
    Config cfg;
    ConfigSection* cur = &cfg.global;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
            const std::string name = trim(line.substr(1, line.size() - 2));
            if (name.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty section name");
            if (cfg.find(name)) throw ConfigError("line " + std::to_string(lineno) + ": duplicate section " + name);
            cfg.sections.push_back(ConfigSection{name, {}});
            cur = &cfg.sections.back();
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        cur->values[key] = trim(line.substr(eq + 1));
    }
    return cfg;
}

inline Config parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    return parse_config(in);
}

/// splitmix64 finalizer.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Per-experiment seed from the config seed and the experiment name.
inline std::uint64_t derive_seed(std::uint64_t seed, const std::string& name) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : name) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return splitmix64(seed ^ h);
}

}  // namespace bregman
