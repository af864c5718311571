#include "nsvac/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace nsvac {

namespace {
std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}
} // namespace

KeyValueConfig KeyValueConfig::parse_string(const std::string& text) {
    KeyValueConfig c;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": missing '='");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        c.kv_[key] = value;
    }
    return c;
}

KeyValueConfig KeyValueConfig::parse_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_string(ss.str());
}

std::string KeyValueConfig::emit() const {
    std::ostringstream os;
    for (const auto& [k, v] : kv_) os << k << " = " << v << "\n";
    return os.str();
}

void KeyValueConfig::save(const std::string& path) const {
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot write config file: " + path);
    f << emit();
}

void KeyValueConfig::set_double(const std::string& key, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    kv_[key] = buf;
}

void KeyValueConfig::set_int(const std::string& key, long v) { kv_[key] = std::to_string(v); }

std::string KeyValueConfig::get_string(const std::string& key) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) throw ConfigError("missing config key: " + key);
    return it->second;
}

std::string KeyValueConfig::get_string_or(const std::string& key, const std::string& dflt) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? dflt : it->second;
}

double KeyValueConfig::get_double(const std::string& key) const {
    const std::string s = get_string(key);
    try {
        size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw ConfigError("");
        return v;
    } catch (...) {
        throw ConfigError("config key " + key + ": not a number: " + s);
    }
}

double KeyValueConfig::get_double_or(const std::string& key, double dflt) const {
    return has(key) ? get_double(key) : dflt;
}

long KeyValueConfig::get_int(const std::string& key) const {
    const std::string s = get_string(key);
    try {
        size_t pos = 0;
        long v = std::stol(s, &pos);
        if (pos != s.size()) throw ConfigError("");
        return v;
    } catch (...) {
        throw ConfigError("config key " + key + ": not an integer: " + s);
    }
}

long KeyValueConfig::get_int_or(const std::string& key, long dflt) const {
    return has(key) ? get_int(key) : dflt;
}

bool KeyValueConfig::get_bool_or(const std::string& key, bool dflt) const {
    if (!has(key)) return dflt;
    const std::string s = get_string(key);
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw ConfigError("config key " + key + ": not a boolean: " + s);
}

void KeyValueConfig::apply_override(const std::string& assignment) {
    size_t eq = assignment.find('=');
    if (eq == std::string::npos)
        throw ConfigError("override must look like key=value: " + assignment);
    std::string key = trim(assignment.substr(0, eq));
    std::string value = trim(assignment.substr(eq + 1));
    if (key.empty()) throw ConfigError("override with empty key");
    kv_[key] = value;
}

} // namespace nsvac
