#ifndef NSVAC_CONFIG_HPP_
#define NSVAC_CONFIG_HPP_

#include <map>
#include <string>
#include <vector>

#include "nsvac/errors.hpp"

namespace nsvac {

/// Line-oriented "dotted.key = value" configuration. '#' starts a comment.
/// Emission is sorted by key, so parse(emit(c)) == c byte for byte.
class KeyValueConfig {
public:
    static KeyValueConfig parse_string(const std::string& text);
    static KeyValueConfig parse_file(const std::string& path);

    std::string emit() const;
    void save(const std::string& path) const;

    bool has(const std::string& key) const { return kv_.count(key) > 0; }
    void set(const std::string& key, const std::string& value) { kv_[key] = value; }
    void set_double(const std::string& key, double v);
    void set_int(const std::string& key, long v);

    std::string get_string(const std::string& key) const;
    std::string get_string_or(const std::string& key, const std::string& dflt) const;
    double get_double(const std::string& key) const;
    double get_double_or(const std::string& key, double dflt) const;
    long get_int(const std::string& key) const;
    long get_int_or(const std::string& key, long dflt) const;
    bool get_bool_or(const std::string& key, bool dflt) const;

    /// "key=value" override, as passed on the command line.
    void apply_override(const std::string& assignment);

    const std::map<std::string, std::string>& entries() const { return kv_; }
    bool operator==(const KeyValueConfig& o) const { return kv_ == o.kv_; }

private:
    std::map<std::string, std::string> kv_;
};

} // namespace nsvac

#endif
