#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace declip {

// Flat "section.key" -> value view of an INI-style config file
// ([section] headers, key=value lines, '#' comments). Flag overrides are
// applied on top; the hash of the resolved map stamps run outputs.
class RunConfig {
public:
    RunConfig() = default;
    static RunConfig from_file(const std::string& path);

    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    bool has(const std::string& key) const { return values_.count(key) != 0; }

    std::string get(const std::string& key, const std::string& fallback) const;
    std::string require(const std::string& key) const; // throws Errc::invalid_argument
    double get_double(const std::string& key, double fallback) const;
    long long get_int(const std::string& key, long long fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

    // FNV-1a over the sorted canonical "key=value" lines.
    std::uint64_t hash() const;
    const std::map<std::string, std::string>& values() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

} // namespace declip
