#include "declip/config.hpp"

#include <sstream>

#include "declip/error.hpp"
#include "declip/io_util.hpp"
#include "declip/rng.hpp"
#include "declip/text_util.hpp"

namespace declip {

RunConfig RunConfig::from_file(const std::string& path) {
    RunConfig config;
    std::istringstream in(io::read_file(path));
    std::string line, section;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = text::trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[' && t.back() == ']') {
            section = text::trim(t.substr(1, t.size() - 2));
            if (section.empty())
                raise(Errc::malformed_line, path + ": line " + std::to_string(line_no) + ": empty section");
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            raise(Errc::malformed_line,
                  path + ": line " + std::to_string(line_no) + ": expected key=value, got '" + t + "'");
        const std::string key = text::trim(t.substr(0, eq));
        if (key.empty())
            raise(Errc::malformed_line, path + ": line " + std::to_string(line_no) + ": empty key");
        config.values_[section.empty() ? key : section + "." + key] = text::trim(t.substr(eq + 1));
    }
    return config;
}

std::string RunConfig::get(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

std::string RunConfig::require(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) raise(Errc::invalid_argument, "missing required config key: " + key);
    return it->second;
}

double RunConfig::get_double(const std::string& key, double fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
        return std::stod(it->second);
    } catch (const std::exception&) {
        raise(Errc::invalid_argument, "config key " + key + " is not a number: '" + it->second + "'");
    }
}

long long RunConfig::get_int(const std::string& key, long long fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
        return std::stoll(it->second);
    } catch (const std::exception&) {
        raise(Errc::invalid_argument, "config key " + key + " is not an integer: '" + it->second + "'");
    }
}

bool RunConfig::get_bool(const std::string& key, bool fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    const std::string& v = it->second;
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    raise(Errc::invalid_argument, "config key " + key + " is not a boolean: '" + v + "'");
}

std::uint64_t RunConfig::hash() const {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (const auto& [key, value] : values_) {
        h = rng::fnv1a64(key.data(), key.size(), h);
        h = rng::fnv1a64("=", 1, h);
        h = rng::fnv1a64(value.data(), value.size(), h);
        h = rng::fnv1a64("\n", 1, h);
    }
    return h;
}

} // namespace declip
