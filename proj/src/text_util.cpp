#include "declip/text_util.hpp"

#include <cctype>
#include <sstream>

namespace declip::text {

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string normalize(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        const auto u = static_cast<unsigned char>(c);
        if (u >= 0x80 || std::isalnum(u)) {
            out.push_back(static_cast<char>(std::tolower(u)));
        } else {
            out.push_back(' ');
        }
    }
    return out;
}

std::vector<std::string> tokenize(const std::string& s) {
    std::istringstream in(normalize(s));
    std::vector<std::string> tokens;
    std::string tok;
    while (in >> tok) tokens.push_back(tok);
    return tokens;
}

} // namespace declip::text
