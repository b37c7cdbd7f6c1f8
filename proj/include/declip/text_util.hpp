#pragma once

#include <string>
#include <vector>

namespace declip::text {

std::string trim(const std::string& s);

// Shared normalization for the toy text encoder and vocabulary counting:
// ASCII letters lowercased, ASCII punctuation replaced by spaces, tokens
// split on whitespace. Bytes >= 0x80 pass through as token characters.
std::string normalize(const std::string& s);
std::vector<std::string> tokenize(const std::string& s);

} // namespace declip::text
