#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace pet {

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);
std::string collapse_spaces(std::string_view s);

// Splits on any of the delimiter characters. Empty pieces are kept.
std::vector<std::string> split_any(std::string_view s, std::string_view delims);
std::vector<std::string> split_words(std::string_view s);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

// Lowercase word tokens; every non-alphanumeric character separates tokens.
std::vector<std::string> tokenize(std::string_view s);

// True when `word` occurs in `text` as a whole token.
bool contains_token(std::string_view text, std::string_view word);

// "{class} {index}" occurrences in order of appearance, e.g. "soapbar 1".
std::vector<std::string> find_entity_names(std::string_view text);

// "a x, a y, and a z"; "nothing" when empty.
std::string listing_phrase(const std::vector<std::string>& names);

// Replaces every "{key}" in `pattern`.
std::string fill(std::string pattern, std::string_view key, std::string_view value);

std::string hex64(unsigned long long v);

}  // namespace pet
