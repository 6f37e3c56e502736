#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace corekg {

// FNV-1a, 64 bit. Stable across platforms; used for query identities.
std::uint64_t fnv1a64(std::string_view text);

// Shortest decimal form that round-trips the exact double, via
// std::to_chars. Integral values print without an exponent or trailing
// ".0" ("2" not "2.0"); reading the text back yields the identical bits.
std::string fmt_double(double value);

// Strict reverse of fmt_double for TSV ingestion; throws ParseError on
// trailing junk or empty input.
double parse_double(std::string_view text);
std::uint64_t parse_u64(std::string_view text);

// Decodes one escape sequence after a backslash (character escapes plus
// \uXXXX and \UXXXXXXXX) and appends its UTF-8 bytes to `out`. `pos` sits
// on the character after the backslash and advances past the escape.
// Throws ParseError on malformed escapes and non-scalar code points.
void decode_escape(std::string_view s, std::size_t& pos, std::string& out);

std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);

bool starts_with(std::string_view s, std::string_view prefix);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

}  // namespace corekg
