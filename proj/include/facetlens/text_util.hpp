// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace facetlens::text {

inline constexpr char32_t kReplacementChar = 0xFFFD;

/// Decodes one code point starting at `pos`. Invalid or truncated sequences
/// yield U+FFFD and consume a single byte.
char32_t decodeUtf8(std::string_view s, std::size_t& pos);
void appendUtf8(std::string& out, char32_t cp);

/// Re-encodes `bytes` as valid UTF-8, substituting U+FFFD for every invalid byte.
std::string sanitizeUtf8(std::string_view bytes);

std::string toLowerAscii(std::string_view s);
bool isAsciiAlnum(char c);
std::string_view trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char delim);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

/// CRLF/CR to LF, NUL removal, blank runs collapsed to one space, trailing
/// blanks on each line dropped, and three or more consecutive newlines
/// collapsed to a paragraph break ("\n\n").
std::string normalizeWhitespace(std::string_view s);

/// Parses `key=value` lines. Blank lines and `#` comments are ignored.
/// Returns false (and leaves `out` partially filled) on the first line
/// without a '='; `bad_line` receives its 1-based number.
bool parseKeyValues(std::string_view content, std::map<std::string, std::string>& out,
                    std::size_t* bad_line = nullptr);

std::string readFile(const std::string& path);
void writeFileAtomic(const std::string& path, std::string_view content);

/// Hex SHA-256 of `data`.
std::string sha256Hex(std::string_view data);

}  // namespace facetlens::text
