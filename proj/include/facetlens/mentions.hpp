// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <regex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace facetlens::mentions {

enum class MentionKind { Term, Gazetteer, Regex };

std::string_view toString(MentionKind kind);

struct MentionEntry {
  std::string category;
  MentionKind kind = MentionKind::Term;
  /// The term, one gazetteer entry, or the regex source.
  std::string pattern;
  std::shared_ptr<const std::regex> compiled;  ///< set for Regex entries
};

struct MentionSpec {
  std::vector<MentionEntry> entries;

  /// Entries of `this` followed by those of `other`.
  MentionSpec merged(const MentionSpec& other) const;
};

/// Parses `category<TAB>kind<TAB>pattern` lines; kind is term, gazetteer or
/// regex. Blank lines and lines starting with '#' are skipped. A gazetteer
/// pattern names a one-term-per-line file, resolved against `base_dir` when
/// relative and expanded into one entry per term. Throws facetlens::Error
/// with the line number for malformed lines and with the pattern for bad
/// regexes.
MentionSpec parseMentionSpec(std::string_view content,
                             const std::filesystem::path& base_dir = {});
MentionSpec parseMentionSpecFile(const std::filesystem::path& path);

/// Category -> total non-overlapping matches. Terms and gazetteer entries
/// match case-insensitively on whole words (whitespace inside a term matches
/// any whitespace run); regexes match case-sensitively on the raw text.
/// Categories without matches are absent.
std::map<std::string, std::size_t> scanDocument(std::string_view text, const MentionSpec& spec);

/// Serializes terms as a `term` MentionSpec for `category`, e.g. to load
/// discriminative terms mined from training sets.
std::string formatTermSpec(std::string_view category, std::span<const std::string> terms);

}  // namespace facetlens::mentions
