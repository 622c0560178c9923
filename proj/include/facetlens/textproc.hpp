// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace facetlens::textproc {

enum class Pos : std::uint8_t { Noun, ProperNoun, Adjective, Verb, Stopword, Number, Other };

std::string_view toString(Pos pos);
/// Accepts the upper-case names used in lexicon files ("NOUN", "PROPER_NOUN", ...).
std::optional<Pos> parsePos(std::string_view name);

struct Token {
  std::string surface;
  std::string norm;  ///< lowercased surface
  std::size_t index = 0;        ///< word position in the document
  std::size_t sentence_id = 0;
  Pos pos = Pos::Other;
};

/// One or two normalized words and the position of the first word at the
/// phrase's earliest occurrence.
struct Phrase {
  std::vector<std::string> words;
  std::size_t first_index = 0;

  std::string text() const;  ///< words joined by single spaces
  friend bool operator==(const Phrase&, const Phrase&) = default;
};

/// Phrases keyed by Phrase::text().
using PhraseMap = std::map<std::string, Phrase>;

/// Words are maximal runs of letters/digits with internal hyphens and
/// apostrophes; everything else separates words. A sentence ends at '.', '!'
/// or '?' followed by whitespace and an upper-case letter, and at blank lines.
std::vector<Token> tokenize(std::string_view text);

/// Word list and stoplist driving the tagger. Immutable after construction.
class Lexicon {
 public:
  /// The lexicon and stoplist compiled into the library from data/.
  static const Lexicon& builtin();

  /// `lexicon`: `word<TAB>TAG` lines; `stopwords`: one word per line.
  /// Throws facetlens::Error on malformed lexicon lines.
  static Lexicon parse(std::string_view lexicon, std::string_view stopwords);
  static Lexicon fromFiles(const std::string& lexicon_path, const std::string& stopwords_path);

  bool isStopword(std::string_view norm) const;
  std::optional<Pos> lookup(std::string_view norm) const;
  std::size_t size() const { return tags_.size(); }
  std::size_t stopwordCount() const { return stopwords_.size(); }

 private:
  std::unordered_map<std::string, Pos> tags_;
  std::unordered_set<std::string> stopwords_;
};

struct SuffixRule {
  std::string_view suffix;
  Pos pos;
};

/// Suffix heuristics applied to words missing from the lexicon, in order.
std::span<const SuffixRule> suffixRules();

/// At least two characters, at least one letter, and no lower-case letters.
bool isAllCaps(std::string_view surface);

/// Tags in place. Precedence: stoplist, digit-initial, lexicon,
/// capitalization (capitalized mid-sentence or all caps -> PROPER_NOUN),
/// suffix rules, then NOUN.
void tagPOS(std::span<Token> tokens, const Lexicon& lexicon = Lexicon::builtin());

/// tokenize + tagPOS
std::vector<Token> analyze(std::string_view text, const Lexicon& lexicon = Lexicon::builtin());

/// Bigram noun phrases: maximal within-sentence runs matching
/// (ADJECTIVE)*(NOUN|PROPER_NOUN)+, left-truncated to their final two words.
/// Single-word matches produce nothing.
PhraseMap extractNounPhrases(std::span<const Token> tokens);

/// Distinct PROPER_NOUN norms at their earliest position. With
/// `uppercase_only`, keeps only words written in capitals.
PhraseMap extractProperNounUnigrams(std::span<const Token> tokens, bool uppercase_only = false);

}  // namespace facetlens::textproc
