// SPDX-License-Identifier: Apache-2.0
#include "facetlens/textproc.hpp"

#include <array>

#include "facetlens/error.hpp"
#include "facetlens/text_util.hpp"

namespace facetlens::textproc {

namespace detail {
extern const std::string_view kBuiltinLexicon;
extern const std::string_view kBuiltinStopwords;
}  // namespace detail

namespace {

constexpr std::array<std::pair<Pos, std::string_view>, 7> kPosNames{{
    {Pos::Noun, "NOUN"},
    {Pos::ProperNoun, "PROPER_NOUN"},
    {Pos::Adjective, "ADJECTIVE"},
    {Pos::Verb, "VERB"},
    {Pos::Stopword, "STOPWORD"},
    {Pos::Number, "NUMBER"},
    {Pos::Other, "OTHER"},
}};

constexpr SuffixRule kSuffixRules[] = {
    {"ly", Pos::Other},        {"ing", Pos::Verb},        {"ed", Pos::Verb},
    {"ous", Pos::Adjective},   {"ful", Pos::Adjective},   {"ive", Pos::Adjective},
    {"al", Pos::Adjective},    {"able", Pos::Adjective},  {"ible", Pos::Adjective},
    {"less", Pos::Adjective},
};

// shortest stem a suffix rule may leave behind
constexpr std::size_t kMinStem = 3;

enum class CharClass { Word, Joiner, Terminator, Space, Newline, Other };

CharClass classify(char32_t cp) {
  if (cp < 0x80) {
    const char c = static_cast<char>(cp);
    if (text::isAsciiAlnum(c)) return CharClass::Word;
    if (c == '-' || c == '\'') return CharClass::Joiner;
    if (c == '.' || c == '!' || c == '?') return CharClass::Terminator;
    if (c == '\n') return CharClass::Newline;
    if (c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v') return CharClass::Space;
    return CharClass::Other;
  }
  if (cp == 0x2019) return CharClass::Joiner;  // right single quotation mark
  if (cp == 0x00A0) return CharClass::Space;
  if (cp == 0x00AA || cp == 0x00B5 || cp == 0x00BA) return CharClass::Word;
  if (cp <= 0x00BF || cp == 0x00D7 || cp == 0x00F7) return CharClass::Other;
  if ((cp >= 0x2000 && cp <= 0x2BFF) || (cp >= 0x3000 && cp <= 0x303F) ||
      (cp >= 0xFE30 && cp <= 0xFE4F) || (cp >= 0xFF00 && cp <= 0xFF0F) ||
      cp == text::kReplacementChar) {
    return CharClass::Other;
  }
  return CharClass::Word;
}

}  // namespace

std::string_view toString(Pos pos) {
  for (const auto& [p, name] : kPosNames) {
    if (p == pos) return name;
  }
  return "OTHER";
}

std::optional<Pos> parsePos(std::string_view name) {
  for (const auto& [p, n] : kPosNames) {
    if (n == name) return p;
  }
  return std::nullopt;
}

std::string Phrase::text() const { return text::join(words, " "); }

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> tokens;
  std::size_t sentence = 0;
  bool pending_break = false;
  bool sentence_has_tokens = false;
  std::size_t pos = 0;
  while (pos < s.size()) {
    const std::size_t start = pos;
    const char32_t cp = text::decodeUtf8(s, pos);
    const CharClass cls = classify(cp);

    if (cls == CharClass::Word) {
      // extend the word across internal joiners
      std::size_t end = pos;
      while (end < s.size()) {
        std::size_t probe = end;
        const CharClass next = classify(text::decodeUtf8(s, probe));
        if (next == CharClass::Word) {
          end = probe;
          continue;
        }
        if (next == CharClass::Joiner && probe < s.size()) {
          std::size_t after = probe;
          if (classify(text::decodeUtf8(s, after)) == CharClass::Word) {
            end = after;
            continue;
          }
        }
        break;
      }
      if (pending_break && sentence_has_tokens) {
        ++sentence;
        sentence_has_tokens = false;
      }
      pending_break = false;
      Token t;
      t.surface = std::string(s.substr(start, end - start));
      t.norm = text::toLowerAscii(t.surface);
      t.index = tokens.size();
      t.sentence_id = sentence;
      tokens.push_back(std::move(t));
      sentence_has_tokens = true;
      pos = end;
      continue;
    }

    if (cls == CharClass::Terminator) {
      // needs whitespace, then an upper-case letter
      std::size_t probe = pos;
      bool saw_space = false;
      while (probe < s.size()) {
        std::size_t p2 = probe;
        const CharClass c2 = classify(text::decodeUtf8(s, p2));
        if (c2 != CharClass::Space && c2 != CharClass::Newline) break;
        saw_space = true;
        probe = p2;
      }
      if (saw_space && probe < s.size() && s[probe] >= 'A' && s[probe] <= 'Z') {
        pending_break = true;
      }
      continue;
    }

    if (cls == CharClass::Newline) {
      // blank line: newline, optional blanks, newline
      std::size_t probe = pos;
      while (probe < s.size()) {
        std::size_t p2 = probe;
        const CharClass c2 = classify(text::decodeUtf8(s, p2));
        if (c2 == CharClass::Newline) {
          pending_break = true;
          break;
        }
        if (c2 != CharClass::Space) break;
        probe = p2;
      }
    }
  }
  return tokens;
}

Lexicon Lexicon::parse(std::string_view lexicon, std::string_view stopwords) {
  Lexicon lex;
  std::size_t line_no = 0;
  for (const auto& raw : text::split(lexicon, '\n')) {
    ++line_no;
    const auto line = text::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos) {
      throw Error("lexicon line " + std::to_string(line_no) + ": expected word<TAB>TAG");
    }
    const auto tag = parsePos(text::trim(line.substr(tab + 1)));
    if (!tag) {
      throw Error("lexicon line " + std::to_string(line_no) + ": unknown tag '" +
                  std::string(line.substr(tab + 1)) + "'");
    }
    lex.tags_[text::toLowerAscii(text::trim(line.substr(0, tab)))] = *tag;
  }
  for (const auto& raw : text::split(stopwords, '\n')) {
    const auto w = text::trim(raw);
    if (!w.empty() && w.front() != '#') lex.stopwords_.insert(text::toLowerAscii(w));
  }
  return lex;
}

Lexicon Lexicon::fromFiles(const std::string& lexicon_path, const std::string& stopwords_path) {
  return parse(text::readFile(lexicon_path), text::readFile(stopwords_path));
}

const Lexicon& Lexicon::builtin() {
  static const Lexicon lex = parse(detail::kBuiltinLexicon, detail::kBuiltinStopwords);
  return lex;
}

bool Lexicon::isStopword(std::string_view norm) const {
  return stopwords_.contains(std::string(norm));
}

std::optional<Pos> Lexicon::lookup(std::string_view norm) const {
  const auto it = tags_.find(std::string(norm));
  if (it == tags_.end()) return std::nullopt;
  return it->second;
}

std::span<const SuffixRule> suffixRules() { return kSuffixRules; }

bool isAllCaps(std::string_view surface) {
  if (surface.size() < 2) return false;
  bool letter = false;
  for (char c : surface) {
    if (c >= 'a' && c <= 'z') return false;
    if (c >= 'A' && c <= 'Z') letter = true;
  }
  return letter;
}

namespace {

Pos tagWord(const Token& t, bool sentence_start, const Lexicon& lexicon) {
  if (lexicon.isStopword(t.norm)) return Pos::Stopword;
  if (!t.surface.empty() && t.surface.front() >= '0' && t.surface.front() <= '9') {
    return Pos::Number;
  }
  if (auto hit = lexicon.lookup(t.norm)) return *hit;
  const bool capitalized = t.surface.front() >= 'A' && t.surface.front() <= 'Z';
  if ((capitalized && !sentence_start) || isAllCaps(t.surface)) return Pos::ProperNoun;
  for (const auto& rule : kSuffixRules) {
    if (t.norm.size() >= rule.suffix.size() + kMinStem && t.norm.ends_with(rule.suffix)) {
      return rule.pos;
    }
  }
  return Pos::Noun;
}

bool isNoun(Pos p) { return p == Pos::Noun || p == Pos::ProperNoun; }

}  // namespace

void tagPOS(std::span<Token> tokens, const Lexicon& lexicon) {
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const bool sentence_start = i == 0 || tokens[i - 1].sentence_id != tokens[i].sentence_id;
    tokens[i].pos = tagWord(tokens[i], sentence_start, lexicon);
  }
}

std::vector<Token> analyze(std::string_view text, const Lexicon& lexicon) {
  auto tokens = tokenize(text);
  tagPOS(tokens, lexicon);
  return tokens;
}

PhraseMap extractNounPhrases(std::span<const Token> tokens) {
  PhraseMap out;
  const std::size_t n = tokens.size();
  std::size_t i = 0;
  while (i < n) {
    if (tokens[i].pos != Pos::Adjective && !isNoun(tokens[i].pos)) {
      ++i;
      continue;
    }
    const std::size_t sentence = tokens[i].sentence_id;
    std::size_t j = i;
    while (j < n && tokens[j].sentence_id == sentence && tokens[j].pos == Pos::Adjective) ++j;
    std::size_t k = j;
    while (k < n && tokens[k].sentence_id == sentence && isNoun(tokens[k].pos)) ++k;
    if (k == j) {
      // adjectives not followed by a noun
      i = j > i ? j : i + 1;
      continue;
    }
    if (k - i >= 2) {
      Phrase p{{tokens[k - 2].norm, tokens[k - 1].norm}, tokens[k - 2].index};
      auto key = p.text();
      auto [it, inserted] = out.try_emplace(std::move(key), p);
      if (!inserted && p.first_index < it->second.first_index) it->second = std::move(p);
    }
    i = k;
  }
  return out;
}

PhraseMap extractProperNounUnigrams(std::span<const Token> tokens, bool uppercase_only) {
  PhraseMap out;
  for (const auto& t : tokens) {
    if (t.pos != Pos::ProperNoun) continue;
    if (uppercase_only && !isAllCaps(t.surface)) continue;
    // tokens arrive in index order, so the first insert is the earliest
    out.try_emplace(t.norm, Phrase{{t.norm}, t.index});
  }
  return out;
}

}  // namespace facetlens::textproc
