// SPDX-License-Identifier: Apache-2.0
#include "facetlens/mentions.hpp"

#include "facetlens/error.hpp"
#include "facetlens/text_util.hpp"

namespace facetlens::mentions {

std::string_view toString(MentionKind kind) {
  switch (kind) {
    case MentionKind::Term:
      return "term";
    case MentionKind::Gazetteer:
      return "gazetteer";
    case MentionKind::Regex:
      return "regex";
  }
  return "term";
}

MentionSpec MentionSpec::merged(const MentionSpec& other) const {
  MentionSpec out = *this;
  out.entries.insert(out.entries.end(), other.entries.begin(), other.entries.end());
  return out;
}

MentionSpec parseMentionSpec(std::string_view content, const std::filesystem::path& base_dir) {
  MentionSpec spec;
  std::size_t line_no = 0;
  for (auto raw : text::split(content, '\n')) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (text::trim(raw).empty() || raw.front() == '#') continue;
    const auto cols = text::split(raw, '\t');
    auto fail = [&](const std::string& why) {
      return Error("mention spec line " + std::to_string(line_no) + ": " + why);
    };
    if (cols.size() != 3) throw fail("expected category<TAB>kind<TAB>pattern");
    const std::string category(text::trim(cols[0]));
    const std::string kind = text::toLowerAscii(text::trim(cols[1]));
    const std::string& pattern = cols[2];
    if (category.empty()) throw fail("empty category");
    if (pattern.empty()) throw fail("empty pattern");

    if (kind == "term") {
      spec.entries.push_back({category, MentionKind::Term, std::string(text::trim(pattern)), nullptr});
    } else if (kind == "regex") {
      std::shared_ptr<const std::regex> re;
      try {
        re = std::make_shared<const std::regex>(pattern, std::regex::ECMAScript);
      } catch (const std::regex_error& e) {
        throw Error("mention spec line " + std::to_string(line_no) + ": bad regex '" + pattern +
                    "': " + e.what());
      }
      spec.entries.push_back({category, MentionKind::Regex, pattern, std::move(re)});
    } else if (kind == "gazetteer") {
      std::filesystem::path path(std::string(text::trim(pattern)));
      if (path.is_relative() && !base_dir.empty()) path = base_dir / path;
      std::string dict;
      try {
        dict = text::readFile(path.string());
      } catch (const Error& e) {
        throw fail(std::string("gazetteer: ") + e.what());
      }
      for (const auto& entry : text::split(dict, '\n')) {
        const auto term = text::trim(entry);
        if (term.empty() || term.front() == '#') continue;
        spec.entries.push_back({category, MentionKind::Gazetteer, std::string(term), nullptr});
      }
    } else {
      throw fail("unknown kind '" + kind + "' (expected term, gazetteer or regex)");
    }
  }
  return spec;
}

MentionSpec parseMentionSpecFile(const std::filesystem::path& path) {
  return parseMentionSpec(text::readFile(path.string()), path.parent_path());
}

namespace {

bool isWordByte(char c) { return text::isAsciiAlnum(c) || static_cast<unsigned char>(c) >= 0x80; }

bool isSpace(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

// Non-overlapping whole-word occurrences of `pieces` (lowercased words of the
// term) in `lower` (lowercased text).
std::size_t countTerm(std::string_view lower, const std::vector<std::string>& pieces) {
  if (pieces.empty()) return 0;
  const std::string& head = pieces.front();
  const bool check_before = isWordByte(head.front());
  const bool check_after = isWordByte(pieces.back().back());
  std::size_t count = 0;
  std::size_t from = 0;
  while (true) {
    const std::size_t p = lower.find(head, from);
    if (p == std::string_view::npos) return count;
    from = p + 1;
    if (check_before && p > 0 && isWordByte(lower[p - 1])) continue;
    std::size_t q = p + head.size();
    bool ok = true;
    for (std::size_t i = 1; i < pieces.size() && ok; ++i) {
      if (q >= lower.size() || !isSpace(lower[q])) {
        ok = false;
        break;
      }
      while (q < lower.size() && isSpace(lower[q])) ++q;
      if (lower.compare(q, pieces[i].size(), pieces[i]) != 0) ok = false;
      q += pieces[i].size();
    }
    if (!ok) continue;
    if (check_after && q < lower.size() && isWordByte(lower[q])) continue;
    ++count;
    from = q;
  }
}

std::vector<std::string> termPieces(std::string_view term) {
  std::vector<std::string> pieces;
  std::string cur;
  for (char c : text::toLowerAscii(term)) {
    if (isSpace(c)) {
      if (!cur.empty()) pieces.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) pieces.push_back(std::move(cur));
  return pieces;
}

}  // namespace

std::map<std::string, std::size_t> scanDocument(std::string_view text, const MentionSpec& spec) {
  std::map<std::string, std::size_t> hits;
  std::string lower;
  bool lowered = false;
  for (const auto& e : spec.entries) {
    std::size_t n = 0;
    if (e.kind == MentionKind::Regex) {
      if (!e.compiled) continue;
      using It = std::regex_iterator<std::string_view::const_iterator>;
      for (It it(text.begin(), text.end(), *e.compiled), end; it != end; ++it) {
        if (it->length(0) > 0) ++n;
      }
    } else {
      if (!lowered) {
        lower = text::toLowerAscii(text);
        lowered = true;
      }
      n = countTerm(lower, termPieces(e.pattern));
    }
    if (n > 0) hits[e.category] += n;
  }
  return hits;
}

std::string formatTermSpec(std::string_view category, std::span<const std::string> terms) {
  std::string out;
  for (const auto& t : terms) {
    if (t.empty() || t.find_first_of("\t\n\r") != std::string::npos) continue;
    out.append(category).append("\tterm\t").append(t).push_back('\n');
  }
  return out;
}

}  // namespace facetlens::mentions
