// SPDX-License-Identifier: Apache-2.0
#include "facetlens/ingest.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <system_error>
#include <thread>

#include "facetlens/error.hpp"
#include "facetlens/text_util.hpp"

namespace facetlens::ingest {

namespace fs = std::filesystem;

std::string_view toString(IssueKind kind) {
  switch (kind) {
    case IssueKind::Unsupported:
      return "unsupported";
    case IssueKind::Unreadable:
      return "unreadable";
    case IssueKind::Undecodable:
      return "undecodable";
    case IssueKind::MalformedSidecar:
      return "malformed-sidecar";
  }
  return "unknown";
}

namespace {

bool parseBool(const std::string& key, const std::string& v) {
  const auto s = text::toLowerAscii(v);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw Error("config key '" + key + "': expected a boolean, got '" + v + "'");
}

}  // namespace

IngestConfig IngestConfig::fromKeyValues(const std::map<std::string, std::string>& kv) {
  IngestConfig config;
  for (const auto& [key, value] : kv) {
    if (key == "root") {
      config.root = value;
    } else if (key == "include_hidden") {
      config.include_hidden = parseBool(key, value);
    } else if (key == "extensions") {
      config.extensions.clear();
      for (const auto& ext : text::split(value, ',')) {
        auto e = text::toLowerAscii(text::trim(ext));
        if (!e.empty() && e.front() == '.') e.erase(0, 1);
        if (!e.empty()) config.extensions.push_back(std::move(e));
      }
    } else if (key == "workers") {
      try {
        const long n = std::stol(value);
        if (n < 1) throw Error("");
        config.workers = static_cast<unsigned>(n);
      } catch (const std::exception&) {
        throw Error("config key 'workers': expected a positive integer, got '" + value + "'");
      }
    } else {
      throw Error("unknown ingest config key: " + key);
    }
  }
  return config;
}

IngestConfig IngestConfig::fromFile(const fs::path& path) {
  std::map<std::string, std::string> kv;
  std::size_t bad = 0;
  if (!text::parseKeyValues(text::readFile(path.string()), kv, &bad)) {
    throw Error(path.string() + ":" + std::to_string(bad) + ": expected key=value");
  }
  return fromKeyValues(kv);
}

bool IngestConfig::supports(std::string_view format_tag) const {
  return std::find(extensions.begin(), extensions.end(), format_tag) != extensions.end();
}

std::string detectFormat(const fs::path& path) {
  const std::string name = path.filename().string();
  const auto dot = name.rfind('.');
  // ".bashrc" is a hidden file with no extension
  if (dot == std::string::npos || dot == 0 || dot + 1 == name.size()) return "none";
  return text::toLowerAscii(name.substr(dot + 1));
}

fs::path sidecarPath(const fs::path& path) {
  fs::path p = path;
  p += ".meta";
  return p;
}

FileMetadata extractMetadata(const fs::path& path, const std::optional<fs::path>& sidecar,
                             std::vector<IngestIssue>* warnings) {
  FileMetadata meta;
  std::error_code ec;
  const auto ft = fs::last_write_time(path, ec);
  if (ec) throw Error("cannot stat " + path.string() + ": " + ec.message());
  meta.last_modified =
      std::chrono::floor<std::chrono::seconds>(std::chrono::file_clock::to_sys(ft));

  if (!sidecar || !fs::exists(*sidecar, ec)) return meta;
  std::map<std::string, std::string> kv;
  std::size_t bad = 0;
  bool ok = false;
  std::string reason;
  try {
    const std::string content = text::readFile(sidecar->string());
    if (text::sanitizeUtf8(content) != content) {
      reason = "sidecar is not valid UTF-8";
    } else if (!text::parseKeyValues(content, kv, &bad)) {
      reason = "line " + std::to_string(bad) + ": expected key=value";
    } else {
      ok = true;
    }
  } catch (const Error& e) {
    reason = e.what();
  }
  if (!ok) {
    if (warnings) {
      warnings->push_back({sidecar->string(), IssueKind::MalformedSidecar, reason});
    }
    return meta;
  }
  if (auto it = kv.find("author"); it != kv.end() && !it->second.empty()) {
    meta.author = it->second;
  }
  return meta;
}

std::string extractPlainText(std::string_view bytes) {
  const std::size_t probe = std::min<std::size_t>(bytes.size(), 4096);
  const auto nuls = std::count(bytes.begin(), bytes.begin() + static_cast<long>(probe), '\0');
  if (probe > 0 && static_cast<std::size_t>(nuls) * 8 > probe) {
    throw UndecodableError("binary content (NUL bytes); not decodable as text");
  }
  return text::sanitizeUtf8(bytes);
}

namespace {

struct Entity {
  std::string_view name;
  char32_t cp;
};

constexpr Entity kEntities[] = {
    {"amp", '&'},      {"lt", '<'},       {"gt", '>'},       {"quot", '"'},
    {"apos", '\''},    {"nbsp", ' '},     {"mdash", 0x2014}, {"ndash", 0x2013},
    {"hellip", 0x2026}, {"copy", 0x00A9}, {"reg", 0x00AE},   {"lsquo", 0x2018},
    {"rsquo", 0x2019}, {"ldquo", 0x201C}, {"rdquo", 0x201D}, {"bull", 0x2022},
    {"middot", 0x00B7}, {"deg", 0x00B0},  {"trade", 0x2122}, {"sect", 0x00A7},
};

constexpr std::string_view kBlockTags[] = {
    "address", "article", "aside", "blockquote", "br",    "dd",      "div",    "dl",
    "dt",      "footer",  "h1",    "h2",         "h3",    "h4",      "h5",     "h6",
    "header",  "hr",      "li",    "main",       "nav",   "ol",      "p",      "pre",
    "section", "table",   "td",    "th",         "title", "tr",      "ul",     "body",
};

bool iequalsPrefix(std::string_view s, std::size_t pos, std::string_view word) {
  if (pos + word.size() > s.size()) return false;
  for (std::size_t i = 0; i < word.size(); ++i) {
    char c = s[pos + i];
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    if (c != word[i]) return false;
  }
  return true;
}

// Decodes the entity starting at s[pos] == '&'. On success appends and returns
// the index just past ';'.
std::optional<std::size_t> decodeEntity(std::string_view s, std::size_t pos, std::string& out) {
  const auto semi = s.find(';', pos + 1);
  if (semi == std::string_view::npos || semi - pos > 12) return std::nullopt;
  const std::string_view body = s.substr(pos + 1, semi - pos - 1);
  if (body.empty()) return std::nullopt;
  if (body.front() == '#') {
    char32_t cp = 0;
    const bool hex = body.size() > 1 && (body[1] == 'x' || body[1] == 'X');
    const std::string_view digits = body.substr(hex ? 2 : 1);
    if (digits.empty()) return std::nullopt;
    for (char c : digits) {
      int v = -1;
      if (c >= '0' && c <= '9') v = c - '0';
      else if (hex && c >= 'a' && c <= 'f') v = c - 'a' + 10;
      else if (hex && c >= 'A' && c <= 'F') v = c - 'A' + 10;
      if (v < 0) return std::nullopt;
      cp = cp * (hex ? 16 : 10) + static_cast<char32_t>(v);
      if (cp > 0x10FFFF) return std::nullopt;
    }
    if (cp == 0 || (cp >= 0xD800 && cp <= 0xDFFF)) cp = text::kReplacementChar;
    text::appendUtf8(out, cp);
    return semi + 1;
  }
  for (const auto& e : kEntities) {
    if (body == e.name) {
      text::appendUtf8(out, e.cp);
      return semi + 1;
    }
  }
  return std::nullopt;
}

}  // namespace

std::string extractHtmlText(std::string_view raw) {
  const std::string clean = text::sanitizeUtf8(raw);
  const std::string_view s = clean;
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (c == '&') {
      if (auto next = decodeEntity(s, i, out)) {
        i = *next;
        continue;
      }
      out.push_back(c);
      ++i;
      continue;
    }
    if (c != '<') {
      out.push_back(c);
      ++i;
      continue;
    }
    if (s.compare(i, 4, "<!--") == 0) {
      const auto end = s.find("-->", i + 4);
      i = end == std::string_view::npos ? s.size() : end + 3;
      continue;
    }
    // tag name
    std::size_t j = i + 1;
    const bool closing = j < s.size() && s[j] == '/';
    if (closing) ++j;
    const std::size_t name_start = j;
    while (j < s.size() && text::isAsciiAlnum(s[j])) ++j;
    const std::string name = text::toLowerAscii(s.substr(name_start, j - name_start));
    if (name.empty() && !(j < s.size() && (s[j] == '!' || s[j] == '?'))) {
      // a bare '<' in text
      out.push_back(c);
      ++i;
      continue;
    }
    const auto gt = s.find('>', j);
    const std::size_t after = gt == std::string_view::npos ? s.size() : gt + 1;
    if (!closing && (name == "script" || name == "style")) {
      const std::string close = "</" + name;
      std::size_t k = after;
      while (k < s.size() && !iequalsPrefix(s, k, close)) ++k;
      if (k < s.size()) {
        const auto close_gt = s.find('>', k);
        i = close_gt == std::string_view::npos ? s.size() : close_gt + 1;
      } else {
        i = s.size();
      }
      continue;
    }
    if (std::find(std::begin(kBlockTags), std::end(kBlockTags), name) != std::end(kBlockTags)) {
      out.push_back('\n');
    }
    i = after;
  }
  return out;
}

const ExtractorRegistry& ExtractorRegistry::defaults() {
  static const ExtractorRegistry registry = [] {
    ExtractorRegistry r;
    for (const char* f : {"txt", "md", "log", "csv"}) r.add(f, &extractPlainText);
    for (const char* f : {"html", "htm"}) r.add(f, &extractHtmlText);
    return r;
  }();
  return registry;
}

void ExtractorRegistry::add(std::string format_tag, Extractor extractor) {
  extractors_[std::move(format_tag)] = std::move(extractor);
}

const Extractor* ExtractorRegistry::find(std::string_view format_tag) const {
  const auto it = extractors_.find(format_tag);
  return it == extractors_.end() ? nullptr : &it->second;
}

std::string extractText(const fs::path& path, std::string_view format_tag,
                        const ExtractorRegistry& registry) {
  const Extractor* extractor = registry.find(format_tag);
  if (extractor == nullptr) throw Error("no extractor for format '" + std::string(format_tag) + "'");
  const std::string bytes = text::readFile(path.string());
  return text::normalizeWhitespace((*extractor)(bytes));
}

std::set<std::string> folderTags(const fs::path& relative) {
  std::set<std::string> tags{std::string(kRootFolderTag)};
  std::string prefix;
  for (const auto& part : relative.parent_path()) {
    const std::string s = part.generic_string();
    if (s.empty() || s == ".") continue;
    prefix = prefix.empty() ? s : prefix + "/" + s;
    tags.insert(prefix);
  }
  return tags;
}

Document makeDocument(const fs::path& root, const fs::path& file,
                      const ExtractorRegistry& registry, std::vector<IngestIssue>* warnings) {
  Document doc;
  doc.format_tag = detectFormat(file);
  doc.text = extractText(file, doc.format_tag, registry);
  doc.doc_id = text::sha256Hex(doc.text);
  doc.source_path = fs::absolute(file).lexically_normal().string();
  doc.byte_size = fs::file_size(file);
  const auto meta = extractMetadata(file, sidecarPath(file), warnings);
  doc.author = meta.author;
  doc.last_modified = meta.last_modified;
  doc.folder_tags = folderTags(file.lexically_relative(root));
  return doc;
}

namespace {

bool isHidden(const fs::path& p) {
  const auto name = p.filename().string();
  return !name.empty() && name.front() == '.';
}

}  // namespace

WalkStats walkAndExtract(const IngestConfig& config, const std::function<void(Document)>& sink,
                         const std::function<void(IngestIssue)>& on_issue,
                         const ExtractorRegistry& registry) {
  std::error_code ec;
  if (!fs::is_directory(config.root, ec)) {
    throw Error("ingestion root is not a readable directory: " + config.root.string());
  }
  fs::recursive_directory_iterator it(config.root, fs::directory_options::none, ec);
  if (ec) throw Error("cannot read ingestion root " + config.root.string() + ": " + ec.message());

  WalkStats stats;
  std::mutex mu;  // guards stats and the callbacks
  auto report = [&](IngestIssue issue) {
    if (issue.kind == IssueKind::Unsupported) {
      ++stats.skipped;
    } else if (issue.kind != IssueKind::MalformedSidecar) {
      ++stats.errors;
    }
    if (on_issue) on_issue(std::move(issue));
  };

  std::vector<fs::path> files;
  for (const fs::recursive_directory_iterator end; it != end; it.increment(ec)) {
    if (ec) {
      std::lock_guard lock(mu);
      report({it->path().string(), IssueKind::Unreadable, ec.message()});
      ec.clear();
      continue;
    }
    const auto& entry = *it;
    if (!config.include_hidden && isHidden(entry.path())) {
      if (entry.is_directory(ec)) it.disable_recursion_pending();
      continue;
    }
    if (!entry.is_regular_file(ec)) continue;
    const std::string format = detectFormat(entry.path());
    if (format == "meta" && !config.supports("meta")) continue;  // sidecar
    if (!config.supports(format) || registry.find(format) == nullptr) {
      report({entry.path().string(), IssueKind::Unsupported, "unsupported format '" + format + "'"});
      continue;
    }
    files.push_back(entry.path());
  }

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= files.size()) return;
      std::vector<IngestIssue> warnings;
      std::optional<Document> doc;
      std::optional<IngestIssue> failure;
      try {
        doc = makeDocument(config.root, files[i], registry, &warnings);
      } catch (const UndecodableError& e) {
        failure = IngestIssue{files[i].string(), IssueKind::Undecodable, e.what()};
      } catch (const Error& e) {
        failure = IngestIssue{files[i].string(), IssueKind::Unreadable, e.what()};
      } catch (const fs::filesystem_error& e) {
        failure = IngestIssue{files[i].string(), IssueKind::Unreadable, e.what()};
      }
      std::lock_guard lock(mu);
      for (auto& w : warnings) report(std::move(w));
      if (failure) {
        report(std::move(*failure));
      } else {
        ++stats.documents;
        sink(std::move(*doc));
      }
    }
  };

  const unsigned workers = std::max(1u, config.workers);
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  return stats;
}

IngestResult ingestTree(const IngestConfig& config, const ExtractorRegistry& registry) {
  IngestResult result;
  result.stats = walkAndExtract(
      config, [&](Document d) { result.documents.push_back(std::move(d)); },
      [&](IngestIssue i) { result.issues.push_back(std::move(i)); }, registry);
  std::sort(result.documents.begin(), result.documents.end(),
            [](const Document& a, const Document& b) { return a.source_path < b.source_path; });
  std::sort(result.issues.begin(), result.issues.end(),
            [](const IngestIssue& a, const IngestIssue& b) { return a.path < b.path; });
  return result;
}

}  // namespace facetlens::ingest
