// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "facetlens/error.hpp"
#include "facetlens/timeutil.hpp"

namespace facetlens::ingest {

/// Folder tag carried by every document: the ingestion root itself.
inline constexpr std::string_view kRootFolderTag = "/";

/// One extracted file. Immutable once emitted.
struct Document {
  std::string doc_id;  ///< hex SHA-256 of `text`
  std::string source_path;
  std::string format_tag;
  std::string text;
  std::optional<std::string> author;
  Timestamp last_modified{};
  std::set<std::string> folder_tags;
  std::uint64_t byte_size = 0;

  friend bool operator==(const Document&, const Document&) = default;
};

struct IngestConfig {
  std::filesystem::path root;
  bool include_hidden = false;
  std::vector<std::string> extensions{"txt", "md", "log", "csv", "html", "htm"};
  unsigned workers = 1;

  /// Reads `root`, `include_hidden`, `extensions` (comma separated) and
  /// `workers` from a key=value file. Throws facetlens::Error on bad input.
  static IngestConfig fromFile(const std::filesystem::path& path);
  static IngestConfig fromKeyValues(const std::map<std::string, std::string>& kv);

  bool supports(std::string_view format_tag) const;
};

enum class IssueKind { Unsupported, Unreadable, Undecodable, MalformedSidecar };
std::string_view toString(IssueKind kind);

struct IngestIssue {
  std::string path;
  IssueKind kind;
  std::string message;
};

/// Lowercased extension after the last dot of the final path component, or
/// "none" when there is no extension.
std::string detectFormat(const std::filesystem::path& path);

struct FileMetadata {
  std::optional<std::string> author;
  Timestamp last_modified{};
};

/// mtime from the filesystem; author from the sidecar's `author` key when the
/// sidecar exists and parses. A malformed sidecar appends a warning to
/// `warnings` (if given) and leaves author empty.
FileMetadata extractMetadata(const std::filesystem::path& path,
                             const std::optional<std::filesystem::path>& sidecar,
                             std::vector<IngestIssue>* warnings = nullptr);

/// Sidecar convention: `<file name>.meta` next to the file.
std::filesystem::path sidecarPath(const std::filesystem::path& path);

/// Raised by extractors for content that cannot be turned into text.
class UndecodableError : public Error {
 public:
  using Error::Error;
};

/// Plain-text extractor for one format. Receives raw file bytes and returns
/// text before whitespace normalization. Throws UndecodableError when the
/// bytes cannot be decoded.
using Extractor = std::function<std::string(std::string_view bytes)>;

/// Format tag to extractor. PDF/Office extractors plug in here.
class ExtractorRegistry {
 public:
  /// txt, md, log, csv (lossy UTF-8) and html, htm (markup stripping).
  static const ExtractorRegistry& defaults();

  void add(std::string format_tag, Extractor extractor);
  const Extractor* find(std::string_view format_tag) const;

 private:
  std::map<std::string, Extractor, std::less<>> extractors_;
};

std::string extractPlainText(std::string_view bytes);
std::string extractHtmlText(std::string_view bytes);

/// Reads `path` and runs the registered extractor followed by whitespace
/// normalization. Throws facetlens::Error for unsupported formats, unreadable
/// files and undecodable content.
std::string extractText(const std::filesystem::path& path, std::string_view format_tag,
                        const ExtractorRegistry& registry = ExtractorRegistry::defaults());

/// Root marker plus every ancestor directory of `relative` ("a", "a/b", ...).
std::set<std::string> folderTags(const std::filesystem::path& relative);

/// Builds a Document for one file under `root`.
Document makeDocument(const std::filesystem::path& root, const std::filesystem::path& file,
                      const ExtractorRegistry& registry, std::vector<IngestIssue>* warnings);

struct WalkStats {
  std::size_t documents = 0;
  std::size_t skipped = 0;
  std::size_t errors = 0;
};

/// Walks `config.root` and emits one Document per supported regular file.
/// Sinks are invoked serially (never concurrently) in unspecified order,
/// even when `config.workers > 1`. Throws facetlens::Error if the root is
/// missing or unreadable; per-file failures go to `on_issue`.
WalkStats walkAndExtract(const IngestConfig& config, const std::function<void(Document)>& sink,
                         const std::function<void(IngestIssue)>& on_issue = {},
                         const ExtractorRegistry& registry = ExtractorRegistry::defaults());

struct IngestResult {
  std::vector<Document> documents;  ///< sorted by source_path
  std::vector<IngestIssue> issues;  ///< sorted by path
  WalkStats stats;
};

IngestResult ingestTree(const IngestConfig& config,
                        const ExtractorRegistry& registry = ExtractorRegistry::defaults());

}  // namespace facetlens::ingest
