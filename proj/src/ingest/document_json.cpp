// SPDX-License-Identifier: Apache-2.0
#include "facetlens/document_json.hpp"

#include "facetlens/error.hpp"

namespace facetlens::ingest {

nlohmann::json toJson(const Document& doc) {
  nlohmann::json j;
  j["id"] = doc.doc_id;
  j["path"] = doc.source_path;
  j["format"] = doc.format_tag;
  j["text"] = doc.text;
  if (doc.author) j["author"] = *doc.author;
  j["last_modified"] = formatTimestamp(doc.last_modified);
  j["folders"] = doc.folder_tags;
  j["bytes"] = doc.byte_size;
  return j;
}

Document documentFromJson(const nlohmann::json& j) {
  try {
    Document doc;
    doc.doc_id = j.at("id").get<std::string>();
    doc.source_path = j.at("path").get<std::string>();
    doc.format_tag = j.at("format").get<std::string>();
    doc.text = j.at("text").get<std::string>();
    if (j.contains("author")) doc.author = j.at("author").get<std::string>();
    const auto ts = parseTimestamp(j.at("last_modified").get<std::string>());
    if (!ts) throw Error("bad last_modified timestamp");
    doc.last_modified = *ts;
    doc.folder_tags = j.at("folders").get<std::set<std::string>>();
    doc.byte_size = j.at("bytes").get<std::uint64_t>();
    return doc;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed document record: ") + e.what());
  }
}

}  // namespace facetlens::ingest
