// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "facetlens/app/pipeline.hpp"
#include "facetlens/facetindex.hpp"

namespace facetlens::app {

struct HttpResponse {
  int status = 200;
  std::string body;  ///< JSON
};

using QueryParams = std::vector<std::pair<std::string, std::string>>;

/// HTTP/JSON front end over an immutable index snapshot. Readers take a
/// shared_ptr to the current snapshot; POST /mentions builds a new one and
/// swaps it in, so requests never see a partial update.
class Service {
 public:
  Service(Store store, facetindex::FacetIndex index);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Loads the snapshot written by the index stage.
  static std::unique_ptr<Service> open(const Store& store);

  std::shared_ptr<const facetindex::FacetIndex> snapshot() const;

  /// GET /search: q, f.<facet> (repeatable), from, to, page, page_size.
  HttpResponse search(const QueryParams& params) const;
  /// GET /doc/{id}: hl (repeatable).
  HttpResponse document(std::string_view doc_id, const QueryParams& params) const;
  /// POST /mentions: body is a MentionSpec merged into the stored one;
  /// every document is rescanned and the snapshot republished.
  HttpResponse postMentions(std::string_view spec_body);

  /// Binds and serves until stop(). Returns false if the socket cannot be bound.
  bool listen(const std::string& host, std::uint16_t port);
  /// Binds an ephemeral port and returns it (0 on failure); call serve() next.
  int bindAnyPort(const std::string& host);
  bool serve();
  void stop();
  bool running() const;

 private:
  struct Http;

  Store store_;
  mutable std::mutex snapshot_mutex_;
  std::shared_ptr<const facetindex::FacetIndex> snapshot_;
  std::mutex write_mutex_;
  std::atomic<std::uint64_t> next_job_{1};
  std::unique_ptr<Http> http_;
};

/// {"error": message}
std::string errorBody(std::string_view message);

}  // namespace facetlens::app
