// SPDX-License-Identifier: Apache-2.0
#include "facetlens/app/service.hpp"

#include <httplib.h>

#include <json.hpp>

#include "facetlens/error.hpp"
#include "facetlens/text_util.hpp"

namespace facetlens::app {

struct Service::Http {
  httplib::Server server;
};

std::string errorBody(std::string_view message) {
  return dumpJson(nlohmann::json{{"error", message}});
}

namespace {

// Bad input surfaces as 400 with the library's message; anything else is an
// internal failure whose details stay in the server.
template <typename F>
HttpResponse guarded(F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    return {400, errorBody(e.what())};
  } catch (const std::exception&) {
    return {500, errorBody("internal error")};
  }
}

QueryParams toParams(const httplib::Params& params) {
  return {params.begin(), params.end()};
}

void reply(httplib::Response& res, const HttpResponse& r) {
  res.status = r.status;
  res.set_content(r.body, "application/json");
}

}  // namespace

Service::Service(Store store, facetindex::FacetIndex index)
    : store_(std::move(store)),
      snapshot_(std::make_shared<const facetindex::FacetIndex>(std::move(index))),
      http_(std::make_unique<Http>()) {
  auto& s = http_->server;
  s.Get("/search", [this](const httplib::Request& req, httplib::Response& res) {
    reply(res, search(toParams(req.params)));
  });
  s.Get(R"(/doc/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    reply(res, document(req.matches[1].str(), toParams(req.params)));
  });
  s.Post("/mentions", [this](const httplib::Request& req, httplib::Response& res) {
    reply(res, postMentions(req.body));
  });
  s.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (!res.body.empty()) return;
    res.set_content(errorBody(httplib::status_message(res.status)), "application/json");
  });
  s.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr) {
    res.status = 500;
    res.set_content(errorBody("internal error"), "application/json");
  });
}

Service::~Service() { stop(); }

std::unique_ptr<Service> Service::open(const Store& store) {
  store.require(store.index(), "index");
  return std::make_unique<Service>(store, facetindex::FacetIndex::load(store.index()));
}

std::shared_ptr<const facetindex::FacetIndex> Service::snapshot() const {
  std::lock_guard lock(snapshot_mutex_);
  return snapshot_;
}

HttpResponse Service::search(const QueryParams& params) const {
  return guarded([&]() -> HttpResponse {
    facetindex::FacetQuery query;
    std::optional<std::string> page;
    std::optional<std::string> page_size;
    for (const auto& [key, value] : params) {
      if (key == "q") {
        for (auto& w : facetindex::queryTerms(value)) query.text_terms.push_back(std::move(w));
      } else if (key.starts_with("f.")) {
        const auto facet = facetindex::requireFacet(std::string_view(key).substr(2));
        if (!value.empty()) query.filters[facet].insert(value);
      } else if (key == "from" || key == "to") {
        if (value.empty()) continue;
        if (!query.date_range) query.date_range.emplace();
        if (key == "from") {
          query.date_range->start = parseFromBound(value);
        } else {
          query.date_range->end = parseToBound(value);
        }
      } else if (key == "page") {
        page = value;
      } else if (key == "page_size") {
        page_size = value;
      }
    }
    const auto index = snapshot();
    return {200, dumpJson(searchResponse(*index, query, parsePage(page, page_size)))};
  });
}

HttpResponse Service::document(std::string_view doc_id, const QueryParams& params) const {
  return guarded([&]() -> HttpResponse {
    const auto index = snapshot();
    if (index->find(doc_id) == nullptr) return {404, errorBody("unknown document id")};
    std::vector<std::string> hl;
    for (const auto& [key, value] : params) {
      if (key == "hl") hl.push_back(value);
    }
    return {200, dumpJson(documentResponse(*index, doc_id, hl))};
  });
}

HttpResponse Service::postMentions(std::string_view spec_body) {
  return guarded([&]() -> HttpResponse {
    std::lock_guard write_lock(write_mutex_);
    auto uploaded = mentions::parseMentionSpec(spec_body, store_.root());
    mentions::MentionSpec spec;
    std::error_code ec;
    if (std::filesystem::exists(store_.mentionSpec(), ec)) {
      spec = mentions::parseMentionSpecFile(store_.mentionSpec());
    }
    spec = spec.merged(uploaded);

    const auto current = snapshot();
    std::vector<const ingest::Document*> docs;
    for (const auto* entry : current->documents()) docs.push_back(&entry->doc);
    const auto counts = scanAll(docs, spec);
    auto next = std::make_shared<const facetindex::FacetIndex>(retagMentions(*current, counts));

    text::writeFileAtomic(store_.mentionSpec().string(), formatMentionSpec(spec));
    saveMentions(store_, counts);
    next->save(store_.index());
    {
      std::lock_guard lock(snapshot_mutex_);
      snapshot_ = std::move(next);
    }
    const auto job = next_job_.fetch_add(1);
    const nlohmann::json body{{"job_id", "job-" + std::to_string(job)},
                              {"status", "completed"},
                              {"patterns", spec.entries.size()},
                              {"documents_tagged", counts.size()}};
    return {200, dumpJson(body)};
  });
}

bool Service::listen(const std::string& host, std::uint16_t port) {
  return http_->server.listen(host, port);
}

int Service::bindAnyPort(const std::string& host) {
  const int port = http_->server.bind_to_any_port(host);
  return port < 0 ? 0 : port;
}

bool Service::serve() { return http_->server.listen_after_bind(); }

void Service::stop() {
  if (http_) http_->server.stop();
}

bool Service::running() const { return http_->server.is_running(); }

}  // namespace facetlens::app
