// SPDX-License-Identifier: Apache-2.0
#include "facetlens/app/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

#include "facetlens/app/pipeline.hpp"
#include "facetlens/app/service.hpp"
#include "facetlens/error.hpp"
#include "facetlens/text_util.hpp"

namespace facetlens::app {

namespace {

void printReport(const StageReport& report, std::ostream& out, std::ostream& err) {
  for (const auto& w : report.warnings) err << "warning: " << w << '\n';
  for (const auto& l : report.lines) out << l << '\n';
}

void printQuery(const nlohmann::json& response, std::ostream& out) {
  out << "total\t" << response.at("total").get<std::size_t>() << '\n';
  for (const auto& d : response.at("docs")) {
    out << "doc\t" << d.at("id").get<std::string>() << '\t' << d.at("path").get<std::string>() << '\n';
  }
  for (const auto& [facet, values] : response.at("facets").items()) {
    for (const auto& v : values) {
      out << "facet\t" << facet << '\t' << v.at("value").get<std::string>() << '\t'
          << v.at("count").get<std::size_t>() << '\n';
    }
  }
}

}  // namespace

int runCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App cli{"Faceted exploration of document collections", "facetlens"};
  cli.require_subcommand(1);

  std::string config_path;
  std::string store_dir;
  cli.add_option("--config", config_path, "key=value pipeline configuration file");
  cli.add_option("--store", store_dir, "artifact directory (default .facetlens)");

  auto* ingest = cli.add_subcommand("ingest", "walk a directory tree into the document store");
  std::string root;
  bool include_hidden = false;
  unsigned workers = 0;
  std::string extensions;
  ingest->add_option("root", root, "directory to ingest");
  ingest->add_flag("--include-hidden", include_hidden, "descend into dot files and directories");
  ingest->add_option("--workers", workers, "parallel extraction threads")->check(CLI::PositiveNumber);
  ingest->add_option("--extensions", extensions, "comma-separated supported extensions");

  auto* extract = cli.add_subcommand("extract", "KERA keywords per document");
  std::size_t k = 0;
  std::string method;
  std::size_t min_count = 0;
  bool prune_upper = false;
  bool discard_unigrams = false;
  bool drop_late = false;
  bool alpha_frequency = false;
  extract->add_option("--k", k, "keywords per document")->check(CLI::PositiveNumber);
  extract->add_option("--method", method, "collocation score")->check(CLI::IsMember({"llr", "pmi"}));
  extract->add_option("--min-count", min_count, "minimum bigram occurrences")->check(CLI::PositiveNumber);
  extract->add_flag("--prune-uppercase-unigrams", prune_upper, "keep only all-caps proper-noun unigrams");
  extract->add_flag("--discard-unigrams-in-bigrams", discard_unigrams,
                    "drop unigrams contained in a selected bigram");
  extract->add_flag("--drop-late-unigrams", drop_late, "drop unigrams first seen late in the document");
  extract->add_flag("--alpha-frequency", alpha_frequency, "use normalized frequency as alpha for bigrams");

  auto* topics = cli.add_subcommand("topics", "fit LDA, assign and tag topic clusters");
  std::string topic_k;
  std::size_t iterations = 0;
  std::optional<std::uint64_t> seed;
  std::optional<double> threshold;
  topics->add_option("--k", topic_k, "topic count or 'auto'");
  topics->add_option("--iterations", iterations, "Gibbs sweeps")->check(CLI::PositiveNumber);
  topics->add_option("--seed", seed, "sampler seed");
  topics->add_option("--threshold", threshold, "assignment threshold on topic proportion");

  auto* train = cli.add_subcommand("train", "fit technology and report-type classifiers");
  std::vector<std::string> manifests;
  train->add_option("manifest", manifests, "label<TAB>document lines");

  auto* mentions_cmd = cli.add_subcommand("mentions", "scan documents with a mention spec");
  std::vector<std::string> specs;
  mentions_cmd->add_option("spec", specs, "category<TAB>kind<TAB>pattern files");

  auto* index = cli.add_subcommand("index", "assemble the facet index snapshot");

  auto* serve = cli.add_subcommand("serve", "start the HTTP/JSON service");
  std::string host;
  std::uint16_t port = 0;
  serve->add_option("--host", host, "bind address");
  serve->add_option("--port", port, "TCP port");

  auto* query = cli.add_subcommand("query", "one-shot search");
  std::string expr;
  bool as_json = false;
  std::string page;
  std::string page_size;
  query->add_option("expr", expr, "terms facet:value from:DATE to:DATE")->required();
  query->add_flag("--json", as_json, "print the /search JSON response");
  query->add_option("--page", page, "1-based result page");
  query->add_option("--page-size", page_size, "results per page");

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return cli.exit(e, out, err) == 0 ? 0 : 2;
  }

  try {
    PipelineConfig config =
        config_path.empty() ? PipelineConfig{} : PipelineConfig::fromFile(config_path);
    if (!store_dir.empty()) config.store = store_dir;

    if (ingest->parsed()) {
      if (!root.empty()) config.ingest.root = root;
      if (include_hidden) config.ingest.include_hidden = true;
      if (workers > 0) config.ingest.workers = workers;
      if (!extensions.empty()) {
        config.ingest.extensions =
            ingest::IngestConfig::fromKeyValues({{"extensions", extensions}}).extensions;
      }
      printReport(runIngest(config), out, err);
    } else if (extract->parsed()) {
      if (k > 0) config.kera.k = k;
      if (method == "llr") config.kera.method = kera::CollocationMethod::Llr;
      if (method == "pmi") config.kera.method = kera::CollocationMethod::Pmi;
      if (min_count > 0) config.kera.min_count = min_count;
      config.kera.prune_uppercase_unigrams |= prune_upper;
      config.kera.discard_unigrams_in_bigrams |= discard_unigrams;
      config.kera.drop_late_unigrams |= drop_late;
      config.kera.alpha_always_frequency |= alpha_frequency;
      printReport(runExtract(config), out, err);
    } else if (topics->parsed()) {
      if (!topic_k.empty()) {
        config.topics.k = PipelineConfig::fromKeyValues({{"topics.k", topic_k}}).topics.k;
      }
      if (iterations > 0) config.topics.iterations = iterations;
      if (seed) config.topics.seed = *seed;
      if (threshold) config.topics.threshold = *threshold;
      config.validate();
      printReport(runTopics(config), out, err);
    } else if (train->parsed()) {
      std::vector<std::filesystem::path> paths(manifests.begin(), manifests.end());
      if (paths.empty()) paths = config.manifests;
      printReport(runTrain(config, paths), out, err);
    } else if (mentions_cmd->parsed()) {
      std::vector<std::filesystem::path> paths(specs.begin(), specs.end());
      if (paths.empty()) paths = config.mention_specs;
      printReport(runMentions(config, paths), out, err);
    } else if (index->parsed()) {
      printReport(runIndex(config), out, err);
    } else if (serve->parsed()) {
      if (!host.empty()) config.host = host;
      if (port > 0) config.port = port;
      auto service = Service::open(Store(config.store));
      out << "serving " << service->snapshot()->size() << " documents on http://" << config.host << ':'
          << config.port << std::endl;
      if (!service->listen(config.host, config.port)) {
        err << "error: cannot listen on " << config.host << ':' << config.port << '\n';
        return 1;
      }
    } else if (query->parsed()) {
      const Store store(config.store);
      store.require(store.index(), "index");
      const auto idx = facetindex::FacetIndex::load(store.index());
      const auto q = parseQueryExpression(expr);
      const auto p = parsePage(page.empty() ? std::nullopt : std::optional(page),
                               page_size.empty() ? std::nullopt : std::optional(page_size));
      const auto response = searchResponse(idx, q, p);
      if (as_json) {
        out << dumpJson(response) << '\n';
      } else {
        printQuery(response, out);
      }
    }
  } catch (const facetlens::Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace facetlens::app
