#include <claimsearch/claimsearch.h>

#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

namespace {

using Json = nlohmann::ordered_json;

constexpr int kExitData = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Owns a string returned by the C API.
struct Owned {
  char* p = nullptr;
  ~Owned() { cls_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

int report_failure(cls_status s) {
  Json err{{"error", cls_status_name(s)}, {"message", cls_last_error()}};
  std::cerr << err.dump() << "\n";
  return s == CLS_CONFIG_ERROR ? kExitUsage : kExitData;
}

int finish(cls_status s, const Owned& out) {
  if (s != CLS_OK) return report_failure(s);
  std::cout << out.str() << "\n";
  return 0;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json read_json_file(const std::string& path) {
  try {
    return Json::parse(read_text(path));
  } catch (const Json::exception& e) {
    throw UsageError(path + " is not valid JSON: " + e.what());
  }
}

struct EmbedderFlags {
  std::string provider = "reference";
  std::size_t dim = 256;
  std::string endpoint;
  std::string config;

  void add(CLI::App* app) {
    app->add_option("--provider", provider, "Embedding provider")->check(CLI::IsMember({"reference", "remote"}));
    app->add_option("--dim", dim, "Embedding dimension");
    app->add_option("--endpoint", endpoint, "Remote embedding URL (or CLAIMSEARCH_EMBED_ENDPOINT)");
    app->add_option("--embedder-config", config, "JSON file with embedder settings")->check(CLI::ExistingFile);
  }

  Json json() const {
    Json j = config.empty() ? Json::object() : read_json_file(config);
    j["provider"] = provider;
    j["dim"] = dim;
    if (!endpoint.empty()) j["endpoint"] = endpoint;
    return j;
  }
};

cls_server* g_server = nullptr;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Patent claim search: ingestion, datasets, embeddings, indexing, evaluation and serving"};
  app.require_subcommand(1);
  app.footer(
      "Exit status: 0 success, 1 data error, 2 usage error. Errors are printed to stderr as "
      "{\"error\", \"message\"} JSON.");

  int rc = 0;

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Parse patent XML into normalized document JSONL");
  std::vector<std::string> ingest_inputs;
  std::string ingest_jurisdiction = "auto", ingest_out;
  ingest->add_option("inputs", ingest_inputs, "XML files or directories")->required()->check(CLI::ExistingPath);
  ingest->add_option("--jurisdiction", ingest_jurisdiction, "EP, US, OTHER or auto")
      ->check(CLI::IsMember({"auto", "EP", "US", "OTHER"}));
  ingest->add_option("--out", ingest_out, "Output JSONL")->required();
  ingest->callback([&] {
    std::vector<const char*> paths;
    for (const auto& p : ingest_inputs) paths.push_back(p.c_str());
    Owned out;
    rc = finish(cls_ingest(paths.data(), paths.size(), ingest_jurisdiction.c_str(), ingest_out.c_str(), &out.p), out);
    // Good documents are still written; a partial batch is reported as a data error.
    if (rc == 0 && !Json::parse(out.str())["failures"].empty()) rc = kExitData;
  });

  // parse-citations
  auto* citations = app.add_subcommand("parse-citations", "Standardize a search-report citation table");
  std::string cit_in, cit_out, cit_discards;
  citations->add_option("--input", cit_in, "Citation table (.csv or .jsonl)")->required()->check(CLI::ExistingFile);
  citations->add_option("--out", cit_out, "CitationRecord JSONL")->required();
  citations->add_option("--discards", cit_discards, "Discard report JSONL");
  citations->callback([&] {
    Owned out;
    rc = finish(cls_parse_citations(cit_in.c_str(), cit_out.c_str(), cit_discards.empty() ? nullptr : cit_discards.c_str(),
                                    &out.p),
                out);
  });

  // build-dataset
  auto* dataset = app.add_subcommand("build-dataset", "Build contrastive pair records and eval records");
  std::string ds_citations, ds_corpus, ds_out;
  std::size_t ds_max_seq = 512, ds_threads = 1;
  double ds_train = 0.8;
  std::uint64_t ds_seed = 0;
  bool ds_no_eval = false;
  dataset->add_option("--citations", ds_citations, "CitationRecord JSONL or raw citation table")
      ->required()
      ->check(CLI::ExistingFile);
  dataset->add_option("--corpus", ds_corpus, "Document JSONL file or directory")->required()->check(CLI::ExistingPath);
  dataset->add_option("--max-seq-len", ds_max_seq, "Token budget per chunk")->capture_default_str();
  dataset->add_option("--train-frac", ds_train, "Share of subjects in the train bucket")->capture_default_str();
  dataset->add_option("--seed", ds_seed, "Seed for split and mirrored negatives")->capture_default_str();
  dataset->add_option("--threads", ds_threads, "Worker threads (0 = all cores)")->capture_default_str();
  dataset->add_flag("--no-eval-records", ds_no_eval, "Skip eval_xa.jsonl and eval_xrandom.jsonl");
  dataset->add_option("--out", ds_out, "Output directory")->required();
  dataset->callback([&] {
    Json o{{"citations", ds_citations}, {"corpus", ds_corpus},  {"out", ds_out},
           {"max_seq_len", ds_max_seq}, {"train_frac", ds_train}, {"seed", ds_seed},
           {"threads", ds_threads},     {"eval_records", !ds_no_eval}};
    Owned out;
    rc = finish(cls_build_dataset(o.dump().c_str(), &out.p), out);
  });

  // embed
  auto* embed = app.add_subcommand("embed", "Embed texts into a vector cache JSONL");
  std::string em_in, em_out;
  EmbedderFlags em_flags;
  embed->add_option("--input", em_in, "JSONL with a text field, or one text per line")->required()->check(CLI::ExistingFile);
  embed->add_option("--out", em_out, "Vector cache JSONL (extended if present)")->required();
  em_flags.add(embed);
  embed->callback([&] {
    Json o{{"input", em_in}, {"out", em_out}, {"embedder", em_flags.json()}};
    Owned out;
    rc = finish(cls_embed(o.dump().c_str(), &out.p), out);
  });

  // index
  auto* index = app.add_subcommand("index", "Build or query a chunk vector index");
  index->require_subcommand(1);
  auto* ib = index->add_subcommand("build", "Chunk, embed and index a corpus");
  std::string ib_corpus, ib_out, ib_mode = "approximate";
  std::size_t ib_max_seq = 512, ib_m = 32, ib_efc = 200, ib_efs = 400;
  EmbedderFlags ib_flags;
  ib->add_option("--corpus", ib_corpus, "Document JSONL file or directory")->required()->check(CLI::ExistingPath);
  ib->add_option("--out", ib_out, "Index directory")->required();
  ib->add_option("--max-seq-len", ib_max_seq, "Token budget per chunk")->capture_default_str();
  ib->add_option("--mode", ib_mode, "exact or approximate")->check(CLI::IsMember({"exact", "approximate"}))->capture_default_str();
  ib->add_option("--m", ib_m, "Graph links per node")->capture_default_str();
  ib->add_option("--ef-construction", ib_efc, "Build beam width")->capture_default_str();
  ib->add_option("--ef-search", ib_efs, "Query beam width")->capture_default_str();
  ib_flags.add(ib);
  ib->callback([&] {
    Json o{{"corpus", ib_corpus},
           {"out", ib_out},
           {"max_seq_len", ib_max_seq},
           {"embedder", ib_flags.json()},
           {"ann_params", {{"mode", ib_mode}, {"m", ib_m}, {"ef_construction", ib_efc}, {"ef_search", ib_efs}}}};
    Owned out;
    rc = finish(cls_index_build(o.dump().c_str(), &out.p), out);
  });

  auto* iq = index->add_subcommand("query", "Search an index with a claim");
  std::string iq_index, iq_corpus, iq_claim, iq_report;
  std::size_t iq_k = 5000, iq_rerank = 50, iq_max_seq = 512;
  EmbedderFlags iq_flags;
  iq->add_option("--index", iq_index, "Index directory")->required()->check(CLI::ExistingDirectory);
  iq->add_option("--corpus", iq_corpus, "Document JSONL (needed for re-ranking and snippets)")->check(CLI::ExistingPath);
  iq->add_option("--claim-file", iq_claim, "Claim text; one element per line or <claim-text> markup")
      ->required()
      ->check(CLI::ExistingFile);
  iq->add_option("--k", iq_k, "Nearest chunks to retrieve")->capture_default_str();
  iq->add_option("--rerank-n", iq_rerank, "Documents to re-rank (0 disables)")->capture_default_str();
  iq->add_option("--max-seq-len", iq_max_seq, "Token budget of the claim query")->capture_default_str();
  iq->add_option("--report", iq_report, "Write a score report JSONL here");
  iq_flags.add(iq);
  iq->callback([&] {
    Json o{{"index", iq_index},          {"claim_text", read_text(iq_claim)}, {"k", iq_k},
           {"rerank_n", iq_rerank},      {"max_seq_len", iq_max_seq},         {"embedder", iq_flags.json()}};
    if (!iq_corpus.empty()) {
      o["corpus"] = iq_corpus;
    } else if (iq_rerank > 0) {
      throw UsageError("--rerank-n > 0 needs --corpus");
    }
    if (!iq_report.empty()) o["report"] = iq_report;
    Owned out;
    rc = finish(cls_index_query(o.dump().c_str(), &out.p), out);
  });

  // eval
  auto* eval = app.add_subcommand("eval", "Pairwise X-vs-negative ranking accuracy");
  std::string ev_records, ev_citations, ev_corpus, ev_splits, ev_method = "max_chunk", ev_negative = "a", ev_report;
  std::uint64_t ev_seed = 0;
  std::size_t ev_threads = 1, ev_max_seq = 512;
  EmbedderFlags ev_flags;
  auto* ev_rec_opt = eval->add_option("--records", ev_records, "Eval records JSONL")->check(CLI::ExistingFile);
  eval->add_option("--citations", ev_citations, "Build records from citations instead")->excludes(ev_rec_opt);
  eval->add_option("--corpus", ev_corpus, "Document JSONL (with --citations)");
  eval->add_option("--splits", ev_splits, "splits.jsonl (with --citations)");
  eval->add_option("--method", ev_method, "max_chunk or weighted_element")
      ->check(CLI::IsMember({"max_chunk", "weighted_element"}))
      ->capture_default_str();
  eval->add_option("--negative", ev_negative, "a or random")->check(CLI::IsMember({"a", "random"}))->capture_default_str();
  eval->add_option("--seed", ev_seed, "Seed for random negatives")->capture_default_str();
  eval->add_option("--threads", ev_threads, "Worker threads")->capture_default_str();
  eval->add_option("--max-seq-len", ev_max_seq, "Token budget")->capture_default_str();
  eval->add_option("--report", ev_report, "Write the JSON report here");
  ev_flags.add(eval);
  eval->callback([&] {
    Json o{{"method", ev_method},   {"negative", ev_negative},      {"seed", ev_seed},
           {"threads", ev_threads}, {"max_seq_len", ev_max_seq},    {"embedder", ev_flags.json()}};
    if (!ev_records.empty()) {
      o["records"] = ev_records;
    } else {
      if (ev_citations.empty() || ev_corpus.empty() || ev_splits.empty()) {
        throw UsageError("eval needs --records, or --citations with --corpus and --splits");
      }
      o["citations"] = ev_citations;
      o["corpus"] = ev_corpus;
      o["splits"] = ev_splits;
    }
    Owned report, table;
    cls_status s = cls_eval(o.dump().c_str(), &report.p, &table.p);
    if (s != CLS_OK) {
      rc = report_failure(s);
      return;
    }
    if (!ev_report.empty()) {
      std::ofstream f(ev_report, std::ios::binary);
      f << report.str() << "\n";
      if (!f) throw UsageError("cannot write " + ev_report);
    }
    std::cout << table.str();
  });

  // serve
  auto* serve = app.add_subcommand("serve", "HTTP search service");
  std::string sv_config, sv_index, sv_corpus, sv_host;
  int sv_port = -1;
  long long sv_k = -1, sv_rerank = -1;
  EmbedderFlags sv_flags;
  serve->add_option("--config", sv_config, "Service config JSON")->check(CLI::ExistingFile);
  serve->add_option("--index", sv_index, "Index directory");
  serve->add_option("--corpus", sv_corpus, "Document JSONL");
  serve->add_option("--host", sv_host, "Bind address (default 127.0.0.1)");
  serve->add_option("--port", sv_port, "Port (default 8080, 0 = any)");
  serve->add_option("--k", sv_k, "Default k (default 5000)");
  serve->add_option("--rerank-n", sv_rerank, "Default rerank_n (default 50)");
  sv_flags.add(serve);
  serve->footer(
      "Endpoints: GET /health, POST /search, GET /doc/{id}?query_id=, POST /index/reload.\n"
      "Settings come from --config, then flags, then the environment: CLAIMSEARCH_INDEX, CLAIMSEARCH_CORPUS,\n"
      "CLAIMSEARCH_PROVIDER, CLAIMSEARCH_K, CLAIMSEARCH_RERANK_N, CLAIMSEARCH_PORT, CLAIMSEARCH_EMBED_ENDPOINT,\n"
      "CLAIMSEARCH_EMBED_TOKEN.");
  serve->callback([&] {
    Json cfg = sv_config.empty() ? Json::object() : read_json_file(sv_config);
    if (!sv_index.empty()) cfg["index"] = sv_index;
    if (!sv_corpus.empty()) cfg["corpus"] = sv_corpus;
    if (!sv_host.empty()) cfg["host"] = sv_host;
    if (sv_port >= 0) cfg["port"] = sv_port;
    if (sv_k >= 0) cfg["k"] = sv_k;
    if (sv_rerank >= 0) cfg["rerank_n"] = sv_rerank;
    if (!cfg.contains("embedder") || serve->count("--provider") || serve->count("--dim") || serve->count("--endpoint") ||
        serve->count("--embedder-config")) {
      cfg["embedder"] = sv_flags.json();
    }
    if (!cfg.contains("corpus") && !cfg.contains("rerank_n") && !std::getenv("CLAIMSEARCH_CORPUS")) cfg["rerank_n"] = 0;

    // Block shutdown signals in every thread; the main thread waits for them.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    cls_engine* engine = nullptr;
    cls_status s = cls_engine_open(cfg.dump().c_str(), &engine);
    if (s != CLS_OK) {
      rc = report_failure(s);
      return;
    }
    Owned health;
    cls_engine_health(engine, &health.p);
    Json h = Json::parse(health.str());
    std::string host = cfg.value("host", "127.0.0.1");
    int port = cfg.value("port", 8080);
    if (const char* env = std::getenv("CLAIMSEARCH_PORT"); env && *env) port = std::atoi(env);
    if (s = cls_server_create(engine, &g_server); s != CLS_OK) {
      rc = report_failure(s);
      cls_engine_close(engine);
      return;
    }
    if (s = cls_server_start(g_server, host.c_str(), port); s != CLS_OK) {
      rc = report_failure(s);
      cls_server_destroy(g_server);
      cls_engine_close(engine);
      return;
    }
    std::cout << Json{{"listening", host + ":" + std::to_string(cls_server_bound_port(g_server))}, {"health", h}}.dump()
              << std::endl;
    int sig = 0;
    sigwait(&signals, &sig);
    cls_server_stop(g_server);
    cls_server_wait(g_server);
    cls_server_destroy(g_server);
    cls_engine_close(engine);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << Json{{"error", "Usage"}, {"message", e.what()}}.dump() << "\n";
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << Json{{"error", "Usage"}, {"message", e.what()}}.dump() << "\n";
    return kExitUsage;
  }
  return rc;
}
