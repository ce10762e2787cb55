#include "claimsearch/claimsearch.h"

#include <chrono>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <set>
#include <string>

#include "citations/citation.hpp"
#include "citations/passage.hpp"
#include "common/error.hpp"
#include "common/jsonl.hpp"
#include "common/text.hpp"
#include "corpus/corpus.hpp"
#include "dataset/builder.hpp"
#include "embed/embedder.hpp"
#include "eval/harness.hpp"
#include "index/retrieval.hpp"
#include "service/engine.hpp"
#include "service/http_server.hpp"

using namespace claimsearch;
namespace fs = std::filesystem;

struct cls_engine {
  std::unique_ptr<SearchEngine> engine;
};

struct cls_server {
  std::unique_ptr<HttpServer> http;
};

namespace {

thread_local std::string t_last_error;

cls_status status_of(ErrorCode code) { return static_cast<cls_status>(static_cast<int>(code) + 1); }

template <typename Fn>
cls_status guard(Fn&& fn) noexcept {
  t_last_error.clear();
  try {
    fn();
    return CLS_OK;
  } catch (const Error& e) {
    t_last_error = e.what();
    return status_of(e.code());
  } catch (const Json::exception& e) {
    t_last_error = e.what();
    return CLS_INVALID_ARGUMENT;
  } catch (const std::exception& e) {
    t_last_error = e.what();
    return CLS_INTERNAL;
  } catch (...) {
    t_last_error = "unknown failure";
    return CLS_INTERNAL;
  }
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void emit(char** out, const std::string& s) {
  if (out != nullptr) *out = dup(s);
}

void require(const void* p, const char* what) {
  if (p == nullptr) throw Error(ErrorCode::InvalidArgument, std::string(what) + " must not be null");
}

Json parse_options(const char* options_json) {
  if (options_json == nullptr || *options_json == '\0') return Json::object();
  Json j;
  try {
    j = Json::parse(options_json);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("options are not JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::InvalidArgument, "options must be a JSON object");
  return j;
}

std::string required_string(const Json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_string() || j.at(key).get<std::string>().empty()) {
    throw Error(ErrorCode::InvalidArgument, std::string("missing option ") + key);
  }
  return j.at(key).get<std::string>();
}

EmbedderConfig embedder_config(const Json& options) {
  EmbedderConfig c = options.contains("embedder") ? EmbedderConfig::from_json(options.at("embedder")) : EmbedderConfig{};
  c.apply_env();
  c.validate();
  return c;
}

ChunkerConfig chunker_config(const Json& options) {
  ChunkerConfig c;
  c.max_seq_length = options.value("max_seq_len", c.max_seq_length);
  c.token_counter = options.value("token_counter", c.token_counter);
  c.validate();
  return c;
}

double ms_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t).count();
}

}  // namespace

extern "C" {

const char* cls_status_name(cls_status status) {
  if (status == CLS_OK) return "Ok";
  if (status == CLS_INTERNAL) return "Internal";
  if (status > CLS_OK && status < CLS_INTERNAL) {
    return error_code_name(static_cast<ErrorCode>(static_cast<int>(status) - 1)).data();
  }
  return "Unknown";
}

const char* cls_last_error(void) { return t_last_error.c_str(); }

void cls_string_free(char* s) { std::free(s); }

const char* cls_version(void) { return "0.1.0"; }

cls_status cls_ingest(const char* const* inputs, size_t n_inputs, const char* jurisdiction, const char* out_path,
                      char** summary_json) {
  return guard([&] {
    require(inputs, "inputs");
    require(out_path, "out_path");
    if (n_inputs == 0) throw Error(ErrorCode::InvalidArgument, "no inputs given");
    std::vector<std::string> paths;
    for (size_t i = 0; i < n_inputs; ++i) {
      require(inputs[i], "input path");
      paths.emplace_back(inputs[i]);
    }
    std::optional<Jurisdiction> j;
    if (jurisdiction != nullptr && *jurisdiction != '\0' && std::string(jurisdiction) != "auto") {
      j = parse_jurisdiction(jurisdiction);
      if (!j) throw Error(ErrorCode::InvalidArgument, std::string("unknown jurisdiction ") + jurisdiction);
    }
    IngestResult result = ingest_paths(paths, j);
    text::write_file(out_path, documents_to_jsonl(result.documents));
    Json failures = Json::array();
    for (const auto& f : result.failures) failures.push_back({{"source", f.source}, {"error", f.error}});
    emit(summary_json, Json{{"documents", result.documents.size()}, {"failures", std::move(failures)}}.dump());
  });
}

cls_status cls_parse_citations(const char* input_path, const char* out_path, const char* discard_path,
                               char** summary_json) {
  return guard([&] {
    require(input_path, "input_path");
    require(out_path, "out_path");
    CitationIngest ingest = ingest_citation_rows(read_citation_table(input_path));
    std::string records;
    for (const auto& r : ingest.records) {
      records += to_json(r).dump();
      records += '\n';
    }
    text::write_file(out_path, records);
    if (discard_path != nullptr && *discard_path != '\0') {
      std::string discards;
      for (const auto& d : ingest.discards) {
        discards += Json{{"raw", d.segment.raw},
                         {"reason", d.segment.reason},
                         {"subject_doc_id", d.subject_doc_id},
                         {"cited_doc_id", d.cited_doc_id}}
                        .dump();
        discards += '\n';
      }
      text::write_file(discard_path, discards);
    }
    emit(summary_json, ingest.summary().dump());
  });
}

cls_status cls_build_dataset(const char* options_json, char** summary_json) {
  return guard([&] {
    Json o = parse_options(options_json);
    const std::string out_dir = required_string(o, "out");
    auto citations = load_citations(required_string(o, "citations"));
    Corpus corpus = Corpus::load(required_string(o, "corpus"));
    DatasetOptions options;
    options.chunker = chunker_config(o);
    options.train_fraction = o.value("train_frac", options.train_fraction);
    options.seed = o.value("seed", options.seed);
    options.threads = o.value("threads", options.threads);
    DatasetOutput out = build_dataset(citations, corpus, options);
    write_dataset(out, out_dir);

    Json summary{{"records", out.records.size()}, {"funnel", out.funnel}};
    if (o.value("eval_records", true) && !out.split.assignments.empty()) {
      Json eval = Json::object();
      for (NegativeKind kind : {NegativeKind::ACitation, NegativeKind::RandomDoc}) {
        EvalBuildOptions eo;
        eo.chunker = options.chunker;
        eo.negative = kind;
        eo.seed = options.seed;
        EvalBuild eb = build_eval_records(citations, corpus, out.split, eo);
        const char* name = kind == NegativeKind::ACitation ? "eval_xa.jsonl" : "eval_xrandom.jsonl";
        text::write_file((fs::path(out_dir) / name).string(), eval_records_to_jsonl(eb.records));
        eval[name] = eb.summary();
      }
      summary["eval"] = std::move(eval);
    }
    emit(summary_json, summary.dump());
  });
}

cls_status cls_embed(const char* options_json, char** summary_json) {
  return guard([&] {
    Json o = parse_options(options_json);
    const std::string input = required_string(o, "input");
    const std::string out = required_string(o, "out");
    auto embedder = make_embedder(embedder_config(o));
    std::vector<std::string> texts;
    bool jsonl = input.size() >= 6 && input.substr(input.size() - 6) == ".jsonl";
    if (jsonl) {
      for_each_jsonl(input, [&](const Json& row) {
        if (row.is_string()) {
          texts.push_back(row.get<std::string>());
        } else {
          texts.push_back(row.at("text").get<std::string>());
        }
      });
    } else {
      const std::string content = text::read_file(input);
      for (auto line : text::split(content, '\n')) {
        if (!text::trim(line).empty()) texts.emplace_back(line);
      }
    }
    VectorCache cache = fs::exists(out) ? VectorCache::load(out, embedder->provider_id())
                                        : VectorCache(embedder->provider_id());
    std::vector<std::string> missing;
    std::set<std::string> queued;
    for (const auto& t : texts) {
      if (!cache.get(t) && queued.insert(t).second) missing.push_back(t);
    }
    auto vecs = embedder->embed_batch(missing);
    for (std::size_t i = 0; i < missing.size(); ++i) cache.put(missing[i], std::move(vecs[i]));
    text::write_file(out, cache.to_jsonl());
    emit(summary_json, Json{{"texts", texts.size()},
                            {"embedded", missing.size()},
                            {"cached", cache.size()},
                            {"provider_id", embedder->provider_id()}}
                           .dump());
  });
}

cls_status cls_index_build(const char* options_json, char** summary_json) {
  return guard([&] {
    Json o = parse_options(options_json);
    const std::string out = required_string(o, "out");
    Corpus corpus = Corpus::load(required_string(o, "corpus"));
    auto embedder = make_embedder(embedder_config(o));
    AnnParams params = o.contains("ann_params") ? AnnParams::from_json(o.at("ann_params")) : AnnParams{};
    auto t0 = std::chrono::steady_clock::now();
    CorpusIndexStats stats;
    VectorIndex index = build_corpus_index(corpus, *embedder, chunker_config(o), params, &stats);
    const double build_ms = ms_since(t0);
    index.save(out);
    emit(summary_json, Json{{"documents", stats.documents},
                            {"chunks", stats.chunks},
                            {"provider_id", index.provider_id()},
                            {"dim", index.dim()},
                            {"ann_params", params.to_json()},
                            {"build_ms", build_ms}}
                           .dump());
  });
}

cls_status cls_index_query(const char* options_json, char** response_json) {
  return guard([&] {
    Json o = parse_options(options_json);
    ServiceConfig config;
    config.index_dir = required_string(o, "index");
    config.corpus_path = o.value("corpus", "");
    config.embedder = embedder_config(o);
    config.token_budget = o.value("max_seq_len", config.token_budget);
    if (config.corpus_path.empty()) config.rerank_n = 0;
    SearchEngine engine(config);
    engine.reload();
    SearchRequest request = SearchRequest::from_json(o);
    SearchOutcome outcome = engine.run_search(request);
    if (o.contains("report") && o.at("report").is_string()) {
      std::string rows;
      for (const auto& d : outcome.documents) {
        rows += score_report_row(outcome.query_id, d, false).dump() + "\n";
        if (d.rerank_score) rows += score_report_row(outcome.query_id, d, true).dump() + "\n";
      }
      text::write_file(o.at("report").get<std::string>(), rows);
    }
    emit(response_json, engine.render(outcome).dump());
  });
}

cls_status cls_eval(const char* options_json, char** report_json, char** table_text) {
  return guard([&] {
    Json o = parse_options(options_json);
    auto negative = parse_negative_kind(o.value("negative", "a"));
    if (!negative) throw Error(ErrorCode::InvalidArgument, "negative must be a or random");
    const std::string method = o.value("method", "max_chunk");
    ChunkerConfig chunker = chunker_config(o);
    const std::uint64_t seed = o.value("seed", std::uint64_t{0});

    std::vector<EvalRecord> records;
    Json build_summary;
    if (o.contains("records")) {
      for (auto& r : load_eval_records(required_string(o, "records"))) {
        if (r.negative_kind == *negative) records.push_back(std::move(r));
      }
    } else {
      auto citations = load_citations(required_string(o, "citations"));
      Corpus corpus = Corpus::load(required_string(o, "corpus"));
      SplitResult split = load_splits(required_string(o, "splits"));
      EvalBuildOptions eo{chunker, *negative, seed};
      EvalBuild eb = build_eval_records(citations, corpus, split, eo);
      build_summary = eb.summary();
      records = std::move(eb.records);
    }

    auto embedder = make_embedder(embedder_config(o));
    auto counter = make_token_counter(chunker.token_counter);
    std::unique_ptr<DocumentScorer> scorer;
    if (method == "max_chunk") {
      scorer = std::make_unique<MaxChunkScorer>(*embedder, chunker.max_seq_length, counter);
    } else if (method == "weighted_element") {
      scorer = std::make_unique<WeightedElementScorer>(*embedder, ElementWeighting{}, counter);
    } else {
      throw Error(ErrorCode::InvalidArgument, "method must be max_chunk or weighted_element");
    }
    EvalReport report = pairwise_accuracy(records, *scorer, *negative, o.value("threads", std::size_t{1}));
    Json j = report.to_json();
    j["seed"] = seed;
    j["provider_id"] = embedder->provider_id();
    if (!build_summary.is_null()) j["records_built"] = build_summary;
    emit(report_json, j.dump());
    emit(table_text, render_report_table({report}, "(" + embedder->provider_id() + ")"));
  });
}

cls_status cls_parse_passage_field(const char* raw, char** result_json) {
  return guard([&] {
    require(raw, "raw");
    PassageField f = parse_passage_field(raw);
    Json kept = Json::array();
    for (const auto& p : f.kept) {
      Json jp{{"kind", to_string(p.kind)}};
      jp["start"] = p.start ? Json(*p.start) : Json(nullptr);
      jp["end"] = p.end ? Json(*p.end) : Json(nullptr);
      jp["rendered"] = render(p);
      kept.push_back(std::move(jp));
    }
    Json discarded = Json::array();
    for (const auto& d : f.discarded) discarded.push_back({{"raw", d.raw}, {"reason", d.reason}});
    emit(result_json, Json{{"kept", std::move(kept)}, {"discarded", std::move(discarded)}}.dump());
  });
}

cls_status cls_engine_open(const char* config_json, cls_engine** out) {
  return guard([&] {
    require(out, "out");
    *out = nullptr;
    ServiceConfig config = ServiceConfig::from_json(parse_options(config_json));
    config.apply_env();
    auto handle = std::make_unique<cls_engine>();
    handle->engine = std::make_unique<SearchEngine>(config);
    if (!config.index_dir.empty()) handle->engine->reload();
    *out = handle.release();
  });
}

void cls_engine_close(cls_engine* engine) { delete engine; }

cls_status cls_engine_search(cls_engine* engine, const char* request_json, char** response_json) {
  return guard([&] {
    require(engine, "engine");
    require(request_json, "request_json");
    Json body;
    try {
      body = Json::parse(request_json);
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::InvalidArgument, std::string("request is not JSON: ") + e.what());
    }
    emit(response_json, engine->engine->search(SearchRequest::from_json(body)).dump());
  });
}

cls_status cls_engine_document(cls_engine* engine, const char* doc_id, const char* query_id, char** document_json) {
  return guard([&] {
    require(engine, "engine");
    require(doc_id, "doc_id");
    emit(document_json, engine->engine->document(doc_id, query_id ? query_id : "").dump());
  });
}

cls_status cls_engine_reload(cls_engine* engine, const char* index_dir, const char* corpus_path) {
  return guard([&] {
    require(engine, "engine");
    engine->engine->reload(index_dir ? index_dir : "", corpus_path ? corpus_path : "");
  });
}

cls_status cls_engine_health(cls_engine* engine, char** health_json) {
  return guard([&] {
    require(engine, "engine");
    emit(health_json, engine->engine->health().dump());
  });
}

int cls_http_status(cls_status status) {
  if (status == CLS_OK) return 200;
  if (status == CLS_INTERNAL || status < CLS_OK || status > CLS_INTERNAL) return 500;
  return http_error_for(Error(static_cast<ErrorCode>(static_cast<int>(status) - 1), "")).status;
}

cls_status cls_server_create(cls_engine* engine, cls_server** out) {
  return guard([&] {
    require(engine, "engine");
    require(out, "out");
    auto handle = std::make_unique<cls_server>();
    handle->http = std::make_unique<HttpServer>(*engine->engine);
    *out = handle.release();
  });
}

cls_status cls_server_start(cls_server* server, const char* host, int port) {
  return guard([&] {
    require(server, "server");
    server->http->start(host && *host ? host : "127.0.0.1", port);
  });
}

int cls_server_bound_port(const cls_server* server) { return server ? server->http->bound_port() : -1; }

void cls_server_stop(cls_server* server) {
  if (server) server->http->stop();
}

void cls_server_wait(cls_server* server) {
  if (server) server->http->wait();
}

void cls_server_destroy(cls_server* server) { delete server; }

}  // extern "C"
