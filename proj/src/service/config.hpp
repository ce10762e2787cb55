#pragma once

#include <cstddef>
#include <string>

#include "embed/embedder.hpp"
#include "scoring/scoring.hpp"

namespace claimsearch {

struct ServiceConfig {
  std::string index_dir;
  std::string corpus_path;  // JSONL corpus; required for snippets, re-ranking and /doc
  EmbedderConfig embedder;
  std::size_t k = 5000;
  std::size_t rerank_n = 50;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::size_t token_budget = 512;
  std::string token_counter = "reference";
  std::size_t rerank_threads = 1;
  std::size_t query_store_capacity = 256;
  ElementWeighting weighting;

  void validate() const;

  // Keys: index, corpus, embedder{...}, k, rerank_n, host, port,
  // token_budget, token_counter, rerank_threads, query_store_capacity,
  // weighting{scheme, weights}.
  static ServiceConfig from_json(const Json& j);
  static ServiceConfig from_file(const std::string& path);
  Json to_json() const;

  // CLAIMSEARCH_INDEX, CLAIMSEARCH_CORPUS, CLAIMSEARCH_PROVIDER,
  // CLAIMSEARCH_K, CLAIMSEARCH_RERANK_N, CLAIMSEARCH_PORT, plus the
  // embedder's own variables.
  void apply_env();
};

}  // namespace claimsearch
