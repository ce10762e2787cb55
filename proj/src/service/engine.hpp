#pragma once

#include <chrono>
#include <cstddef>
#include <list>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "corpus/corpus.hpp"
#include "embed/embedder.hpp"
#include "index/retrieval.hpp"
#include "index/vector_index.hpp"
#include "service/config.hpp"

namespace claimsearch {

// Element detection for pasted claims: <claim-text> markup, then one element
// per non-blank line, then segments ending in ';' or ':', then the whole
// text as one element.
std::vector<ClaimElement> split_claim_elements(std::string_view claim_text);

struct SearchRequest {
  std::string claim_text;
  std::vector<std::string> elements;  // explicit split; overrides detection
  std::optional<std::size_t> k;
  std::optional<std::size_t> rerank_n;

  // Throws Error(InvalidArgument) on a malformed body.
  static SearchRequest from_json(const Json& j);
};

struct SearchOutcome {
  std::string query_id;
  ClaimQuery query;
  std::size_t k = 0;
  std::size_t rerank_n = 0;
  std::vector<ScoredDocument> documents;
  double embed_ms = 0.0;
  double ann_ms = 0.0;
  double rerank_ms = 0.0;
};

// Immutable view served to requests; reload swaps the whole snapshot.
struct Snapshot {
  std::shared_ptr<const VectorIndex> index;
  std::shared_ptr<const Corpus> corpus;  // may be null
  std::string index_dir;
  std::string corpus_path;
};

class SearchEngine {
 public:
  explicit SearchEngine(ServiceConfig config, std::unique_ptr<Embedder> embedder = nullptr);

  const ServiceConfig& config() const noexcept { return config_; }
  const Embedder& embedder() const noexcept { return *embedder_; }

  // Loads index (and corpus when configured) from the given paths, or from
  // the configured ones when empty, then swaps the snapshot in. On failure
  // the previous snapshot keeps serving. Throws Error(ProviderMismatch) when
  // the index was built by another embedder.
  void reload(const std::string& index_dir = {}, const std::string& corpus_path = {});
  void install(std::shared_ptr<const VectorIndex> index, std::shared_ptr<const Corpus> corpus);
  std::shared_ptr<const Snapshot> snapshot() const;

  // Throws Error(EmptyClaim), Error(InvalidArgument), Error(IndexNotLoaded)
  // or embedder errors.
  SearchOutcome run_search(const SearchRequest& request) const;
  Json render(const SearchOutcome& outcome) const;
  Json search(const SearchRequest& request) const { return render(run_search(request)); }
  // Throws Error(DocNotFound) or Error(IndexNotLoaded) without a corpus. A
  // query id no longer in the store yields "overlay": null.
  Json document(const std::string& doc_id, const std::string& query_id = {}) const;
  Json health() const;

 private:
  struct StoredQuery {
    std::vector<ClaimElement> elements;
    std::vector<EmbeddingVector> element_vecs;
  };

  std::string remember(StoredQuery q) const;
  std::shared_ptr<const StoredQuery> recall(const std::string& id) const;

  ServiceConfig config_;
  std::unique_ptr<Embedder> embedder_;
  std::shared_ptr<const TokenCounter> counter_;

  mutable std::mutex snapshot_mu_;
  std::shared_ptr<const Snapshot> snapshot_;
  std::mutex reload_mu_;

  mutable std::mutex queries_mu_;
  mutable std::list<std::string> query_order_;  // most recent first
  mutable std::unordered_map<std::string, std::pair<std::shared_ptr<const StoredQuery>, std::list<std::string>::iterator>>
      queries_;
  mutable std::size_t query_seq_ = 0;
};

}  // namespace claimsearch
