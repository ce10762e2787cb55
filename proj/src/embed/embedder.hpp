#pragma once

#include <chrono>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "common/error.hpp"
#include "common/tokenizer.hpp"

namespace claimsearch {

using Json = nlohmann::ordered_json;

struct EmbeddingVector {
  std::vector<double> values;

  std::size_t dim() const noexcept { return values.size(); }
  bool operator==(const EmbeddingVector&) const = default;
};

// Raised by embed_batch; `indices` are the positions of the failed inputs.
class EmbedBatchError : public Error {
 public:
  EmbedBatchError(ErrorCode code, const std::string& message, std::vector<std::size_t> indices)
      : Error(code, message), indices_(std::move(indices)) {}

  const std::vector<std::size_t>& indices() const noexcept { return indices_; }

 private:
  std::vector<std::size_t> indices_;
};

class Embedder {
 public:
  virtual ~Embedder() = default;

  // name/version/dim; stored next to every persisted vector.
  virtual std::string provider_id() const = 0;
  virtual std::size_t dim() const = 0;
  virtual EmbeddingVector embed_text(std::string_view text) const = 0;

  // Order-preserving; element i equals embed_text(texts[i]).
  virtual std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts) const;
};

// Signed feature hashing over lower-cased word tokens, L2-normalized.
// Texts sharing vocabulary get high cosine; token order is ignored. This is
// a deterministic stand-in for a trained model, not a quality model.
class ReferenceEmbedder final : public Embedder {
 public:
  explicit ReferenceEmbedder(std::size_t dim = 256);

  std::string provider_id() const override;
  std::size_t dim() const override { return dim_; }
  EmbeddingVector embed_text(std::string_view text) const override;

 private:
  std::size_t dim_;
  ReferenceTokenCounter tokenizer_;
};

struct EmbedderConfig {
  enum class Provider { Reference, Remote };

  Provider provider = Provider::Reference;
  std::size_t dim = 256;
  std::size_t batch_size = 64;

  // Remote only.
  std::string endpoint;  // http://host:port/path
  std::string auth_token;
  std::string name = "remote";
  std::string version = "1";
  int retries = 3;
  std::chrono::milliseconds backoff{200};
  std::chrono::milliseconds timeout{30000};
  std::size_t max_text_chars = 0;  // 0 = no limit
  std::size_t max_in_flight = 1;

  void validate() const;

  // Fields: provider, dim, batch_size, endpoint, auth_token, name, version,
  // retries, backoff_ms, timeout_ms, max_text_chars, max_in_flight.
  static EmbedderConfig from_json(const Json& j);
  // CLAIMSEARCH_EMBED_ENDPOINT and CLAIMSEARCH_EMBED_TOKEN override.
  void apply_env();
};

std::unique_ptr<Embedder> make_embedder(const EmbedderConfig& config);

// JSON over HTTP: POST {"texts": [...]} -> {"vectors": [[...], ...]}. Each
// batch is retried with exponential backoff on transport errors and 5xx.
class RemoteEmbedder final : public Embedder {
 public:
  explicit RemoteEmbedder(EmbedderConfig config);

  std::string provider_id() const override;
  std::size_t dim() const override { return config_.dim; }
  EmbeddingVector embed_text(std::string_view text) const override;
  std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts) const override;

 private:
  std::vector<EmbeddingVector> post_batch(const std::vector<std::string>& texts, std::size_t offset) const;

  EmbedderConfig config_;
  std::string scheme_host_port_;
  std::string path_;
};

// Persisted vectors keyed by text hash for one provider. Mixing providers in
// one cache is rejected.
class VectorCache {
 public:
  explicit VectorCache(std::string provider_id) : provider_id_(std::move(provider_id)) {}

  const std::string& provider_id() const noexcept { return provider_id_; }
  std::size_t size() const noexcept { return entries_.size(); }

  std::optional<EmbeddingVector> get(std::string_view text) const;
  void put(std::string_view text, EmbeddingVector v);

  // JSONL rows {text_hash, provider_id, vector}.
  static VectorCache load(const std::string& path, const std::string& expected_provider);
  std::string to_jsonl() const;

  static std::string text_hash(std::string_view text);

 private:
  std::string provider_id_;
  std::map<std::string, EmbeddingVector> entries_;
};

}  // namespace claimsearch
