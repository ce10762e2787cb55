#include "embed/embedder.hpp"

#include <cmath>
#include <cstdlib>
#include <thread>

#include <httplib.h>

#include "common/jsonl.hpp"
#include "common/parallel.hpp"
#include "common/text.hpp"

namespace claimsearch {

std::vector<EmbeddingVector> Embedder::embed_batch(const std::vector<std::string>& texts) const {
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (std::size_t i = 0; i < texts.size(); ++i) {
    try {
      out.push_back(embed_text(texts[i]));
    } catch (const EmbedBatchError&) {
      throw;
    } catch (const Error& e) {
      throw EmbedBatchError(e.code(), "item " + std::to_string(i) + ": " + e.what(), {i});
    }
  }
  return out;
}

ReferenceEmbedder::ReferenceEmbedder(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw Error(ErrorCode::ConfigError, "embedding dim must be positive");
}

std::string ReferenceEmbedder::provider_id() const { return "reference/v1/" + std::to_string(dim_); }

EmbeddingVector ReferenceEmbedder::embed_text(std::string_view text) const {
  EmbeddingVector v;
  v.values.assign(dim_, 0.0);
  for (const auto& token : word_tokens(tokenizer_, text)) {
    std::uint64_t h = text::fnv1a64(token);
    std::size_t bucket = static_cast<std::size_t>(h % dim_);
    v.values[bucket] += (h >> 63) ? -1.0 : 1.0;
  }
  double norm = 0.0;
  for (double x : v.values) norm += x * x;
  if (norm > 0.0) {
    norm = std::sqrt(norm);
    for (double& x : v.values) x /= norm;
  }
  return v;
}

void EmbedderConfig::validate() const {
  if (dim == 0) throw Error(ErrorCode::ConfigError, "dim must be positive");
  if (batch_size == 0) throw Error(ErrorCode::ConfigError, "batch_size must be positive");
  if (provider == Provider::Remote && endpoint.empty()) {
    throw Error(ErrorCode::ConfigError, "remote embedder requires an endpoint");
  }
}

EmbedderConfig EmbedderConfig::from_json(const Json& j) {
  EmbedderConfig c;
  std::string provider = j.value("provider", "reference");
  if (provider == "reference") {
    c.provider = Provider::Reference;
  } else if (provider == "remote") {
    c.provider = Provider::Remote;
  } else {
    throw Error(ErrorCode::ConfigError, "unknown embedding provider " + provider);
  }
  c.dim = j.value("dim", c.dim);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.endpoint = j.value("endpoint", c.endpoint);
  c.auth_token = j.value("auth_token", c.auth_token);
  c.name = j.value("name", c.name);
  c.version = j.value("version", c.version);
  c.retries = j.value("retries", c.retries);
  c.backoff = std::chrono::milliseconds(j.value("backoff_ms", static_cast<long>(c.backoff.count())));
  c.timeout = std::chrono::milliseconds(j.value("timeout_ms", static_cast<long>(c.timeout.count())));
  c.max_text_chars = j.value("max_text_chars", c.max_text_chars);
  c.max_in_flight = j.value("max_in_flight", c.max_in_flight);
  return c;
}

void EmbedderConfig::apply_env() {
  if (const char* e = std::getenv("CLAIMSEARCH_EMBED_ENDPOINT"); e && *e) endpoint = e;
  if (const char* t = std::getenv("CLAIMSEARCH_EMBED_TOKEN"); t && *t) auth_token = t;
}

std::unique_ptr<Embedder> make_embedder(const EmbedderConfig& config) {
  config.validate();
  if (config.provider == EmbedderConfig::Provider::Reference) return std::make_unique<ReferenceEmbedder>(config.dim);
  return std::make_unique<RemoteEmbedder>(config);
}

RemoteEmbedder::RemoteEmbedder(EmbedderConfig config) : config_(std::move(config)) {
  config_.validate();
  const std::string& url = config_.endpoint;
  std::size_t scheme_end = url.find("://");
  std::size_t host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
  std::size_t path_start = url.find('/', host_start);
  scheme_host_port_ = url.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/" : url.substr(path_start);
  if (scheme_end == std::string::npos) scheme_host_port_ = "http://" + scheme_host_port_;
}

std::string RemoteEmbedder::provider_id() const {
  return config_.name + "/" + config_.version + "/" + std::to_string(config_.dim);
}

EmbeddingVector RemoteEmbedder::embed_text(std::string_view text) const {
  try {
    return embed_batch({std::string(text)}).front();
  } catch (const EmbedBatchError& e) {
    throw Error(e.code(), e.what());
  }
}

std::vector<EmbeddingVector> RemoteEmbedder::post_batch(const std::vector<std::string>& texts,
                                                        std::size_t offset) const {
  std::vector<std::size_t> indices(texts.size());
  for (std::size_t i = 0; i < texts.size(); ++i) indices[i] = offset + i;

  httplib::Client client(scheme_host_port_);
  auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
  client.set_connection_timeout(secs.count(), 0);
  client.set_read_timeout(secs.count(), 0);
  httplib::Headers headers;
  if (!config_.auth_token.empty()) headers.emplace("Authorization", "Bearer " + config_.auth_token);
  const std::string body = Json{{"texts", texts}}.dump();

  std::string last_error;
  auto delay = config_.backoff;
  for (int attempt = 0; attempt <= config_.retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(delay);
      delay *= 2;
    }
    auto res = client.Post(path_, headers, body, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 413) {
      throw EmbedBatchError(ErrorCode::TextTooLong, "embedding service rejected batch as too long", indices);
    }
    if (res->status >= 500) {
      last_error = "status " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw EmbedBatchError(ErrorCode::RemoteUnavailable, "embedding service status " + std::to_string(res->status),
                            indices);
    }
    std::vector<EmbeddingVector> out;
    try {
      Json j = Json::parse(res->body);
      for (const auto& row : j.at("vectors")) out.push_back({row.get<std::vector<double>>()});
    } catch (const nlohmann::json::exception& e) {
      throw EmbedBatchError(ErrorCode::RemoteUnavailable, std::string("malformed embedding response: ") + e.what(),
                            indices);
    }
    if (out.size() != texts.size()) {
      throw EmbedBatchError(ErrorCode::RemoteUnavailable, "embedding response has wrong vector count", indices);
    }
    for (const auto& v : out) {
      if (v.dim() != config_.dim) {
        throw EmbedBatchError(ErrorCode::DimMismatch, "embedding response dim " + std::to_string(v.dim()) +
                                                          " != configured " + std::to_string(config_.dim),
                              indices);
      }
      for (double x : v.values) {
        if (!std::isfinite(x)) throw EmbedBatchError(ErrorCode::RemoteUnavailable, "non-finite vector value", indices);
      }
    }
    return out;
  }
  throw EmbedBatchError(ErrorCode::RemoteUnavailable,
                        "embedding service unavailable after " + std::to_string(config_.retries + 1) +
                            " attempts: " + last_error,
                        indices);
}

std::vector<EmbeddingVector> RemoteEmbedder::embed_batch(const std::vector<std::string>& texts) const {
  if (config_.max_text_chars > 0) {
    std::vector<std::size_t> too_long;
    for (std::size_t i = 0; i < texts.size(); ++i) {
      if (texts[i].size() > config_.max_text_chars) too_long.push_back(i);
    }
    if (!too_long.empty()) {
      throw EmbedBatchError(ErrorCode::TextTooLong,
                            std::to_string(too_long.size()) + " text(s) exceed " +
                                std::to_string(config_.max_text_chars) + " characters",
                            too_long);
    }
  }
  const std::size_t n_batches = (texts.size() + config_.batch_size - 1) / config_.batch_size;
  std::vector<std::vector<EmbeddingVector>> results(n_batches);
  parallel_for(n_batches, std::max<std::size_t>(1, config_.max_in_flight), [&](std::size_t b) {
    std::size_t lo = b * config_.batch_size;
    std::size_t hi = std::min(texts.size(), lo + config_.batch_size);
    std::vector<std::string> batch(texts.begin() + static_cast<std::ptrdiff_t>(lo),
                                   texts.begin() + static_cast<std::ptrdiff_t>(hi));
    results[b] = post_batch(batch, lo);
  });
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (auto& r : results) {
    for (auto& v : r) out.push_back(std::move(v));
  }
  return out;
}

std::string VectorCache::text_hash(std::string_view text) { return text::hex64(text::fnv1a64(text)); }

std::optional<EmbeddingVector> VectorCache::get(std::string_view text) const {
  auto it = entries_.find(text_hash(text));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void VectorCache::put(std::string_view text, EmbeddingVector v) { entries_[text_hash(text)] = std::move(v); }

VectorCache VectorCache::load(const std::string& path, const std::string& expected_provider) {
  VectorCache cache(expected_provider);
  for_each_jsonl(path, [&](const Json& row) {
    std::string provider = row.at("provider_id").get<std::string>();
    if (provider != expected_provider) {
      throw Error(ErrorCode::ProviderMismatch,
                  "vector cache entry from " + provider + " in a cache for " + expected_provider);
    }
    cache.entries_[row.at("text_hash").get<std::string>()] = {row.at("vector").get<std::vector<double>>()};
  });
  return cache;
}

std::string VectorCache::to_jsonl() const {
  std::string out;
  for (const auto& [hash, v] : entries_) {
    out += Json{{"text_hash", hash}, {"provider_id", provider_id_}, {"vector", v.values}}.dump();
    out.push_back('\n');
  }
  return out;
}

}  // namespace claimsearch
