#include "service/config.hpp"

#include <cstdlib>

#include "common/error.hpp"
#include "common/text.hpp"

namespace claimsearch {
namespace {

std::size_t parse_count(const char* name, const std::string& value) {
  try {
    std::size_t used = 0;
    long long v = std::stoll(value, &used);
    if (used != value.size() || v < 0) throw std::invalid_argument(value);
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw Error(ErrorCode::ConfigError, std::string(name) + " must be a non-negative integer, got '" + value + "'");
  }
}

}  // namespace

void ServiceConfig::validate() const {
  if (k == 0) throw Error(ErrorCode::ConfigError, "k must be >= 1");
  if (rerank_n > k) throw Error(ErrorCode::ConfigError, "rerank_n must not exceed k");
  if (port < 0 || port > 65535) throw Error(ErrorCode::ConfigError, "port out of range");
  if (token_budget == 0) throw Error(ErrorCode::ConfigError, "token_budget must be >= 1");
  if (query_store_capacity == 0) throw Error(ErrorCode::ConfigError, "query_store_capacity must be >= 1");
  embedder.validate();
}

ServiceConfig ServiceConfig::from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::ConfigError, "service config must be a JSON object");
  ServiceConfig c;
  try {
    c.index_dir = j.value("index", c.index_dir);
    c.corpus_path = j.value("corpus", c.corpus_path);
    if (j.contains("embedder")) c.embedder = EmbedderConfig::from_json(j.at("embedder"));
    c.k = j.value("k", c.k);
    c.rerank_n = j.value("rerank_n", c.rerank_n);
    c.host = j.value("host", c.host);
    c.port = j.value("port", c.port);
    c.token_budget = j.value("token_budget", c.token_budget);
    c.token_counter = j.value("token_counter", c.token_counter);
    c.rerank_threads = j.value("rerank_threads", c.rerank_threads);
    c.query_store_capacity = j.value("query_store_capacity", c.query_store_capacity);
    if (j.contains("weighting")) {
      const Json& w = j.at("weighting");
      auto scheme = parse_weighting_scheme(w.value("scheme", "token_proportional"));
      if (!scheme) throw Error(ErrorCode::ConfigError, "unknown weighting scheme");
      c.weighting.scheme = *scheme;
      c.weighting.custom_weights = w.value("weights", std::vector<double>{});
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("bad service config: ") + e.what());
  }
  return c;
}

ServiceConfig ServiceConfig::from_file(const std::string& path) {
  try {
    return from_json(Json::parse(text::read_file(path)));
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::ConfigError, "cannot parse " + path + ": " + e.what());
  }
}

Json ServiceConfig::to_json() const {
  return Json{{"index", index_dir},
              {"corpus", corpus_path},
              {"k", k},
              {"rerank_n", rerank_n},
              {"host", host},
              {"port", port},
              {"token_budget", token_budget},
              {"token_counter", token_counter},
              {"weighting", {{"scheme", to_string(weighting.scheme)}}}};
}

void ServiceConfig::apply_env() {
  if (const char* v = std::getenv("CLAIMSEARCH_INDEX"); v && *v) index_dir = v;
  if (const char* v = std::getenv("CLAIMSEARCH_CORPUS"); v && *v) corpus_path = v;
  if (const char* v = std::getenv("CLAIMSEARCH_PROVIDER"); v && *v) {
    std::string p = v;
    if (p == "reference") {
      embedder.provider = EmbedderConfig::Provider::Reference;
    } else if (p == "remote") {
      embedder.provider = EmbedderConfig::Provider::Remote;
    } else {
      throw Error(ErrorCode::ConfigError, "CLAIMSEARCH_PROVIDER must be reference or remote");
    }
  }
  if (const char* v = std::getenv("CLAIMSEARCH_K"); v && *v) k = parse_count("CLAIMSEARCH_K", v);
  if (const char* v = std::getenv("CLAIMSEARCH_RERANK_N"); v && *v) rerank_n = parse_count("CLAIMSEARCH_RERANK_N", v);
  if (const char* v = std::getenv("CLAIMSEARCH_PORT"); v && *v) port = static_cast<int>(parse_count("CLAIMSEARCH_PORT", v));
  embedder.apply_env();
}

}  // namespace claimsearch
