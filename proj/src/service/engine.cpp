#include "service/engine.hpp"

#include <algorithm>

#include "common/error.hpp"
#include "common/text.hpp"
#include "corpus/parse.hpp"

namespace claimsearch {
namespace {

constexpr std::size_t kSnippetChars = 300;

double ms_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

std::vector<ClaimElement> non_empty(const std::vector<std::string>& parts) {
  std::vector<ClaimElement> out;
  for (const auto& p : parts) {
    std::string t = text::normalize_whitespace(p);
    if (!t.empty()) out.push_back({std::move(t), 0});
  }
  return out;
}

std::string snippet_for(const Corpus* corpus, const ChunkRef& ref) {
  if (corpus == nullptr) return {};
  const PatentDocument* doc = corpus->find(ref.doc_id);
  if (doc == nullptr) return {};
  std::string text;
  for (const auto& s : doc->sections) {
    if (s.name != ref.section) continue;
    for (const auto& p : s.paragraphs) {
      if (std::find(ref.paragraph_numbers.begin(), ref.paragraph_numbers.end(), p.number) ==
          ref.paragraph_numbers.end()) {
        continue;
      }
      if (!text.empty()) text += ' ';
      text += p.text;
      if (text.size() >= kSnippetChars) break;
    }
  }
  if (text.size() > kSnippetChars) {
    std::size_t cut = kSnippetChars;
    // Do not split a UTF-8 sequence.
    while (cut > 0 && (static_cast<unsigned char>(text[cut]) & 0xC0) == 0x80) --cut;
    text.resize(cut);
    text += "...";
  }
  return text;
}

Json result_json(const ScoredDocument& d, const Corpus* corpus) {
  Json r{{"doc_id", d.doc_id}, {"score", d.score}};
  if (d.rerank_score) r["rerank_score"] = *d.rerank_score;
  if (d.best_chunk) {
    r["best_chunk"] = Json{{"section", to_string(d.best_chunk->section)},
                           {"paragraph_numbers", d.best_chunk->paragraph_numbers},
                           {"piece", d.best_chunk->piece},
                           {"similarity", d.best_chunk_similarity},
                           {"snippet", snippet_for(corpus, *d.best_chunk)}};
  }
  if (d.rerank_score) {
    Json matches = Json::array();
    for (const auto& m : d.per_element_best) {
      matches.push_back({{"element_index", m.element_index},
                         {"section", to_string(m.section)},
                         {"paragraph_number", m.paragraph_number},
                         {"similarity", m.similarity}});
    }
    r["per_element_matches"] = std::move(matches);
  }
  return r;
}

}  // namespace

std::vector<ClaimElement> split_claim_elements(std::string_view claim_text) {
  std::string_view t = text::trim(claim_text);
  if (t.empty()) return {};
  if (t.find("<claim-text") != std::string_view::npos) {
    try {
      auto elements = parse_claim_fragment(t);
      if (!elements.empty()) return elements;
    } catch (const Error&) {
      // Not well-formed; treat the markup as plain text.
    }
  }
  std::vector<std::string> lines;
  for (auto line : text::split(t, '\n')) lines.emplace_back(line);
  auto by_line = non_empty(lines);
  if (by_line.size() > 1) return by_line;

  std::vector<std::string> segments;
  std::string cur;
  for (char c : t) {
    cur += c;
    if (c == ';' || c == ':') {
      segments.push_back(std::move(cur));
      cur.clear();
    }
  }
  segments.push_back(std::move(cur));
  auto by_segment = non_empty(segments);
  if (by_segment.size() > 1) return by_segment;
  return non_empty({std::string(t)});
}

SearchRequest SearchRequest::from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidArgument, "search request must be a JSON object");
  SearchRequest r;
  try {
    r.claim_text = j.value("claim_text", "");
    if (j.contains("elements")) r.elements = j.at("elements").get<std::vector<std::string>>();
    auto count = [&](const char* key) -> std::optional<std::size_t> {
      if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
      const Json& v = j.at(key);
      if (!v.is_number_integer() || v.get<long long>() < 0) {
        throw Error(ErrorCode::InvalidArgument, std::string(key) + " must be a non-negative integer");
      }
      return v.get<std::size_t>();
    };
    r.k = count("k");
    r.rerank_n = count("rerank_n");
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("bad search request: ") + e.what());
  }
  return r;
}

SearchEngine::SearchEngine(ServiceConfig config, std::unique_ptr<Embedder> embedder)
    : config_(std::move(config)), embedder_(std::move(embedder)) {
  config_.validate();
  if (!embedder_) embedder_ = make_embedder(config_.embedder);
  counter_ = make_token_counter(config_.token_counter);
}

void SearchEngine::reload(const std::string& index_dir, const std::string& corpus_path) {
  std::lock_guard<std::mutex> lock(reload_mu_);
  auto current = snapshot();
  auto next = std::make_shared<Snapshot>();
  next->index_dir = !index_dir.empty() ? index_dir : current ? current->index_dir : config_.index_dir;
  next->corpus_path = !corpus_path.empty() ? corpus_path : current ? current->corpus_path : config_.corpus_path;
  if (next->index_dir.empty()) throw Error(ErrorCode::IndexNotLoaded, "no index directory configured");
  auto index = std::make_shared<VectorIndex>(VectorIndex::load(next->index_dir));
  if (index->provider_id() != embedder_->provider_id()) {
    throw Error(ErrorCode::ProviderMismatch, "index built with '" + index->provider_id() + "' but the service embeds with '" +
                                                 embedder_->provider_id() + "'");
  }
  next->index = std::move(index);
  if (!next->corpus_path.empty()) next->corpus = std::make_shared<Corpus>(Corpus::load(next->corpus_path));
  std::lock_guard<std::mutex> swap(snapshot_mu_);
  snapshot_ = std::move(next);
}

void SearchEngine::install(std::shared_ptr<const VectorIndex> index, std::shared_ptr<const Corpus> corpus) {
  if (index && index->provider_id() != embedder_->provider_id()) {
    throw Error(ErrorCode::ProviderMismatch, "index built with '" + index->provider_id() + "' but the service embeds with '" +
                                                 embedder_->provider_id() + "'");
  }
  auto next = std::make_shared<Snapshot>();
  next->index = std::move(index);
  next->corpus = std::move(corpus);
  std::lock_guard<std::mutex> lock(snapshot_mu_);
  snapshot_ = std::move(next);
}

std::shared_ptr<const Snapshot> SearchEngine::snapshot() const {
  std::lock_guard<std::mutex> lock(snapshot_mu_);
  return snapshot_;
}

std::string SearchEngine::remember(StoredQuery q) const {
  std::lock_guard<std::mutex> lock(queries_mu_);
  std::string id = "q" + std::to_string(++query_seq_);
  query_order_.push_front(id);
  queries_[id] = {std::make_shared<const StoredQuery>(std::move(q)), query_order_.begin()};
  while (queries_.size() > config_.query_store_capacity) {
    queries_.erase(query_order_.back());
    query_order_.pop_back();
  }
  return id;
}

std::shared_ptr<const SearchEngine::StoredQuery> SearchEngine::recall(const std::string& id) const {
  std::lock_guard<std::mutex> lock(queries_mu_);
  auto it = queries_.find(id);
  if (it == queries_.end()) return nullptr;
  query_order_.splice(query_order_.begin(), query_order_, it->second.second);
  return it->second.first;
}

SearchOutcome SearchEngine::run_search(const SearchRequest& request) const {
  std::vector<ClaimElement> elements =
      request.elements.empty() ? split_claim_elements(request.claim_text) : non_empty(request.elements);
  if (elements.empty()) throw Error(ErrorCode::EmptyClaim, "claim text is empty");
  SearchOutcome out;
  out.k = request.k.value_or(config_.k);
  out.rerank_n = request.rerank_n.value_or(std::min(config_.rerank_n, out.k));
  if (out.k == 0) throw Error(ErrorCode::InvalidArgument, "k must be >= 1");
  if (out.rerank_n > out.k) throw Error(ErrorCode::InvalidArgument, "rerank_n must not exceed k");

  auto snap = snapshot();
  if (!snap || !snap->index) throw Error(ErrorCode::IndexNotLoaded, "no index is loaded");
  if (out.rerank_n > 0 && !snap->corpus) throw Error(ErrorCode::IndexNotLoaded, "re-ranking needs a loaded corpus");

  out.query = make_claim_query(elements, config_.token_budget, *counter_);

  auto t0 = std::chrono::steady_clock::now();
  EmbeddingVector qv = embedder_->embed_text(out.query.query_text);
  out.embed_ms = ms_since(t0);

  auto t1 = std::chrono::steady_clock::now();
  out.documents = aggregate_documents(snap->index->query(qv.values, out.k));
  out.ann_ms = ms_since(t1);

  if (out.rerank_n > 0 && !out.documents.empty()) {
    auto t2 = std::chrono::steady_clock::now();
    // The refined ranking is the first-stage top rerank_n, reordered.
    out.documents.resize(std::min(out.rerank_n, out.documents.size()));
    RerankOptions options{config_.weighting, config_.rerank_threads};
    out.documents =
        rerank_top_n(out.query.elements, std::move(out.documents), *snap->corpus, *embedder_, *counter_, options);
    out.rerank_ms = ms_since(t2);
  }

  StoredQuery stored;
  stored.elements = out.query.elements;
  std::vector<std::string> texts;
  for (const auto& e : stored.elements) texts.push_back(e.text);
  stored.element_vecs = embedder_->embed_batch(texts);
  out.query_id = remember(std::move(stored));
  return out;
}

Json SearchEngine::render(const SearchOutcome& out) const {
  auto snap = snapshot();
  Json results = Json::array();
  for (const auto& d : out.documents) results.push_back(result_json(d, snap ? snap->corpus.get() : nullptr));
  Json element_texts = Json::array();
  for (const auto& e : out.query.elements) element_texts.push_back(e.text);
  return Json{{"query_id", out.query_id},
              {"elements", std::move(element_texts)},
              {"query_text", out.query.query_text},
              {"query_truncated", out.query.truncated},
              {"k", out.k},
              {"rerank_n", out.rerank_n},
              {"provider_id", embedder_->provider_id()},
              {"results", std::move(results)},
              {"timing", {{"embed_ms", out.embed_ms}, {"ann_ms", out.ann_ms}, {"rerank_ms", out.rerank_ms}}}};
}

Json SearchEngine::document(const std::string& doc_id, const std::string& query_id) const {
  auto snap = snapshot();
  if (!snap || !snap->corpus) throw Error(ErrorCode::IndexNotLoaded, "no corpus is loaded");
  const PatentDocument* doc = snap->corpus->find(doc_id);
  if (doc == nullptr) throw Error(ErrorCode::DocNotFound, "document " + doc_id + " is not in the corpus");

  Json out = to_json(*doc);
  if (query_id.empty()) return out;
  auto stored = recall(query_id);
  if (!stored) {
    out["overlay"] = nullptr;
    out["overlay_status"] = "expired";
    return out;
  }
  auto paragraphs = doc->all_paragraphs();
  auto sims = element_paragraph_similarities(stored->element_vecs, *doc, *embedder_);
  Json refs = Json::array();
  for (const auto& [section, p] : paragraphs) refs.push_back({{"section", to_string(section)}, {"number", p->number}});
  Json elements = Json::array();
  Json best = Json::array();
  for (std::size_t e = 0; e < stored->elements.size(); ++e) {
    elements.push_back(stored->elements[e].text);
    if (sims[e].empty()) continue;
    std::size_t arg = 0;
    for (std::size_t p = 1; p < sims[e].size(); ++p) {
      if (sims[e][p] > sims[e][arg]) arg = p;
    }
    best.push_back({{"element_index", e}, {"paragraph_index", arg}, {"similarity", sims[e][arg]}});
  }
  out["overlay"] = Json{{"query_id", query_id},
                        {"elements", std::move(elements)},
                        {"paragraphs", std::move(refs)},
                        {"similarities", sims},
                        {"per_element_best", std::move(best)}};
  out["overlay_status"] = "ok";
  return out;
}

Json SearchEngine::health() const {
  auto snap = snapshot();
  Json h{{"status", "ok"},
         {"index_loaded", snap && snap->index},
         {"provider_id", embedder_->provider_id()}};
  if (snap && snap->index) {
    h["chunks"] = snap->index->size();
    h["dim"] = snap->index->dim();
    h["ann_mode"] = to_string(snap->index->ann_params().mode);
  }
  h["documents"] = snap && snap->corpus ? snap->corpus->size() : 0;
  return h;
}

}  // namespace claimsearch
