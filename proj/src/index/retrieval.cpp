#include "index/retrieval.hpp"

#include <map>

#include "common/error.hpp"
#include "common/parallel.hpp"

namespace claimsearch {

std::vector<ScoredDocument> aggregate_documents(const std::vector<ChunkHit>& hits) {
  std::map<std::string, ScoredDocument, std::less<>> by_doc;
  for (const auto& h : hits) {
    auto it = by_doc.find(h.ref.doc_id);
    if (it == by_doc.end()) {
      ScoredDocument d;
      d.doc_id = h.ref.doc_id;
      d.score = h.similarity;
      d.best_chunk = h.ref;
      d.best_chunk_similarity = h.similarity;
      by_doc.emplace(h.ref.doc_id, std::move(d));
    } else if (h.similarity > it->second.score) {
      it->second.score = h.similarity;
      it->second.best_chunk = h.ref;
      it->second.best_chunk_similarity = h.similarity;
    }
  }
  std::vector<ScoredDocument> docs;
  docs.reserve(by_doc.size());
  for (auto& [id, d] : by_doc) docs.push_back(std::move(d));
  sort_documents(docs);
  return docs;
}

namespace {

std::vector<std::string> paragraph_texts(const PatentDocument& doc) {
  std::vector<std::string> texts;
  for (const auto& [section, p] : doc.all_paragraphs()) texts.push_back(p->text);
  return texts;
}

}  // namespace

std::vector<std::vector<double>> element_paragraph_similarities(const std::vector<EmbeddingVector>& element_vecs,
                                                                const PatentDocument& doc,
                                                                const Embedder& embedder) {
  auto para_vecs = embedder.embed_batch(paragraph_texts(doc));
  std::vector<std::vector<double>> sims(element_vecs.size(), std::vector<double>(para_vecs.size()));
  for (std::size_t e = 0; e < element_vecs.size(); ++e) {
    for (std::size_t p = 0; p < para_vecs.size(); ++p) sims[e][p] = cosine(element_vecs[e], para_vecs[p]);
  }
  return sims;
}

std::vector<ScoredDocument> rerank_top_n(const std::vector<ClaimElement>& elements,
                                         std::vector<ScoredDocument> docs, const Corpus& corpus,
                                         const Embedder& embedder, const TokenCounter& counter,
                                         const RerankOptions& options) {
  if (elements.empty()) throw Error(ErrorCode::NoElements, "claim has no elements to re-rank with");
  std::vector<const PatentDocument*> sources;
  sources.reserve(docs.size());
  for (const auto& d : docs) {
    const PatentDocument* doc = corpus.find(d.doc_id);
    if (doc == nullptr) throw Error(ErrorCode::DocNotFound, "document " + d.doc_id + " is not in the corpus");
    sources.push_back(doc);
  }
  std::vector<std::string> element_texts;
  for (const auto& e : elements) element_texts.push_back(e.text);
  const auto element_vecs = embedder.embed_batch(element_texts);
  const auto weights = options.weighting.materialize(elements, counter);

  parallel_for(docs.size(), options.threads, [&](std::size_t i) {
    const PatentDocument& doc = *sources[i];
    auto paragraphs = doc.all_paragraphs();
    ScoredDocument& out = docs[i];
    out.per_element_best.clear();
    if (paragraphs.empty()) {
      out.rerank_score = 0.0;
      return;
    }
    auto para_vecs = embedder.embed_batch(paragraph_texts(doc));
    std::vector<double> salience = options.weighting.paragraph_salience;
    if (!salience.empty() && salience.size() != para_vecs.size()) salience.clear();
    auto scored = weighted_paragraph_element_score(element_vecs, para_vecs, weights, salience);
    out.rerank_score = scored.score;
    for (std::size_t e = 0; e < scored.per_element_best.size(); ++e) {
      const auto& m = scored.per_element_best[e];
      out.per_element_best.push_back(
          {e, paragraphs[m.paragraph_index].first, paragraphs[m.paragraph_index].second->number, m.similarity});
    }
  });
  sort_documents(docs);
  return docs;
}

VectorIndex build_corpus_index(const Corpus& corpus, const Embedder& embedder, const ChunkerConfig& chunker,
                               const AnnParams& params, CorpusIndexStats* stats) {
  chunker.validate();
  auto counter = make_token_counter(chunker.token_counter);
  IndexBuilder builder(embedder.provider_id(), embedder.dim(), params);
  const std::string provider = embedder.provider_id();
  constexpr std::size_t kBatch = 256;
  std::vector<Chunk> pending;
  auto flush = [&] {
    if (pending.empty()) return;
    std::vector<std::string> texts;
    texts.reserve(pending.size());
    for (const auto& c : pending) texts.push_back(c.text);
    auto vecs = embedder.embed_batch(texts);
    for (std::size_t i = 0; i < pending.size(); ++i) builder.add(pending[i].ref(), vecs[i].values, provider);
    pending.clear();
  };
  std::size_t n_docs = 0;
  for (const auto& [id, doc] : corpus.documents()) {
    ++n_docs;
    for (auto& c : chunk_document(*doc, chunker, *counter)) {
      pending.push_back(std::move(c));
      if (pending.size() >= kBatch) flush();
    }
  }
  flush();
  if (stats != nullptr) {
    stats->documents = n_docs;
    stats->chunks = builder.size();
  }
  return std::move(builder).build();
}

}  // namespace claimsearch
