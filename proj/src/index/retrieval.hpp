#pragma once

#include <cstddef>
#include <vector>

#include "corpus/corpus.hpp"
#include "dataset/chunker.hpp"
#include "embed/embedder.hpp"
#include "index/vector_index.hpp"
#include "scoring/scoring.hpp"

namespace claimsearch {

// One document per distinct doc id, scored by its best hit.
std::vector<ScoredDocument> aggregate_documents(const std::vector<ChunkHit>& hits);

struct RerankOptions {
  ElementWeighting weighting;
  std::size_t threads = 1;
};

// Rescores each document with the weighted paragraph-element method over all
// of its paragraphs and re-sorts by the new score. First-stage scores are
// kept. Throws Error(DocNotFound).
std::vector<ScoredDocument> rerank_top_n(const std::vector<ClaimElement>& elements,
                                         std::vector<ScoredDocument> docs, const Corpus& corpus,
                                         const Embedder& embedder, const TokenCounter& counter,
                                         const RerankOptions& options = {});

// sims[e][p]: cosine of element e against paragraph p of doc.all_paragraphs().
std::vector<std::vector<double>> element_paragraph_similarities(const std::vector<EmbeddingVector>& element_vecs,
                                                                const PatentDocument& doc,
                                                                const Embedder& embedder);

struct CorpusIndexStats {
  std::size_t documents = 0;
  std::size_t chunks = 0;
};

// Chunks every section of every document (in doc id order) and embeds the
// chunks into a new index.
VectorIndex build_corpus_index(const Corpus& corpus, const Embedder& embedder, const ChunkerConfig& chunker,
                               const AnnParams& params, CorpusIndexStats* stats = nullptr);

}  // namespace claimsearch
