#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "common/tokenizer.hpp"
#include "corpus/document.hpp"
#include "dataset/chunker.hpp"
#include "embed/embedder.hpp"

namespace claimsearch {

// Cosine similarity; 0 when either side is all-zero. Throws Error(DimMismatch).
double cosine(std::span<const double> u, std::span<const double> v);
double cosine(const EmbeddingVector& u, const EmbeddingVector& v);

struct ClaimQuery {
  std::string claim_text;
  std::vector<ClaimElement> elements;
  // Whole claim when it fits the budget, otherwise the longest suffix of
  // whole elements that fits (or the last token_budget tokens of the final
  // element when even that is too long).
  std::string query_text;
  std::size_t token_budget = 512;
  std::size_t first_kept_element = 0;
  bool truncated = false;
};

// Throws Error(EmptyClaim) when there are no non-empty elements.
ClaimQuery make_claim_query(const std::vector<ClaimElement>& elements, std::size_t token_budget,
                            const TokenCounter& counter);
ClaimQuery make_claim_query(const Claim& claim, std::size_t token_budget, const TokenCounter& counter);

struct MaxChunkScore {
  double score = 0.0;
  std::size_t argmax = 0;  // lowest index on ties
};

// Document score = best cosine over its chunks. Throws Error(NoChunks).
MaxChunkScore max_chunk_claim_score(const EmbeddingVector& query, const std::vector<EmbeddingVector>& chunks);

enum class WeightingScheme { TokenProportional, Uniform, Custom };

std::string_view to_string(WeightingScheme s) noexcept;
std::optional<WeightingScheme> parse_weighting_scheme(std::string_view s);

// Element salience. TokenProportional weighs each element by its token count
// (falling back to uniform if every element is token-free). Custom takes
// user weights, normalized to sum 1, and optionally per-paragraph salience
// multipliers applied to the similarities.
struct ElementWeighting {
  WeightingScheme scheme = WeightingScheme::TokenProportional;
  std::vector<double> custom_weights;
  std::vector<double> paragraph_salience;

  // Weights aligned with `elements`, summing to 1. Throws
  // Error(WeightMisalignment) for bad custom weights.
  std::vector<double> materialize(const std::vector<ClaimElement>& elements, const TokenCounter& counter) const;
};

struct ElementMatch {
  std::size_t paragraph_index = 0;
  double similarity = 0.0;
};

struct WeightedScore {
  double score = 0.0;
  std::vector<ElementMatch> per_element_best;
  std::vector<double> weights;
};

// Element score = best (salience-scaled) cosine over paragraphs; document
// score = weighted sum of element scores. Throws Error(NoElements),
// Error(NoParagraphs) or Error(WeightMisalignment).
WeightedScore weighted_paragraph_element_score(const std::vector<EmbeddingVector>& element_vecs,
                                               const std::vector<EmbeddingVector>& paragraph_vecs,
                                               const std::vector<double>& weights,
                                               const std::vector<double>& paragraph_salience = {});

WeightedScore weighted_paragraph_element_score(const std::vector<ClaimElement>& elements,
                                               const std::vector<EmbeddingVector>& element_vecs,
                                               const std::vector<EmbeddingVector>& paragraph_vecs,
                                               const ElementWeighting& weighting, const TokenCounter& counter);

struct ParagraphMatch {
  std::size_t element_index = 0;
  SectionName section = SectionName::Unknown;
  int paragraph_number = 0;
  double similarity = 0.0;
};

struct ScoredDocument {
  std::string doc_id;
  double score = 0.0;  // first-stage (max chunk) score
  std::optional<ChunkRef> best_chunk;
  double best_chunk_similarity = 0.0;
  std::optional<double> rerank_score;
  std::vector<ParagraphMatch> per_element_best;

  double effective_score() const { return rerank_score.value_or(score); }
};

// Sorts by effective score descending, doc_id ascending on ties.
void sort_documents(std::vector<ScoredDocument>& docs);

// Score report row {query_id, doc_id, method, score, best_chunk | per_element_best}.
Json score_report_row(const std::string& query_id, const ScoredDocument& doc, bool weighted);

}  // namespace claimsearch
