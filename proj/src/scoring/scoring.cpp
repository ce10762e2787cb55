#include "scoring/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "common/error.hpp"
#include "common/text.hpp"

namespace claimsearch {

double cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) {
    throw Error(ErrorCode::DimMismatch,
                "cosine over dims " + std::to_string(u.size()) + " and " + std::to_string(v.size()));
  }
  double dot = 0.0, nu = 0.0, nv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  if (nu == 0.0 || nv == 0.0) return 0.0;
  return dot / (std::sqrt(nu) * std::sqrt(nv));
}

double cosine(const EmbeddingVector& u, const EmbeddingVector& v) { return cosine(u.values, v.values); }

ClaimQuery make_claim_query(const std::vector<ClaimElement>& raw_elements, std::size_t token_budget,
                            const TokenCounter& counter) {
  if (token_budget == 0) throw Error(ErrorCode::InvalidArgument, "token budget must be positive");
  ClaimQuery q;
  q.token_budget = token_budget;
  for (const auto& e : raw_elements) {
    std::string t = text::normalize_whitespace(e.text);
    if (!t.empty()) q.elements.push_back({std::move(t), e.depth});
  }
  if (q.elements.empty()) throw Error(ErrorCode::EmptyClaim, "claim has no text");
  q.claim_text = join_elements(q.elements);

  if (counter.count(q.claim_text) <= token_budget) {
    q.query_text = q.claim_text;
    return q;
  }
  q.truncated = true;
  // Grow the suffix from the last element while it fits.
  std::size_t first = q.elements.size();
  std::string suffix;
  while (first > 0) {
    std::string candidate = q.elements[first - 1].text;
    if (!suffix.empty()) candidate += " " + suffix;
    if (counter.count(candidate) > token_budget) break;
    suffix = std::move(candidate);
    --first;
  }
  if (first == q.elements.size()) {
    const std::string& last = q.elements.back().text;
    auto spans = counter.tokenize(last);
    std::size_t begin = spans[spans.size() - token_budget].begin;
    q.query_text = last.substr(begin);
    q.first_kept_element = q.elements.size() - 1;
  } else {
    q.query_text = std::move(suffix);
    q.first_kept_element = first;
  }
  return q;
}

ClaimQuery make_claim_query(const Claim& claim, std::size_t token_budget, const TokenCounter& counter) {
  return make_claim_query(flatten_claim_elements(claim), token_budget, counter);
}

MaxChunkScore max_chunk_claim_score(const EmbeddingVector& query, const std::vector<EmbeddingVector>& chunks) {
  if (chunks.empty()) throw Error(ErrorCode::NoChunks, "document has no chunks");
  MaxChunkScore best{cosine(query, chunks[0]), 0};
  for (std::size_t i = 1; i < chunks.size(); ++i) {
    double s = cosine(query, chunks[i]);
    if (s > best.score) best = {s, i};
  }
  return best;
}

std::string_view to_string(WeightingScheme s) noexcept {
  switch (s) {
    case WeightingScheme::TokenProportional: return "token_proportional";
    case WeightingScheme::Uniform: return "uniform";
    case WeightingScheme::Custom: return "custom";
  }
  return "token_proportional";
}

std::optional<WeightingScheme> parse_weighting_scheme(std::string_view s) {
  if (s == "token_proportional") return WeightingScheme::TokenProportional;
  if (s == "uniform") return WeightingScheme::Uniform;
  if (s == "custom") return WeightingScheme::Custom;
  return std::nullopt;
}

std::vector<double> ElementWeighting::materialize(const std::vector<ClaimElement>& elements,
                                                  const TokenCounter& counter) const {
  const std::size_t n = elements.size();
  if (n == 0) throw Error(ErrorCode::NoElements, "no claim elements to weigh");
  std::vector<double> w(n, 1.0);
  if (scheme == WeightingScheme::TokenProportional) {
    for (std::size_t i = 0; i < n; ++i) w[i] = static_cast<double>(counter.count(elements[i].text));
  } else if (scheme == WeightingScheme::Custom) {
    if (custom_weights.size() != n) {
      throw Error(ErrorCode::WeightMisalignment, std::to_string(custom_weights.size()) + " custom weights for " +
                                                     std::to_string(n) + " elements");
    }
    for (double x : custom_weights) {
      if (!(x >= 0.0) || !std::isfinite(x)) throw Error(ErrorCode::WeightMisalignment, "custom weights must be >= 0");
    }
    w = custom_weights;
  }
  double total = std::accumulate(w.begin(), w.end(), 0.0);
  if (total <= 0.0) {
    if (scheme == WeightingScheme::Custom) throw Error(ErrorCode::WeightMisalignment, "custom weights sum to zero");
    std::fill(w.begin(), w.end(), 1.0);
    total = static_cast<double>(n);
  }
  for (double& x : w) x /= total;
  return w;
}

WeightedScore weighted_paragraph_element_score(const std::vector<EmbeddingVector>& element_vecs,
                                               const std::vector<EmbeddingVector>& paragraph_vecs,
                                               const std::vector<double>& weights,
                                               const std::vector<double>& paragraph_salience) {
  if (element_vecs.empty()) throw Error(ErrorCode::NoElements, "no claim elements");
  if (paragraph_vecs.empty()) throw Error(ErrorCode::NoParagraphs, "document has no paragraphs");
  if (weights.size() != element_vecs.size()) {
    throw Error(ErrorCode::WeightMisalignment, std::to_string(weights.size()) + " weights for " +
                                                   std::to_string(element_vecs.size()) + " elements");
  }
  if (!paragraph_salience.empty() && paragraph_salience.size() != paragraph_vecs.size()) {
    throw Error(ErrorCode::WeightMisalignment, "paragraph salience does not match paragraph count");
  }
  double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-9) throw Error(ErrorCode::WeightMisalignment, "weights must sum to 1");

  WeightedScore out;
  out.weights = weights;
  for (std::size_t e = 0; e < element_vecs.size(); ++e) {
    ElementMatch best{0, -2.0};
    for (std::size_t p = 0; p < paragraph_vecs.size(); ++p) {
      double s = cosine(element_vecs[e], paragraph_vecs[p]);
      if (!paragraph_salience.empty()) s *= paragraph_salience[p];
      if (s > best.similarity) best = {p, s};
    }
    out.per_element_best.push_back(best);
    out.score += weights[e] * best.similarity;
  }
  return out;
}

WeightedScore weighted_paragraph_element_score(const std::vector<ClaimElement>& elements,
                                               const std::vector<EmbeddingVector>& element_vecs,
                                               const std::vector<EmbeddingVector>& paragraph_vecs,
                                               const ElementWeighting& weighting, const TokenCounter& counter) {
  if (elements.empty()) throw Error(ErrorCode::NoElements, "no claim elements");
  if (element_vecs.size() != elements.size()) {
    throw Error(ErrorCode::WeightMisalignment, "element vectors do not match elements");
  }
  return weighted_paragraph_element_score(element_vecs, paragraph_vecs, weighting.materialize(elements, counter),
                                          weighting.paragraph_salience);
}

void sort_documents(std::vector<ScoredDocument>& docs) {
  std::sort(docs.begin(), docs.end(), [](const ScoredDocument& a, const ScoredDocument& b) {
    double sa = a.effective_score(), sb = b.effective_score();
    if (sa != sb) return sa > sb;
    return a.doc_id < b.doc_id;
  });
}

Json score_report_row(const std::string& query_id, const ScoredDocument& doc, bool weighted) {
  Json row{{"query_id", query_id},
           {"doc_id", doc.doc_id},
           {"method", weighted ? "weighted_element" : "max_chunk"},
           {"score", weighted ? doc.rerank_score.value_or(doc.score) : doc.score}};
  if (weighted) {
    Json per = Json::array();
    for (const auto& m : doc.per_element_best) {
      per.push_back({{"element_index", m.element_index},
                     {"section", to_string(m.section)},
                     {"paragraph_number", m.paragraph_number},
                     {"similarity", m.similarity}});
    }
    row["per_element_best"] = std::move(per);
  } else if (doc.best_chunk) {
    Json chunk = to_json(*doc.best_chunk);
    chunk["similarity"] = doc.best_chunk_similarity;
    row["best_chunk"] = std::move(chunk);
  }
  return row;
}

}  // namespace claimsearch
