#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "common/error.hpp"
#include "scoring/scoring.hpp"
#include "support.hpp"

using namespace claimsearch;
using claimsearch::testing::brute_cosine;
using claimsearch::testing::random_vec;
using claimsearch::testing::words;

namespace {

ReferenceTokenCounter counter;

EmbeddingVector ev(std::vector<double> v) { return EmbeddingVector{std::move(v)}; }

std::vector<EmbeddingVector> random_set(SplitMix64& rng, std::size_t n, std::size_t dim) {
  std::vector<EmbeddingVector> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(ev(random_vec(rng, dim)));
  return out;
}

}  // namespace

TEST(Cosine, Basics) {
  EXPECT_NEAR(cosine(ev({3, 4}), ev({3, 4})), 1.0, 1e-15);
  EXPECT_EQ(cosine(ev({1, 0}), ev({0, 1})), 0.0);
  EXPECT_EQ(cosine(ev({1, 2}), ev({0, 0})), 0.0);
  EXPECT_THROW(cosine(ev({1, 2}), ev({1, 2, 3})), Error);
  SplitMix64 rng(1);
  for (int i = 0; i < 100; ++i) {
    auto a = random_vec(rng, 17), b = random_vec(rng, 17);
    EXPECT_NEAR(cosine(a, b), brute_cosine(a, b), 1e-12);
  }
}

TEST(ClaimQuery, SuffixOfWholeElements) {
  std::vector<ClaimElement> es{{words("a", 0, 300), 0}, {words("b", 0, 300), 1}, {words("c", 0, 300), 1}};
  auto q = make_claim_query(es, 512, counter);
  EXPECT_TRUE(q.truncated);
  EXPECT_EQ(q.query_text, es[2].text);
  EXPECT_EQ(q.first_kept_element, 2u);
}

TEST(ClaimQuery, FitsWhole) {
  std::vector<ClaimElement> es{{words("a", 0, 100), 0}, {words("b", 0, 150), 1}, {words("c", 0, 150), 1}};
  auto q = make_claim_query(es, 512, counter);
  EXPECT_FALSE(q.truncated);
  EXPECT_EQ(q.query_text, es[0].text + " " + es[1].text + " " + es[2].text);
  EXPECT_EQ(q.query_text, q.claim_text);
}

TEST(ClaimQuery, LongSingleElementKeepsLastTokens) {
  std::vector<ClaimElement> es{{words("w", 0, 700), 0}};
  auto q = make_claim_query(es, 512, counter);
  EXPECT_TRUE(q.truncated);
  EXPECT_EQ(q.query_text, words("w", 188, 512));
  EXPECT_EQ(counter.count(q.query_text), 512u);
}

TEST(ClaimQuery, BudgetInvariant) {
  SplitMix64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<ClaimElement> es;
    std::size_t n = 1 + rng.uniform(8);
    for (std::size_t i = 0; i < n; ++i) es.push_back({words("e" + std::to_string(i), 0, 1 + rng.uniform(200)), 1});
    std::size_t budget = 16 + rng.uniform(500);
    auto q = make_claim_query(es, budget, counter);
    EXPECT_LE(counter.count(q.query_text), budget);
    if (q.truncated) {
      EXPECT_EQ(q.claim_text.compare(q.claim_text.size() - q.query_text.size(), q.query_text.size(), q.query_text), 0);
    }
  }
}

TEST(ClaimQuery, EmptyClaim) {
  try {
    make_claim_query(std::vector<ClaimElement>{{"   ", 0}}, 512, counter);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyClaim);
  }
}

TEST(MaxChunk, Examples) {
  // Unit vectors at known cosines to q = e0.
  auto at = [](double c) { return ev({c, std::sqrt(1 - c * c)}); };
  auto r = max_chunk_claim_score(ev({1, 0}), {at(0.2), at(0.9), at(0.5)});
  EXPECT_NEAR(r.score, 0.9, 1e-12);
  EXPECT_EQ(r.argmax, 1u);
  auto single = max_chunk_claim_score(ev({1, 0}), {at(0.3)});
  EXPECT_NEAR(single.score, 0.3, 1e-12);
  EXPECT_EQ(single.argmax, 0u);
  auto tie = max_chunk_claim_score(ev({1, 0}), {at(0.4), at(0.7), at(0.7)});
  EXPECT_EQ(tie.argmax, 1u);
  EXPECT_THROW(max_chunk_claim_score(ev({1, 0}), {}), Error);
}

TEST(MaxChunk, PlantedChunk) {
  ReferenceEmbedder e(256);
  std::string query = "inflatable pocket belt sensor trigger";
  std::vector<EmbeddingVector> chunks{e.embed_text("gear wheel axle"), e.embed_text("coffee grinder burr"),
                                      e.embed_text("trigger sensor belt pocket inflatable"),
                                      e.embed_text("window hinge friction")};
  auto r = max_chunk_claim_score(e.embed_text(query), chunks);
  EXPECT_EQ(r.argmax, 2u);
  EXPECT_NEAR(r.score, 1.0, 1e-12);
}

TEST(MaxChunk, EqualsBruteForceAndIsMonotone) {
  SplitMix64 rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    auto q = ev(random_vec(rng, 12));
    auto chunks = random_set(rng, 1 + rng.uniform(30), 12);
    double brute = -2;
    for (const auto& c : chunks) brute = std::max(brute, brute_cosine(q.values, c.values));
    auto r = max_chunk_claim_score(q, chunks);
    EXPECT_NEAR(r.score, brute, 1e-9);
    chunks.push_back(ev(random_vec(rng, 12)));
    EXPECT_GE(max_chunk_claim_score(q, chunks).score, r.score);
  }
}

TEST(Weighted, HandArithmetic) {
  std::vector<ClaimElement> es{{words("a", 0, 10), 0}, {words("b", 0, 30), 1}};
  ElementWeighting w;
  auto weights = w.materialize(es, counter);
  EXPECT_NEAR(weights[0], 0.25, 1e-12);
  EXPECT_NEAR(weights[1], 0.75, 1e-12);
  std::vector<EmbeddingVector> elems{ev({1, 0, 0}), ev({0, 1, 0})};
  std::vector<EmbeddingVector> paras{ev({0.5, std::sqrt(0.75), 0}), ev({0, 0.9, std::sqrt(1 - 0.81)})};
  auto r = weighted_paragraph_element_score(es, elems, paras, w, counter);
  EXPECT_NEAR(r.score, 0.8, 1e-9);
  ASSERT_EQ(r.per_element_best.size(), 2u);
  EXPECT_EQ(r.per_element_best[0].paragraph_index, 0u);
  EXPECT_NEAR(r.per_element_best[0].similarity, 0.5, 1e-12);
  EXPECT_EQ(r.per_element_best[1].paragraph_index, 1u);
  EXPECT_NEAR(r.per_element_best[1].similarity, 0.9, 1e-12);
}

TEST(Weighted, SingleElementEqualsMaxOverParagraphs) {
  SplitMix64 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    auto el = random_set(rng, 1, 9);
    auto paras = random_set(rng, 1 + rng.uniform(10), 9);
    auto w = weighted_paragraph_element_score(el, paras, {1.0});
    EXPECT_NEAR(w.score, max_chunk_claim_score(el[0], paras).score, 1e-12);
  }
}

TEST(Weighted, UniformEqualScores) {
  std::vector<EmbeddingVector> elems{ev({1, 0}), ev({1, 0}), ev({1, 0})};
  std::vector<EmbeddingVector> paras{ev({0.6, 0.8})};
  auto r = weighted_paragraph_element_score(elems, paras, {1.0 / 3, 1.0 / 3, 1.0 / 3});
  EXPECT_NEAR(r.score, 0.6, 1e-12);
}

TEST(Weighted, PermutationInvarianceAndBounds) {
  SplitMix64 rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t ne = 1 + rng.uniform(6), np = 1 + rng.uniform(12);
    auto elems = random_set(rng, ne, 10);
    auto paras = random_set(rng, np, 10);
    std::vector<double> weights(ne);
    double total = 0;
    for (auto& w : weights) total += (w = rng.unit() + 0.01);
    for (auto& w : weights) w /= total;
    auto base = weighted_paragraph_element_score(elems, paras, weights);
    EXPECT_GE(base.score, -1.0);
    EXPECT_LE(base.score, 1.0);

    auto shuffled = paras;
    seeded_shuffle(shuffled, rng);
    EXPECT_NEAR(weighted_paragraph_element_score(elems, shuffled, weights).score, base.score, 1e-9);

    double lo = 2, hi = -2;
    for (const auto& m : base.per_element_best) {
      lo = std::min(lo, m.similarity);
      hi = std::max(hi, m.similarity);
    }
    EXPECT_GE(base.score, lo - 1e-12);
    EXPECT_LE(base.score, hi + 1e-12);
  }
}

TEST(Weighted, Errors) {
  std::vector<EmbeddingVector> one{ev({1, 0})};
  auto code = [](auto fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvalidArgument;
  };
  EXPECT_EQ(code([&] { weighted_paragraph_element_score({}, one, {}); }), ErrorCode::NoElements);
  EXPECT_EQ(code([&] { weighted_paragraph_element_score(one, {}, {1.0}); }), ErrorCode::NoParagraphs);
  EXPECT_EQ(code([&] { weighted_paragraph_element_score(one, one, {0.5}); }), ErrorCode::WeightMisalignment);
  EXPECT_EQ(code([&] { weighted_paragraph_element_score(one, one, {0.5, 0.5}); }), ErrorCode::WeightMisalignment);

  ElementWeighting custom{WeightingScheme::Custom, {1.0}, {}};
  std::vector<ClaimElement> two{{"a", 0}, {"b", 0}};
  EXPECT_EQ(code([&] { custom.materialize(two, counter); }), ErrorCode::WeightMisalignment);
  custom.custom_weights = {1.0, 3.0};
  auto w = custom.materialize(two, counter);
  EXPECT_NEAR(w[0], 0.25, 1e-12);
  EXPECT_NEAR(w[1], 0.75, 1e-12);
}

TEST(Weighted, ParagraphSalienceScalesSimilarities) {
  std::vector<EmbeddingVector> elems{ev({1, 0})};
  std::vector<EmbeddingVector> paras{ev({1, 0}), ev({0.8, 0.6})};
  auto r = weighted_paragraph_element_score(elems, paras, {1.0}, {0.5, 1.0});
  EXPECT_NEAR(r.score, 0.8, 1e-12);
  EXPECT_EQ(r.per_element_best[0].paragraph_index, 1u);
}

TEST(SortDocuments, ScoreThenDocId) {
  std::vector<ScoredDocument> docs{{"EP3", 0.5}, {"EP1", 0.7}, {"EP2", 0.5}, {"EP0", 0.1}};
  docs[3].rerank_score = 0.9;
  sort_documents(docs);
  std::vector<std::string> ids;
  for (const auto& d : docs) ids.push_back(d.doc_id);
  EXPECT_EQ(ids, (std::vector<std::string>{"EP0", "EP1", "EP2", "EP3"}));
}

TEST(ScoreReport, RowShape) {
  ScoredDocument d{"EP1", 0.7};
  d.best_chunk = ChunkRef{"EP1", SectionName::Description, {3, 4}, 0};
  auto row = score_report_row("q1", d, false);
  EXPECT_EQ(row.at("method"), "max_chunk");
  EXPECT_EQ(row.at("best_chunk").at("paragraph_numbers"), Json::parse("[3,4]"));
  d.rerank_score = 0.4;
  d.per_element_best = {{0, SectionName::Summary, 2, 0.4}};
  auto w = score_report_row("q1", d, true);
  EXPECT_EQ(w.at("method"), "weighted_element");
  EXPECT_DOUBLE_EQ(w.at("score").get<double>(), 0.4);
  EXPECT_TRUE(w.contains("per_element_best"));
}
