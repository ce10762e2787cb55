#include <gtest/gtest.h>

#include <set>

#include "common/error.hpp"
#include "eval/harness.hpp"
#include "support.hpp"

using namespace claimsearch;
using claimsearch::testing::data_path;
using claimsearch::testing::words;

namespace {

PatentDocument doc(const std::string& id, const std::string& body, const std::string& claim = {}) {
  PatentDocument d;
  d.doc_id = id;
  d.sections.push_back({SectionName::Description, {{1, body}, {2, body + " again"}}});
  if (!claim.empty()) {
    Claim c;
    c.number = 1;
    c.elements = {{claim, 0}};
    c.full_text = claim;
    d.claims.push_back(c);
  }
  return d;
}

CitationRecord cite(const std::string& subject, Category cat, const std::string& cited) {
  CitationRecord c;
  c.subject_doc_id = subject;
  c.category = cat;
  c.cited_doc_id = cited;
  c.passages = {PassageRef::paragraphs(1, 2)};
  return c;
}

SplitResult all_in(Bucket b, std::vector<std::string> ids) {
  SplitResult s;
  for (auto& id : ids) s.assignments.push_back({id, b});
  return s;
}

Corpus small_corpus() {
  Corpus c;
  c.add(doc("S1", "subject text", "a claimed widget"));
  c.add(doc("P1", "first x document"));
  c.add(doc("P2", "second x document"));
  c.add(doc("Q1", "an a document"));
  c.add(doc("R1", "unrelated one"));
  c.add(doc("R2", "unrelated two"));
  return c;
}

std::vector<CitationRecord> small_citations() {
  return {cite("S1", Category::X, "P1"), cite("S1", Category::X, "P2"), cite("S1", Category::A, "Q1")};
}

class FnScorer : public DocumentScorer {
 public:
  explicit FnScorer(std::function<double(const EvalRecord&, const EvalSide&)> fn) : fn_(std::move(fn)) {}
  std::string name() const override { return "fn"; }
  double score(const EvalRecord& r, const EvalSide& s) const override { return fn_(r, s); }

 private:
  std::function<double(const EvalRecord&, const EvalSide&)> fn_;
};

std::vector<EvalRecord> synthetic_records(std::size_t n, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<EvalRecord> out;
  for (std::size_t i = 0; i < n; ++i) {
    EvalRecord r;
    r.record_id = "r" + std::to_string(i);
    r.query_doc_id = "S" + std::to_string(i);
    r.query_claim_text = "claim";
    r.x_side = {"X" + std::to_string(i), {std::to_string(rng.unit())}, {}};
    r.negative_side = {"N" + std::to_string(i), {std::to_string(rng.unit())}, {}};
    out.push_back(r);
  }
  return out;
}

}  // namespace

TEST(EvalRecords, TwoXOneAGivesTwoRecords) {
  Corpus corpus = small_corpus();
  auto build = build_eval_records(small_citations(), corpus, all_in(Bucket::Test, {"S1"}), {});
  std::set<std::pair<std::string, std::string>> pairs;
  for (const auto& r : build.records) {
    pairs.emplace(r.x_side.doc_id, r.negative_side.doc_id);
    EXPECT_EQ(r.negative_kind, NegativeKind::ACitation);
    EXPECT_EQ(r.query_claim_text, "a claimed widget");
    EXPECT_FALSE(r.x_side.chunks.empty());
  }
  EXPECT_EQ(pairs, (std::set<std::pair<std::string, std::string>>{{"P1", "Q1"}, {"P2", "Q1"}}));
}

TEST(EvalRecords, TrainSubjectsExcluded) {
  Corpus corpus = small_corpus();
  auto build = build_eval_records(small_citations(), corpus, all_in(Bucket::Train, {"S1"}), {});
  EXPECT_TRUE(build.records.empty());
  EXPECT_EQ(build.subjects_outside_bucket, 1u);
}

TEST(EvalRecords, RandomVariantIsSeededAndUncited) {
  Corpus corpus = small_corpus();
  EvalBuildOptions opt;
  opt.negative = NegativeKind::RandomDoc;
  opt.seed = 3;
  auto a = build_eval_records(small_citations(), corpus, all_in(Bucket::Test, {"S1"}), opt);
  auto b = build_eval_records(small_citations(), corpus, all_in(Bucket::Test, {"S1"}), opt);
  ASSERT_EQ(a.records.size(), 2u);
  EXPECT_EQ(eval_records_to_jsonl(a.records), eval_records_to_jsonl(b.records));
  for (const auto& r : a.records) {
    EXPECT_TRUE(r.negative_side.doc_id == "R1" || r.negative_side.doc_id == "R2") << r.negative_side.doc_id;
    EXPECT_EQ(r.negative_kind, NegativeKind::RandomDoc);
  }
}

TEST(EvalRecords, FixtureCorpus) {
  IngestResult in = ingest_paths({data_path("corpus")}, std::nullopt);
  Corpus corpus;
  for (auto& d : in.documents) corpus.add(std::move(d));
  auto citations = load_citations(data_path("citations.csv"));
  auto split = all_in(Bucket::Test, {"EP1000001A1", "EP1000002A1", "US20200000003A1"});
  auto build = build_eval_records(citations, corpus, split, {});
  std::set<std::string> ids;
  for (const auto& r : build.records) {
    ids.insert(r.record_id);
    EXPECT_NE(r.x_side.doc_id, r.negative_side.doc_id);
  }
  EXPECT_EQ(ids, (std::set<std::string>{"EP1000001A1:xa:EP2000001A1:EP2000002A1",
                                        "EP1000002A1:xa:EP2000003A1:EP2000005A1",
                                        "US20200000003A1:xa:US20150000006A1:EP2000007A1"}));
  EXPECT_EQ(build.citations_unresolved, 2u);
}

TEST(EvalRecords, JsonRoundTripAndValidation) {
  Corpus corpus = small_corpus();
  auto build = build_eval_records(small_citations(), corpus, all_in(Bucket::Test, {"S1"}), {});
  for (const auto& r : build.records) {
    EvalRecord back = eval_record_from_json(to_json(r));
    EXPECT_EQ(to_json(back).dump(), to_json(r).dump());
  }
  Json bad = to_json(build.records[0]);
  bad["negative_side"] = bad["x_side"];
  EXPECT_THROW(eval_record_from_json(bad), Error);
}

TEST(PairwiseAccuracy, OracleAndConstantScorers) {
  auto records = synthetic_records(40, 1);
  FnScorer oracle([](const EvalRecord& r, const EvalSide& s) { return s.doc_id == r.x_side.doc_id ? 1.0 : 0.0; });
  auto perfect = pairwise_accuracy(records, oracle, NegativeKind::ACitation);
  EXPECT_EQ(perfect.accuracy, 1.0);
  EXPECT_EQ(perfect.wins, 40u);

  FnScorer constant([](const EvalRecord&, const EvalSide&) { return 0.3; });
  auto half = pairwise_accuracy(records, constant, NegativeKind::ACitation);
  EXPECT_EQ(half.accuracy, 0.5);
  EXPECT_EQ(half.ties, 40u);
  EXPECT_EQ(half.n_records, 40u);
}

TEST(PairwiseAccuracy, SignFlipAndScaling) {
  auto records = synthetic_records(101, 2);
  auto value = [](const EvalSide& s) { return std::stod(s.chunks.at(0)); };
  FnScorer base([&](const EvalRecord&, const EvalSide& s) { return value(s); });
  FnScorer flipped([&](const EvalRecord&, const EvalSide& s) { return -value(s); });
  FnScorer scaled([&](const EvalRecord&, const EvalSide& s) { return 7.5 * value(s); });
  auto a = pairwise_accuracy(records, base, NegativeKind::ACitation);
  auto b = pairwise_accuracy(records, flipped, NegativeKind::ACitation);
  auto c = pairwise_accuracy(records, scaled, NegativeKind::ACitation, 4);
  EXPECT_EQ(a.ties, 0u);
  EXPECT_NEAR(a.accuracy + b.accuracy, 1.0, 1e-12);
  EXPECT_EQ(a.wins, c.wins);
  EXPECT_EQ(a.losses, c.losses);
  EXPECT_EQ(a.to_json().dump(), pairwise_accuracy(records, base, NegativeKind::ACitation, 3).to_json().dump());
}

TEST(PairwiseAccuracy, ScorerFailureNamesRecord) {
  auto records = synthetic_records(5, 3);
  FnScorer failing([](const EvalRecord& r, const EvalSide&) {
    if (r.record_id == "r3") throw std::runtime_error("boom");
    return 0.0;
  });
  try {
    pairwise_accuracy(records, failing, NegativeKind::ACitation);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ScorerFailure);
    EXPECT_NE(std::string(e.what()).find("r3"), std::string::npos);
  }
  FnScorer nan_scorer([](const EvalRecord&, const EvalSide&) { return std::nan(""); });
  EXPECT_THROW(pairwise_accuracy(records, nan_scorer, NegativeKind::ACitation), Error);
}

TEST(PairwiseAccuracy, PlantedRecordsWithEmbeddingScorers) {
  ReferenceEmbedder embedder(256);
  auto counter = make_token_counter("reference");
  std::vector<EvalRecord> records;
  for (int i = 0; i < 30; ++i) {
    EvalRecord r;
    r.record_id = "p" + std::to_string(i);
    r.query_doc_id = "S" + std::to_string(i);
    std::string claim = words("c" + std::to_string(i) + "x", 0, 12);
    r.query_claim_text = claim;
    r.query_elements = {{words("c" + std::to_string(i) + "x", 0, 6), 0}, {words("c" + std::to_string(i) + "x", 6, 6), 1}};
    r.x_side = {"X", {claim + " filler", words("n", 0, 8)}, {words("c" + std::to_string(i) + "x", 0, 6), words("c" + std::to_string(i) + "x", 6, 6)}};
    r.negative_side = {"N", {words("m", 0, 12)}, {words("m", 0, 6), words("m", 6, 6)}};
    records.push_back(r);
  }
  MaxChunkScorer max_chunk(embedder, 512, counter);
  WeightedElementScorer weighted(embedder, ElementWeighting{}, counter);
  EXPECT_EQ(pairwise_accuracy(records, max_chunk, NegativeKind::ACitation).accuracy, 1.0);
  EXPECT_EQ(pairwise_accuracy(records, weighted, NegativeKind::ACitation).accuracy, 1.0);
}

TEST(ReportTable, ReferenceRowsAndMeasured) {
  EvalReport r;
  r.method = "max_chunk";
  r.negative_kind = NegativeKind::ACitation;
  r.n_records = 4;
  r.wins = 3;
  r.accuracy = 0.75;
  std::string table = render_report_table({r}, "reference/v1/256");
  for (const char* s : {"Accuracy by negative example type", "Max Chunk-Claim CCX", "63.05%", "99.61%",
                        "Weighted Paragraph-Element CCX", "60.46%", "PatentMatch 2021", "SearchFormer 2023", "98.04%",
                        "IP Rally 2021", "75.00%", "not reproducible"}) {
    EXPECT_NE(table.find(s), std::string::npos) << s;
  }
}
