#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "citations/citation.hpp"
#include "common/tokenizer.hpp"
#include "corpus/corpus.hpp"
#include "dataset/chunker.hpp"
#include "dataset/pairs.hpp"
#include "embed/embedder.hpp"
#include "scoring/scoring.hpp"

namespace claimsearch {

enum class NegativeKind { ACitation, RandomDoc };

std::string_view to_string(NegativeKind k) noexcept;
std::optional<NegativeKind> parse_negative_kind(std::string_view s);

// Text of one document as seen by a scorer.
struct EvalSide {
  std::string doc_id;
  std::vector<std::string> chunks;
  std::vector<std::string> paragraphs;
};

struct EvalRecord {
  std::string record_id;
  std::string query_doc_id;
  std::string query_claim_text;
  std::vector<ClaimElement> query_elements;
  EvalSide x_side;
  EvalSide negative_side;
  NegativeKind negative_kind = NegativeKind::ACitation;
};

Json to_json(const EvalRecord& r);
EvalRecord eval_record_from_json(const Json& j);
std::vector<EvalRecord> load_eval_records(const std::string& path);
std::string eval_records_to_jsonl(const std::vector<EvalRecord>& records);

struct EvalBuildOptions {
  ChunkerConfig chunker;
  NegativeKind negative = NegativeKind::ACitation;
  std::uint64_t seed = 0;
};

struct EvalBuild {
  std::vector<EvalRecord> records;
  std::size_t subjects_outside_bucket = 0;
  std::size_t subjects_missing_claim = 0;
  std::size_t citations_unresolved = 0;
  std::size_t pairs_without_random_candidate = 0;

  Json summary() const;
};

// One record per distinct (X document, A document) pair cited against a
// subject's claim 1, for subjects in `bucket` only. The RandomDoc variant
// replaces the A side with a corpus document not cited for that claim,
// drawn with a generator seeded by (seed, record key).
EvalBuild build_eval_records(const std::vector<CitationRecord>& citations, const Corpus& corpus,
                             const SplitResult& split, const EvalBuildOptions& options,
                             Bucket bucket = Bucket::Test);

class DocumentScorer {
 public:
  virtual ~DocumentScorer() = default;
  virtual std::string name() const = 0;
  virtual double score(const EvalRecord& record, const EvalSide& side) const = 0;
};

// Claim embedding (token-budgeted) against each chunk; best chunk wins.
class MaxChunkScorer final : public DocumentScorer {
 public:
  MaxChunkScorer(const Embedder& embedder, std::size_t token_budget, std::shared_ptr<const TokenCounter> counter);

  std::string name() const override { return "max_chunk"; }
  double score(const EvalRecord& record, const EvalSide& side) const override;

 private:
  const Embedder& embedder_;
  std::size_t token_budget_;
  std::shared_ptr<const TokenCounter> counter_;
};

// Weighted sum over claim elements of each element's best paragraph.
class WeightedElementScorer final : public DocumentScorer {
 public:
  WeightedElementScorer(const Embedder& embedder, ElementWeighting weighting,
                        std::shared_ptr<const TokenCounter> counter);

  std::string name() const override { return "weighted_element"; }
  double score(const EvalRecord& record, const EvalSide& side) const override;

 private:
  const Embedder& embedder_;
  ElementWeighting weighting_;
  std::shared_ptr<const TokenCounter> counter_;
};

struct RecordMargin {
  std::string record_id;
  double x_score = 0.0;
  double negative_score = 0.0;
  double margin = 0.0;
};

struct EvalReport {
  std::string method;
  NegativeKind negative_kind = NegativeKind::ACitation;
  std::size_t n_records = 0;
  std::size_t wins = 0;
  std::size_t losses = 0;
  std::size_t ties = 0;
  // (wins + ties / 2) / n_records; 0 when there are no records.
  double accuracy = 0.0;
  std::vector<RecordMargin> margins;

  Json to_json() const;
};

// Scores both sides of every record. Ties are half-wins. Throws
// Error(ScorerFailure) naming the record when the scorer throws or returns
// a non-finite value.
EvalReport pairwise_accuracy(const std::vector<EvalRecord>& records, const DocumentScorer& scorer,
                             NegativeKind negative_kind, std::size_t threads = 1);

// Fixed-width table with published reference rows and the measured rows.
std::string render_report_table(const std::vector<EvalReport>& measured, const std::string& model_label);

}  // namespace claimsearch
