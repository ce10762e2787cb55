#include "eval/harness.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "common/error.hpp"
#include "common/jsonl.hpp"
#include "common/parallel.hpp"
#include "common/rng.hpp"

namespace claimsearch {
namespace {

Json side_to_json(const EvalSide& s) {
  return Json{{"doc_id", s.doc_id}, {"chunks", s.chunks}, {"paragraphs", s.paragraphs}};
}

EvalSide side_from_json(const Json& j) {
  EvalSide s;
  s.doc_id = j.at("doc_id").get<std::string>();
  s.chunks = j.value("chunks", std::vector<std::string>{});
  s.paragraphs = j.value("paragraphs", std::vector<std::string>{});
  if (s.chunks.empty() && s.paragraphs.empty()) {
    throw Error(ErrorCode::InvalidArgument, "eval side " + s.doc_id + " has no text");
  }
  if (s.chunks.empty()) s.chunks = s.paragraphs;
  if (s.paragraphs.empty()) s.paragraphs = s.chunks;
  return s;
}

struct CitedDoc {
  const PatentDocument* doc = nullptr;
  std::vector<ResolvedPassage> passages;
};

// Passages from every citation of one document, deduplicated, document order.
EvalSide make_cited_side(const CitedDoc& cited, const ChunkerConfig& chunker, const TokenCounter& counter) {
  std::vector<ResolvedPassage> passages;
  std::set<std::pair<int, int>> seen;
  for (const auto& p : cited.passages) {
    if (seen.emplace(static_cast<int>(p.section), p.number).second) passages.push_back(p);
  }
  EvalSide side;
  side.doc_id = cited.doc->doc_id;
  for (const auto& p : passages) side.paragraphs.push_back(p.text);
  for (auto& c : chunk_passages(side.doc_id, passages, chunker, counter)) side.chunks.push_back(std::move(c.text));
  return side;
}

EvalSide make_whole_side(const PatentDocument& doc, const ChunkerConfig& chunker, const TokenCounter& counter) {
  EvalSide side;
  side.doc_id = doc.doc_id;
  for (const auto& [section, p] : doc.all_paragraphs()) side.paragraphs.push_back(p->text);
  for (auto& c : chunk_document(doc, chunker, counter)) side.chunks.push_back(std::move(c.text));
  return side;
}

std::vector<ClaimElement> elements_of(const EvalRecord& r) {
  if (!r.query_elements.empty()) return r.query_elements;
  return {ClaimElement{r.query_claim_text, 0}};
}

std::string percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f%%", v * 100.0);
  return buf;
}

}  // namespace

std::string_view to_string(NegativeKind k) noexcept { return k == NegativeKind::ACitation ? "a" : "random"; }

std::optional<NegativeKind> parse_negative_kind(std::string_view s) {
  if (s == "a" || s == "A") return NegativeKind::ACitation;
  if (s == "random") return NegativeKind::RandomDoc;
  return std::nullopt;
}

Json to_json(const EvalRecord& r) {
  Json elements = Json::array();
  for (const auto& e : r.query_elements) elements.push_back({{"text", e.text}, {"depth", e.depth}});
  return Json{{"record_id", r.record_id},
              {"query_doc_id", r.query_doc_id},
              {"query_claim_text", r.query_claim_text},
              {"query_elements", std::move(elements)},
              {"negative_kind", to_string(r.negative_kind)},
              {"x_side", side_to_json(r.x_side)},
              {"negative_side", side_to_json(r.negative_side)}};
}

EvalRecord eval_record_from_json(const Json& j) {
  EvalRecord r;
  try {
    r.record_id = j.at("record_id").get<std::string>();
    r.query_doc_id = j.value("query_doc_id", "");
    r.query_claim_text = j.at("query_claim_text").get<std::string>();
    if (j.contains("query_elements")) {
      for (const auto& e : j.at("query_elements")) r.query_elements.push_back({e.at("text"), e.value("depth", 0)});
    }
    auto kind = parse_negative_kind(j.value("negative_kind", "a"));
    if (!kind) throw Error(ErrorCode::InvalidArgument, "negative_kind must be a or random");
    r.negative_kind = *kind;
    r.x_side = side_from_json(j.at("x_side"));
    r.negative_side = side_from_json(j.at("negative_side"));
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("bad eval record: ") + e.what());
  }
  if (r.x_side.doc_id == r.negative_side.doc_id) {
    throw Error(ErrorCode::InvalidArgument, "eval record " + r.record_id + " compares a document with itself");
  }
  return r;
}

std::vector<EvalRecord> load_eval_records(const std::string& path) {
  std::vector<EvalRecord> out;
  for_each_jsonl(path, [&](const Json& row) { out.push_back(eval_record_from_json(row)); });
  return out;
}

std::string eval_records_to_jsonl(const std::vector<EvalRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    out += to_json(r).dump();
    out += '\n';
  }
  return out;
}

Json EvalBuild::summary() const {
  return Json{{"records", records.size()},
              {"subjects_outside_bucket", subjects_outside_bucket},
              {"subjects_missing_claim", subjects_missing_claim},
              {"citations_unresolved", citations_unresolved},
              {"pairs_without_random_candidate", pairs_without_random_candidate}};
}

EvalBuild build_eval_records(const std::vector<CitationRecord>& citations, const Corpus& corpus,
                             const SplitResult& split, const EvalBuildOptions& options, Bucket bucket) {
  options.chunker.validate();
  auto counter = make_token_counter(options.chunker.token_counter);

  // subject -> cited doc id -> resolved passages, per category.
  struct Subject {
    std::map<std::string, CitedDoc> x;
    std::map<std::string, CitedDoc> a;
    std::set<std::string> cited;
  };
  std::map<std::string, Subject> subjects;
  EvalBuild out;
  std::set<std::string> outside;
  for (const auto& c : citations) {
    if (c.subject_claim_number != 1) continue;
    if (split.bucket_of(c.subject_doc_id) != bucket) {
      outside.insert(c.subject_doc_id);
      continue;
    }
    Subject& s = subjects[c.subject_doc_id];
    s.cited.insert(c.cited_doc_id);
    const PatentDocument* cited = corpus.find(c.cited_doc_id);
    if (cited == nullptr) {
      ++out.citations_unresolved;
      continue;
    }
    Resolution res;
    try {
      res = resolve_passages(c, *cited);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::EmptyResolution) throw;
      ++out.citations_unresolved;
      continue;
    }
    CitedDoc& slot = (c.category == Category::X ? s.x : s.a)[c.cited_doc_id];
    slot.doc = cited;
    for (auto& p : res.passages) slot.passages.push_back(std::move(p));
  }
  out.subjects_outside_bucket = outside.size();

  for (const auto& [subject_id, s] : subjects) {
    const PatentDocument* subject_doc = corpus.find(subject_id);
    const Claim* claim = subject_doc ? subject_doc->claim(1) : nullptr;
    if (claim == nullptr || claim->full_text.empty()) {
      ++out.subjects_missing_claim;
      continue;
    }
    auto elements = flatten_claim_elements(*claim);
    std::vector<std::string> candidates;
    if (options.negative == NegativeKind::RandomDoc) {
      for (const auto& [id, doc] : corpus.documents()) {
        if (id != subject_id && !s.cited.count(id) && !doc->all_paragraphs().empty()) candidates.push_back(id);
      }
    }
    for (const auto& [x_id, x_doc] : s.x) {
      EvalSide x_side = make_cited_side(x_doc, options.chunker, *counter);
      if (x_side.chunks.empty()) continue;
      for (const auto& [a_id, a_doc] : s.a) {
        if (a_id == x_id) continue;
        EvalRecord r;
        r.query_doc_id = subject_id;
        r.query_claim_text = claim->full_text;
        r.query_elements = elements;
        r.x_side = x_side;
        r.negative_kind = options.negative;
        if (options.negative == NegativeKind::ACitation) {
          r.negative_side = make_cited_side(a_doc, options.chunker, *counter);
          if (r.negative_side.chunks.empty()) continue;
          r.record_id = subject_id + ":xa:" + x_id + ":" + a_id;
        } else {
          if (candidates.empty()) {
            ++out.pairs_without_random_candidate;
            continue;
          }
          SplitMix64 rng(derive_seed(options.seed, subject_id + "|" + x_id + "|" + a_id));
          const std::string& pick = candidates[rng.uniform(candidates.size())];
          r.negative_side = make_whole_side(*corpus.find(pick), options.chunker, *counter);
          r.record_id = subject_id + ":xr:" + x_id + ":" + a_id + ":" + pick;
        }
        out.records.push_back(std::move(r));
      }
    }
  }
  return out;
}

MaxChunkScorer::MaxChunkScorer(const Embedder& embedder, std::size_t token_budget,
                               std::shared_ptr<const TokenCounter> counter)
    : embedder_(embedder), token_budget_(token_budget), counter_(std::move(counter)) {}

double MaxChunkScorer::score(const EvalRecord& record, const EvalSide& side) const {
  ClaimQuery q = make_claim_query(elements_of(record), token_budget_, *counter_);
  EmbeddingVector qv = embedder_.embed_text(q.query_text);
  return max_chunk_claim_score(qv, embedder_.embed_batch(side.chunks)).score;
}

WeightedElementScorer::WeightedElementScorer(const Embedder& embedder, ElementWeighting weighting,
                                             std::shared_ptr<const TokenCounter> counter)
    : embedder_(embedder), weighting_(std::move(weighting)), counter_(std::move(counter)) {}

double WeightedElementScorer::score(const EvalRecord& record, const EvalSide& side) const {
  auto elements = elements_of(record);
  std::vector<std::string> texts;
  for (const auto& e : elements) texts.push_back(e.text);
  return weighted_paragraph_element_score(elements, embedder_.embed_batch(texts), embedder_.embed_batch(side.paragraphs),
                                          weighting_, *counter_)
      .score;
}

Json EvalReport::to_json() const {
  Json m = Json::array();
  for (const auto& r : margins) {
    m.push_back({{"record_id", r.record_id},
                 {"x_score", r.x_score},
                 {"negative_score", r.negative_score},
                 {"margin", r.margin}});
  }
  return Json{{"method", method},         {"negative_kind", claimsearch::to_string(negative_kind)},
              {"n_records", n_records},   {"wins", wins},
              {"losses", losses},         {"ties", ties},
              {"accuracy", accuracy},     {"margins", std::move(m)}};
}

EvalReport pairwise_accuracy(const std::vector<EvalRecord>& records, const DocumentScorer& scorer,
                             NegativeKind negative_kind, std::size_t threads) {
  EvalReport report;
  report.method = scorer.name();
  report.negative_kind = negative_kind;
  report.n_records = records.size();
  report.margins.resize(records.size());
  parallel_for(records.size(), threads, [&](std::size_t i) {
    const EvalRecord& r = records[i];
    RecordMargin& m = report.margins[i];
    m.record_id = r.record_id;
    try {
      m.x_score = scorer.score(r, r.x_side);
      m.negative_score = scorer.score(r, r.negative_side);
    } catch (const std::exception& e) {
      throw Error(ErrorCode::ScorerFailure, "scorer failed on record " + r.record_id + ": " + e.what());
    }
    if (!std::isfinite(m.x_score) || !std::isfinite(m.negative_score)) {
      throw Error(ErrorCode::ScorerFailure, "scorer returned a non-finite score on record " + r.record_id);
    }
    m.margin = m.x_score - m.negative_score;
  });
  for (const auto& m : report.margins) {
    if (m.x_score > m.negative_score) {
      ++report.wins;
    } else if (m.x_score < m.negative_score) {
      ++report.losses;
    } else {
      ++report.ties;
    }
  }
  if (report.n_records > 0) {
    report.accuracy = (static_cast<double>(report.wins) + 0.5 * static_cast<double>(report.ties)) /
                      static_cast<double>(report.n_records);
  }
  return report;
}

std::string render_report_table(const std::vector<EvalReport>& measured, const std::string& model_label) {
  struct Row {
    std::string method, xa, xr, note;
  };
  const char* kReference = "reference; not reproducible without EPO bulk data and the CCX model";
  std::vector<Row> rows = {
      {"PatentMatch 2021", "54%", "", kReference},
      {"SearchFormer 2023", "53.85%", "98.04%", kReference},
      {"IP Rally 2021", "58%", "", kReference},
      {"Max Chunk-Claim GP BERT", "53.89%", "", kReference},
      {"Max Chunk-Claim CCX", "63.05%", "99.61%", kReference},
      {"Weighted Paragraph-Element CCX", "60.46%", "", kReference},
      {"GPT 4o internal data only", "52.75%", "", kReference},
      {"GPT 4o upload full text", "59.17%", "", kReference},
  };
  std::map<std::string, Row> mine;
  std::vector<std::string> order;
  for (const auto& r : measured) {
    std::string label = (r.method == "weighted_element" ? "Weighted Paragraph-Element " : "Max Chunk-Claim ") + model_label;
    auto [it, fresh] = mine.emplace(label, Row{label, "", "", "measured"});
    if (fresh) order.push_back(label);
    std::string cell = percent(r.accuracy);
    (r.negative_kind == NegativeKind::ACitation ? it->second.xa : it->second.xr) = cell;
    it->second.note += (r.negative_kind == NegativeKind::ACitation ? "; n(X/A)=" : "; n(X/Random)=") +
                       std::to_string(r.n_records) + " ties=" + std::to_string(r.ties);
  }
  for (const auto& label : order) rows.push_back(mine.at(label));

  std::size_t w = 6;
  for (const auto& r : rows) w = std::max(w, r.method.size());
  std::string out = "Accuracy by negative example type (random choice = 50%)\n";
  auto line = [&](const std::string& a, const std::string& b, const std::string& c, const std::string& d) {
    char buf[1024];
    std::snprintf(buf, sizeof buf, "%-*s  %-8s  %-8s  %s", static_cast<int>(w), a.c_str(), b.c_str(), c.c_str(),
                  d.c_str());
    std::string s = buf;
    while (!s.empty() && s.back() == ' ') s.pop_back();
    out += s;
    out += '\n';
  };
  line("Method", "X/A", "X/Random", "Source");
  for (const auto& r : rows) line(r.method, r.xa, r.xr, r.note);
  return out;
}

}  // namespace claimsearch
