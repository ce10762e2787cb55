#include "dataset/builder.hpp"

#include <array>
#include <filesystem>
#include <map>
#include <unordered_set>

#include "common/error.hpp"
#include "common/parallel.hpp"
#include "common/text.hpp"

namespace claimsearch {
namespace {

// Character-length bins for cited text per citation.
constexpr std::array<std::size_t, 4> kLengthEdges = {1000, 3000, 10000, 30000};
constexpr std::array<const char*, 5> kLengthLabels = {"<1000", "1000-2999", "3000-9999", "10000-29999", ">=30000"};
constexpr std::size_t kShortTextChars = 3000;

struct CategoryStats {
  std::size_t citations = 0;
  std::size_t chunks = 0;
  std::size_t short_text = 0;
  std::array<std::size_t, 5> length_bins{};
  std::map<std::string, std::size_t> jurisdictions;
};

struct SubjectWork {
  std::string subject;
  std::vector<const CitationRecord*> citations;
};

struct CitationOutcome {
  Category category = Category::X;
  bool used = false;
  std::string failure;  // funnel key when !used
  std::size_t chars = 0;
  std::string jurisdiction;
  std::vector<Chunk> chunks;
};

double share(std::size_t part, std::size_t whole) {
  return whole == 0 ? 0.0 : static_cast<double>(part) / static_cast<double>(whole);
}

}  // namespace

DatasetOutput build_dataset(const std::vector<CitationRecord>& citations, const Corpus& corpus,
                            const DatasetOptions& options) {
  options.chunker.validate();
  auto counter = make_token_counter(options.chunker.token_counter);

  std::vector<SubjectWork> subjects;
  std::map<std::string, std::size_t> subject_index;
  std::size_t not_claim1 = 0;
  for (const auto& c : citations) {
    if (c.subject_claim_number != 1) {
      ++not_claim1;
      continue;
    }
    auto [it, fresh] = subject_index.emplace(c.subject_doc_id, subjects.size());
    if (fresh) subjects.push_back({c.subject_doc_id, {}});
    subjects[it->second].citations.push_back(&c);
  }

  // Per-subject work is independent; results are stored by index.
  std::vector<std::vector<CitationOutcome>> outcomes(subjects.size());
  std::vector<std::string> claim_texts(subjects.size());
  parallel_for(subjects.size(), options.threads, [&](std::size_t si) {
    const SubjectWork& w = subjects[si];
    const PatentDocument* subject_doc = corpus.find(w.subject);
    const Claim* claim = subject_doc ? subject_doc->claim(1) : nullptr;
    if (claim) claim_texts[si] = claim->full_text;
    for (const CitationRecord* c : w.citations) {
      CitationOutcome o;
      o.category = c->category;
      if (claim_texts[si].empty()) {
        o.failure = "missing_subject_claim";
      } else if (const PatentDocument* cited = corpus.find(c->cited_doc_id); !cited) {
        o.failure = "missing_cited_document";
      } else {
        try {
          Resolution res = resolve_passages(*c, *cited);
          for (const auto& p : res.passages) o.chars += p.text.size();
          o.jurisdiction = std::string(to_string(cited->jurisdiction));
          o.chunks = chunk_passages(cited->doc_id, res.passages, options.chunker, *counter);
          o.used = !o.chunks.empty();
          if (!o.used) o.failure = "empty_resolution";
        } catch (const Error& e) {
          if (e.code() != ErrorCode::EmptyResolution) throw;
          o.failure = "empty_resolution";
        }
      }
      outcomes[si].push_back(std::move(o));
    }
  });

  DatasetOutput out;
  std::map<std::string, std::map<std::string, std::size_t>> dropped;  // category -> reason -> n
  std::array<CategoryStats, 2> stats;
  std::size_t a_dedup = 0;
  for (std::size_t si = 0; si < subjects.size(); ++si) {
    ClaimChunkSet set;
    set.subject_doc_id = subjects[si].subject;
    set.claim_text = claim_texts[si];
    for (auto& o : outcomes[si]) {
      const char* cat = o.category == Category::X ? "X" : "A";
      if (!o.used) {
        ++dropped[cat][o.failure];
        continue;
      }
      CategoryStats& s = stats[o.category == Category::X ? 0 : 1];
      ++s.citations;
      s.chunks += o.chunks.size();
      if (o.chars < kShortTextChars) ++s.short_text;
      std::size_t bin = 0;
      while (bin < kLengthEdges.size() && o.chars >= kLengthEdges[bin]) ++bin;
      ++s.length_bins[bin];
      ++s.jurisdictions[o.jurisdiction];
      auto& target = o.category == Category::X ? set.x_chunks : set.a_chunks;
      for (auto& ch : o.chunks) target.push_back(std::move(ch));
    }
    // A passage cited both as X and as A for the same claim cannot serve as
    // its own negative.
    std::unordered_set<std::string> x_texts;
    for (const auto& c : set.x_chunks) x_texts.insert(c.text);
    std::vector<Chunk> kept_a;
    for (auto& c : set.a_chunks) {
      if (x_texts.count(c.text)) {
        ++a_dedup;
      } else {
        kept_a.push_back(std::move(c));
      }
    }
    set.a_chunks = std::move(kept_a);
    if (!set.claim_text.empty()) out.claim_sets.push_back(std::move(set));
  }

  std::vector<std::string> subject_ids;
  for (const auto& s : out.claim_sets) subject_ids.push_back(s.subject_doc_id);
  if (!subject_ids.empty()) out.split = split_by_subject(subject_ids, options.train_fraction, options.seed);

  for (const auto& s : out.claim_sets) {
    for (auto& r : pair_xa_chunks(s.subject_doc_id, s.claim_text, s.x_chunks, s.a_chunks)) {
      out.records.push_back(std::move(r));
    }
  }
  std::size_t xa_records = out.records.size();

  MirrorPool pool(out.claim_sets);
  std::size_t mirror_pool_too_small = 0;
  std::size_t mirror_identical = 0;
  for (const auto& s : out.claim_sets) {
    try {
      auto m = pool.mirror(s, options.seed);
      mirror_identical += m.skipped_identical_text;
      for (auto& r : m.records) out.records.push_back(std::move(r));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::PoolTooSmall) throw;
      mirror_pool_too_small += s.used_a();
    }
  }

  std::size_t train = 0, test = 0;
  for (auto& r : out.records) {
    r.bucket = out.split.bucket_of(r.query_doc_id);
    if (r.bucket == Bucket::Train) ++train;
    if (r.bucket == Bucket::Test) ++test;
  }

  Json dropped_json = Json::object();
  for (const auto& [cat, reasons] : dropped) {
    Json r = Json::object();
    for (const auto& [k, v] : reasons) r[k] = v;
    dropped_json[cat] = std::move(r);
  }
  out.funnel = Json{{"citations_in", citations.size()},
                    {"not_claim1", not_claim1},
                    {"subjects", subjects.size()},
                    {"subjects_with_claim_text", out.claim_sets.size()},
                    {"citations_used", stats[0].citations + stats[1].citations},
                    {"dropped", dropped_json},
                    {"a_chunks_equal_to_x_chunks", a_dedup},
                    {"mirror_skipped_pool_too_small", mirror_pool_too_small},
                    {"mirror_skipped_identical_text", mirror_identical}};

  Json per_category = Json::object();
  for (int ci = 0; ci < 2; ++ci) {
    const CategoryStats& s = stats[ci];
    Json hist = Json::object();
    for (std::size_t b = 0; b < kLengthLabels.size(); ++b) hist[kLengthLabels[b]] = s.length_bins[b];
    Json jur = Json::object();
    for (const auto& [k, v] : s.jurisdictions) jur[k] = share(v, s.citations);
    per_category[ci == 0 ? "X" : "A"] = Json{{"citations", s.citations},
                                             {"chunks", s.chunks},
                                             {"length_histogram_chars", std::move(hist)},
                                             {"share_under_3000_chars", share(s.short_text, s.citations)},
                                             {"jurisdiction_share", std::move(jur)}};
  }
  out.stats = Json{{"per_category", std::move(per_category)},
                   {"records", Json{{"XOverA", xa_records},
                                    {"MirroredAOverRandomX", out.records.size() - xa_records},
                                    {"train", train},
                                    {"test", test}}},
                   {"funnel", out.funnel},
                   {"max_seq_length", options.chunker.max_seq_length},
                   {"token_counter", options.chunker.token_counter},
                   {"seed", options.seed},
                   {"train_fraction", options.train_fraction},
                   {"warnings", out.split.warnings}};
  return out;
}

std::string pairs_to_jsonl(const std::vector<PairRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    out += to_json(r).dump();
    out.push_back('\n');
  }
  return out;
}

void write_dataset(const DatasetOutput& output, const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + out_dir + ": " + ec.message());
  text::write_file((fs::path(out_dir) / "pairs.jsonl").string(), pairs_to_jsonl(output.records));
  std::string splits;
  for (const auto& a : output.split.assignments) {
    splits += Json{{"subject_doc_id", a.subject_doc_id}, {"bucket", to_string(a.bucket)}}.dump();
    splits.push_back('\n');
  }
  text::write_file((fs::path(out_dir) / "splits.jsonl").string(), splits);
  text::write_file((fs::path(out_dir) / "stats.json").string(), output.stats.dump(2) + "\n");
}

}  // namespace claimsearch
