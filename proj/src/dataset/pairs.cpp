#include "dataset/pairs.hpp"

#include <algorithm>
#include <cmath>

#include "common/error.hpp"
#include "common/jsonl.hpp"
#include "common/rng.hpp"

namespace claimsearch {
namespace {

constexpr int kRedraws = 16;

}  // namespace

std::string_view to_string(PairOrigin o) noexcept {
  return o == PairOrigin::XOverA ? "XOverA" : "MirroredAOverRandomX";
}

std::string_view to_string(Bucket b) noexcept { return b == Bucket::Train ? "train" : "test"; }

std::optional<Bucket> parse_bucket(std::string_view s) {
  if (s == "train" || s == "Train") return Bucket::Train;
  if (s == "test" || s == "Test") return Bucket::Test;
  return std::nullopt;
}

Json to_json(const PairRecord& r) {
  Json pos = to_json(r.positive_ref);
  pos["subject_doc_id"] = r.query_doc_id;
  Json neg = to_json(r.negative_ref);
  neg["subject_doc_id"] = r.negative_subject_doc_id;
  Json j{{"record_id", r.record_id},
         {"query_claim_text", r.query_claim_text},
         {"query_doc_id", r.query_doc_id},
         {"positive_text", r.positive_text},
         {"negative_text", r.negative_text},
         {"origin", to_string(r.origin)},
         {"positive_ref", std::move(pos)},
         {"negative_ref", std::move(neg)}};
  j["bucket"] = r.bucket ? Json(to_string(*r.bucket)) : Json(nullptr);
  return j;
}

std::vector<PairRecord> pair_xa_chunks(std::string_view query_doc_id, std::string_view claim_text,
                                       const std::vector<Chunk>& x_chunks, const std::vector<Chunk>& a_chunks) {
  const std::size_t n = std::min(x_chunks.size(), a_chunks.size());
  std::vector<PairRecord> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    PairRecord r;
    r.record_id = std::string(query_doc_id) + ":xa:" + std::to_string(i);
    r.query_claim_text = std::string(claim_text);
    r.query_doc_id = std::string(query_doc_id);
    r.positive_text = x_chunks[i].text;
    r.negative_text = a_chunks[i].text;
    r.origin = PairOrigin::XOverA;
    r.positive_ref = x_chunks[i].ref();
    r.negative_ref = a_chunks[i].ref();
    r.negative_subject_doc_id = r.query_doc_id;
    out.push_back(std::move(r));
  }
  return out;
}

MirrorPool::MirrorPool(const std::vector<ClaimChunkSet>& sets) {
  std::vector<const ClaimChunkSet*> order;
  for (const auto& s : sets) order.push_back(&s);
  std::stable_sort(order.begin(), order.end(),
                   [](const ClaimChunkSet* a, const ClaimChunkSet* b) { return a->subject_doc_id < b->subject_doc_id; });
  for (const ClaimChunkSet* s : order) {
    std::size_t lo = entries_.size();
    for (const auto& c : s->x_chunks) entries_.push_back({&c, &s->subject_doc_id});
    auto it = ranges_.find(s->subject_doc_id);
    if (it == ranges_.end()) {
      ranges_.emplace(s->subject_doc_id, std::make_pair(lo, entries_.size()));
    } else {
      it->second.second = entries_.size();
    }
  }
}

MirrorPool::Result MirrorPool::mirror(const ClaimChunkSet& set, std::uint64_t global_seed) const {
  Result result;
  const std::size_t used = set.used_a();
  if (used == 0) return result;

  std::size_t lo = 0, hi = 0;
  if (auto it = ranges_.find(set.subject_doc_id); it != ranges_.end()) std::tie(lo, hi) = it->second;
  const std::size_t foreign = entries_.size() - (hi - lo);
  if (foreign == 0) {
    throw Error(ErrorCode::PoolTooSmall, "no X chunk from a subject other than " + set.subject_doc_id);
  }
  // Index among foreign entries -> index in entries_, skipping [lo, hi).
  auto entry_at = [&](std::size_t r) { return r < lo ? r : r + (hi - lo); };

  SplitMix64 rng(derive_seed(global_seed, set.subject_doc_id));
  for (std::size_t i = 0; i < used; ++i) {
    const Chunk& positive = set.a_chunks[i];
    const Entry* pick = nullptr;
    std::size_t draw = 0;
    for (int attempt = 0; attempt < kRedraws && !pick; ++attempt) {
      draw = static_cast<std::size_t>(rng.uniform(foreign));
      const Entry& e = entries_[entry_at(draw)];
      if (e.chunk->text != positive.text) pick = &e;
    }
    for (std::size_t step = 1; !pick && step < foreign; ++step) {
      const Entry& e = entries_[entry_at((draw + step) % foreign)];
      if (e.chunk->text != positive.text) pick = &e;
    }
    if (!pick) {
      ++result.skipped_identical_text;
      continue;
    }
    PairRecord r;
    r.record_id = set.subject_doc_id + ":mirror:" + std::to_string(i);
    r.query_claim_text = set.claim_text;
    r.query_doc_id = set.subject_doc_id;
    r.positive_text = positive.text;
    r.negative_text = pick->chunk->text;
    r.origin = PairOrigin::MirroredAOverRandomX;
    r.positive_ref = positive.ref();
    r.negative_ref = pick->chunk->ref();
    r.negative_subject_doc_id = *pick->subject;
    result.records.push_back(std::move(r));
  }
  return result;
}

std::vector<PairRecord> mirror_a_positive(const std::vector<ClaimChunkSet>& sets, std::uint64_t seed) {
  MirrorPool pool(sets);
  std::vector<PairRecord> out;
  for (const auto& s : sets) {
    auto r = pool.mirror(s, seed);
    for (auto& rec : r.records) out.push_back(std::move(rec));
  }
  return out;
}

std::optional<Bucket> SplitResult::bucket_of(std::string_view subject) const {
  auto it = std::lower_bound(assignments.begin(), assignments.end(), subject,
                             [](const SplitAssignment& a, std::string_view s) { return a.subject_doc_id < s; });
  if (it == assignments.end() || it->subject_doc_id != subject) return std::nullopt;
  return it->bucket;
}

SplitResult split_by_subject(std::vector<std::string> ids, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "train fraction must lie in (0, 1)");
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  if (ids.empty()) throw Error(ErrorCode::InvalidArgument, "no subject ids to split");

  SplitResult out;
  const std::size_t n = ids.size();
  if (n == 1) {
    out.assignments.push_back({ids.front(), Bucket::Train});
    out.warnings.push_back("single subject " + ids.front() + " assigned to train; test set is empty");
    return out;
  }
  const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
  if (n_train == 0 || n_train == n) {
    throw Error(ErrorCode::DegenerateSplit, "fraction " + std::to_string(train_fraction) + " over " +
                                                std::to_string(n) + " subjects leaves a bucket empty");
  }
  std::vector<std::string> shuffled = ids;
  SplitMix64 rng(seed);
  seeded_shuffle(shuffled, rng);
  std::vector<std::string> train(shuffled.begin(), shuffled.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::sort(train.begin(), train.end());
  for (const auto& id : ids) {
    bool is_train = std::binary_search(train.begin(), train.end(), id);
    out.assignments.push_back({id, is_train ? Bucket::Train : Bucket::Test});
  }
  return out;
}

SplitResult load_splits(const std::string& path) {
  SplitResult out;
  for_each_jsonl(path, [&](const Json& j) {
    auto bucket = parse_bucket(j.at("bucket").get<std::string>());
    if (!bucket) throw Error(ErrorCode::InvalidArgument, "bucket must be train or test");
    out.assignments.push_back({j.at("subject_doc_id").get<std::string>(), *bucket});
  });
  std::sort(out.assignments.begin(), out.assignments.end(),
            [](const SplitAssignment& a, const SplitAssignment& b) { return a.subject_doc_id < b.subject_doc_id; });
  return out;
}

}  // namespace claimsearch
