#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dataset/chunker.hpp"

namespace claimsearch {

enum class PairOrigin { XOverA, MirroredAOverRandomX };
enum class Bucket { Train, Test };

std::string_view to_string(PairOrigin o) noexcept;
std::string_view to_string(Bucket b) noexcept;
std::optional<Bucket> parse_bucket(std::string_view s);

struct PairRecord {
  std::string record_id;
  std::string query_claim_text;
  std::string query_doc_id;
  std::string positive_text;
  std::string negative_text;
  PairOrigin origin = PairOrigin::XOverA;
  ChunkRef positive_ref;
  ChunkRef negative_ref;
  // Subject application whose citation supplied the negative chunk.
  std::string negative_subject_doc_id;
  std::optional<Bucket> bucket;
};

Json to_json(const PairRecord& r);

// Zips X and A chunks in document order: min(|x|, |a|) records, each chunk
// used at most once.
std::vector<PairRecord> pair_xa_chunks(std::string_view query_doc_id, std::string_view claim_text,
                                       const std::vector<Chunk>& x_chunks, const std::vector<Chunk>& a_chunks);

// X and A chunks collected for one subject's claim 1.
struct ClaimChunkSet {
  std::string subject_doc_id;
  std::string claim_text;
  std::vector<Chunk> x_chunks;
  std::vector<Chunk> a_chunks;

  // The A chunks consumed by pair_xa_chunks.
  std::size_t used_a() const { return std::min(x_chunks.size(), a_chunks.size()); }
};

// Pool of X chunks across subjects for drawing mirrored negatives.
class MirrorPool {
 public:
  explicit MirrorPool(const std::vector<ClaimChunkSet>& sets);

  struct Result {
    std::vector<PairRecord> records;
    std::size_t skipped_identical_text = 0;
  };

  // One MirroredAOverRandomX record per used A chunk of `set`. Negatives are
  // uniform over X chunks of other subjects, drawn from a generator seeded
  // with (global_seed, subject) so per-claim work can run in any order.
  // Throws Error(PoolTooSmall) when no foreign X chunk exists.
  Result mirror(const ClaimChunkSet& set, std::uint64_t global_seed) const;

 private:
  struct Entry {
    const Chunk* chunk;
    const std::string* subject;
  };
  std::vector<Entry> entries_;  // grouped by subject
  std::map<std::string, std::pair<std::size_t, std::size_t>, std::less<>> ranges_;
};

std::vector<PairRecord> mirror_a_positive(const std::vector<ClaimChunkSet>& sets, std::uint64_t seed);

struct SplitAssignment {
  std::string subject_doc_id;
  Bucket bucket = Bucket::Train;

  bool operator==(const SplitAssignment&) const = default;
};

struct SplitResult {
  std::vector<SplitAssignment> assignments;  // sorted by subject id
  std::vector<std::string> warnings;

  std::optional<Bucket> bucket_of(std::string_view subject) const;
};

// round(train_fraction * n) subjects go to Train after a seeded shuffle of the
// sorted ids. A single subject goes to Train with a warning. Throws
// Error(DegenerateSplit) when n >= 2 and a bucket would be empty.
// Reads the splits.jsonl written next to a dataset.
SplitResult load_splits(const std::string& path);

SplitResult split_by_subject(std::vector<std::string> subject_ids, double train_fraction, std::uint64_t seed);

}  // namespace claimsearch
