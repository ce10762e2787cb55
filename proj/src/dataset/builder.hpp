#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "citations/citation.hpp"
#include "corpus/corpus.hpp"
#include "dataset/pairs.hpp"

namespace claimsearch {

struct DatasetOptions {
  ChunkerConfig chunker;
  double train_fraction = 0.8;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
};

struct DatasetOutput {
  std::vector<ClaimChunkSet> claim_sets;
  std::vector<PairRecord> records;  // XOverA first, then mirrored; bucket set
  SplitResult split;
  Json funnel;
  Json stats;
};

// Citations -> resolved passages -> chunks -> X/A pairs + mirrored pairs,
// bucketed by subject. Unresolvable citations are counted, not fatal.
DatasetOutput build_dataset(const std::vector<CitationRecord>& citations, const Corpus& corpus,
                            const DatasetOptions& options);

// Writes pairs.jsonl, splits.jsonl and stats.json under out_dir.
void write_dataset(const DatasetOutput& output, const std::string& out_dir);

std::string pairs_to_jsonl(const std::vector<PairRecord>& records);

}  // namespace claimsearch
