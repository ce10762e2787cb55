#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "citations/citation.hpp"
#include "common/tokenizer.hpp"
#include "corpus/document.hpp"

namespace claimsearch {

struct ChunkerConfig {
  std::size_t max_seq_length = 512;
  std::string token_counter = "reference";

  // Throws Error(ConfigError) when max_seq_length < 16.
  void validate() const;
};

// Stable identity of a chunk. `piece` numbers the parts of a paragraph that
// was too long for one chunk; it is 0 otherwise.
struct ChunkRef {
  std::string doc_id;
  SectionName section = SectionName::Unknown;
  std::vector<int> paragraph_numbers;
  int piece = 0;

  std::string key() const;
  bool operator==(const ChunkRef&) const = default;
};

Json to_json(const ChunkRef& ref);
ChunkRef chunk_ref_from_json(const Json& j);

struct Chunk {
  std::string doc_id;
  SectionName section = SectionName::Unknown;
  std::vector<int> paragraph_numbers;
  int piece = 0;
  std::string text;  // paragraphs joined with '\n'
  std::size_t token_count = 0;

  ChunkRef ref() const { return {doc_id, section, paragraph_numbers, piece}; }
};

// Greedy packing of whole paragraphs up to max_seq_length tokens. A chunk
// never spans two sections. A paragraph that alone exceeds the limit is cut
// at the last sentence end that fits, or hard-cut at the token limit when a
// single sentence is too long; its pieces stand alone.
std::vector<Chunk> chunk_passages(std::string_view doc_id, const std::vector<ResolvedPassage>& passages,
                                  const ChunkerConfig& config, const TokenCounter& counter);

// Every section of a document, for indexing.
std::vector<Chunk> chunk_document(const PatentDocument& doc, const ChunkerConfig& config,
                                  const TokenCounter& counter);

// Byte offsets just past each sentence terminator (. ! ?) that is followed by
// whitespace. The paragraph end is not included.
std::vector<std::size_t> sentence_boundaries(std::string_view text);

}  // namespace claimsearch
