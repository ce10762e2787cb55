#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "dataset/chunker.hpp"
#include "embed/embedder.hpp"
#include "index/hnsw.hpp"
#include "index/mapped_file.hpp"

namespace claimsearch {

enum class IndexMode { Exact, Approximate };

std::string_view to_string(IndexMode m) noexcept;
std::optional<IndexMode> parse_index_mode(std::string_view s);

struct AnnParams {
  IndexMode mode = IndexMode::Approximate;
  std::size_t m = 32;
  std::size_t ef_construction = 200;
  // Raised to k when a query asks for more.
  std::size_t ef_search = 400;
  std::uint64_t seed = 42;

  void validate() const;
  Json to_json() const;
  static AnnParams from_json(const Json& j);
};

struct ChunkHit {
  ChunkRef ref;
  double similarity = 0.0;
  std::size_t rank = 0;  // 1-based
  std::size_t entry = 0;
};

struct IndexEntry {
  ChunkRef ref;
  EmbeddingVector vector;
  std::string provider_id;
};

// Chunk vectors of one provider. Immutable once built or loaded, so
// concurrent queries need no locking.
class VectorIndex {
 public:
  VectorIndex() = default;
  VectorIndex(VectorIndex&&) noexcept = default;
  VectorIndex& operator=(VectorIndex&&) noexcept = default;
  VectorIndex(const VectorIndex&) = delete;
  VectorIndex& operator=(const VectorIndex&) = delete;

  const std::string& provider_id() const noexcept { return provider_id_; }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return refs_.size(); }
  const AnnParams& ann_params() const noexcept { return params_; }
  const ChunkRef& ref(std::size_t i) const { return refs_.at(i); }
  std::span<const double> vector(std::size_t i) const { return {data_ + i * dim_, dim_}; }

  // Top-k by cosine, similarity descending then entry order. k is clamped to
  // size(). Uses the graph in Approximate mode. Throws Error(DimMismatch).
  std::vector<ChunkHit> query(std::span<const double> q, std::size_t k) const;
  std::vector<ChunkHit> query_exact(std::span<const double> q, std::size_t k) const;

  // Directory with manifest.json, vectors.bin, chunkrefs.jsonl and, for
  // Approximate mode, graph.bin. Vectors are memory-mapped on load.
  void save(const std::string& dir) const;
  static VectorIndex load(const std::string& dir);

 private:
  friend class IndexBuilder;

  void finish();
  std::vector<ChunkHit> rank(std::span<const double> q, std::vector<std::uint32_t> ids, std::size_t k) const;

  std::string provider_id_;
  std::size_t dim_ = 0;
  AnnParams params_;
  std::vector<ChunkRef> refs_;
  std::vector<double> owned_;
  std::unique_ptr<MappedFile> mapped_;
  const double* data_ = nullptr;
  std::vector<double> inv_norms_;
  // Unit-norm float copy walked by the graph; hits are rescored from data_.
  std::vector<float> unit_;
  VectorView view_;
  HnswGraph graph_;
};

// Streams entries into an index without holding EmbeddingVector copies.
class IndexBuilder {
 public:
  IndexBuilder(std::string provider_id, std::size_t dim, AnnParams params = {});

  // Throws Error(ProviderMismatch), Error(DimMismatch) or
  // Error(DuplicateChunkRef).
  void add(const ChunkRef& ref, std::span<const double> vector, std::string_view provider_id);
  void add(const IndexEntry& entry) { add(entry.ref, entry.vector.values, entry.provider_id); }

  std::size_t size() const noexcept { return index_.refs_.size(); }
  VectorIndex build() &&;

 private:
  VectorIndex index_;
  std::unordered_set<std::string> keys_;
};

// Provider and dim are taken from the first entry. Throws
// Error(InvalidArgument) when entries is empty.
VectorIndex build_index(const std::vector<IndexEntry>& entries, const AnnParams& params = {});

}  // namespace claimsearch
