#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace claimsearch {

// Row-major unit-norm vectors (zero rows stay zero).
struct VectorView {
  const float* data = nullptr;
  std::size_t dim = 0;
  std::size_t count = 0;

  const float* row(std::size_t i) const noexcept { return data + i * dim; }
};

struct HnswParams {
  std::size_t m = 32;
  std::size_t ef_construction = 200;
  std::uint64_t seed = 42;
};

// Hierarchical navigable small-world graph over cosine distance.
class HnswGraph {
 public:
  using Candidate = std::pair<float, std::uint32_t>;  // (distance, id)

  HnswGraph() = default;
  explicit HnswGraph(HnswParams params);

  // Inserts rows [0, view.count) in order.
  void build(const VectorView& view);

  // Up to ef nearest ids to the unit-norm query, by ascending distance.
  std::vector<Candidate> search(const VectorView& view, const float* query_unit, std::size_t ef) const;

  std::size_t size() const noexcept { return levels_.size(); }
  const HnswParams& params() const noexcept { return params_; }

  std::string serialize() const;
  // Throws Error(Io) on a corrupt or mismatched blob.
  static HnswGraph deserialize(const std::string& blob, std::size_t expected_count);

 private:
  std::size_t max_links(int level) const noexcept { return level == 0 ? 2 * params_.m : params_.m; }
  std::vector<std::uint32_t>& links(std::uint32_t id, int level);
  const std::vector<std::uint32_t>& links(std::uint32_t id, int level) const;

  void insert(const VectorView& view, std::uint32_t id, int level);
  std::vector<Candidate> search_layer(const VectorView& view, const float* q, std::uint32_t entry, std::size_t ef,
                                      int level) const;
  std::vector<std::uint32_t> select_neighbors(const VectorView& view, std::vector<Candidate> candidates,
                                              std::size_t limit) const;

  HnswParams params_;
  std::vector<int> levels_;
  // links_[id][level]
  std::vector<std::vector<std::vector<std::uint32_t>>> links_;
  std::uint32_t entry_ = 0;
  int max_level_ = -1;
};

}  // namespace claimsearch
