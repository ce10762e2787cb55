#include "index/hnsw.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <queue>

#include "common/error.hpp"
#include "common/rng.hpp"

namespace claimsearch {
namespace {

float distance(const float* a, const float* b, std::size_t dim) noexcept {
  float s0 = 0.0f, s1 = 0.0f, s2 = 0.0f, s3 = 0.0f;
  std::size_t i = 0;
  for (; i + 4 <= dim; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  for (; i < dim; ++i) s0 += a[i] * b[i];
  return 1.0f - ((s0 + s1) + (s2 + s3));
}

// Per-thread visited marks; a generation counter avoids clearing.
class VisitedSet {
 public:
  void reset(std::size_t n) {
    if (marks_.size() < n) marks_.assign(n, 0);
    if (++generation_ == 0) {
      std::fill(marks_.begin(), marks_.end(), 0);
      generation_ = 1;
    }
  }
  bool insert(std::uint32_t id) noexcept {
    if (marks_[id] == generation_) return false;
    marks_[id] = generation_;
    return true;
  }

 private:
  std::vector<std::uint32_t> marks_;
  std::uint32_t generation_ = 0;
};

thread_local VisitedSet t_visited;

struct Closer {
  bool operator()(const HnswGraph::Candidate& a, const HnswGraph::Candidate& b) const noexcept {
    return a.first > b.first || (a.first == b.first && a.second > b.second);
  }
};
struct Farther {
  bool operator()(const HnswGraph::Candidate& a, const HnswGraph::Candidate& b) const noexcept {
    return a.first < b.first || (a.first == b.first && a.second < b.second);
  }
};

void put_u32(std::string& out, std::uint32_t v) {
  char buf[4];
  for (int i = 0; i < 4; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.append(buf, 4);
}

void put_u64(std::string& out, std::uint64_t v) {
  put_u32(out, static_cast<std::uint32_t>(v));
  put_u32(out, static_cast<std::uint32_t>(v >> 32));
}

class Reader {
 public:
  explicit Reader(const std::string& s) : s_(s) {}
  std::uint32_t u32() {
    if (pos_ + 4 > s_.size()) throw Error(ErrorCode::Io, "graph.bin truncated");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(s_[pos_ + i])) << (8 * i);
    pos_ += 4;
    return v;
  }
  std::uint64_t u64() {
    std::uint64_t lo = u32();
    std::uint64_t hi = u32();
    return lo | (hi << 32);
  }
  bool done() const noexcept { return pos_ == s_.size(); }

 private:
  const std::string& s_;
  std::size_t pos_ = 8;
};

constexpr char kMagic[9] = "CSHNSW01";

}  // namespace

HnswGraph::HnswGraph(HnswParams params) : params_(params) {
  if (params_.m < 2) throw Error(ErrorCode::ConfigError, "hnsw m must be >= 2");
  if (params_.ef_construction < 1) throw Error(ErrorCode::ConfigError, "hnsw ef_construction must be >= 1");
}

std::vector<std::uint32_t>& HnswGraph::links(std::uint32_t id, int level) { return links_[id][level]; }

const std::vector<std::uint32_t>& HnswGraph::links(std::uint32_t id, int level) const { return links_[id][level]; }

void HnswGraph::build(const VectorView& view) {
  if (view.count > UINT32_MAX) throw Error(ErrorCode::InvalidArgument, "too many vectors for one graph");
  levels_.clear();
  links_.clear();
  max_level_ = -1;
  entry_ = 0;
  SplitMix64 rng(params_.seed);
  const double ml = 1.0 / std::log(static_cast<double>(params_.m));
  levels_.reserve(view.count);
  links_.reserve(view.count);
  for (std::size_t i = 0; i < view.count; ++i) {
    double u = 1.0 - rng.unit();  // (0, 1]
    int level = static_cast<int>(-std::log(u) * ml);
    levels_.push_back(level);
    links_.emplace_back(static_cast<std::size_t>(level) + 1);
    insert(view, static_cast<std::uint32_t>(i), level);
  }
}

void HnswGraph::insert(const VectorView& view, std::uint32_t id, int level) {
  if (max_level_ < 0) {
    entry_ = id;
    max_level_ = level;
    return;
  }
  const float* q = view.row(id);
  auto dist = [&](std::uint32_t other) { return distance(q, view.row(other), view.dim); };

  std::uint32_t cur = entry_;
  float cur_d = dist(cur);
  for (int lc = max_level_; lc > level; --lc) {
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::uint32_t n : links(cur, lc)) {
        float d = dist(n);
        if (d < cur_d) {
          cur_d = d;
          cur = n;
          changed = true;
        }
      }
    }
  }

  for (int lc = std::min(level, max_level_); lc >= 0; --lc) {
    auto found = search_layer(view, q, cur, params_.ef_construction, lc);
    cur = found.front().second;
    auto selected = select_neighbors(view, found, params_.m);
    links(id, lc) = selected;
    const std::size_t cap = max_links(lc);
    for (std::uint32_t n : selected) {
      auto& nl = links(n, lc);
      nl.push_back(id);
      if (nl.size() > cap) {
        const float* nv = view.row(n);
        std::vector<Candidate> cands;
        cands.reserve(nl.size());
        for (std::uint32_t c : nl) cands.emplace_back(distance(nv, view.row(c), view.dim), c);
        std::sort(cands.begin(), cands.end());
        nl = select_neighbors(view, std::move(cands), cap);
      }
    }
  }
  if (level > max_level_) {
    max_level_ = level;
    entry_ = id;
  }
}

std::vector<HnswGraph::Candidate> HnswGraph::search_layer(const VectorView& view, const float* q,
                                                          std::uint32_t entry, std::size_t ef, int level) const {
  auto dist = [&](std::uint32_t other) { return distance(q, view.row(other), view.dim); };
  VisitedSet& visited = t_visited;
  visited.reset(size());
  std::priority_queue<Candidate, std::vector<Candidate>, Closer> frontier;
  std::priority_queue<Candidate, std::vector<Candidate>, Farther> best;
  float d0 = dist(entry);
  visited.insert(entry);
  frontier.emplace(d0, entry);
  best.emplace(d0, entry);
  while (!frontier.empty()) {
    Candidate c = frontier.top();
    if (c.first > best.top().first && best.size() >= ef) break;
    frontier.pop();
    for (std::uint32_t n : links(c.second, level)) {
      if (!visited.insert(n)) continue;
      float d = dist(n);
      if (best.size() < ef || d < best.top().first) {
        frontier.emplace(d, n);
        best.emplace(d, n);
        if (best.size() > ef) best.pop();
      }
    }
  }
  std::vector<Candidate> out(best.size());
  for (std::size_t i = out.size(); i > 0; --i) {
    out[i - 1] = best.top();
    best.pop();
  }
  return out;
}

// Keeps a candidate only if it is closer to the base than to every neighbor
// already kept. `candidates` must be sorted by ascending distance.
std::vector<std::uint32_t> HnswGraph::select_neighbors(const VectorView& view, std::vector<Candidate> candidates,
                                                       std::size_t limit) const {
  std::vector<std::uint32_t> kept;
  if (candidates.size() <= limit) {
    for (const auto& c : candidates) kept.push_back(c.second);
    return kept;
  }
  for (const auto& [d, id] : candidates) {
    if (kept.size() >= limit) break;
    const float* cv = view.row(id);
    bool good = true;
    for (std::uint32_t k : kept) {
      if (distance(cv, view.row(k), view.dim) < d) {
        good = false;
        break;
      }
    }
    if (good) kept.push_back(id);
  }
  return kept;
}

std::vector<HnswGraph::Candidate> HnswGraph::search(const VectorView& view, const float* query_unit,
                                                    std::size_t ef) const {
  if (max_level_ < 0 || ef == 0) return {};
  auto dist = [&](std::uint32_t other) { return distance(query_unit, view.row(other), view.dim); };
  std::uint32_t cur = entry_;
  float cur_d = dist(cur);
  for (int lc = max_level_; lc > 0; --lc) {
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::uint32_t n : links(cur, lc)) {
        float d = dist(n);
        if (d < cur_d) {
          cur_d = d;
          cur = n;
          changed = true;
        }
      }
    }
  }
  return search_layer(view, query_unit, cur, ef, 0);
}

std::string HnswGraph::serialize() const {
  std::string out(kMagic, 8);
  put_u64(out, levels_.size());
  put_u64(out, params_.m);
  put_u64(out, params_.ef_construction);
  put_u64(out, params_.seed);
  put_u32(out, entry_);
  put_u32(out, static_cast<std::uint32_t>(max_level_ + 1));
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    put_u32(out, static_cast<std::uint32_t>(levels_[i]));
    for (const auto& l : links_[i]) {
      put_u32(out, static_cast<std::uint32_t>(l.size()));
      for (std::uint32_t n : l) put_u32(out, n);
    }
  }
  return out;
}

HnswGraph HnswGraph::deserialize(const std::string& blob, std::size_t expected_count) {
  if (blob.size() < 8 || std::memcmp(blob.data(), kMagic, 8) != 0) {
    throw Error(ErrorCode::Io, "graph.bin has a bad header");
  }
  Reader r(blob);
  HnswGraph g;
  std::uint64_t count = r.u64();
  if (count != expected_count) throw Error(ErrorCode::Io, "graph.bin node count does not match vectors");
  g.params_.m = r.u64();
  g.params_.ef_construction = r.u64();
  g.params_.seed = r.u64();
  g.entry_ = r.u32();
  g.max_level_ = static_cast<int>(r.u32()) - 1;
  g.levels_.reserve(count);
  g.links_.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    std::uint32_t level = r.u32();
    if (level > 64) throw Error(ErrorCode::Io, "graph.bin level out of range");
    g.levels_.push_back(static_cast<int>(level));
    auto& node = g.links_.emplace_back(level + 1);
    for (auto& l : node) {
      std::uint32_t n = r.u32();
      if (n > 4 * g.params_.m + 1) throw Error(ErrorCode::Io, "graph.bin degree out of range");
      l.resize(n);
      for (auto& x : l) {
        x = r.u32();
        if (x >= count) throw Error(ErrorCode::Io, "graph.bin link out of range");
      }
    }
  }
  if (!r.done()) throw Error(ErrorCode::Io, "graph.bin has trailing bytes");
  if (count > 0 && (g.entry_ >= count || g.max_level_ != g.levels_[g.entry_])) {
    throw Error(ErrorCode::Io, "graph.bin entry point is inconsistent");
  }
  return g;
}

}  // namespace claimsearch
