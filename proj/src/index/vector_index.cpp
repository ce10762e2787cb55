#include "index/vector_index.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "common/error.hpp"
#include "common/jsonl.hpp"
#include "common/text.hpp"

namespace claimsearch {
namespace fs = std::filesystem;

static_assert(std::endian::native == std::endian::little, "vectors.bin is little-endian");

namespace {

constexpr const char* kFormat = "claimsearch-index";
constexpr int kVersion = 1;

double dot(const double* a, const double* b, std::size_t dim) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < dim; ++i) s += a[i] * b[i];
  return s;
}

std::size_t get_size(const Json& j, const char* key, std::size_t fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw Error(ErrorCode::ConfigError, std::string("ann_params.") + key + " must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

}  // namespace

std::string_view to_string(IndexMode m) noexcept { return m == IndexMode::Exact ? "exact" : "approximate"; }

std::optional<IndexMode> parse_index_mode(std::string_view s) {
  if (s == "exact") return IndexMode::Exact;
  if (s == "approximate") return IndexMode::Approximate;
  return std::nullopt;
}

void AnnParams::validate() const {
  if (mode == IndexMode::Exact) return;
  if (m < 2) throw Error(ErrorCode::ConfigError, "ann_params.m must be >= 2");
  if (ef_construction < 1) throw Error(ErrorCode::ConfigError, "ann_params.ef_construction must be >= 1");
  if (ef_search < 1) throw Error(ErrorCode::ConfigError, "ann_params.ef_search must be >= 1");
}

Json AnnParams::to_json() const {
  return Json{{"mode", claimsearch::to_string(mode)},
              {"m", m},
              {"ef_construction", ef_construction},
              {"ef_search", ef_search},
              {"seed", seed}};
}

AnnParams AnnParams::from_json(const Json& j) {
  AnnParams p;
  if (!j.is_object()) throw Error(ErrorCode::ConfigError, "ann_params must be an object");
  if (j.contains("mode")) {
    auto mode = parse_index_mode(j.at("mode").get<std::string>());
    if (!mode) throw Error(ErrorCode::ConfigError, "ann_params.mode must be exact or approximate");
    p.mode = *mode;
  }
  p.m = get_size(j, "m", p.m);
  p.ef_construction = get_size(j, "ef_construction", p.ef_construction);
  p.ef_search = get_size(j, "ef_search", p.ef_search);
  if (j.contains("seed")) p.seed = j.at("seed").get<std::uint64_t>();
  p.validate();
  return p;
}

void VectorIndex::finish() {
  data_ = mapped_ ? static_cast<const double*>(mapped_->data()) : owned_.data();
  inv_norms_.resize(refs_.size());
  for (std::size_t i = 0; i < refs_.size(); ++i) {
    const double* row = data_ + i * dim_;
    double n = std::sqrt(dot(row, row, dim_));
    inv_norms_[i] = n > 0.0 ? 1.0 / n : 0.0;
  }
  unit_.clear();
  if (params_.mode == IndexMode::Approximate) {
    unit_.resize(refs_.size() * dim_);
    for (std::size_t i = 0; i < unit_.size(); ++i) unit_[i] = static_cast<float>(data_[i] * inv_norms_[i / dim_]);
  }
  view_ = VectorView{unit_.data(), dim_, unit_.empty() ? 0 : refs_.size()};
}

std::vector<ChunkHit> VectorIndex::rank(std::span<const double> q, std::vector<std::uint32_t> ids,
                                        std::size_t k) const {
  double qn = std::sqrt(dot(q.data(), q.data(), dim_));
  double q_inv = qn > 0.0 ? 1.0 / qn : 0.0;
  std::vector<std::pair<double, std::uint32_t>> scored;
  scored.reserve(ids.size());
  for (std::uint32_t id : ids) {
    scored.emplace_back(dot(q.data(), data_ + id * dim_, dim_) * q_inv * inv_norms_[id], id);
  }
  auto before = [](const auto& a, const auto& b) { return a.first > b.first || (a.first == b.first && a.second < b.second); };
  k = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(k), scored.end(), before);
  std::vector<ChunkHit> hits;
  hits.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    hits.push_back({refs_[scored[i].second], scored[i].first, i + 1, scored[i].second});
  }
  return hits;
}

std::vector<ChunkHit> VectorIndex::query_exact(std::span<const double> q, std::size_t k) const {
  if (q.size() != dim_) {
    throw Error(ErrorCode::DimMismatch,
                "query dim " + std::to_string(q.size()) + " but index dim " + std::to_string(dim_));
  }
  if (k == 0) throw Error(ErrorCode::InvalidArgument, "k must be >= 1");
  std::vector<std::uint32_t> ids(size());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<std::uint32_t>(i);
  return rank(q, std::move(ids), k);
}

std::vector<ChunkHit> VectorIndex::query(std::span<const double> q, std::size_t k) const {
  if (params_.mode == IndexMode::Exact || graph_.size() != size()) return query_exact(q, k);
  if (q.size() != dim_) {
    throw Error(ErrorCode::DimMismatch,
                "query dim " + std::to_string(q.size()) + " but index dim " + std::to_string(dim_));
  }
  if (k == 0) throw Error(ErrorCode::InvalidArgument, "k must be >= 1");
  double qn = std::sqrt(dot(q.data(), q.data(), dim_));
  if (qn == 0.0) return query_exact(q, k);
  // A graph search wider than the index is a scan with extra steps.
  if (std::max(k, params_.ef_search) >= size()) return query_exact(q, k);
  std::vector<float> unit(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) unit[i] = static_cast<float>(q[i] / qn);
  auto found = graph_.search(view_, unit.data(), std::max(k, params_.ef_search));
  std::vector<std::uint32_t> ids;
  ids.reserve(found.size());
  for (const auto& c : found) ids.push_back(c.second);
  return rank(q, std::move(ids), k);
}

void VectorIndex::save(const std::string& dir) const {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + dir + ": " + ec.message());
  const fs::path base(dir);

  text::write_file((base / "vectors.bin").string(),
                   std::string_view(reinterpret_cast<const char*>(data_), size() * dim_ * sizeof(double)));
  std::string refs;
  for (const auto& r : refs_) {
    refs += to_json(r).dump();
    refs += '\n';
  }
  text::write_file((base / "chunkrefs.jsonl").string(), refs);
  if (params_.mode == IndexMode::Approximate) {
    text::write_file((base / "graph.bin").string(), graph_.serialize());
  } else {
    fs::remove(base / "graph.bin", ec);
  }
  // Manifest last: its presence marks a complete index.
  Json manifest{{"format", kFormat},      {"version", kVersion},  {"provider_id", provider_id_},
                {"dim", dim_},            {"count", size()},      {"dtype", "float64"},
                {"ann_params", params_.to_json()}};
  text::write_file((base / "manifest.json").string(), manifest.dump(2) + "\n");
}

VectorIndex VectorIndex::load(const std::string& dir) {
  const fs::path base(dir);
  Json manifest;
  try {
    manifest = Json::parse(text::read_file((base / "manifest.json").string()));
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::Io, "bad manifest.json in " + dir + ": " + e.what());
  }
  if (manifest.value("format", "") != kFormat || manifest.value("version", 0) != kVersion) {
    throw Error(ErrorCode::Io, "unsupported index format in " + dir);
  }
  if (manifest.value("dtype", "") != "float64") throw Error(ErrorCode::Io, "unsupported dtype in " + dir);

  VectorIndex index;
  index.provider_id_ = manifest.at("provider_id").get<std::string>();
  index.dim_ = manifest.at("dim").get<std::size_t>();
  const auto count = manifest.at("count").get<std::size_t>();
  index.params_ = AnnParams::from_json(manifest.at("ann_params"));

  index.refs_.reserve(count);
  for_each_jsonl((base / "chunkrefs.jsonl").string(),
                 [&](const Json& row) { index.refs_.push_back(chunk_ref_from_json(row)); });
  if (index.refs_.size() != count) {
    throw Error(ErrorCode::Io, "chunkrefs.jsonl has " + std::to_string(index.refs_.size()) + " rows, manifest says " +
                                   std::to_string(count));
  }
  index.mapped_ = std::make_unique<MappedFile>((base / "vectors.bin").string());
  if (index.mapped_->size() != count * index.dim_ * sizeof(double)) {
    throw Error(ErrorCode::Io, "vectors.bin size does not match manifest");
  }
  index.finish();
  if (index.params_.mode == IndexMode::Approximate) {
    index.graph_ = HnswGraph::deserialize(text::read_file((base / "graph.bin").string()), count);
  }
  return index;
}

IndexBuilder::IndexBuilder(std::string provider_id, std::size_t dim, AnnParams params) {
  if (dim == 0) throw Error(ErrorCode::InvalidArgument, "index dim must be positive");
  params.validate();
  index_.provider_id_ = std::move(provider_id);
  index_.dim_ = dim;
  index_.params_ = params;
}

void IndexBuilder::add(const ChunkRef& ref, std::span<const double> vector, std::string_view provider_id) {
  if (provider_id != index_.provider_id_) {
    throw Error(ErrorCode::ProviderMismatch, "vector from provider '" + std::string(provider_id) +
                                                 "' added to index of '" + index_.provider_id_ + "'");
  }
  if (vector.size() != index_.dim_) {
    throw Error(ErrorCode::DimMismatch, "vector dim " + std::to_string(vector.size()) + " but index dim " +
                                            std::to_string(index_.dim_));
  }
  if (!keys_.insert(ref.key()).second) {
    throw Error(ErrorCode::DuplicateChunkRef, "duplicate chunk " + ref.key());
  }
  index_.refs_.push_back(ref);
  index_.owned_.insert(index_.owned_.end(), vector.begin(), vector.end());
}

VectorIndex IndexBuilder::build() && {
  index_.finish();
  if (index_.params_.mode == IndexMode::Approximate) {
    HnswParams hp;
    hp.m = index_.params_.m;
    hp.ef_construction = index_.params_.ef_construction;
    hp.seed = index_.params_.seed;
    index_.graph_ = HnswGraph(hp);
    index_.graph_.build(index_.view_);
  }
  return std::move(index_);
}

VectorIndex build_index(const std::vector<IndexEntry>& entries, const AnnParams& params) {
  if (entries.empty()) throw Error(ErrorCode::InvalidArgument, "cannot build an index from no entries");
  IndexBuilder builder(entries.front().provider_id, entries.front().vector.dim(), params);
  for (const auto& e : entries) builder.add(e);
  return std::move(builder).build();
}

}  // namespace claimsearch
