#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "corpus/document.hpp"
#include "corpus/parse.hpp"

namespace claimsearch {

// Immutable-after-load collection of parsed documents keyed by doc_id.
class Corpus {
 public:
  using Map = std::map<std::string, std::shared_ptr<const PatentDocument>, std::less<>>;

  // Throws Error(InvalidArgument) when the id is already present.
  void add(PatentDocument doc);

  const PatentDocument* find(std::string_view doc_id) const;
  std::size_t size() const noexcept { return docs_.size(); }
  const Map& documents() const noexcept { return docs_; }

  // `path` is a JSONL file or a directory scanned for *.jsonl.
  static Corpus load(const std::string& path);

 private:
  Map docs_;
};

struct IngestFailure {
  std::string source;
  std::string error;
};

struct IngestResult {
  std::vector<PatentDocument> documents;
  std::vector<IngestFailure> failures;
};

// Parses XML files (or directories of *.xml). Each file may hold one document
// or a concatenation of documents. A nullopt jurisdiction means detect per
// document.
IngestResult ingest_paths(const std::vector<std::string>& paths, std::optional<Jurisdiction> jurisdiction,
                          const ParseOptions& options = {});

std::string documents_to_jsonl(const std::vector<PatentDocument>& docs);

}  // namespace claimsearch
