#include "corpus/corpus.hpp"

#include <set>

#include "common/error.hpp"
#include "common/jsonl.hpp"
#include "common/text.hpp"
#include "corpus/xml.hpp"

namespace claimsearch {

void Corpus::add(PatentDocument doc) {
  if (doc.doc_id.empty()) throw Error(ErrorCode::MissingDocId, "document without doc_id");
  if (docs_.count(doc.doc_id)) throw Error(ErrorCode::InvalidArgument, "duplicate doc_id " + doc.doc_id);
  std::string id = doc.doc_id;
  docs_.emplace(std::move(id), std::make_shared<const PatentDocument>(std::move(doc)));
}

const PatentDocument* Corpus::find(std::string_view doc_id) const {
  auto it = docs_.find(doc_id);
  return it == docs_.end() ? nullptr : it->second.get();
}

Corpus Corpus::load(const std::string& path) {
  Corpus corpus;
  for (const auto& file : list_files(path, ".jsonl")) {
    for_each_jsonl(file, [&](const Json& row) { corpus.add(document_from_json(row)); });
  }
  return corpus;
}

IngestResult ingest_paths(const std::vector<std::string>& paths, std::optional<Jurisdiction> jurisdiction,
                          const ParseOptions& options) {
  IngestResult result;
  std::set<std::string> seen;
  for (const auto& path : paths) {
    for (const auto& file : list_files(path, ".xml")) {
      std::string bytes = text::read_file(file);
      auto entries = xml::split_concatenated(bytes);
      for (std::size_t i = 0; i < entries.size(); ++i) {
        std::string source = entries.size() > 1 ? file + "#" + std::to_string(i) : file;
        try {
          Jurisdiction j = jurisdiction.value_or(detect_jurisdiction(entries[i]));
          PatentDocument doc = parse_application(entries[i], j, options);
          if (!seen.insert(doc.doc_id).second) {
            result.failures.push_back({source, "duplicate doc_id " + doc.doc_id});
            continue;
          }
          result.documents.push_back(std::move(doc));
        } catch (const Error& e) {
          result.failures.push_back({source, std::string(error_code_name(e.code())) + ": " + e.what()});
        }
      }
    }
  }
  return result;
}

std::string documents_to_jsonl(const std::vector<PatentDocument>& docs) {
  std::string out;
  for (const auto& d : docs) {
    out += to_json(d).dump();
    out.push_back('\n');
  }
  return out;
}

}  // namespace claimsearch
