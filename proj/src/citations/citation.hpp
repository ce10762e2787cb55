#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "citations/passage.hpp"
#include "corpus/document.hpp"

namespace claimsearch {

enum class Category { X, A };

std::string_view to_string(Category c) noexcept;
std::optional<Category> parse_category(std::string_view s);

struct CitationRecord {
  std::string subject_doc_id;
  int subject_claim_number = 1;
  Category category = Category::X;
  std::string cited_doc_id;
  std::vector<PassageRef> passages;
  std::vector<std::string> discarded;

  bool operator==(const CitationRecord&) const = default;
};

Json to_json(const CitationRecord& r);
CitationRecord citation_from_json(const Json& j);

// One cited text unit after resolution against the cited document.
struct ResolvedPassage {
  SectionName section = SectionName::Unknown;
  int number = 0;
  std::string text;
};

struct Resolution {
  std::vector<ResolvedPassage> passages;
  std::vector<int> skipped_paragraphs;
  std::vector<int> skipped_claims;
};

// Cited texts in citation order. Paragraph ranges look in Description,
// Background, Summary, CrossRef (first section holding the start number),
// then fall back to the remaining body sections for numbers the first
// section lacks. A passage cited twice is emitted once.
// Throws Error(DocMismatch) or Error(EmptyResolution).
Resolution resolve_passages(const CitationRecord& citation, const PatentDocument& doc);

struct CitationIngest {
  std::vector<CitationRecord> records;
  struct Discard {
    std::string subject_doc_id;
    std::string cited_doc_id;
    DiscardedSegment segment;
  };
  std::vector<Discard> discards;

  std::size_t rows = 0;
  std::size_t malformed_rows = 0;
  std::size_t dropped_no_claim1 = 0;
  std::map<std::string, std::size_t> dropped_category;  // by raw category

  Json summary() const;
};

// Citation table rows with columns subject_doc_id, claim_numbers, category,
// cited_doc_id, passage_field. Rows whose claim list lacks claim 1 and rows
// with categories other than X/A are counted and dropped.
CitationIngest ingest_citation_rows(const std::vector<std::map<std::string, std::string>>& rows);

// Reads .csv (header row, RFC 4180 quoting) or .jsonl.
std::vector<std::map<std::string, std::string>> read_citation_table(const std::string& path);

std::vector<std::vector<std::string>> parse_csv(std::string_view data);

std::vector<CitationRecord> load_citation_records(const std::string& jsonl_path);

// Standardized records JSONL, or a raw citation table (.csv, or .jsonl rows
// carrying passage_field) which is ingested on the fly.
std::vector<CitationRecord> load_citations(const std::string& path);

}  // namespace claimsearch
