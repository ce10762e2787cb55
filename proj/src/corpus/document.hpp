#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace claimsearch {

using Json = nlohmann::ordered_json;

enum class Jurisdiction { EP, US, OTHER };

enum class SectionName { Abstract, CrossRef, Background, Summary, BriefFig, Description, Claims, Admin, Unknown };

std::string_view to_string(Jurisdiction j) noexcept;
std::string_view to_string(SectionName s) noexcept;
std::optional<Jurisdiction> parse_jurisdiction(std::string_view s);
std::optional<SectionName> parse_section_name(std::string_view s);

struct Paragraph {
  int number = 0;
  std::string text;

  bool operator==(const Paragraph&) const = default;
};

struct Section {
  SectionName name = SectionName::Unknown;
  std::vector<Paragraph> paragraphs;

  bool operator==(const Section&) const = default;
};

struct ClaimElement {
  std::string text;
  int depth = 0;

  bool operator==(const ClaimElement&) const = default;
};

// Mixed content of one <claim-text> tag. runs[i] is the text that precedes
// children[i]; the final run follows the last child, so
// runs.size() == children.size() + 1.
struct ClaimTextNode {
  std::vector<std::string> runs{std::string()};
  std::vector<ClaimTextNode> children;

  bool operator==(const ClaimTextNode&) const = default;
};

struct Claim {
  int number = 0;
  std::vector<ClaimElement> elements;
  std::string full_text;
  // Source nesting; empty for claims loaded from JSONL.
  std::vector<ClaimTextNode> structure;

  bool operator==(const Claim&) const = default;
};

struct PatentDocument {
  std::string doc_id;
  Jurisdiction jurisdiction = Jurisdiction::OTHER;
  std::vector<Section> sections;
  std::vector<Claim> claims;

  const Claim* claim(int number) const;
  // All paragraphs of every section in source order.
  std::vector<std::pair<SectionName, const Paragraph*>> all_paragraphs() const;

  bool operator==(const PatentDocument&) const = default;
};

// Depth-first, document-order flattening. A tag's own text before its first
// nested tag becomes its own element; empty runs are dropped.
std::vector<ClaimElement> flatten_claim_elements(const Claim& claim);
std::vector<ClaimElement> flatten_claim_elements(const std::vector<ClaimTextNode>& roots);

std::string join_elements(const std::vector<ClaimElement>& elements);

Json to_json(const PatentDocument& doc);
PatentDocument document_from_json(const Json& j);

}  // namespace claimsearch
