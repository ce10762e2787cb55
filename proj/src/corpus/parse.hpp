#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "corpus/document.hpp"

namespace claimsearch {

// Maps publication headings onto the canonical section names. Keys are
// compared against the start of the normalized heading (upper case, runs of
// non-alphanumerics collapsed to one space); the first matching entry wins.
class SectionAliasTable {
 public:
  SectionAliasTable() = default;
  explicit SectionAliasTable(std::vector<std::pair<std::string, SectionName>> entries);

  static const SectionAliasTable& defaults();
  // Accepts [["HEADING PREFIX", "SectionName"], ...].
  static SectionAliasTable from_json(const Json& j);

  // Unknown when nothing matches.
  SectionName classify(std::string_view heading) const;

  static std::string normalize_heading(std::string_view heading);

 private:
  std::vector<std::pair<std::string, SectionName>> entries_;
};

struct ParseOptions {
  const SectionAliasTable* aliases = nullptr;  // null means defaults()
};

// Parses one published application. Throws Error(MalformedXml) or
// Error(MissingDocId).
PatentDocument parse_application(std::string_view xml_bytes, Jurisdiction jurisdiction,
                                 const ParseOptions& options = {});

// Elements of a bare claim fragment marked up with <claim-text> tags (an
// enclosing <claim> is optional). Throws Error(MalformedXml).
std::vector<ClaimElement> parse_claim_fragment(std::string_view xml_fragment);

// Root tag and identifier based guess, used when the caller asks for "auto".
Jurisdiction detect_jurisdiction(std::string_view xml_bytes);

}  // namespace claimsearch
