#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace claimsearch {

enum class PassageKind { Abstract, ClaimRange, ParagraphRange };

std::string_view to_string(PassageKind k) noexcept;
std::optional<PassageKind> parse_passage_kind(std::string_view s);

// Inclusive range; Abstract carries no numbers.
struct PassageRef {
  PassageKind kind = PassageKind::Abstract;
  std::optional<int> start;
  std::optional<int> end;

  static PassageRef abstract() { return {PassageKind::Abstract, std::nullopt, std::nullopt}; }
  static PassageRef paragraphs(int a, int b) { return {PassageKind::ParagraphRange, a, b}; }
  static PassageRef claims(int a, int b) { return {PassageKind::ClaimRange, a, b}; }

  bool operator==(const PassageRef&) const = default;
};

struct DiscardedSegment {
  std::string raw;
  std::string reason;  // figure | page_line | invalid_range | unrecognized

  bool operator==(const DiscardedSegment&) const = default;
};

struct PassageField {
  std::vector<PassageRef> kept;
  std::vector<DiscardedSegment> discarded;
};

// Standardizes an examiner passage field. Segments are separated by ';'.
// Never throws: anything outside the grammar lands in `discarded` with its
// raw (trimmed) text, in source order.
PassageField parse_passage_field(std::string_view raw);

// Canonical text, e.g. "paragraph [0002] - paragraph [0023]" or "claims 1-13".
// parse_passage_field(render(r)).kept == {r}.
std::string render(const PassageRef& ref);

// Claim-number lists as found in citation tables ("1", "1-13", "1,3,5",
// "claims 1 to 4"). Returns nullopt when the text is not such a list.
std::optional<std::vector<std::pair<int, int>>> parse_claim_number_list(std::string_view raw);

}  // namespace claimsearch
