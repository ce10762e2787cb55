#include "citations/passage.hpp"

#include <array>
#include <cstdio>

#include "common/text.hpp"

namespace claimsearch {
namespace {

bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

constexpr std::array<std::string_view, 12> kParagraphWords = {
    "paragraphs", "paragraph", "paras.", "paras", "para.", "para", "pars.", "pars", "par.", "par",
    "\xC2\xB6\xC2\xB6", "\xC2\xB6"};
constexpr std::array<std::string_view, 4> kClaimWords = {"claims", "claim", "cl.", "cls."};
constexpr std::array<std::string_view, 5> kFigureWords = {"figures", "figure", "figs", "fig", "drawing"};
constexpr std::array<std::string_view, 6> kPageWords = {"pages", "page", "lines", "line", "column", "col"};

// Cursor over one lower-cased segment.
class Cursor {
 public:
  explicit Cursor(std::string_view s) : s_(s) {}

  bool done() {
    skip_space();
    return i_ >= s_.size();
  }

  void skip_space() {
    while (i_ < s_.size() && text::is_space(s_[i_])) ++i_;
  }

  // Keyword must not run into further letters ("para" must not match "parallel").
  template <std::size_t N>
  bool keyword(const std::array<std::string_view, N>& words) {
    skip_space();
    for (auto w : words) {
      if (s_.compare(i_, w.size(), w) != 0) continue;
      std::size_t after = i_ + w.size();
      if (after < s_.size() && is_alpha(s_[after]) && is_alpha(w.back())) continue;
      i_ = after;
      return true;
    }
    return false;
  }

  bool literal(std::string_view lit) {
    skip_space();
    if (s_.compare(i_, lit.size(), lit) != 0) return false;
    std::size_t after = i_ + lit.size();
    if (is_alpha(lit.back()) && after < s_.size() && is_alpha(s_[after])) return false;
    i_ = after;
    return true;
  }

  // "[0002]", "0002", "2"; -1 if absent or malformed.
  long number() {
    skip_space();
    bool bracket = false;
    if (i_ < s_.size() && s_[i_] == '[') {
      bracket = true;
      ++i_;
      skip_space();
    }
    std::size_t start = i_;
    long v = 0;
    while (i_ < s_.size() && is_digit(s_[i_])) {
      if (v < 100000000) v = v * 10 + (s_[i_] - '0');
      ++i_;
    }
    if (i_ == start) return -1;
    if (bracket) {
      skip_space();
      if (i_ >= s_.size() || s_[i_] != ']') return -1;
      ++i_;
    }
    return v;
  }

  bool dash() {
    skip_space();
    for (std::string_view d : {std::string_view("\xE2\x80\x93"), std::string_view("\xE2\x80\x94"),
                               std::string_view("-"), std::string_view("to")}) {
      if (s_.compare(i_, d.size(), d) == 0) {
        if (d == "to" && i_ + 2 < s_.size() && is_alpha(s_[i_ + 2])) continue;
        i_ += d.size();
        return true;
      }
    }
    return false;
  }

  bool separator() {
    skip_space();
    if (i_ < s_.size() && (s_[i_] == ',' || s_[i_] == '&')) {
      ++i_;
      literal("and");
      return true;
    }
    return literal("and");
  }

  std::size_t pos() const { return i_; }

 private:
  std::string_view s_;
  std::size_t i_ = 0;
};

enum class ListStatus { Ok, Invalid, Unrecognized };

// item (sep item)* where item = number [dash [keyword] number].
template <std::size_t N>
ListStatus parse_items(Cursor& cur, const std::array<std::string_view, N>& repeat_words,
                       std::vector<std::pair<int, int>>& out) {
  do {
    cur.keyword(repeat_words);
    long a = cur.number();
    if (a < 0) return ListStatus::Unrecognized;
    long b = a;
    if (cur.dash()) {
      cur.keyword(repeat_words);
      b = cur.number();
      if (b < 0) return ListStatus::Unrecognized;
    }
    if (a <= 0 || b < a) return ListStatus::Invalid;
    out.emplace_back(static_cast<int>(a), static_cast<int>(b));
  } while (cur.separator());
  return cur.done() ? ListStatus::Ok : ListStatus::Unrecognized;
}

std::string_view strip_decoration(std::string_view s) {
  s = text::trim(s);
  while (!s.empty() && (s.front() == '*' || text::is_space(s.front()))) s.remove_prefix(1);
  while (!s.empty() && (s.back() == '*' || s.back() == '.' || s.back() == ',' || text::is_space(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

void classify_segment(std::string_view segment, PassageField& out) {
  std::string raw(text::trim(segment));
  std::string lower = text::to_lower_ascii(strip_decoration(segment));
  auto discard = [&](const char* reason) { out.discarded.push_back({raw, reason}); };

  if (lower == "abstract" || lower == "the abstract") {
    out.kept.push_back(PassageRef::abstract());
    return;
  }

  Cursor cur(lower);
  bool claims = cur.keyword(kClaimWords);
  bool paragraphs = !claims && cur.keyword(kParagraphWords);
  if (!claims && !paragraphs && !lower.empty() && lower.front() == '[') paragraphs = true;

  if (claims || paragraphs) {
    std::vector<std::pair<int, int>> ranges;
    ListStatus status = claims ? parse_items(cur, kClaimWords, ranges) : parse_items(cur, kParagraphWords, ranges);
    if (status == ListStatus::Invalid) return discard("invalid_range");
    if (status == ListStatus::Unrecognized) return discard("unrecognized");
    for (auto [a, b] : ranges) {
      out.kept.push_back(claims ? PassageRef::claims(a, b) : PassageRef::paragraphs(a, b));
    }
    return;
  }

  Cursor probe(lower);
  if (probe.keyword(kFigureWords)) return discard("figure");
  Cursor page(lower);
  if (page.keyword(kPageWords)) return discard("page_line");
  discard("unrecognized");
}

}  // namespace

std::string_view to_string(PassageKind k) noexcept {
  switch (k) {
    case PassageKind::Abstract: return "Abstract";
    case PassageKind::ClaimRange: return "ClaimRange";
    case PassageKind::ParagraphRange: return "ParagraphRange";
  }
  return "Abstract";
}

std::optional<PassageKind> parse_passage_kind(std::string_view s) {
  if (s == "Abstract") return PassageKind::Abstract;
  if (s == "ClaimRange") return PassageKind::ClaimRange;
  if (s == "ParagraphRange") return PassageKind::ParagraphRange;
  return std::nullopt;
}

PassageField parse_passage_field(std::string_view raw) {
  PassageField out;
  for (auto segment : text::split(raw, ';')) {
    if (strip_decoration(segment).empty()) continue;
    classify_segment(segment, out);
  }
  return out;
}

std::string render(const PassageRef& ref) {
  char buf[96];
  switch (ref.kind) {
    case PassageKind::Abstract:
      return "abstract";
    case PassageKind::ParagraphRange:
      if (ref.start == ref.end) {
        std::snprintf(buf, sizeof(buf), "paragraph [%04d]", ref.start.value_or(0));
      } else {
        std::snprintf(buf, sizeof(buf), "paragraph [%04d] - paragraph [%04d]", ref.start.value_or(0),
                      ref.end.value_or(0));
      }
      return buf;
    case PassageKind::ClaimRange:
      if (ref.start == ref.end) {
        std::snprintf(buf, sizeof(buf), "claim %d", ref.start.value_or(0));
      } else {
        std::snprintf(buf, sizeof(buf), "claims %d-%d", ref.start.value_or(0), ref.end.value_or(0));
      }
      return buf;
  }
  return {};
}

std::optional<std::vector<std::pair<int, int>>> parse_claim_number_list(std::string_view raw) {
  std::string lower = text::to_lower_ascii(strip_decoration(raw));
  if (lower.empty()) return std::nullopt;
  Cursor cur(lower);
  cur.keyword(kClaimWords);
  std::vector<std::pair<int, int>> ranges;
  if (parse_items(cur, kClaimWords, ranges) != ListStatus::Ok) return std::nullopt;
  return ranges;
}

}  // namespace claimsearch
