#include "corpus/parse.hpp"

#include <cctype>

#include "common/error.hpp"
#include "common/text.hpp"
#include "corpus/xml.hpp"

namespace claimsearch {
namespace {

using xml::Node;

bool is_digit(char c) { return c >= '0' && c <= '9'; }

std::optional<int> parse_positive_int(std::string_view s) {
  s = text::trim(s);
  if (!s.empty() && s.front() == '[' && s.back() == ']') s = s.substr(1, s.size() - 2);
  if (s.empty() || s.size() > 9) return std::nullopt;
  int v = 0;
  for (char c : s) {
    if (!is_digit(c)) return std::nullopt;
    v = v * 10 + (c - '0');
  }
  return v > 0 ? std::optional<int>(v) : std::nullopt;
}

// "[0023] text" -> (23, "text").
std::pair<std::optional<int>, std::string_view> strip_bracket_marker(std::string_view s) {
  if (s.size() < 3 || s.front() != '[') return {std::nullopt, s};
  std::size_t close = s.find(']');
  if (close == std::string_view::npos || close > 10) return {std::nullopt, s};
  auto n = parse_positive_int(s.substr(1, close - 1));
  if (!n) return {std::nullopt, s};
  return {n, text::trim(s.substr(close + 1))};
}

// First claim element often carries the claim number: "1. A device" or ". A device".
std::string strip_claim_number(std::string s) {
  std::size_t i = 0;
  while (i < s.size() && is_digit(s[i])) ++i;
  std::size_t j = i;
  while (j < s.size() && s[j] == ' ') ++j;
  if (j < s.size() && s[j] == '.' && j + 1 < s.size() && s[j + 1] == ' ') {
    return std::string(text::trim(std::string_view(s).substr(j + 2)));
  }
  return s;
}

bool is_bibliographic(std::string_view name) {
  return name == "us-bibliographic-data-application" || name == "us-bibliographic-data-grant" ||
         name == "bibliographic-data" || name == "SDOBI";
}

bool looks_top_level(const Node& heading, std::string_view text) {
  if (auto level = heading.attr("level")) return *level == "1";
  bool has_alpha = false;
  for (char c : text) {
    if (c >= 'a' && c <= 'z') return false;
    if (c >= 'A' && c <= 'Z') has_alpha = true;
  }
  return has_alpha;
}

bool prefer_language(const Node& node) {
  auto lang = node.attr("lang");
  return !lang || *lang == "en" || *lang == "EN";
}

void build_claim_text(const Node& xml_node, ClaimTextNode& out) {
  for (const auto& c : xml_node.children) {
    if (c.is_text()) {
      out.runs.back() += c.text;
    } else if (c.is_element() && c.name == "claim-text") {
      ClaimTextNode child;
      build_claim_text(c, child);
      out.children.push_back(std::move(child));
      out.runs.emplace_back();
    } else if (c.is_element()) {
      out.runs.back() += c.text_content();
    }
  }
}

void strip_leading_number(std::vector<ClaimTextNode>& roots) {
  for (auto& root : roots) {
    ClaimTextNode* node = &root;
    while (true) {
      std::string normalized = text::normalize_whitespace(node->runs.front());
      if (!normalized.empty()) {
        node->runs.front() = strip_claim_number(normalized);
        return;
      }
      if (node->children.empty()) break;
      node = &node->children.front();
    }
  }
}

class DocumentBuilder {
 public:
  DocumentBuilder(Jurisdiction jurisdiction, const SectionAliasTable& aliases) : aliases_(aliases) {
    doc_.jurisdiction = jurisdiction;
  }

  PatentDocument build(const Node& root) {
    doc_.doc_id = find_doc_id(root);
    if (doc_.doc_id.empty()) throw Error(ErrorCode::MissingDocId, "no publication identifier in <" + root.name + ">");

    std::vector<const Node*> parts;
    collect_parts(root, parts);
    const Node* abstract = choose(parts, "abstract");
    const Node* claims = choose(parts, "claims");
    for (const Node* part : parts) {
      if (part->name == "abstract") {
        if (part == abstract) add_abstract(*part);
      } else if (part->name == "claims") {
        if (part == claims) add_claims(*part);
      } else {
        add_description(*part);
      }
    }
    return std::move(doc_);
  }

 private:
  static std::string find_doc_id(const Node& root) {
    auto country = root.attr("country");
    auto number = root.attr("doc-number");
    if (country && number && !number->empty()) {
      return std::string(*country) + std::string(*number) + std::string(root.attr("kind").value_or(""));
    }
    if (const Node* pub = root.find("publication-reference")) {
      if (const Node* id = pub->find("document-id")) {
        std::string c, n, k;
        if (const Node* x = id->child("country")) c = text::normalize_whitespace(x->text_content());
        if (const Node* x = id->child("doc-number")) n = text::normalize_whitespace(x->text_content());
        if (const Node* x = id->child("kind")) k = text::normalize_whitespace(x->text_content());
        if (!n.empty()) return c + n + k;
      }
    }
    if (auto id = root.attr("doc-id")) return std::string(text::trim(*id));
    if (auto id = root.attr("id")) return std::string(text::trim(*id));
    return {};
  }

  static void collect_parts(const Node& node, std::vector<const Node*>& out) {
    for (const auto& c : node.children) {
      if (!c.is_element() || is_bibliographic(c.name)) continue;
      if (c.name == "abstract" || c.name == "claims" || c.name == "description") {
        out.push_back(&c);
      } else {
        collect_parts(c, out);
      }
    }
  }

  // Multi-language publications carry several abstracts/claim sets; keep one.
  static const Node* choose(const std::vector<const Node*>& parts, std::string_view name) {
    const Node* first = nullptr;
    for (const Node* p : parts) {
      if (p->name != name) continue;
      if (!first) first = p;
      if (prefer_language(*p)) return p;
    }
    return first;
  }

  Section& open_section(SectionName name) {
    if (doc_.sections.empty() || doc_.sections.back().name != name) doc_.sections.push_back({name, {}});
    return doc_.sections.back();
  }

  void add_paragraph(SectionName section, const Node& p, int& counter) {
    std::string raw = text::normalize_whitespace(p.text_content());
    auto [marker, body] = strip_bracket_marker(raw);
    std::string body_text(body);
    if (body_text.empty()) return;
    std::optional<int> number;
    if (auto num = p.attr("num")) number = parse_positive_int(*num);
    if (!number) number = marker;

    Section& s = open_section(section);
    int last = s.paragraphs.empty() ? 0 : s.paragraphs.back().number;
    int assigned = number.value_or(counter + 1);
    if (assigned <= last) assigned = last + 1;
    counter = assigned;
    s.paragraphs.push_back({assigned, std::move(body_text)});
  }

  void add_abstract(const Node& node) {
    int counter = 0;
    bool any_p = false;
    for (const auto& c : node.children) {
      if (c.is_element() && c.name == "p") {
        add_paragraph(SectionName::Abstract, c, counter);
        any_p = true;
      }
    }
    if (!any_p) {
      std::string t = text::normalize_whitespace(node.text_content());
      if (!t.empty()) open_section(SectionName::Abstract).paragraphs.push_back({1, std::move(t)});
    }
  }

  void add_description(const Node& node) { walk_description(node, SectionName::Description); }

  void walk_description(const Node& node, SectionName start) {
    SectionName current = start;
    for (const auto& c : node.children) {
      if (!c.is_element()) continue;
      if (c.name == "heading") {
        std::string heading = text::normalize_whitespace(c.text_content());
        SectionName mapped = aliases_.classify(heading);
        if (mapped != SectionName::Unknown) {
          current = mapped;
        } else if (looks_top_level(c, heading)) {
          current = SectionName::Unknown;
        }
      } else if (c.name == "p") {
        add_paragraph(current, c, body_counter_);
      } else if (c.name == "description-of-drawings") {
        walk_description(c, SectionName::BriefFig);
      }
    }
  }

  void add_claims(const Node& node) {
    int sequential = 0;
    for (const auto& c : node.children) {
      if (!c.is_element() || c.name != "claim") continue;
      Claim claim;
      std::optional<int> number;
      if (auto num = c.attr("num")) number = parse_positive_int(*num);
      if (!number) {
        if (auto id = c.attr("id")) {
          std::string digits;
          for (char ch : *id) {
            if (is_digit(ch)) digits.push_back(ch);
          }
          number = parse_positive_int(digits);
        }
      }
      claim.number = number.value_or(sequential + 1);
      sequential = claim.number;

      bool has_claim_text = false;
      for (const auto& cc : c.children) {
        if (cc.is_element() && cc.name == "claim-text") {
          ClaimTextNode root;
          build_claim_text(cc, root);
          claim.structure.push_back(std::move(root));
          has_claim_text = true;
        }
      }
      if (!has_claim_text) {
        ClaimTextNode root;
        root.runs[0] = c.text_content();
        claim.structure.push_back(std::move(root));
      }
      strip_leading_number(claim.structure);
      claim.elements = flatten_claim_elements(claim.structure);
      claim.full_text = join_elements(claim.elements);
      doc_.claims.push_back(std::move(claim));
    }
    Section& s = open_section(SectionName::Claims);
    for (const auto& claim : doc_.claims) {
      if (claim.full_text.empty()) continue;
      if (!s.paragraphs.empty() && claim.number <= s.paragraphs.back().number) continue;
      s.paragraphs.push_back({claim.number, claim.full_text});
    }
  }

  const SectionAliasTable& aliases_;
  PatentDocument doc_;
  int body_counter_ = 0;
};

}  // namespace

SectionAliasTable::SectionAliasTable(std::vector<std::pair<std::string, SectionName>> entries) {
  for (auto& [key, name] : entries) entries_.emplace_back(normalize_heading(key), name);
}

const SectionAliasTable& SectionAliasTable::defaults() {
  using S = SectionName;
  static const SectionAliasTable table({
      {"CROSS REFERENCE", S::CrossRef},
      {"CROSS-REFERENCE", S::CrossRef},
      {"RELATED APPLICATION", S::CrossRef},
      {"REFERENCE TO RELATED APPLICATION", S::CrossRef},
      {"PRIORITY", S::CrossRef},
      {"CLAIM OF PRIORITY", S::CrossRef},
      {"STATEMENT REGARDING", S::Admin},
      {"FEDERALLY SPONSORED", S::Admin},
      {"GOVERNMENT", S::Admin},
      {"SEQUENCE LISTING", S::Admin},
      {"INCORPORATION BY REFERENCE", S::Admin},
      {"REFERENCE TO A", S::Admin},
      {"JOINT RESEARCH", S::Admin},
      {"BRIEF DESCRIPTION OF THE DRAWING", S::BriefFig},
      {"BRIEF DESCRIPTION OF DRAWING", S::BriefFig},
      {"BRIEF DESCRIPTION OF THE FIGURE", S::BriefFig},
      {"DESCRIPTION OF THE DRAWING", S::BriefFig},
      {"DESCRIPTION OF DRAWING", S::BriefFig},
      {"DESCRIPTION OF THE FIGURE", S::BriefFig},
      {"BACKGROUND", S::Background},
      {"TECHNICAL FIELD", S::Background},
      {"FIELD", S::Background},
      {"PRIOR ART", S::Background},
      {"DESCRIPTION OF THE RELATED ART", S::Background},
      {"DESCRIPTION OF RELATED ART", S::Background},
      {"DESCRIPTION OF THE PRIOR ART", S::Background},
      {"SUMMARY", S::Summary},
      {"BRIEF SUMMARY", S::Summary},
      {"DISCLOSURE OF THE INVENTION", S::Summary},
      {"OBJECT", S::Summary},
      {"DETAILED DESCRIPTION", S::Description},
      {"DESCRIPTION OF EMBODIMENT", S::Description},
      {"DESCRIPTION OF THE EMBODIMENT", S::Description},
      {"DESCRIPTION OF THE PREFERRED", S::Description},
      {"DESCRIPTION OF PREFERRED", S::Description},
      {"DESCRIPTION OF THE INVENTION", S::Description},
      {"EMBODIMENT", S::Description},
      {"EXAMPLE", S::Description},
      {"BEST MODE", S::Description},
      {"MODE FOR CARRYING OUT", S::Description},
      {"MODES FOR CARRYING OUT", S::Description},
  });
  return table;
}

SectionAliasTable SectionAliasTable::from_json(const Json& j) {
  std::vector<std::pair<std::string, SectionName>> entries;
  if (!j.is_array()) throw Error(ErrorCode::ConfigError, "section alias table must be an array of pairs");
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 2) throw Error(ErrorCode::ConfigError, "alias entry must be [prefix, section]");
    auto name = parse_section_name(e[1].get<std::string>());
    if (!name) throw Error(ErrorCode::ConfigError, "unknown section name " + e[1].get<std::string>());
    entries.emplace_back(e[0].get<std::string>(), *name);
  }
  return SectionAliasTable(std::move(entries));
}

std::string SectionAliasTable::normalize_heading(std::string_view heading) {
  std::string out;
  bool gap = false;
  for (char c : heading) {
    bool alnum = std::isalnum(static_cast<unsigned char>(c)) != 0;
    if (!alnum) {
      gap = !out.empty();
      continue;
    }
    if (gap) out.push_back(' ');
    gap = false;
    out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  }
  return out;
}

SectionName SectionAliasTable::classify(std::string_view heading) const {
  std::string norm = normalize_heading(heading);
  for (const auto& [key, name] : entries_) {
    if (norm.compare(0, key.size(), key) == 0) return name;
  }
  return SectionName::Unknown;
}

PatentDocument parse_application(std::string_view xml_bytes, Jurisdiction jurisdiction, const ParseOptions& options) {
  const SectionAliasTable& aliases = options.aliases ? *options.aliases : SectionAliasTable::defaults();
  xml::Node root = xml::parse(xml_bytes);
  return DocumentBuilder(jurisdiction, aliases).build(root);
}

std::vector<ClaimElement> parse_claim_fragment(std::string_view xml_fragment) {
  std::string_view trimmed = text::trim(xml_fragment);
  Node root = xml::parse(trimmed.substr(0, 6) == "<claim" && trimmed.substr(0, 11) != "<claim-text"
                             ? std::string(trimmed)
                             : "<claim>" + std::string(trimmed) + "</claim>");
  std::vector<ClaimTextNode> structure;
  for (const auto& c : root.children) {
    if (c.is_element() && c.name == "claim-text") {
      ClaimTextNode node;
      build_claim_text(c, node);
      structure.push_back(std::move(node));
    }
  }
  if (structure.empty()) {
    ClaimTextNode node;
    node.runs[0] = root.text_content();
    structure.push_back(std::move(node));
  }
  strip_leading_number(structure);
  return flatten_claim_elements(structure);
}

Jurisdiction detect_jurisdiction(std::string_view xml_bytes) {
  std::size_t head = std::min<std::size_t>(xml_bytes.size(), 4096);
  std::string_view prefix = xml_bytes.substr(0, head);
  if (prefix.find("<ep-patent-document") != std::string_view::npos) return Jurisdiction::EP;
  if (prefix.find("<us-patent-application") != std::string_view::npos ||
      prefix.find("<us-patent-grant") != std::string_view::npos) {
    return Jurisdiction::US;
  }
  return Jurisdiction::OTHER;
}

}  // namespace claimsearch
