#include "corpus/document.hpp"

#include "common/error.hpp"
#include "common/text.hpp"

namespace claimsearch {
namespace {

constexpr std::string_view kSectionNames[] = {"Abstract",    "CrossRef", "Background", "Summary", "BriefFig",
                                              "Description", "Claims",   "Admin",      "Unknown"};

void flatten_into(const ClaimTextNode& node, int depth, std::vector<ClaimElement>& out) {
  for (std::size_t i = 0; i < node.runs.size(); ++i) {
    std::string run = text::normalize_whitespace(node.runs[i]);
    if (!run.empty()) out.push_back({std::move(run), depth});
    if (i < node.children.size()) flatten_into(node.children[i], depth + 1, out);
  }
}

}  // namespace

std::string_view to_string(Jurisdiction j) noexcept {
  switch (j) {
    case Jurisdiction::EP: return "EP";
    case Jurisdiction::US: return "US";
    case Jurisdiction::OTHER: return "OTHER";
  }
  return "OTHER";
}

std::string_view to_string(SectionName s) noexcept { return kSectionNames[static_cast<int>(s)]; }

std::optional<Jurisdiction> parse_jurisdiction(std::string_view s) {
  std::string up = text::to_upper_ascii(s);
  if (up == "EP") return Jurisdiction::EP;
  if (up == "US") return Jurisdiction::US;
  if (up == "OTHER") return Jurisdiction::OTHER;
  return std::nullopt;
}

std::optional<SectionName> parse_section_name(std::string_view s) {
  for (int i = 0; i < static_cast<int>(std::size(kSectionNames)); ++i) {
    if (kSectionNames[i] == s) return static_cast<SectionName>(i);
  }
  return std::nullopt;
}

const Claim* PatentDocument::claim(int number) const {
  for (const auto& c : claims) {
    if (c.number == number) return &c;
  }
  return nullptr;
}

std::vector<std::pair<SectionName, const Paragraph*>> PatentDocument::all_paragraphs() const {
  std::vector<std::pair<SectionName, const Paragraph*>> out;
  for (const auto& s : sections) {
    for (const auto& p : s.paragraphs) out.emplace_back(s.name, &p);
  }
  return out;
}

std::vector<ClaimElement> flatten_claim_elements(const std::vector<ClaimTextNode>& roots) {
  std::vector<ClaimElement> out;
  for (const auto& r : roots) flatten_into(r, 0, out);
  return out;
}

std::vector<ClaimElement> flatten_claim_elements(const Claim& claim) {
  if (!claim.structure.empty()) return flatten_claim_elements(claim.structure);
  std::vector<ClaimElement> out;
  for (const auto& e : claim.elements) {
    std::string t = text::normalize_whitespace(e.text);
    if (!t.empty()) out.push_back({std::move(t), e.depth});
  }
  return out;
}

std::string join_elements(const std::vector<ClaimElement>& elements) {
  std::string out;
  for (const auto& e : elements) {
    if (!out.empty()) out.push_back(' ');
    out += e.text;
  }
  return text::normalize_whitespace(out);
}

Json to_json(const PatentDocument& doc) {
  Json j;
  j["doc_id"] = doc.doc_id;
  j["jurisdiction"] = to_string(doc.jurisdiction);
  Json sections = Json::array();
  for (const auto& s : doc.sections) {
    Json paras = Json::array();
    for (const auto& p : s.paragraphs) paras.push_back({{"number", p.number}, {"text", p.text}});
    sections.push_back({{"name", to_string(s.name)}, {"paragraphs", std::move(paras)}});
  }
  j["sections"] = std::move(sections);
  Json claims = Json::array();
  for (const auto& c : doc.claims) {
    Json elements = Json::array();
    for (const auto& e : c.elements) elements.push_back({{"text", e.text}, {"depth", e.depth}});
    claims.push_back({{"number", c.number}, {"full_text", c.full_text}, {"elements", std::move(elements)}});
  }
  j["claims"] = std::move(claims);
  return j;
}

PatentDocument document_from_json(const Json& j) {
  try {
    PatentDocument doc;
    doc.doc_id = j.at("doc_id").get<std::string>();
    if (doc.doc_id.empty()) throw Error(ErrorCode::MissingDocId, "document record without doc_id");
    auto jur = parse_jurisdiction(j.value("jurisdiction", "OTHER"));
    doc.jurisdiction = jur.value_or(Jurisdiction::OTHER);
    for (const auto& js : j.value("sections", Json::array())) {
      Section s;
      auto name = parse_section_name(js.at("name").get<std::string>());
      s.name = name.value_or(SectionName::Unknown);
      for (const auto& jp : js.value("paragraphs", Json::array())) {
        s.paragraphs.push_back({jp.at("number").get<int>(), jp.at("text").get<std::string>()});
      }
      doc.sections.push_back(std::move(s));
    }
    for (const auto& jc : j.value("claims", Json::array())) {
      Claim c;
      c.number = jc.at("number").get<int>();
      c.full_text = jc.value("full_text", "");
      for (const auto& je : jc.value("elements", Json::array())) {
        c.elements.push_back({je.at("text").get<std::string>(), je.value("depth", 0)});
      }
      doc.claims.push_back(std::move(c));
    }
    return doc;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("bad document record: ") + e.what());
  }
}

}  // namespace claimsearch
