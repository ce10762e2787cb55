#include <gtest/gtest.h>

#include "common/error.hpp"
#include "common/text.hpp"
#include "corpus/corpus.hpp"
#include "corpus/parse.hpp"
#include "corpus/xml.hpp"
#include "support.hpp"

using namespace claimsearch;
using claimsearch::testing::data_path;

namespace {

PatentDocument parse_file(const std::string& rel) {
  std::string bytes = text::read_file(data_path(rel));
  return parse_application(bytes, detect_jurisdiction(bytes));
}

std::vector<std::pair<std::string, int>> flat(const std::vector<ClaimElement>& es) {
  std::vector<std::pair<std::string, int>> out;
  for (const auto& e : es) out.emplace_back(e.text, e.depth);
  return out;
}

const char* kTwoSection = R"(<?xml version="1.0"?>
<ep-patent-document id="EP0000042A1" lang="en">
<abstract><p num="0001">Short abstract.</p></abstract>
<description>
<heading>DETAILED DESCRIPTION</heading>
<p num="0001">First.</p>
<p num="0002">Second &amp; more.</p>
<p num="0003">Third.</p>
</description>
</ep-patent-document>)";

}  // namespace

TEST(ClaimElements, HipProtectingDeviceExcerpt) {
  // The line wraps of the published excerpt are rejoined; the elided middle
  // ("...") is kept as text.
  const char* xml =
      "<claim id=\"CLM-00001\">\n"
      "<claim-text>. A hip protecting device for inflating a pocket over a hip joint of a wearer of the device "
      "upon a fall comprising:\n"
      "<claim-text>a belt; </claim-text>\n"
      "<claim-text>a substantially gas impermeable first pocket\nfixedly suspended ... from said belt; </claim-text>\n"
      "</claim-text>\n</claim>";
  auto elements = parse_claim_fragment(xml);
  ASSERT_EQ(elements.size(), 3u);
  EXPECT_EQ(elements[0].text,
            "A hip protecting device for inflating a pocket over a hip joint of a wearer of the device upon a fall "
            "comprising:");
  EXPECT_EQ(elements[0].depth, 0);
  EXPECT_EQ(elements[1].text, "a belt;");
  EXPECT_EQ(elements[1].depth, 1);
  EXPECT_EQ(elements[2].text, "a substantially gas impermeable first pocket fixedly suspended ... from said belt;");
  EXPECT_EQ(elements[2].depth, 1);
}

TEST(ClaimElements, FlatClaimIsOneElement) {
  auto elements = parse_claim_fragment("<claim-text>1. A lamp with a switch.</claim-text>");
  ASSERT_EQ(elements.size(), 1u);
  EXPECT_EQ(elements[0].text, "A lamp with a switch.");
  EXPECT_EQ(elements[0].depth, 0);
}

TEST(ClaimElements, ThreeLevelNestingGivesFiveElements) {
  const char* xml =
      "<claim><claim-text>A frame comprising:"
      "<claim-text>a base;</claim-text>"
      "<claim-text>an arm on the base, the arm having"
      "<claim-text>a hinge, and</claim-text>"
      "<claim-text>a clamp.</claim-text>"
      "</claim-text></claim-text></claim>";
  auto elements = parse_claim_fragment(xml);
  std::vector<std::pair<std::string, int>> expected{{"A frame comprising:", 0},
                                                    {"a base;", 1},
                                                    {"an arm on the base, the arm having", 1},
                                                    {"a hinge, and", 2},
                                                    {"a clamp.", 2}};
  EXPECT_EQ(flat(elements), expected);
}

TEST(ClaimElements, TrailingTextAfterChildIsItsOwnElement) {
  auto elements = parse_claim_fragment("<claim-text>A kit of<claim-text>a box;</claim-text>wherein it is red.</claim-text>");
  std::vector<std::pair<std::string, int>> expected{{"A kit of", 0}, {"a box;", 1}, {"wherein it is red.", 0}};
  EXPECT_EQ(flat(elements), expected);
}

TEST(ParseApplication, HipProtectorFixture) {
  PatentDocument doc = parse_file("corpus/EP1000001A1.xml");
  EXPECT_EQ(doc.doc_id, "EP1000001A1");
  EXPECT_EQ(doc.jurisdiction, Jurisdiction::EP);
  std::vector<SectionName> names;
  for (const auto& s : doc.sections) names.push_back(s.name);
  std::vector<SectionName> expected{SectionName::Abstract, SectionName::Background, SectionName::Summary,
                                    SectionName::BriefFig, SectionName::Description, SectionName::Claims};
  EXPECT_EQ(names, expected);

  const Claim* c1 = doc.claim(1);
  ASSERT_NE(c1, nullptr);
  std::vector<std::pair<std::string, int>> elements{
      {"A hip protector comprising:", 0},
      {"a garment;", 1},
      {"a pocket attached to the garment over the greater trochanter; and", 1},
      {"an energy-absorbing pad disposed in the pocket, the pad comprising", 1},
      {"a viscoelastic foam core, and", 2},
      {"a textile cover.", 2}};
  EXPECT_EQ(flat(c1->elements), elements);
  ASSERT_EQ(doc.claims.size(), 3u);
  // Dependent-claim references keep their rendered text.
  EXPECT_EQ(doc.claims[1].full_text,
            "The hip protector according to claim 1, wherein the pocket closes with a hook and loop strip.");
}

TEST(ParseApplication, ElementJoinReproducesFullText) {
  for (const char* rel : {"corpus/EP1000001A1.xml", "corpus/EP1000002A1.xml", "corpus/US20200000003A1.xml"}) {
    PatentDocument doc = parse_file(rel);
    for (const auto& c : doc.claims) {
      EXPECT_EQ(text::normalize_whitespace(join_elements(c.elements)), text::normalize_whitespace(c.full_text))
          << rel << " claim " << c.number;
    }
  }
}

TEST(ParseApplication, ParagraphNumbersIncreaseWithinSections) {
  IngestResult r = ingest_paths({data_path("corpus")}, std::nullopt);
  ASSERT_TRUE(r.failures.empty());
  for (const auto& doc : r.documents) {
    for (const auto& s : doc.sections) {
      for (std::size_t i = 1; i < s.paragraphs.size(); ++i) {
        EXPECT_LT(s.paragraphs[i - 1].number, s.paragraphs[i].number) << doc.doc_id;
      }
      for (const auto& p : s.paragraphs) EXPECT_EQ(p.text, text::trim(p.text));
    }
  }
}

TEST(ParseApplication, UsFormatUsesPublishedNumbers) {
  PatentDocument doc = parse_file("corpus/US20200000003A1.xml");
  EXPECT_EQ(doc.jurisdiction, Jurisdiction::US);
  EXPECT_EQ(doc.doc_id, "US20200000003A1");
  ASSERT_NE(doc.claim(1), nullptr);
  EXPECT_FALSE(text::starts_with_icase(doc.claim(1)->full_text, "1."));
}

TEST(ParseApplication, TwoSectionDocument) {
  PatentDocument doc = parse_application(kTwoSection, Jurisdiction::EP);
  ASSERT_EQ(doc.sections.size(), 2u);
  EXPECT_EQ(doc.sections[0].name, SectionName::Abstract);
  EXPECT_EQ(doc.sections[0].paragraphs, (std::vector<Paragraph>{{1, "Short abstract."}}));
  EXPECT_EQ(doc.sections[1].name, SectionName::Description);
  EXPECT_EQ(doc.sections[1].paragraphs,
            (std::vector<Paragraph>{{1, "First."}, {2, "Second & more."}, {3, "Third."}}));
  EXPECT_TRUE(doc.claims.empty());
}

TEST(ParseApplication, Deterministic) {
  std::string bytes = text::read_file(data_path("corpus/EP1000001A1.xml"));
  EXPECT_EQ(parse_application(bytes, Jurisdiction::EP), parse_application(bytes, Jurisdiction::EP));
}

TEST(ParseApplication, Errors) {
  try {
    parse_application("<ep-patent-document id=\"EP1\"><abstract>", Jurisdiction::EP);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MalformedXml);
  }
  try {
    parse_application("<ep-patent-document><abstract><p>x</p></abstract></ep-patent-document>", Jurisdiction::EP);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingDocId);
  }
}

TEST(SectionAliases, DefaultsAndOverrides) {
  const auto& t = SectionAliasTable::defaults();
  EXPECT_EQ(t.classify("BRIEF DESCRIPTION OF THE DRAWINGS"), SectionName::BriefFig);
  EXPECT_EQ(t.classify("Summary of the Invention"), SectionName::Summary);
  EXPECT_EQ(t.classify("Detailed description of embodiments"), SectionName::Description);
  EXPECT_EQ(t.classify("MISCELLANEOUS NOTES"), SectionName::Unknown);

  auto custom = SectionAliasTable::from_json(Json::parse(R"([["MISCELLANEOUS", "Admin"]])"));
  EXPECT_EQ(custom.classify("MISCELLANEOUS NOTES"), SectionName::Admin);
  EXPECT_EQ(custom.classify("SUMMARY"), SectionName::Unknown);
}

TEST(Xml, EntitiesAndBulkSplit) {
  EXPECT_EQ(xml::decode_entities("a &lt;b&gt; &amp; &#65;&#x42; &unknown;"), "a <b> & AB &unknown;");
  std::string bulk = text::read_file(data_path("corpus/bulk_2000008_2000009.xml"));
  EXPECT_EQ(xml::split_concatenated(bulk).size(), 2u);
}

TEST(Corpus, IngestDirectoryAndJsonRoundTrip) {
  IngestResult r = ingest_paths({data_path("corpus")}, std::nullopt);
  ASSERT_TRUE(r.failures.empty());
  EXPECT_EQ(r.documents.size(), 11u);

  claimsearch::testing::TempDir dir("corpus");
  text::write_file(dir.file("corpus.jsonl"), documents_to_jsonl(r.documents));
  Corpus c = Corpus::load(dir.file("corpus.jsonl"));
  EXPECT_EQ(c.size(), 11u);
  for (auto doc : r.documents) {
    for (auto& claim : doc.claims) claim.structure.clear();
    const PatentDocument* loaded = c.find(doc.doc_id);
    ASSERT_NE(loaded, nullptr);
    EXPECT_EQ(*loaded, doc);
  }
}

TEST(Corpus, DuplicateIdRejected) {
  Corpus c;
  PatentDocument d;
  d.doc_id = "EP1";
  c.add(d);
  EXPECT_THROW(c.add(d), Error);
}
