#include <gtest/gtest.h>

#include <cstdlib>
#include <set>

#include <httplib.h>

#include "common/error.hpp"
#include "common/text.hpp"
#include "service/http_server.hpp"
#include "support.hpp"

using namespace claimsearch;
using claimsearch::testing::data_path;
using claimsearch::testing::TempDir;

namespace {

std::shared_ptr<Corpus> fixture_corpus() {
  IngestResult r = ingest_paths({data_path("corpus")}, std::nullopt);
  auto c = std::make_shared<Corpus>();
  for (auto& d : r.documents) c->add(std::move(d));
  return c;
}

ServiceConfig small_config() {
  ServiceConfig c;
  c.k = 100;
  c.rerank_n = 0;
  c.embedder.dim = 256;
  return c;
}

struct Fixture {
  std::shared_ptr<Corpus> corpus = fixture_corpus();
  ReferenceEmbedder embedder{256};
  std::shared_ptr<VectorIndex> index;

  Fixture() {
    AnnParams p;
    p.mode = IndexMode::Exact;
    index = std::make_shared<VectorIndex>(build_corpus_index(*corpus, embedder, ChunkerConfig{}, p));
  }

  std::unique_ptr<SearchEngine> engine(ServiceConfig config = small_config(), bool with_corpus = true) const {
    auto e = std::make_unique<SearchEngine>(config);
    e->install(index, with_corpus ? corpus : nullptr);
    return e;
  }
};

const Fixture& fixture() {
  static Fixture f;
  return f;
}

const char* kHipClaim =
    "A hip protector comprising:\na garment;\na pocket attached to the garment over the greater trochanter; and\n"
    "an energy-absorbing pad disposed in the pocket, the pad comprising a viscoelastic foam core, and a textile cover.";

SearchRequest request(std::string claim, std::optional<std::size_t> k = {}, std::optional<std::size_t> n = {}) {
  SearchRequest r;
  r.claim_text = std::move(claim);
  r.k = k;
  r.rerank_n = n;
  return r;
}

void expect_sorted(const Json& results) {
  for (std::size_t i = 1; i < results.size(); ++i) {
    auto eff = [](const Json& r) { return r.contains("rerank_score") ? r["rerank_score"].get<double>() : r["score"].get<double>(); };
    double a = eff(results[i - 1]), b = eff(results[i]);
    EXPECT_TRUE(a > b || (a == b && results[i - 1]["doc_id"] < results[i]["doc_id"]));
  }
}

}  // namespace

TEST(SplitClaimElements, Heuristics) {
  auto texts = [](const std::vector<ClaimElement>& es) {
    std::vector<std::string> out;
    for (const auto& e : es) out.push_back(e.text);
    return out;
  };
  using V = std::vector<std::string>;
  EXPECT_EQ(texts(split_claim_elements("<claim-text>A cup comprising:<claim-text>a handle;</claim-text></claim-text>")),
            (V{"A cup comprising:", "a handle;"}));
  EXPECT_EQ(texts(split_claim_elements("A cup comprising\n\n a handle\na base")), (V{"A cup comprising", "a handle", "a base"}));
  EXPECT_EQ(texts(split_claim_elements("A cup comprising: a handle; and a base.")),
            (V{"A cup comprising:", "a handle;", "and a base."}));
  EXPECT_EQ(texts(split_claim_elements("A cup with a handle.")), (V{"A cup with a handle."}));
  EXPECT_TRUE(split_claim_elements("  \n ").empty());
  // Broken markup falls back to plain text.
  EXPECT_EQ(texts(split_claim_elements("<claim-text>a; b")), (V{"<claim-text>a;", "b"}));
}

TEST(Engine, PlantedClaimRanksFirst) {
  auto engine = fixture().engine();
  Json r = engine->search(request(kHipClaim));
  ASSERT_FALSE(r["results"].empty());
  EXPECT_EQ(r["results"][0]["doc_id"], "EP1000001A1");
  EXPECT_EQ(r["elements"].size(), 4u);
  EXPECT_FALSE(r["results"][0].contains("rerank_score"));
  EXPECT_FALSE(r["results"][0]["best_chunk"]["snippet"].get<std::string>().empty());
  for (const char* f : {"embed_ms", "ann_ms", "rerank_ms"}) EXPECT_TRUE(r["timing"].contains(f));
  expect_sorted(r["results"]);
}

TEST(Engine, KIsClampedToCorpus) {
  auto engine = fixture().engine();
  Json r = engine->search(request("bicycle lamp battery", 10000, 0));
  EXPECT_EQ(r["results"].size(), fixture().corpus->size());
  // k counts chunks; documents are what is left after aggregation.
  Json small = engine->search(request("bicycle lamp battery", 3, 0));
  EXPECT_LE(small["results"].size(), 3u);
  EXPECT_GE(small["results"].size(), 1u);
}

TEST(Engine, RerankRefinesFirstStageTopN) {
  auto engine = fixture().engine();
  std::string claim = "A moisture sensor comprising a capacitive probe; an oscillator; and a radio.";
  Json first = engine->search(request(claim, 50, 0));
  Json refined = engine->search(request(claim, 50, 4));
  ASSERT_EQ(refined["results"].size(), 4u);
  std::set<std::string> top, reranked;
  for (std::size_t i = 0; i < 4; ++i) top.insert(first["results"][i]["doc_id"].get<std::string>());
  for (const auto& d : refined["results"]) {
    reranked.insert(d["doc_id"].get<std::string>());
    EXPECT_TRUE(d.contains("rerank_score"));
    EXPECT_EQ(d["per_element_matches"].size(), refined["elements"].size());
  }
  EXPECT_EQ(top, reranked);
  expect_sorted(refined["results"]);
}

TEST(Engine, Errors) {
  auto code = [](auto fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::Io;
  };
  auto engine = fixture().engine();
  EXPECT_EQ(code([&] { engine->search(request("   ")); }), ErrorCode::EmptyClaim);
  EXPECT_EQ(code([&] { engine->search(request("lamp", 0)); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code([&] { engine->search(request("lamp", 5, 6)); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code([&] { engine->document("EP0000000A1"); }), ErrorCode::DocNotFound);

  SearchEngine empty(small_config());
  EXPECT_EQ(code([&] { empty.search(request("lamp")); }), ErrorCode::IndexNotLoaded);
  auto no_corpus = fixture().engine(small_config(), false);
  EXPECT_EQ(code([&] { no_corpus->search(request("lamp", 5, 2)); }), ErrorCode::IndexNotLoaded);
  EXPECT_EQ(code([&] { no_corpus->document("EP1000001A1"); }), ErrorCode::IndexNotLoaded);

  ServiceConfig other = small_config();
  other.embedder.dim = 128;
  SearchEngine mismatched(other);
  EXPECT_EQ(code([&] { mismatched.install(fixture().index, nullptr); }), ErrorCode::ProviderMismatch);
}

TEST(Engine, DocumentOverlayMatchesScoring) {
  auto engine = fixture().engine();
  auto outcome = engine->run_search(request(kHipClaim, 20, 0));
  Json d = engine->document("EP2000001A1", outcome.query_id);
  EXPECT_EQ(d["doc_id"], "EP2000001A1");
  EXPECT_EQ(d["overlay_status"], "ok");
  const Json& overlay = d["overlay"];
  const PatentDocument* doc = fixture().corpus->find("EP2000001A1");
  auto paragraphs = doc->all_paragraphs();
  ASSERT_EQ(overlay["paragraphs"].size(), paragraphs.size());
  ASSERT_EQ(overlay["similarities"].size(), outcome.query.elements.size());
  const ReferenceEmbedder& e = fixture().embedder;
  for (std::size_t i = 0; i < outcome.query.elements.size(); ++i) {
    auto ev = e.embed_text(outcome.query.elements[i].text);
    std::size_t best = 0;
    for (std::size_t p = 0; p < paragraphs.size(); ++p) {
      double direct = cosine(ev, e.embed_text(paragraphs[p].second->text));
      EXPECT_NEAR(overlay["similarities"][i][p].get<double>(), direct, 1e-12);
      if (direct > cosine(ev, e.embed_text(paragraphs[best].second->text))) best = p;
    }
    EXPECT_EQ(overlay["per_element_best"][i]["paragraph_index"], best);
  }
}

TEST(Engine, ExpiredQueryGivesEmptyOverlay) {
  ServiceConfig c = small_config();
  c.query_store_capacity = 1;
  auto engine = fixture().engine(c);
  auto first = engine->run_search(request("lamp battery"));
  engine->run_search(request("soil sensor"));
  Json d = engine->document("EP1000002A1", first.query_id);
  EXPECT_TRUE(d["overlay"].is_null());
  EXPECT_EQ(d["overlay_status"], "expired");
  EXPECT_FALSE(d["sections"].empty());
}

TEST(Engine, ReloadSwapsSnapshot) {
  TempDir dir("engine_reload");
  fixture().index->save(dir.file("index"));
  text::write_file(dir.file("corpus.jsonl"), [] {
    std::vector<PatentDocument> docs;
    for (const auto& [id, d] : fixture().corpus->documents()) docs.push_back(*d);
    return documents_to_jsonl(docs);
  }());
  ServiceConfig c = small_config();
  c.index_dir = dir.file("index");
  c.corpus_path = dir.file("corpus.jsonl");
  SearchEngine engine(c);
  EXPECT_FALSE(engine.health()["index_loaded"].get<bool>());
  engine.reload();
  Json h = engine.health();
  EXPECT_TRUE(h["index_loaded"].get<bool>());
  EXPECT_EQ(h["chunks"], fixture().index->size());
  EXPECT_EQ(h["documents"], fixture().corpus->size());
  auto before = engine.snapshot();
  EXPECT_THROW(engine.reload(dir.file("missing")), Error);
  EXPECT_EQ(engine.snapshot(), before);
}

TEST(Config, JsonAndEnvironment) {
  Json j = Json::parse(R"({"index": "/i", "corpus": "/c", "k": 10, "rerank_n": 5, "port": 9000,
                           "embedder": {"provider": "reference", "dim": 64},
                           "weighting": {"scheme": "custom", "weights": [1, 2]}})");
  ServiceConfig c = ServiceConfig::from_json(j);
  EXPECT_EQ(c.index_dir, "/i");
  EXPECT_EQ(c.k, 10u);
  EXPECT_EQ(c.embedder.dim, 64u);
  EXPECT_EQ(c.weighting.scheme, WeightingScheme::Custom);
  setenv("CLAIMSEARCH_K", "20", 1);
  setenv("CLAIMSEARCH_PORT", "9100", 1);
  c.apply_env();
  unsetenv("CLAIMSEARCH_K");
  unsetenv("CLAIMSEARCH_PORT");
  EXPECT_EQ(c.k, 20u);
  EXPECT_EQ(c.port, 9100);
  c.rerank_n = 50;
  EXPECT_THROW(c.validate(), Error);
  EXPECT_THROW(ServiceConfig::from_json(Json::parse(R"({"weighting": {"scheme": "magic"}})")), Error);
}

TEST(Http, ErrorMapping) {
  EXPECT_EQ(http_error_for(Error(ErrorCode::EmptyClaim, "x")).status, 400);
  EXPECT_EQ(http_error_for(Error(ErrorCode::DocNotFound, "x")).status, 404);
  EXPECT_EQ(http_error_for(Error(ErrorCode::IndexNotLoaded, "x")).status, 409);
  auto e = http_error_for(Error(ErrorCode::RemoteUnavailable, "down"));
  EXPECT_EQ(e.status, 502);
  EXPECT_EQ(e.body["error"], "EmbedderUnavailable");
  EXPECT_EQ(http_error_for(Error(ErrorCode::Io, "x")).status, 500);
}

TEST(Http, Endpoints) {
  auto engine = fixture().engine();
  HttpServer server(*engine);
  server.start("127.0.0.1", 0);
  httplib::Client client("127.0.0.1", server.bound_port());

  auto health = client.Get("/health");
  ASSERT_TRUE(health);
  EXPECT_EQ(health->status, 200);
  EXPECT_TRUE(Json::parse(health->body)["index_loaded"].get<bool>());
  EXPECT_EQ(health->get_header_value("Access-Control-Allow-Origin"), "*");

  Json body{{"claim_text", kHipClaim}, {"k", 10}, {"rerank_n", 3}};
  auto search = client.Post("/search", body.dump(), "application/json");
  ASSERT_TRUE(search);
  EXPECT_EQ(search->status, 200);
  Json r = Json::parse(search->body);
  EXPECT_EQ(r["results"].size(), 3u);
  expect_sorted(r["results"]);

  auto doc = client.Get(("/doc/EP1000001A1?query_id=" + r["query_id"].get<std::string>()).c_str());
  ASSERT_TRUE(doc);
  EXPECT_EQ(doc->status, 200);
  Json d = Json::parse(doc->body);
  EXPECT_EQ(d["overlay"]["similarities"].size(), r["elements"].size());

  auto missing = client.Get("/doc/EP0000000A1");
  ASSERT_TRUE(missing);
  EXPECT_EQ(missing->status, 404);
  EXPECT_EQ(Json::parse(missing->body)["error"], "DocNotFound");

  auto empty = client.Post("/search", R"({"claim_text": "  "})", "application/json");
  ASSERT_TRUE(empty);
  EXPECT_EQ(empty->status, 400);
  EXPECT_EQ(Json::parse(empty->body)["error"], "EmptyClaim");

  auto garbage = client.Post("/search", "not json", "application/json");
  ASSERT_TRUE(garbage);
  EXPECT_EQ(garbage->status, 400);

  auto negative = client.Post("/search", R"({"claim_text": "lamp", "k": -1})", "application/json");
  ASSERT_TRUE(negative);
  EXPECT_EQ(negative->status, 400);

  auto options = client.Options("/search");
  ASSERT_TRUE(options);
  EXPECT_EQ(options->status, 204);

  auto reload = client.Post("/index/reload", "", "application/json");
  ASSERT_TRUE(reload);
  EXPECT_EQ(reload->status, 409);

  server.stop();
  server.wait();
}

TEST(Http, NoIndexGives409) {
  SearchEngine engine(small_config());
  HttpServer server(engine);
  server.start("127.0.0.1", 0);
  httplib::Client client("127.0.0.1", server.bound_port());
  auto res = client.Post("/search", R"({"claim_text": "a lamp"})", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 409);
  EXPECT_EQ(Json::parse(res->body)["error"], "IndexNotLoaded");
  auto health = client.Get("/health");
  ASSERT_TRUE(health);
  EXPECT_EQ(health->status, 200);
  EXPECT_FALSE(Json::parse(health->body)["index_loaded"].get<bool>());
}
