#include "citations/citation.hpp"

#include <algorithm>
#include <set>

#include "common/error.hpp"
#include "common/jsonl.hpp"
#include "common/text.hpp"

namespace claimsearch {
namespace {

constexpr SectionName kParagraphSearchOrder[] = {SectionName::Description, SectionName::Background,
                                                 SectionName::Summary, SectionName::CrossRef};
// Upper bound on the numbers walked for one range; examiner typos such as
// "paragraph [0001] - [99999]" must not blow up the skip report.
constexpr int kMaxRangeSpan = 10000;

const Paragraph* find_in(const Section& s, int number) {
  auto it = std::lower_bound(s.paragraphs.begin(), s.paragraphs.end(), number,
                             [](const Paragraph& p, int n) { return p.number < n; });
  if (it != s.paragraphs.end() && it->number == number) return &*it;
  return nullptr;
}

}  // namespace

std::string_view to_string(Category c) noexcept { return c == Category::X ? "X" : "A"; }

std::optional<Category> parse_category(std::string_view s) {
  std::string up = text::to_upper_ascii(text::trim(s));
  if (up == "X") return Category::X;
  if (up == "A") return Category::A;
  return std::nullopt;
}

Json to_json(const CitationRecord& r) {
  Json passages = Json::array();
  for (const auto& p : r.passages) {
    Json jp{{"kind", to_string(p.kind)}};
    jp["start"] = p.start ? Json(*p.start) : Json(nullptr);
    jp["end"] = p.end ? Json(*p.end) : Json(nullptr);
    passages.push_back(std::move(jp));
  }
  return Json{{"subject_doc_id", r.subject_doc_id},
              {"subject_claim_number", r.subject_claim_number},
              {"category", to_string(r.category)},
              {"cited_doc_id", r.cited_doc_id},
              {"passages", std::move(passages)},
              {"discarded", r.discarded}};
}

CitationRecord citation_from_json(const Json& j) {
  try {
    CitationRecord r;
    r.subject_doc_id = j.at("subject_doc_id").get<std::string>();
    r.subject_claim_number = j.value("subject_claim_number", 1);
    auto cat = parse_category(j.at("category").get<std::string>());
    if (!cat) throw Error(ErrorCode::InvalidArgument, "citation category must be X or A");
    r.category = *cat;
    r.cited_doc_id = j.at("cited_doc_id").get<std::string>();
    for (const auto& jp : j.value("passages", Json::array())) {
      auto kind = parse_passage_kind(jp.at("kind").get<std::string>());
      if (!kind) throw Error(ErrorCode::InvalidArgument, "unknown passage kind");
      PassageRef ref{*kind, std::nullopt, std::nullopt};
      if (jp.contains("start") && !jp["start"].is_null()) ref.start = jp["start"].get<int>();
      if (jp.contains("end") && !jp["end"].is_null()) ref.end = jp["end"].get<int>();
      r.passages.push_back(ref);
    }
    r.discarded = j.value("discarded", std::vector<std::string>{});
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("bad citation record: ") + e.what());
  }
}

Resolution resolve_passages(const CitationRecord& citation, const PatentDocument& doc) {
  if (citation.cited_doc_id != doc.doc_id) {
    throw Error(ErrorCode::DocMismatch, "citation targets " + citation.cited_doc_id + " but got " + doc.doc_id);
  }
  Resolution out;
  std::set<std::pair<SectionName, int>> emitted;
  auto emit = [&](SectionName s, const Paragraph& p) {
    if (emitted.emplace(s, p.number).second) out.passages.push_back({s, p.number, p.text});
  };

  for (const auto& ref : citation.passages) {
    switch (ref.kind) {
      case PassageKind::Abstract:
        for (const auto& s : doc.sections) {
          if (s.name != SectionName::Abstract) continue;
          for (const auto& p : s.paragraphs) emit(s.name, p);
        }
        break;
      case PassageKind::ClaimRange: {
        int a = ref.start.value_or(1);
        int b = std::min(ref.end.value_or(a), a + kMaxRangeSpan);
        for (int n = a; n <= b; ++n) {
          const Claim* c = doc.claim(n);
          if (c && !c->full_text.empty()) {
            emit(SectionName::Claims, Paragraph{n, c->full_text});
          } else {
            out.skipped_claims.push_back(n);
          }
        }
        break;
      }
      case PassageKind::ParagraphRange: {
        int a = ref.start.value_or(1);
        int b = std::min(ref.end.value_or(a), a + kMaxRangeSpan);
        std::vector<const Section*> order;
        auto add = [&](const Section& s) {
          if (std::find(order.begin(), order.end(), &s) == order.end()) order.push_back(&s);
        };
        for (SectionName name : kParagraphSearchOrder) {
          for (const auto& s : doc.sections) {
            if (order.empty() && s.name == name && find_in(s, a)) add(s);
          }
        }
        for (SectionName name : kParagraphSearchOrder) {
          for (const auto& s : doc.sections) {
            if (s.name == name) add(s);
          }
        }
        for (const auto& s : doc.sections) {
          if (s.name != SectionName::Abstract && s.name != SectionName::Claims) add(s);
        }
        for (int n = a; n <= b; ++n) {
          bool found = false;
          for (const Section* s : order) {
            if (const Paragraph* p = find_in(*s, n)) {
              emit(s->name, *p);
              found = true;
              break;
            }
          }
          if (!found) out.skipped_paragraphs.push_back(n);
        }
        break;
      }
    }
  }
  if (out.passages.empty()) {
    throw Error(ErrorCode::EmptyResolution,
                "no cited passage of " + doc.doc_id + " resolved for subject " + citation.subject_doc_id);
  }
  return out;
}

Json CitationIngest::summary() const {
  Json dropped = Json::object();
  for (const auto& [k, v] : dropped_category) dropped[k] = v;
  std::size_t x = 0, a = 0;
  for (const auto& r : records) (r.category == Category::X ? x : a)++;
  return Json{{"rows", rows},
              {"kept", records.size()},
              {"kept_x", x},
              {"kept_a", a},
              {"malformed_rows", malformed_rows},
              {"dropped_no_claim1", dropped_no_claim1},
              {"dropped_category", dropped},
              {"discarded_segments", discards.size()}};
}

CitationIngest ingest_citation_rows(const std::vector<std::map<std::string, std::string>>& rows) {
  CitationIngest out;
  for (const auto& row : rows) {
    ++out.rows;
    auto get = [&](const char* key) -> std::string {
      auto it = row.find(key);
      return it == row.end() ? std::string() : std::string(text::trim(it->second));
    };
    std::string subject = get("subject_doc_id");
    std::string cited = get("cited_doc_id");
    std::string category = get("category");
    if (subject.empty() || cited.empty() || category.empty()) {
      ++out.malformed_rows;
      continue;
    }
    auto cat = parse_category(category);
    if (!cat) {
      ++out.dropped_category[text::to_upper_ascii(category)];
      continue;
    }
    std::string claims = get("claim_numbers");
    bool has_claim1 = claims.empty();
    if (!claims.empty()) {
      auto ranges = parse_claim_number_list(claims);
      if (!ranges) {
        ++out.malformed_rows;
        continue;
      }
      for (auto [a, b] : *ranges) has_claim1 = has_claim1 || (a <= 1 && 1 <= b);
    }
    if (!has_claim1) {
      ++out.dropped_no_claim1;
      continue;
    }
    PassageField field = parse_passage_field(get("passage_field"));
    CitationRecord rec;
    rec.subject_doc_id = subject;
    rec.subject_claim_number = 1;
    rec.category = *cat;
    rec.cited_doc_id = cited;
    rec.passages = std::move(field.kept);
    for (auto& d : field.discarded) {
      rec.discarded.push_back(d.raw);
      out.discards.push_back({subject, cited, std::move(d)});
    }
    out.records.push_back(std::move(rec));
  }
  return out;
}

std::vector<std::vector<std::string>> parse_csv(std::string_view data) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_row = [&] {
    end_field();
    bool blank = row.size() == 1 && row[0].empty();
    if (!blank) rows.push_back(std::move(row));
    row.clear();
  };
  for (std::size_t i = 0; i < data.size(); ++i) {
    char c = data[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < data.size() && data[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    if (c == '"' && !field_started) {
      quoted = true;
      field_started = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\n') {
      end_row();
    } else if (c == '\r') {
      continue;
    } else {
      field.push_back(c);
      field_started = true;
    }
  }
  if (quoted) throw Error(ErrorCode::InvalidArgument, "unterminated quoted CSV field");
  if (!field.empty() || !row.empty()) end_row();
  return rows;
}

std::vector<std::map<std::string, std::string>> read_citation_table(const std::string& path) {
  std::vector<std::map<std::string, std::string>> out;
  bool jsonl = path.size() >= 6 && path.compare(path.size() - 6, 6, ".jsonl") == 0;
  if (jsonl) {
    for_each_jsonl(path, [&](const Json& j) {
      std::map<std::string, std::string> row;
      for (const auto& [k, v] : j.items()) row[k] = v.is_string() ? v.get<std::string>() : v.dump();
      out.push_back(std::move(row));
    });
    return out;
  }
  auto rows = parse_csv(text::read_file(path));
  if (rows.empty()) return out;
  const auto& header = rows.front();
  for (std::size_t r = 1; r < rows.size(); ++r) {
    std::map<std::string, std::string> row;
    for (std::size_t c = 0; c < header.size() && c < rows[r].size(); ++c) {
      row[std::string(text::trim(header[c]))] = rows[r][c];
    }
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<CitationRecord> load_citation_records(const std::string& jsonl_path) {
  std::vector<CitationRecord> out;
  for_each_jsonl(jsonl_path, [&](const Json& j) { out.push_back(citation_from_json(j)); });
  return out;
}

std::vector<CitationRecord> load_citations(const std::string& path) {
  bool raw_table = path.size() >= 4 && text::to_lower_ascii(path.substr(path.size() - 4)) == ".csv";
  if (!raw_table) {
    bool first = true;
    for_each_jsonl(path, [&](const Json& j) {
      if (first) raw_table = j.contains("passage_field");
      first = false;
    });
  }
  if (raw_table) return ingest_citation_rows(read_citation_table(path)).records;
  return load_citation_records(path);
}

}  // namespace claimsearch
