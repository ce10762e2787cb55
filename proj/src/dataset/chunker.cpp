#include "dataset/chunker.hpp"

#include "common/error.hpp"
#include "common/text.hpp"

namespace claimsearch {
namespace {

struct Piece {
  std::string text;
  std::size_t tokens;
};

// Splits one oversized paragraph into pieces of at most `limit` tokens.
std::vector<Piece> split_paragraph(std::string_view para, std::size_t limit, const TokenCounter& counter) {
  std::vector<Piece> pieces;
  std::vector<std::size_t> bounds = sentence_boundaries(para);
  std::size_t start = 0;
  while (start < para.size()) {
    std::string_view rest = text::trim(para.substr(start));
    if (rest.empty()) break;
    start = static_cast<std::size_t>(rest.data() - para.data());
    std::size_t rest_tokens = counter.count(rest);
    if (rest_tokens <= limit) {
      pieces.push_back({std::string(rest), rest_tokens});
      break;
    }
    // Last sentence boundary after `start` whose prefix still fits.
    std::size_t cut = 0;
    std::size_t cut_tokens = 0;
    for (std::size_t b : bounds) {
      if (b <= start) continue;
      std::size_t n = counter.count(para.substr(start, b - start));
      if (n > limit) break;
      cut = b;
      cut_tokens = n;
    }
    if (cut == 0) {
      auto spans = counter.tokenize(para.substr(start));
      cut = start + spans[limit - 1].end;
      cut_tokens = limit;
    }
    std::string_view piece = text::trim(para.substr(start, cut - start));
    pieces.push_back({std::string(piece), cut_tokens});
    start = cut;
  }
  return pieces;
}

}  // namespace

void ChunkerConfig::validate() const {
  if (max_seq_length < 16) {
    throw Error(ErrorCode::ConfigError, "max_seq_length must be >= 16, got " + std::to_string(max_seq_length));
  }
}

std::string ChunkRef::key() const {
  std::string k = doc_id;
  k += '|';
  k += to_string(section);
  for (int n : paragraph_numbers) {
    k += '|';
    k += std::to_string(n);
  }
  k += '#';
  k += std::to_string(piece);
  return k;
}

Json to_json(const ChunkRef& ref) {
  return Json{{"doc_id", ref.doc_id},
              {"section", to_string(ref.section)},
              {"paragraph_numbers", ref.paragraph_numbers},
              {"piece", ref.piece}};
}

ChunkRef chunk_ref_from_json(const Json& j) {
  ChunkRef ref;
  ref.doc_id = j.at("doc_id").get<std::string>();
  ref.section = parse_section_name(j.at("section").get<std::string>()).value_or(SectionName::Unknown);
  ref.paragraph_numbers = j.at("paragraph_numbers").get<std::vector<int>>();
  ref.piece = j.value("piece", 0);
  return ref;
}

std::vector<std::size_t> sentence_boundaries(std::string_view t) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    char c = t[i];
    if ((c == '.' || c == '!' || c == '?') && text::is_space(t[i + 1])) out.push_back(i + 1);
  }
  return out;
}

std::vector<Chunk> chunk_passages(std::string_view doc_id, const std::vector<ResolvedPassage>& passages,
                                  const ChunkerConfig& config, const TokenCounter& counter) {
  config.validate();
  const std::size_t limit = config.max_seq_length;
  std::vector<Chunk> chunks;
  Chunk open;
  bool has_open = false;

  auto flush = [&] {
    if (has_open) chunks.push_back(std::move(open));
    open = Chunk{};
    has_open = false;
  };

  for (const auto& p : passages) {
    std::string_view body = text::trim(p.text);
    if (body.empty()) continue;
    if (has_open && open.section != p.section) flush();

    std::size_t tokens = counter.count(body);
    if (tokens > limit) {
      flush();
      int piece_no = 0;
      for (auto& piece : split_paragraph(body, limit, counter)) {
        chunks.push_back(Chunk{std::string(doc_id), p.section, {p.number}, piece_no++, std::move(piece.text),
                               piece.tokens});
      }
      continue;
    }
    if (has_open) {
      std::string candidate = open.text + "\n" + std::string(body);
      std::size_t candidate_tokens = counter.count(candidate);
      if (candidate_tokens <= limit) {
        open.text = std::move(candidate);
        open.token_count = candidate_tokens;
        open.paragraph_numbers.push_back(p.number);
        continue;
      }
      flush();
    }
    open = Chunk{std::string(doc_id), p.section, {p.number}, 0, std::string(body), tokens};
    has_open = true;
  }
  flush();
  return chunks;
}

std::vector<Chunk> chunk_document(const PatentDocument& doc, const ChunkerConfig& config,
                                  const TokenCounter& counter) {
  std::vector<ResolvedPassage> passages;
  for (const auto& s : doc.sections) {
    for (const auto& p : s.paragraphs) passages.push_back({s.name, p.number, p.text});
  }
  return chunk_passages(doc.doc_id, passages, config, counter);
}

}  // namespace claimsearch
