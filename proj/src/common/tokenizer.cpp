#include "common/tokenizer.hpp"

#include "common/error.hpp"
#include "common/text.hpp"

namespace claimsearch {
namespace {

bool is_ascii_punct(char c) noexcept {
  auto u = static_cast<unsigned char>(c);
  return (u >= 33 && u <= 47) || (u >= 58 && u <= 64) || (u >= 91 && u <= 96) || (u >= 123 && u <= 126);
}

template <typename Fn>
void scan_tokens(std::string_view text, Fn&& emit) {
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    char c = text[i];
    if (text::is_space(c) || static_cast<unsigned char>(c) < 32) {
      ++i;
      continue;
    }
    if (is_ascii_punct(c)) {
      emit(TokenSpan{i, i + 1, false});
      ++i;
      continue;
    }
    std::size_t start = i;
    while (i < n && !text::is_space(text[i]) && !is_ascii_punct(text[i]) &&
           static_cast<unsigned char>(text[i]) >= 32) {
      ++i;
    }
    emit(TokenSpan{start, i, true});
  }
}

}  // namespace

std::vector<TokenSpan> ReferenceTokenCounter::tokenize(std::string_view text) const {
  std::vector<TokenSpan> spans;
  scan_tokens(text, [&](const TokenSpan& s) { spans.push_back(s); });
  return spans;
}

std::size_t ReferenceTokenCounter::count(std::string_view text) const {
  std::size_t total = 0;
  scan_tokens(text, [&](const TokenSpan&) { ++total; });
  return total;
}

std::shared_ptr<const TokenCounter> make_token_counter(std::string_view name) {
  if (name.empty() || name == "reference") return std::make_shared<ReferenceTokenCounter>();
  throw Error(ErrorCode::ConfigError, "unknown token counter: " + std::string(name));
}

std::vector<std::string> word_tokens(const TokenCounter& counter, std::string_view text) {
  std::vector<std::string> out;
  for (const auto& span : counter.tokenize(text)) {
    if (!span.is_word) continue;
    out.push_back(text::to_lower_ascii(text.substr(span.begin, span.end - span.begin)));
  }
  return out;
}

}  // namespace claimsearch
