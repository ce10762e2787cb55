#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace claimsearch {

struct TokenSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
  bool is_word = true;
};

// Contract for the token budget used by chunking and claim truncation.
// Implementations must be deterministic and must report byte spans into the
// input so that callers can cut text at token boundaries.
class TokenCounter {
 public:
  virtual ~TokenCounter() = default;

  virtual std::string name() const = 0;
  virtual std::vector<TokenSpan> tokenize(std::string_view text) const = 0;

  virtual std::size_t count(std::string_view text) const { return tokenize(text).size(); }
};

// Splits on whitespace and punctuation; every ASCII punctuation mark is its
// own token. Bytes >= 0x80 are word characters, so UTF-8 stays intact.
class ReferenceTokenCounter final : public TokenCounter {
 public:
  std::string name() const override { return "reference"; }
  std::vector<TokenSpan> tokenize(std::string_view text) const override;
  std::size_t count(std::string_view text) const override;
};

// Throws Error(ConfigError) for unknown names.
std::shared_ptr<const TokenCounter> make_token_counter(std::string_view name);

// Lower-cased word tokens only; punctuation is dropped.
std::vector<std::string> word_tokens(const TokenCounter& counter, std::string_view text);

}  // namespace claimsearch
