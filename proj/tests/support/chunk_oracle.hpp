#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "citations/citation.hpp"
#include "common/rng.hpp"
#include "dataset/chunker.hpp"

namespace claimsearch::testing {

// A synthetic paragraph described by its sentence lengths in words. Every
// sentence ends with '.', so under the reference counter it costs words + 1
// tokens.
struct SynthParagraph {
  SectionName section = SectionName::Description;
  int number = 0;
  std::vector<std::size_t> sentence_words;
  std::string text;

  std::size_t tokens() const {
    std::size_t n = 0;
    for (std::size_t w : sentence_words) n += w + 1;
    return n;
  }
};

struct OracleChunk {
  SectionName section = SectionName::Unknown;
  std::vector<int> numbers;
  int piece = 0;
  std::size_t tokens = 0;
};

inline std::vector<SynthParagraph> synth_section_run(SplitMix64& rng, std::size_t max_paragraphs) {
  const SectionName names[] = {SectionName::Abstract, SectionName::Background, SectionName::Summary,
                               SectionName::Description, SectionName::Claims};
  std::vector<SynthParagraph> out;
  std::size_t n = rng.uniform(max_paragraphs + 1);
  SectionName section = names[rng.uniform(5)];
  int number = 1;
  std::size_t word_id = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (rng.uniform(4) == 0) {
      section = names[rng.uniform(5)];
      number = 1;
    }
    SynthParagraph p;
    p.section = section;
    p.number = number++;
    std::size_t kind = rng.uniform(10);
    std::size_t sentences = kind < 7 ? 1 + rng.uniform(8) : 5 + rng.uniform(40);
    for (std::size_t s = 0; s < sentences; ++s) {
      // Occasional very long sentences force hard cuts.
      std::size_t w = rng.uniform(20) == 0 ? 520 + rng.uniform(700) : 1 + rng.uniform(40);
      p.sentence_words.push_back(w);
      for (std::size_t k = 0; k < w; ++k) {
        if (!p.text.empty()) p.text += ' ';
        p.text += "t" + std::to_string(word_id++ % 997);
      }
      p.text += '.';
    }
    out.push_back(std::move(p));
  }
  return out;
}

inline std::vector<ResolvedPassage> to_passages(const std::vector<SynthParagraph>& ps) {
  std::vector<ResolvedPassage> out;
  for (const auto& p : ps) out.push_back({p.section, p.number, p.text});
  return out;
}

// Greedy packing computed from token counts alone.
inline std::vector<OracleChunk> oracle_chunks(const std::vector<SynthParagraph>& ps, std::size_t limit) {
  std::vector<OracleChunk> out;
  OracleChunk open;
  bool has_open = false;
  auto flush = [&] {
    if (has_open) out.push_back(open);
    has_open = false;
  };
  for (const auto& p : ps) {
    if (has_open && open.section != p.section) flush();
    std::size_t total = p.tokens();
    if (total > limit) {
      flush();
      std::vector<std::size_t> queue;
      for (std::size_t w : p.sentence_words) queue.push_back(w + 1);
      std::size_t head = 0;
      int piece = 0;
      while (head < queue.size()) {
        std::size_t acc = 0, k = head;
        while (k < queue.size() && acc + queue[k] <= limit) acc += queue[k++];
        if (k == head) {
          queue[head] -= limit;
          out.push_back({p.section, {p.number}, piece++, limit});
        } else {
          out.push_back({p.section, {p.number}, piece++, acc});
          head = k;
        }
      }
      continue;
    }
    if (has_open && open.tokens + total <= limit) {
      open.numbers.push_back(p.number);
      open.tokens += total;
      continue;
    }
    flush();
    open = {p.section, {p.number}, 0, total};
    has_open = true;
  }
  flush();
  return out;
}

}  // namespace claimsearch::testing
