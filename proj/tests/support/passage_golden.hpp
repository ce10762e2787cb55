#pragma once

#include <string>
#include <vector>

#include "citations/passage.hpp"

namespace claimsearch::testing {

struct PassageGolden {
  std::string input;
  std::vector<PassageRef> kept;
  std::vector<DiscardedSegment> discarded;
};

inline std::vector<PassageGolden> passage_golden_cases() {
  using P = PassageRef;
  return {
      {"", {}, {}},
      {"page 3, line 5 - page 4, line 2", {}, {{"page 3, line 5 - page 4, line 2", "page_line"}}},
      {"paragraph [0002]", {P::paragraphs(2, 2)}, {}},
      {"paragraphs 2-23", {P::paragraphs(2, 23)}, {}},
      {"par. 2 - par. 23", {P::paragraphs(2, 23)}, {}},
      {"paras. 3-4", {P::paragraphs(3, 4)}, {}},
      {"paragraph 7", {P::paragraphs(7, 7)}, {}},
      {"[0005]-[0007]", {P::paragraphs(5, 7)}, {}},
      {"[0001]", {P::paragraphs(1, 1)}, {}},
      {"paragraph [0009] to paragraph [0011]", {P::paragraphs(9, 11)}, {}},
      {"paragraphs [0010], [0012]", {P::paragraphs(10, 10), P::paragraphs(12, 12)}, {}},
      {"paragraphs [0001] and [0003]", {P::paragraphs(1, 1), P::paragraphs(3, 3)}, {}},
      {"claim 1", {P::claims(1, 1)}, {}},
      {"claims 1-13", {P::claims(1, 13)}, {}},
      {"claims 1,3,5", {P::claims(1, 1), P::claims(3, 3), P::claims(5, 5)}, {}},
      {"claims 1 to 4", {P::claims(1, 4)}, {}},
      {"claims 1-3, 7", {P::claims(1, 3), P::claims(7, 7)}, {}},
      {"claims 1 and 2", {P::claims(1, 1), P::claims(2, 2)}, {}},
      {"Abstract", {P::abstract()}, {}},
      {"ABSTRACT", {P::abstract()}, {}},
      {"figures 1-3", {}, {{"figures 1-3", "figure"}}},
      {"fig. 2", {}, {{"fig. 2", "figure"}}},
      {"column 3, lines 5-10", {}, {{"column 3, lines 5-10", "page_line"}}},
      {"page 4", {}, {{"page 4", "page_line"}}},
      {"paragraphs [0023] - [0002]", {}, {{"paragraphs [0023] - [0002]", "invalid_range"}}},
      {"claims 5-2", {}, {{"claims 5-2", "invalid_range"}}},
      {"* the whole document *", {}, {{"* the whole document *", "unrecognized"}}},
      {"paragraph [0002]-[0004]; abstract", {P::paragraphs(2, 4), P::abstract()}, {}},
      {"  ; ; claim 2 ;", {P::claims(2, 2)}, {}},
      {"abstract; fig. 1; claims 1-2; page 7, line 3",
       {P::abstract(), P::claims(1, 2)},
       {{"fig. 1", "figure"}, {"page 7, line 3", "page_line"}}},
  };
}

}  // namespace claimsearch::testing
