#include "corpus/xml.hpp"

#include <cstdint>
#include <cstring>

#include "common/error.hpp"
#include "common/text.hpp"

namespace claimsearch::xml {
namespace {

constexpr int kMaxDepth = 512;

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

struct NamedEntity {
  const char* name;
  std::uint32_t cp;
};

// Predefined XML entities plus the handful of HTML names seen in publication
// full text when the DTD is not available.
constexpr NamedEntity kEntities[] = {
    {"lt", '<'},      {"gt", '>'},       {"amp", '&'},      {"quot", '"'},     {"apos", '\''},
    {"nbsp", 0x20},     {"ndash", 0x2013}, {"mdash", 0x2014}, {"deg", 0xB0},     {"plusmn", 0xB1},
    {"times", 0xD7},  {"micro", 0xB5},   {"le", 0x2264},    {"ge", 0x2265},    {"lsquo", 0x2018},
    {"rsquo", 0x2019}, {"ldquo", 0x201C}, {"rdquo", 0x201D}, {"middot", 0xB7}, {"prime", 0x2032},
};

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  Node parse_document() {
    if (src_.substr(0, 3) == "\xEF\xBB\xBF") pos_ = 3;
    skip_misc();
    if (starts_with("<!DOCTYPE")) {
      skip_doctype();
      skip_misc();
    }
    if (!starts_with("<")) fail("expected root element");
    Node root = parse_element(0);
    skip_misc();
    if (pos_ != src_.size()) fail("content after root element");
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::MalformedXml, what + " at offset " + std::to_string(pos_));
  }

  bool starts_with(std::string_view s) const { return src_.substr(pos_, s.size()) == s; }

  void skip_space() {
    while (pos_ < src_.size() && text::is_space(src_[pos_])) ++pos_;
  }

  void expect(std::string_view s) {
    if (!starts_with(s)) fail("expected '" + std::string(s) + "'");
    pos_ += s.size();
  }

  std::size_t find_or_fail(std::string_view needle) const {
    std::size_t at = src_.find(needle, pos_);
    if (at == std::string_view::npos) fail("unterminated construct, missing '" + std::string(needle) + "'");
    return at;
  }

  // Comments, processing instructions and whitespace outside the root.
  void skip_misc() {
    while (true) {
      skip_space();
      if (starts_with("<!--")) {
        pos_ = find_or_fail("-->") + 3;
      } else if (starts_with("<?")) {
        pos_ = find_or_fail("?>") + 2;
      } else {
        return;
      }
    }
  }

  void skip_doctype() {
    pos_ += 9;
    int bracket = 0;
    while (pos_ < src_.size()) {
      char c = src_[pos_++];
      if (c == '[') {
        ++bracket;
      } else if (c == ']') {
        --bracket;
      } else if (c == '>' && bracket <= 0) {
        return;
      } else if (c == '"' || c == '\'') {
        std::size_t end = src_.find(c, pos_);
        if (end == std::string_view::npos) fail("unterminated DOCTYPE literal");
        pos_ = end + 1;
      }
    }
    fail("unterminated DOCTYPE");
  }

  std::string parse_name() {
    std::size_t start = pos_;
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (text::is_space(c) || c == '/' || c == '>' || c == '=' || c == '<' || c == '?') break;
      ++pos_;
    }
    if (pos_ == start) fail("expected name");
    return std::string(src_.substr(start, pos_ - start));
  }

  Node parse_element(int depth) {
    if (depth > kMaxDepth) fail("element nesting too deep");
    expect("<");
    Node node;
    node.kind = Node::Kind::Element;
    node.name = parse_name();
    while (true) {
      skip_space();
      if (pos_ >= src_.size()) fail("unterminated start tag");
      if (starts_with("/>")) {
        pos_ += 2;
        return node;
      }
      if (src_[pos_] == '>') {
        ++pos_;
        break;
      }
      std::string key = parse_name();
      skip_space();
      expect("=");
      skip_space();
      if (pos_ >= src_.size() || (src_[pos_] != '"' && src_[pos_] != '\'')) fail("expected quoted attribute value");
      char quote = src_[pos_++];
      std::size_t end = src_.find(quote, pos_);
      if (end == std::string_view::npos) fail("unterminated attribute value");
      std::string_view raw = src_.substr(pos_, end - pos_);
      if (raw.find('<') != std::string_view::npos) fail("'<' in attribute value");
      node.attributes.emplace_back(std::move(key), decode_entities(raw));
      pos_ = end + 1;
    }
    parse_content(node, depth);
    return node;
  }

  void append_text(Node& parent, std::string text) {
    if (text.empty()) return;
    if (!parent.children.empty() && parent.children.back().is_text()) {
      parent.children.back().text += text;
      return;
    }
    Node t;
    t.kind = Node::Kind::Text;
    t.text = std::move(text);
    parent.children.push_back(std::move(t));
  }

  void parse_content(Node& node, int depth) {
    while (true) {
      if (pos_ >= src_.size()) fail("missing end tag for <" + node.name + ">");
      std::size_t lt = src_.find('<', pos_);
      if (lt == std::string_view::npos) fail("missing end tag for <" + node.name + ">");
      if (lt > pos_) {
        append_text(node, decode_entities(src_.substr(pos_, lt - pos_)));
        pos_ = lt;
      }
      if (starts_with("</")) {
        pos_ += 2;
        std::string closing = parse_name();
        if (closing != node.name) fail("mismatched end tag </" + closing + "> for <" + node.name + ">");
        skip_space();
        expect(">");
        return;
      }
      if (starts_with("<!--")) {
        pos_ = find_or_fail("-->") + 3;
      } else if (starts_with("<![CDATA[")) {
        pos_ += 9;
        std::size_t end = find_or_fail("]]>");
        append_text(node, std::string(src_.substr(pos_, end - pos_)));
        pos_ = end + 3;
      } else if (starts_with("<?")) {
        pos_ += 2;
        Node pi;
        pi.kind = Node::Kind::Instruction;
        pi.name = parse_name();
        std::size_t end = find_or_fail("?>");
        pi.text = std::string(text::trim(src_.substr(pos_, end - pos_)));
        pos_ = end + 2;
        node.children.push_back(std::move(pi));
      } else if (starts_with("<!")) {
        fail("unexpected markup declaration");
      } else {
        node.children.push_back(parse_element(depth + 1));
      }
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

void collect_text(const Node& node, std::string& out) {
  if (node.kind == Node::Kind::Text) {
    out += node.text;
    return;
  }
  if (node.kind != Node::Kind::Element) return;
  for (const auto& c : node.children) collect_text(c, out);
}

}  // namespace

std::optional<std::string_view> Node::attr(std::string_view key) const {
  for (const auto& [k, v] : attributes) {
    if (k == key) return std::string_view(v);
  }
  return std::nullopt;
}

const Node* Node::child(std::string_view element_name) const {
  for (const auto& c : children) {
    if (c.is_element() && c.name == element_name) return &c;
  }
  return nullptr;
}

const Node* Node::find(std::string_view element_name) const {
  for (const auto& c : children) {
    if (!c.is_element()) continue;
    if (c.name == element_name) return &c;
    if (const Node* hit = c.find(element_name)) return hit;
  }
  return nullptr;
}

std::string Node::text_content() const {
  std::string out;
  collect_text(*this, out);
  return out;
}

Node parse(std::string_view bytes) { return Parser(bytes).parse_document(); }

std::vector<std::string_view> split_concatenated(std::string_view bytes) {
  std::vector<std::string_view> docs;
  std::size_t start = bytes.find("<?xml ");
  if (start == std::string_view::npos) {
    if (!text::trim(bytes).empty()) docs.push_back(bytes);
    return docs;
  }
  while (start != std::string_view::npos) {
    std::size_t next = bytes.find("<?xml ", start + 6);
    std::string_view doc = bytes.substr(start, next == std::string_view::npos ? std::string_view::npos : next - start);
    if (!text::trim(doc).empty()) docs.push_back(doc);
    start = next;
  }
  return docs;
}

std::string decode_entities(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (c != '&') {
      out.push_back(c);
      ++i;
      continue;
    }
    std::size_t semi = s.find(';', i + 1);
    if (semi == std::string_view::npos || semi - i > 12) {
      out.push_back(c);
      ++i;
      continue;
    }
    std::string_view ref = s.substr(i + 1, semi - i - 1);
    bool decoded = false;
    if (!ref.empty() && ref[0] == '#') {
      std::uint32_t cp = 0;
      bool hex = ref.size() > 1 && (ref[1] == 'x' || ref[1] == 'X');
      std::string_view digits = ref.substr(hex ? 2 : 1);
      bool ok = !digits.empty();
      for (char d : digits) {
        int v;
        if (d >= '0' && d <= '9') {
          v = d - '0';
        } else if (hex && d >= 'a' && d <= 'f') {
          v = d - 'a' + 10;
        } else if (hex && d >= 'A' && d <= 'F') {
          v = d - 'A' + 10;
        } else {
          ok = false;
          break;
        }
        cp = cp * (hex ? 16 : 10) + static_cast<std::uint32_t>(v);
        if (cp > 0x10FFFF) {
          ok = false;
          break;
        }
      }
      if (ok) {
        append_utf8(out, cp);
        decoded = true;
      }
    } else {
      for (const auto& e : kEntities) {
        if (ref == e.name) {
          append_utf8(out, e.cp);
          decoded = true;
          break;
        }
      }
    }
    if (decoded) {
      i = semi + 1;
    } else {
      out.append(s.substr(i, semi - i + 1));
      i = semi + 1;
    }
  }
  return out;
}

}  // namespace claimsearch::xml
