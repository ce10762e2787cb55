#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace claimsearch::xml {

// Small DOM for the patent publication formats. Comments are dropped, CDATA
// becomes text, and processing instructions are kept because the USPTO
// format uses them as section markers.
struct Node {
  enum class Kind { Element, Text, Instruction };

  Kind kind = Kind::Element;
  std::string name;  // element name or instruction target
  std::string text;  // text content or instruction body
  std::vector<std::pair<std::string, std::string>> attributes;
  std::vector<Node> children;

  bool is_element() const noexcept { return kind == Kind::Element; }
  bool is_text() const noexcept { return kind == Kind::Text; }

  std::optional<std::string_view> attr(std::string_view key) const;
  const Node* child(std::string_view element_name) const;
  // Depth-first search for the first descendant element with this name.
  const Node* find(std::string_view element_name) const;

  // Concatenated text of this node and all descendants, in document order.
  std::string text_content() const;
};

// Parses one XML document and returns its root element. Throws
// Error(MalformedXml) with the byte offset of the first problem.
Node parse(std::string_view bytes);

// Splits a concatenation of XML documents (the bulk-archive layout) at each
// XML declaration. Input without declarations is returned as one entry.
std::vector<std::string_view> split_concatenated(std::string_view bytes);

// Decodes predefined, numeric, and common HTML-style entity references.
// Unknown references are kept verbatim.
std::string decode_entities(std::string_view s);

}  // namespace claimsearch::xml
