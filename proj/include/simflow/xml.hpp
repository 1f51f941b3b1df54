#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "simflow/result.hpp"

namespace simflow::xml {

// Strict parser for the XML subset the engine reads and writes: one root
// element, attributes, character data, comments, an optional declaration.
// DOCTYPE, processing instructions (other than the xml declaration) and
// CDATA are rejected.
struct Element {
  std::string name;
  std::vector<std::pair<std::string, std::string>> attrs;  // ordered
  std::vector<Element> children;
  std::string text;  // concatenated character data directly inside

  const std::string* attr(std::string_view key) const;
  const Element* child(std::string_view name) const;
  std::vector<const Element*> children_named(std::string_view name) const;

  bool operator==(const Element&) const = default;
};

struct ParseError {
  std::size_t offset = 0;
  std::string message;
};

Result<Element, ParseError> parse(std::string_view doc);
Result<Element, ParseError> parse_file(const std::filesystem::path& path);

std::string escape(std::string_view raw);

// Serializes with an xml declaration, 2-space indentation and a trailing
// newline. Attribute order is preserved.
std::string serialize(const Element& root, const std::string& header_comment = "");

}  // namespace simflow::xml
