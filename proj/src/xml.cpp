#include "simflow/xml.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace simflow::xml {

const std::string* Element::attr(std::string_view key) const {
  for (const auto& [k, v] : attrs) {
    if (k == key) return &v;
  }
  return nullptr;
}

const Element* Element::child(std::string_view name_) const {
  for (const auto& c : children) {
    if (c.name == name_) return &c;
  }
  return nullptr;
}

std::vector<const Element*> Element::children_named(std::string_view name_) const {
  std::vector<const Element*> out;
  for (const auto& c : children) {
    if (c.name == name_) out.push_back(&c);
  }
  return out;
}

namespace {

class Parser {
 public:
  explicit Parser(std::string_view doc) : s_(doc) {}

  Result<Element, ParseError> run() {
    skip_prolog();
    if (!ok_) return err_;
    skip_misc();
    if (!ok_) return err_;
    if (eof()) return fail("document has no root element");
    Element root;
    parse_element(root);
    if (!ok_) return err_;
    skip_misc();
    if (!ok_) return err_;
    if (!eof()) return fail("content after root element");
    return root;
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
  bool ok_ = true;
  ParseError err_;

  bool eof() const { return pos_ >= s_.size(); }
  char peek() const { return s_[pos_]; }
  bool starts_with(std::string_view t) const { return s_.compare(pos_, t.size(), t) == 0; }

  Result<Element, ParseError> fail(std::string msg) {
    ok_ = false;
    err_ = ParseError{pos_, std::move(msg)};
    return err_;
  }
  void fail_void(std::string msg) {
    if (ok_) {
      ok_ = false;
      err_ = ParseError{pos_, std::move(msg)};
    }
  }

  void skip_ws() {
    while (!eof() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
  }

  void skip_prolog() {
    skip_ws();
    if (starts_with("<?xml")) {
      std::size_t end = s_.find("?>", pos_);
      if (end == std::string_view::npos) {
        fail_void("unterminated xml declaration");
        return;
      }
      pos_ = end + 2;
    }
  }

  // Whitespace and comments between markup at the document level.
  void skip_misc() {
    for (;;) {
      skip_ws();
      if (starts_with("<!--")) {
        skip_comment();
        if (!ok_) return;
        continue;
      }
      if (starts_with("<!")) {
        fail_void("DOCTYPE and other declarations are not supported");
        return;
      }
      if (starts_with("<?")) {
        fail_void("processing instructions are not supported");
        return;
      }
      return;
    }
  }

  void skip_comment() {
    std::size_t end = s_.find("-->", pos_ + 4);
    if (end == std::string_view::npos) {
      fail_void("unterminated comment");
      return;
    }
    pos_ = end + 3;
  }

  bool is_name_char(char c) const {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.' || c == ':';
  }

  std::string parse_name() {
    std::size_t start = pos_;
    while (!eof() && is_name_char(peek())) ++pos_;
    if (pos_ == start) fail_void("expected a name");
    return std::string(s_.substr(start, pos_ - start));
  }

  std::string decode_entities(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size();) {
      if (raw[i] != '&') {
        out.push_back(raw[i++]);
        continue;
      }
      std::size_t semi = raw.find(';', i);
      if (semi == std::string_view::npos) {
        fail_void("unterminated entity reference");
        return out;
      }
      std::string_view ent = raw.substr(i + 1, semi - i - 1);
      if (ent == "amp") out.push_back('&');
      else if (ent == "lt") out.push_back('<');
      else if (ent == "gt") out.push_back('>');
      else if (ent == "quot") out.push_back('"');
      else if (ent == "apos") out.push_back('\'');
      else {
        fail_void("unknown entity: &" + std::string(ent) + ";");
        return out;
      }
      i = semi + 1;
    }
    return out;
  }

  void parse_attrs(Element& el) {
    for (;;) {
      skip_ws();
      if (eof()) {
        fail_void("unterminated start tag");
        return;
      }
      if (peek() == '>' || peek() == '/') return;
      std::string key = parse_name();
      if (!ok_) return;
      skip_ws();
      if (eof() || peek() != '=') {
        fail_void("expected '=' after attribute name");
        return;
      }
      ++pos_;
      skip_ws();
      if (eof() || (peek() != '"' && peek() != '\'')) {
        fail_void("expected quoted attribute value");
        return;
      }
      char quote = peek();
      ++pos_;
      std::size_t end = s_.find(quote, pos_);
      if (end == std::string_view::npos) {
        fail_void("unterminated attribute value");
        return;
      }
      std::string_view raw = s_.substr(pos_, end - pos_);
      if (raw.find('<') != std::string_view::npos) {
        fail_void("'<' in attribute value");
        return;
      }
      std::string value = decode_entities(raw);
      if (!ok_) return;
      for (const auto& [k, _] : el.attrs) {
        if (k == key) {
          fail_void("duplicate attribute: " + key);
          return;
        }
      }
      el.attrs.emplace_back(std::move(key), std::move(value));
      pos_ = end + 1;
    }
  }

  void parse_element(Element& el) {
    if (eof() || peek() != '<') {
      fail_void("expected '<'");
      return;
    }
    ++pos_;
    el.name = parse_name();
    if (!ok_) return;
    parse_attrs(el);
    if (!ok_) return;
    if (peek() == '/') {
      ++pos_;
      if (eof() || peek() != '>') {
        fail_void("malformed empty-element tag");
        return;
      }
      ++pos_;
      return;
    }
    ++pos_;  // '>'
    parse_content(el);
    if (!ok_) return;
    // Closing tag: parse_content stops right after "</".
    std::string close = parse_name();
    if (!ok_) return;
    if (close != el.name) {
      fail_void("mismatched closing tag: expected </" + el.name + ">, got </" + close + ">");
      return;
    }
    skip_ws();
    if (eof() || peek() != '>') {
      fail_void("malformed closing tag");
      return;
    }
    ++pos_;
  }

  void parse_content(Element& el) {
    std::string text;
    for (;;) {
      if (eof()) {
        fail_void("unexpected end of document inside <" + el.name + ">");
        return;
      }
      if (peek() == '<') {
        if (starts_with("</")) {
          pos_ += 2;
          el.text = decode_entities(text);
          return;
        }
        if (starts_with("<!--")) {
          skip_comment();
          if (!ok_) return;
          continue;
        }
        if (starts_with("<!") || starts_with("<?")) {
          fail_void("unsupported markup inside <" + el.name + ">");
          return;
        }
        Element child;
        parse_element(child);
        if (!ok_) return;
        el.children.push_back(std::move(child));
        continue;
      }
      text.push_back(peek());
      ++pos_;
    }
  }
};

void write_element(std::ostringstream& out, const Element& el, int depth) {
  std::string indent(static_cast<std::size_t>(depth) * 2, ' ');
  out << indent << '<' << el.name;
  for (const auto& [k, v] : el.attrs) out << ' ' << k << "=\"" << escape(v) << '"';
  std::string trimmed;
  for (char c : el.text) {
    if (!std::isspace(static_cast<unsigned char>(c)) || !trimmed.empty()) trimmed.push_back(c);
  }
  while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.back()))) trimmed.pop_back();
  if (el.children.empty() && trimmed.empty()) {
    out << "/>\n";
    return;
  }
  out << '>';
  if (!trimmed.empty()) out << escape(trimmed);
  if (!el.children.empty()) {
    out << '\n';
    for (const auto& c : el.children) write_element(out, c, depth + 1);
    out << indent;
  }
  out << "</" << el.name << ">\n";
}

}  // namespace

Result<Element, ParseError> parse(std::string_view doc) {
  return Parser(doc).run();
}

Result<Element, ParseError> parse_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return ParseError{0, "cannot open file: " + path.string()};
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string content = buf.str();
  return parse(content);
}

std::string escape(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  for (char c : raw) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string serialize(const Element& root, const std::string& header_comment) {
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  if (!header_comment.empty()) out << "<!-- " << header_comment << " -->\n";
  write_element(out, root, 0);
  return out.str();
}

}  // namespace simflow::xml
