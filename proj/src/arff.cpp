#include "datalearner/arff.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "datalearner/error.hpp"

namespace datalearner {
namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v'; }

struct Token {
  std::string text;
  bool quoted = false;
};

/// Cursor over one physical line. '%' outside quotes ends the line.
class LineReader {
public:
  LineReader(std::string_view line, std::size_t line_no) : s_(line), line_no_(line_no) {}

  void skip_space() {
    while (pos_ < s_.size() && is_space(s_[pos_])) ++pos_;
  }

  bool at_end() {
    skip_space();
    return pos_ >= s_.size() || s_[pos_] == '%';
  }

  char peek() { return at_end() ? '\0' : s_[pos_]; }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  bool consume(char c) {
    if (peek() != c) return false;
    ++pos_;
    return true;
  }

  /// Reads a quoted token or a bare token that stops at whitespace or any of `stops`.
  Token token(std::string_view stops) {
    skip_space();
    if (pos_ >= s_.size()) fail("unexpected end of line");
    const char c = s_[pos_];
    if (c == '\'' || c == '"') return quoted(c);
    Token t;
    while (pos_ < s_.size() && !is_space(s_[pos_]) && s_[pos_] != '%' &&
           stops.find(s_[pos_]) == std::string_view::npos)
      t.text += s_[pos_++];
    return t;
  }

  /// Reads a value cell: quoted, or bare up to the next comma (inner spaces kept, edges trimmed).
  Token cell() {
    skip_space();
    if (pos_ < s_.size() && (s_[pos_] == '\'' || s_[pos_] == '"')) return quoted(s_[pos_]);
    Token t;
    while (pos_ < s_.size() && s_[pos_] != ',' && s_[pos_] != '%') t.text += s_[pos_++];
    while (!t.text.empty() && is_space(t.text.back())) t.text.pop_back();
    return t;
  }

  std::string rest() {
    skip_space();
    std::string out;
    while (pos_ < s_.size() && s_[pos_] != '%') out += s_[pos_++];
    while (!out.empty() && is_space(out.back())) out.pop_back();
    return out;
  }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(line_no_, what); }

private:
  Token quoted(char q) {
    Token t;
    t.quoted = true;
    ++pos_;
    while (pos_ < s_.size()) {
      char c = s_[pos_++];
      if (c == q) return t;
      if (c == '\\' && pos_ < s_.size()) {
        const char e = s_[pos_++];
        switch (e) {
          case 'n': t.text += '\n'; break;
          case 't': t.text += '\t'; break;
          case 'r': t.text += '\r'; break;
          default: t.text += e; break;
        }
        continue;
      }
      t.text += c;
    }
    fail("unterminated quote");
  }

  std::string_view s_;
  std::size_t line_no_;
  std::size_t pos_ = 0;
};

Attribute parse_attribute(LineReader& in, const std::set<std::string>& names) {
  Attribute a;
  Token name = in.token("{");
  if (name.text.empty()) in.fail("attribute name is empty");
  if (names.count(name.text)) in.fail("duplicate attribute name '" + name.text + "'");
  a.name = name.text;

  if (in.peek() == '{') {
    in.expect('{');
    a.kind = AttributeKind::nominal;
    std::set<std::string> seen;
    if (in.consume('}')) in.fail("nominal attribute '" + a.name + "' declares no values");
    while (true) {
      Token v = in.token(",}");
      if (v.text.empty() && !v.quoted) in.fail("empty nominal value in attribute '" + a.name + "'");
      if (!seen.insert(v.text).second) in.fail("duplicate nominal value '" + v.text + "'");
      a.values.push_back(v.text);
      if (in.consume(',')) continue;
      if (in.consume('}')) break;
      in.fail("expected ',' or '}' in nominal value list");
    }
    if (!in.at_end()) in.fail("unexpected text after nominal value list");
    return a;
  }

  const std::string type_text = in.rest();
  std::string type = lower(type_text.substr(0, type_text.find_first_of(" \t")));
  if (type == "numeric" || type == "real" || type == "integer") {
    a.kind = AttributeKind::numeric;
  } else if (type == "string") {
    a.kind = AttributeKind::string;
  } else if (type.empty()) {
    in.fail("missing type for attribute '" + a.name + "'");
  } else {
    in.fail("unsupported attribute type '" + type + "'");
  }
  return a;
}

double parse_number(std::string_view text, LineReader& in, const std::string& attr) {
  double v = 0;
  std::string_view s = text;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    in.fail("invalid numeric value '" + std::string(text) + "' for attribute '" + attr + "'");
  return v;
}

}  // namespace

Dataset parse_arff(std::string_view text) {
  std::string relation;
  std::vector<Attribute> attributes;
  std::set<std::string> names;
  bool in_data = false;
  Dataset ds;
  std::size_t line_no = 0;
  std::size_t pos = 0;

  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    LineReader in(line, line_no);
    if (in.at_end()) {
      if (end == text.size()) break;
      continue;
    }

    if (!in_data) {
      if (in.peek() != '@') in.fail("expected a declaration starting with '@'");
      Token kw = in.token("");
      const std::string key = lower(kw.text);
      if (key == "@relation") {
        relation = in.token("").text;
      } else if (key == "@attribute") {
        attributes.push_back(parse_attribute(in, names));
        names.insert(attributes.back().name);
      } else if (key == "@data") {
        if (attributes.empty()) in.fail("@data section before any @attribute declaration");
        ds = Dataset(relation, attributes);
        in_data = true;
      } else {
        in.fail("unknown declaration '" + kw.text + "'");
      }
    } else {
      if (in.peek() == '{') in.fail("sparse ARFF rows are not supported");
      Instance inst;
      inst.values.reserve(attributes.size());
      while (true) {
        Token cell = in.cell();
        if (inst.values.size() >= attributes.size())
          in.fail("row has more than " + std::to_string(attributes.size()) + " values");
        const Attribute& a = attributes[inst.values.size()];
        if (!cell.quoted && cell.text == "?") {
          inst.values.push_back(kMissing);
        } else if (a.is_numeric()) {
          inst.values.push_back(parse_number(cell.text, in, a.name));
        } else if (a.is_nominal()) {
          auto idx = a.value_index(cell.text);
          if (!idx) in.fail("value '" + cell.text + "' not declared for attribute '" + a.name + "'");
          inst.values.push_back(static_cast<double>(*idx));
        } else {
          inst.values.push_back(ds.intern(cell.text));
        }
        if (in.consume(',')) continue;
        if (!in.at_end()) in.fail("expected ',' between values");
        break;
      }
      if (inst.values.size() != attributes.size())
        in.fail("row has " + std::to_string(inst.values.size()) + " values, expected " +
                std::to_string(attributes.size()));
      ds.add(std::move(inst));
    }
    if (end == text.size()) break;
  }

  if (!in_data) throw ParseError(line_no, "missing @data section");
  return ds;
}

Dataset load_arff(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_arff(buf.str());
}

std::string quote_arff_token(std::string_view token) {
  bool needs = token.empty() || token == "?";
  for (char c : token) {
    if (is_space(c) || c == '\n' || c == ',' || c == '\'' || c == '"' || c == '%' || c == '{' || c == '}' ||
        c == '\\') {
      needs = true;
      break;
    }
  }
  if (!needs) return std::string(token);
  std::string out = "'";
  for (char c : token) {
    switch (c) {
      case '\'': out += "\\'"; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  out += '\'';
  return out;
}

namespace {

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

std::string write_arff(const Dataset& ds) {
  std::ostringstream out;
  out << "@relation " << quote_arff_token(ds.relation()) << "\n\n";
  for (const auto& a : ds.attributes()) {
    out << "@attribute " << quote_arff_token(a.name) << ' ';
    switch (a.kind) {
      case AttributeKind::numeric: out << "numeric"; break;
      case AttributeKind::string: out << "string"; break;
      case AttributeKind::nominal: {
        out << '{';
        for (std::size_t i = 0; i < a.values.size(); ++i) out << (i ? "," : "") << quote_arff_token(a.values[i]);
        out << '}';
        break;
      }
    }
    out << '\n';
  }
  out << "\n@data\n";
  for (const auto& inst : ds.instances()) {
    for (std::size_t c = 0; c < ds.num_attributes(); ++c) {
      if (c) out << ',';
      const double v = inst[c];
      const auto& a = ds.attribute(c);
      if (is_missing(v)) {
        out << '?';
      } else if (a.is_numeric()) {
        out << format_number(v);
      } else if (a.is_nominal()) {
        out << quote_arff_token(a.values[static_cast<std::size_t>(v)]);
      } else {
        out << quote_arff_token(ds.string_value(v));
      }
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace datalearner
