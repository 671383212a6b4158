#include "curvimg/toml_lite.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "curvimg/errors.hpp"

namespace curvimg {

namespace {

struct LineParser {
  const std::string& origin;
  const std::string& line;
  int lineno;
  size_t pos = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    std::ostringstream out;
    out << origin << ":" << lineno << ":" << (pos + 1) << ": " << msg;
    throw ConfigError(out.str());
  }

  void skip_ws() {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
  }

  bool done() {
    skip_ws();
    return pos == line.size() || line[pos] == '#';
  }

  std::string bare_key() {
    skip_ws();
    const size_t start = pos;
    while (pos < line.size() &&
           (std::isalnum(static_cast<unsigned char>(line[pos])) || line[pos] == '_' ||
            line[pos] == '-')) {
      ++pos;
    }
    if (pos == start) fail("expected a key");
    return line.substr(start, pos - start);
  }

  TomlValue value() {
    skip_ws();
    if (pos == line.size()) fail("expected a value");
    TomlValue v;
    v.line = lineno;
    const char c = line[pos];
    if (c == '"') {
      v.kind = TomlValue::Kind::kString;
      v.str = quoted_string();
      return v;
    }
    if (c == '[') {
      ++pos;
      v.kind = TomlValue::Kind::kArray;
      skip_ws();
      if (pos < line.size() && line[pos] == ']') {
        ++pos;
        return v;
      }
      for (;;) {
        v.items.push_back(value());
        skip_ws();
        if (pos < line.size() && line[pos] == ',') {
          ++pos;
          continue;
        }
        if (pos < line.size() && line[pos] == ']') {
          ++pos;
          return v;
        }
        fail("expected ',' or ']' in array");
      }
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const size_t start = pos;
      while (pos < line.size() && std::isalpha(static_cast<unsigned char>(line[pos]))) ++pos;
      const std::string word = line.substr(start, pos - start);
      if (word == "true" || word == "false") {
        v.kind = TomlValue::Kind::kBool;
        v.boolean = word == "true";
        return v;
      }
      pos = start;
      fail("unrecognized value '" + word + "'");
    }
    // Number: strtod accepts the usual integer and float spellings.
    const char* begin = line.c_str() + pos;
    char* end = nullptr;
    v.number = std::strtod(begin, &end);
    if (end == begin) fail("expected a number, string, boolean, or array");
    pos += static_cast<size_t>(end - begin);
    v.kind = TomlValue::Kind::kNumber;
    return v;
  }

  std::string quoted_string() {
    ++pos;  // opening quote
    std::string out;
    while (pos < line.size() && line[pos] != '"') {
      if (line[pos] == '\\' && pos + 1 < line.size()) {
        const char esc = line[pos + 1];
        if (esc == '"' || esc == '\\') {
          out += esc;
          pos += 2;
          continue;
        }
      }
      out += line[pos++];
    }
    if (pos == line.size()) fail("unterminated string");
    ++pos;  // closing quote
    return out;
  }
};

// Strips a comment that starts outside any string.
std::string strip_comment(const std::string& line) {
  bool in_string = false;
  for (size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) in_string = !in_string;
    if (line[i] == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

}  // namespace

TomlTable parse_toml(const std::string& text, const std::string& origin) {
  TomlTable table;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    const std::string line = strip_comment(raw);
    LineParser p{origin, line, lineno};
    if (p.done()) continue;
    p.skip_ws();
    if (line[p.pos] == '[') {
      ++p.pos;
      section = p.bare_key();
      p.skip_ws();
      if (p.pos == line.size() || line[p.pos] != ']') p.fail("expected ']'");
      ++p.pos;
      if (!p.done()) p.fail("unexpected text after section header");
      continue;
    }
    const std::string key = p.bare_key();
    p.skip_ws();
    if (p.pos == line.size() || line[p.pos] != '=') p.fail("expected '=' after key");
    ++p.pos;
    TomlValue v = p.value();
    if (!p.done()) p.fail("unexpected text after value");
    const std::string path = section.empty() ? key : section + "." + key;
    if (table.count(path)) p.fail("duplicate key '" + path + "'");
    table.emplace(path, std::move(v));
  }
  return table;
}

TomlTable parse_toml_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_toml(buf.str(), path);
}

}  // namespace curvimg
