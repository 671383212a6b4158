#pragma once

// Line-oriented TOML subset, enough for experiment configs: [section]
// headers, key = value pairs, numbers, booleans, double-quoted strings, and
// single-line arrays of those. Keys inside a section are exposed as dotted
// paths ("tolerances.step"). Parse errors carry file:line:column.

#include <map>
#include <string>
#include <vector>

namespace curvimg {

struct TomlValue {
  enum class Kind { kNumber, kBool, kString, kArray };

  Kind kind = Kind::kNumber;
  double number = 0;
  bool boolean = false;
  std::string str;
  std::vector<TomlValue> items;
  int line = 0;  // where the value was written, for diagnostics
};

using TomlTable = std::map<std::string, TomlValue>;

TomlTable parse_toml(const std::string& text, const std::string& origin);
TomlTable parse_toml_file(const std::string& path);

}  // namespace curvimg
