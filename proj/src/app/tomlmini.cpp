#include "opstat/tomlmini.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "opstat/errors.hpp"

namespace opstat::app {
namespace {

using nlohmann::json;

[[noreturn]] void fail(int line, const std::string& what) {
  std::ostringstream msg;
  msg << "TOML line " << line << ": " << what;
  throw ValidationError(msg.str());
}

std::string strip(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

// Removes a trailing comment that is not inside a string.
std::string strip_comment(const std::string& s) {
  bool in_str = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"' && (i == 0 || s[i - 1] != '\\')) in_str = !in_str;
    if (s[i] == '#' && !in_str) return s.substr(0, i);
  }
  return s;
}

json parse_scalar(const std::string& raw, int line) {
  const std::string v = strip(raw);
  if (v.empty()) fail(line, "empty value");
  if (v.front() == '"') {
    if (v.size() < 2 || v.back() != '"') fail(line, "unterminated string");
    std::string out;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
      if (v[i] == '\\' && i + 2 < v.size()) {
        ++i;
        switch (v[i]) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          default: fail(line, "unsupported escape sequence");
        }
      } else {
        out += v[i];
      }
    }
    return json(out);
  }
  if (v == "true") return json(true);
  if (v == "false") return json(false);
  // integer?
  {
    bool ok = !v.empty();
    std::size_t start = (v[0] == '+' || v[0] == '-') ? 1 : 0;
    if (start == v.size()) ok = false;
    for (std::size_t i = start; i < v.size() && ok; ++i)
      if (!std::isdigit(static_cast<unsigned char>(v[i]))) ok = false;
    if (ok) {
      try {
        return json(std::stoll(v));
      } catch (...) {
        fail(line, "integer out of range: " + v);
      }
    }
  }
  // float
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used == v.size()) return json(x);
  } catch (...) {
  }
  fail(line, "cannot parse value: " + v);
}

json parse_value(const std::string& raw, int line) {
  const std::string v = strip(raw);
  if (!v.empty() && v.front() == '[') {
    if (v.back() != ']') fail(line, "unterminated array");
    json arr = json::array();
    std::string body = v.substr(1, v.size() - 2);
    std::string cur;
    bool in_str = false;
    for (const char c : body) {
      if (c == '"') in_str = !in_str;
      if (c == ',' && !in_str) {
        if (!strip(cur).empty()) arr.push_back(parse_scalar(cur, line));
        cur.clear();
      } else {
        cur += c;
      }
    }
    if (!strip(cur).empty()) arr.push_back(parse_scalar(cur, line));
    return arr;
  }
  return parse_scalar(v, line);
}

}  // namespace

json parse_toml_text(const std::string& text) {
  json root = json::object();
  json* table = &root;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = strip(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(line_no, "unterminated table header");
      const std::string name = strip(line.substr(1, line.size() - 2));
      if (name.empty()) fail(line_no, "empty table name");
      table = &root;
      std::istringstream parts(name);
      std::string part;
      while (std::getline(parts, part, '.')) {
        part = strip(part);
        if (part.empty()) fail(line_no, "empty table name component");
        table = &(*table)[part];
        if (!table->is_object() && !table->is_null())
          fail(line_no, "table name collides with a value: " + part);
        if (table->is_null()) *table = json::object();
      }
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) fail(line_no, "expected key = value");
    const std::string key = strip(line.substr(0, eq));
    if (key.empty()) fail(line_no, "empty key");
    (*table)[key] = parse_value(line.substr(eq + 1), line_no);
  }
  return root;
}

json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const bool is_json = path.size() >= 5 && path.substr(path.size() - 5) == ".json";
  if (is_json) {
    try {
      json doc = json::parse(buf.str());
      if (!doc.is_object())
        throw ValidationError(path + ": config root must be an object");
      return doc;
    } catch (const json::parse_error& e) {
      throw ValidationError(path + ": invalid JSON: " + e.what());
    }
  }
  try {
    return parse_toml_text(buf.str());
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

}  // namespace opstat::app
