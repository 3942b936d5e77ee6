#include "cardsim/toml_lite.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

namespace cardsim::toml {
namespace {

using nlohmann::json;

[[noreturn]] void fail(int line, const std::string& msg) {
  throw ParseError("line " + std::to_string(line) + ": " + msg);
}

bool is_key_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

// One line at a time; pos_ walks the current line only.
class LineParser {
 public:
  LineParser(std::string_view line, int number) : line_(line), num_(number) {}

  void skip_ws() {
    while (pos_ < line_.size() && (line_[pos_] == ' ' || line_[pos_] == '\t')) ++pos_;
  }

  bool at_end() {
    skip_ws();
    return pos_ >= line_.size();
  }

  char peek() const { return pos_ < line_.size() ? line_[pos_] : '\0'; }

  void expect(char c, const char* what) {
    skip_ws();
    if (pos_ >= line_.size() || line_[pos_] != c) fail(num_, std::string("expected ") + what);
    ++pos_;
  }

  bool consume(char c) {
    skip_ws();
    if (pos_ < line_.size() && line_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  std::string key() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < line_.size() && is_key_char(line_[pos_])) ++pos_;
    if (pos_ == start) fail(num_, "expected a key");
    return std::string(line_.substr(start, pos_ - start));
  }

  json value() {
    skip_ws();
    if (pos_ >= line_.size()) fail(num_, "expected a value");
    char c = line_[pos_];
    if (c == '"') return string_value();
    if (c == '[') return array_value();
    if (c == '{') return table_value();
    return scalar_value();
  }

  int line_number() const { return num_; }

 private:
  json string_value() {
    ++pos_;  // opening quote
    std::string out;
    while (pos_ < line_.size()) {
      char c = line_[pos_++];
      if (c == '"') return json(out);
      if (c == '\\') {
        if (pos_ >= line_.size()) break;
        char e = line_[pos_++];
        switch (e) {
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case 'r': out += '\r'; break;
          default: fail(num_, std::string("unknown escape \\") + e);
        }
      } else {
        out += c;
      }
    }
    fail(num_, "unterminated string");
  }

  json array_value() {
    ++pos_;  // '['
    json arr = json::array();
    if (consume(']')) return arr;
    while (true) {
      arr.push_back(value());
      if (consume(']')) return arr;
      if (!consume(',')) fail(num_, "expected ',' or ']' in array");
    }
  }

  json table_value() {
    ++pos_;  // '{'
    json obj = json::object();
    if (consume('}')) return obj;
    while (true) {
      std::string k = key();
      expect('=', "'='");
      if (obj.contains(k)) fail(num_, "duplicate key '" + k + "'");
      obj[k] = value();
      if (consume('}')) return obj;
      if (!consume(',')) fail(num_, "expected ',' or '}' in inline table");
    }
  }

  json scalar_value() {
    std::size_t start = pos_;
    while (pos_ < line_.size()) {
      char c = line_[pos_];
      if (c == ',' || c == ']' || c == '}' || c == ' ' || c == '\t') break;
      ++pos_;
    }
    std::string tok(line_.substr(start, pos_ - start));
    if (tok.empty()) fail(num_, "expected a value");
    if (tok == "true") return json(true);
    if (tok == "false") return json(false);
    if (tok == "inf" || tok == "+inf") return json(std::numeric_limits<double>::infinity());
    if (tok == "-inf") return json(-std::numeric_limits<double>::infinity());
    if (tok == "nan") return json(std::numeric_limits<double>::quiet_NaN());

    // from_chars rejects a leading '+'; strip it (TOML allows it).
    std::string body = tok[0] == '+' ? tok.substr(1) : tok;
    if (body.empty()) fail(num_, "invalid value: " + tok);

    bool integral = true;
    for (std::size_t i = 0; i < body.size(); ++i) {
      char c = body[i];
      if (i == 0 && c == '-') continue;
      if (!std::isdigit(static_cast<unsigned char>(c))) {
        integral = false;
        break;
      }
    }
    const char* first = body.data();
    const char* last = body.data() + body.size();
    if (integral) {
      long long v = 0;
      auto [ptr, ec] = std::from_chars(first, last, v);
      if (ec != std::errc() || ptr != last) fail(num_, "integer out of range: " + tok);
      return json(v);
    }
    double d = 0;
    auto [ptr, ec] = std::from_chars(first, last, d);
    if (ec != std::errc() || ptr != last) fail(num_, "invalid value: " + tok);
    return json(d);
  }

  std::string_view line_;
  std::size_t pos_ = 0;
  int num_;
};

// Cut a '#' comment, honoring quotes. Escapes only matter inside strings.
std::string_view strip_comment(std::string_view line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (in_string) {
      if (c == '\\') ++i;
      else if (c == '"') in_string = false;
    } else if (c == '"') {
      in_string = true;
    } else if (c == '#') {
      return line.substr(0, i);
    }
  }
  return line;
}

std::vector<std::string> header_path(LineParser& lp, bool double_bracket) {
  std::vector<std::string> keys;
  keys.push_back(lp.key());
  while (lp.consume('.')) keys.push_back(lp.key());
  lp.expect(']', "']'");
  if (double_bracket) lp.expect(']', "']]'");
  if (!lp.at_end()) fail(lp.line_number(), "unexpected text after table header");
  return keys;
}

// Walk to (and create) the table a header names. Passing through an array
// of tables descends into its newest element.
json* resolve_header(json& root, const std::vector<std::string>& keys,
                     bool array_of_tables, int line) {
  json* cur = &root;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    const std::string& k = keys[i];
    bool last = (i + 1 == keys.size());
    json& slot = (*cur)[k];
    if (last && array_of_tables) {
      if (slot.is_null()) slot = json::array();
      if (!slot.is_array()) fail(line, "'" + k + "' is already a non-array value");
      slot.push_back(json::object());
      cur = &slot.back();
    } else {
      if (slot.is_null()) slot = json::object();
      if (slot.is_array()) {
        if (last) fail(line, "'" + k + "' is an array of tables; use [[" + k + "]]");
        if (slot.empty() || !slot.back().is_object())
          fail(line, "cannot descend into array '" + k + "'");
        cur = &slot.back();
      } else if (slot.is_object()) {
        cur = &slot;
      } else {
        fail(line, "'" + k + "' is already a non-table value");
      }
    }
  }
  return cur;
}

}  // namespace

json parse(std::string_view text) {
  json root = json::object();
  json* current = &root;

  int line_no = 0;
  std::size_t offset = 0;
  while (offset <= text.size()) {
    std::size_t nl = text.find('\n', offset);
    std::string_view raw = (nl == std::string_view::npos)
                               ? text.substr(offset)
                               : text.substr(offset, nl - offset);
    offset = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
    ++line_no;

    LineParser lp(strip_comment(raw), line_no);
    if (lp.at_end()) continue;

    if (lp.consume('[')) {
      bool aot = lp.consume('[');
      auto keys = header_path(lp, aot);
      current = resolve_header(root, keys, aot, line_no);
      continue;
    }

    std::string k = lp.key();
    lp.expect('=', "'=' after key");
    if (current->contains(k)) fail(line_no, "duplicate key '" + k + "'");
    json v = lp.value();
    if (!lp.at_end()) fail(line_no, "unexpected text after value");
    (*current)[k] = std::move(v);
  }
  return root;
}

json parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

}  // namespace cardsim::toml
