#pragma once

// Reader for the experiment config format: a TOML subset covering what the
// shipped configs use. Supported grammar, per line:
//
//   key = value            value: "string", integer, float (inf/nan allowed),
//                          true/false, [v, v, ...], { k = v, ... }
//   [table.path]           navigate/create nested tables
//   [[array.path]]         append a table to an array of tables
//   # comment              anywhere outside a string
//
// Keys are bare ([A-Za-z0-9_-]+). Arrays and inline tables must close on
// the line they open. Dates, multi-line strings, quoted keys and digit
// underscores are not supported. Assigning the same key twice is an error.
//
// The result is a json tree; table order is not preserved (keys sort).

#include "json.hpp"

#include <stdexcept>
#include <string>
#include <string_view>

namespace cardsim::toml {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

nlohmann::json parse(std::string_view text);
nlohmann::json parse_file(const std::string& path);

}  // namespace cardsim::toml
