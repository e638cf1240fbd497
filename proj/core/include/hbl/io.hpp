#pragma once

#include "hbl/errors.hpp"
#include "hbl/model.hpp"

#include <optional>
#include <string>
#include <utility>

namespace hbl {

// Malformed or invalid input with its location (1-based; 0 when unknown).
class ParseError : public ValidationError {
 public:
  ParseError(const std::string& what, int line, int column, std::string pointer = {})
      : ValidationError(what), line_(line), column_(column), pointer_(std::move(pointer)) {}
  int line() const { return line_; }
  int column() const { return column_; }
  const std::string& pointer() const { return pointer_; }

 private:
  int line_;
  int column_;
  std::string pointer_;
};

struct SystemInput {
  enum class Kind { balance_law, jinxin, scalar_model };
  Kind kind = Kind::balance_law;
  std::string name;
  std::optional<BalanceLawSpec> spec;
  std::optional<JinXinSpec> jinxin;
  int scalar_dim = 1;
  bool scalar_transport = true;

  int dim() const;
};

// Strict parser for system files; unknown keys and non-finite numbers are errors.
SystemInput parse_system(const std::string& text);
SystemInput load_system(const std::string& path);

std::string read_file(const std::string& path);

// 1-based line and column of a byte offset.
std::pair<int, int> line_column(const std::string& text, std::size_t offset);
// Location of the value addressed by a JSON pointer, found by a lightweight scan.
std::pair<int, int> locate_pointer(const std::string& text, const std::string& pointer);

}  // namespace hbl
