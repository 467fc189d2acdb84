#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "momopt/polyring.hpp"

namespace momopt {

/// Ordered list of distinct variable names.
class VariableTable {
 public:
  VariableTable() = default;
  explicit VariableTable(std::vector<std::string> names);

  /// Parses "x,y,z" (whitespace around names is ignored).
  static VariableTable from_list(std::string_view comma_separated);

  std::size_t size() const noexcept { return names_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  const std::string& name(std::size_t i) const { return names_.at(i); }
  std::optional<std::size_t> index_of(std::string_view name) const;
  bool all_single_letter() const noexcept;

  /// New table with `extra` names appended.
  VariableTable extended(const std::vector<std::string>& extra) const;

  static bool valid_name(std::string_view name);

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::size_t> index_;
};

class ParseError : public std::runtime_error {
 public:
  enum class Kind { Syntax, UnknownVariable, ExponentOverflow };

  ParseError(Kind kind, std::size_t position, const std::string& message);

  Kind kind() const noexcept { return kind_; }
  std::size_t position() const noexcept { return position_; }

 private:
  Kind kind_;
  std::size_t position_;
};

inline constexpr int kMaxExponent = 63;

/// Grammar:
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*')? factor)*   -- implicit product after a number
///   factor := ('+'|'-') factor | primary ('^' uint)?
///   primary:= number | identifier | '(' expr ')'
/// An undeclared identifier such as "xy" is read as x*y when every declared
/// variable is a single letter.
Polynomial parse_polynomial(std::string_view text, const VariableTable& vars);

/// Canonical text, highest degree first. parse_polynomial(format_polynomial(p)) == p.
std::string format_polynomial(const Polynomial& p, const VariableTable& vars);

}  // namespace momopt
