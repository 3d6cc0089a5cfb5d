#pragma once

#include <stdexcept>
#include <string>

#include "odeq/expr.hpp"

namespace odeq {

/// Parse failure with the byte offset of the offending token.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, std::size_t offset)
      : std::runtime_error(msg + " (byte " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// Parses the expression grammar:
///
///   expr     := ["-"] term (("+"|"-") term)*
///   term     := factor (("*"|"/") factor)*
///   factor   := base ("^" exponent)?
///   base     := number | ident | "(" expr ")" | "exp" "(" expr ")"
///             | ("root2"|"root4") ("[" digit "]")? "(" expr ")"
///   exponent := ["-"] number | "(" expr ")"
///
/// Numbers are non-negative integers ("1/2" arrives via division). Idents
/// are "x","u","p","q","r" (jet variables), "a13" (the prolongation
/// coordinate), or all-letter parameter names. Whitespace is ignored.
Expr parse_expression(const std::string& text);

}  // namespace odeq
