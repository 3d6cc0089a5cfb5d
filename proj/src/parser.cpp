#include "odeq/parser.hpp"

#include <cctype>
#include <cstdint>

namespace odeq {

namespace {

class Parser {
 public:
  explicit Parser(const std::string& text) : s_(text) {}

  Expr run() {
    Expr e = parse_expr();
    skip_ws();
    if (pos_ != s_.size()) {
      throw ParseError("unexpected trailing input", pos_);
    }
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
      ++pos_;
  }

  char peek() {
    skip_ws();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }

  bool accept(char c) {
    if (peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      throw ParseError(std::string("expected '") + c + "'", pos_);
    }
  }

  Expr parse_expr() {
    bool neg = accept('-');
    Expr acc = parse_term();
    if (neg) acc = -acc;
    while (true) {
      if (accept('+')) {
        acc = acc + parse_term();
      } else if (accept('-')) {
        acc = acc - parse_term();
      } else {
        return acc;
      }
    }
  }

  Expr parse_term() {
    Expr acc = parse_factor();
    while (true) {
      if (accept('*')) {
        acc = acc * parse_factor();
      } else if (accept('/')) {
        acc = acc / parse_factor();
      } else {
        return acc;
      }
    }
  }

  Expr parse_factor() {
    Expr base = parse_base();
    if (accept('^')) {
      return Expr::pow(base, parse_exponent());
    }
    return base;
  }

  Expr parse_exponent() {
    if (peek() == '(') {
      ++pos_;
      Expr e = parse_expr();
      expect(')');
      return e;
    }
    bool neg = accept('-');
    skip_ws();
    if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      throw ParseError("expected exponent", pos_);
    }
    Expr n = parse_number();
    return neg ? -n : n;
  }

  Expr parse_number() {
    skip_ws();
    const std::size_t start = pos_;
    std::int64_t v = 0;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      v = v * 10 + (s_[pos_] - '0');
      if (v < 0) throw ParseError("integer literal overflow", start);
      ++pos_;
    }
    if (pos_ < s_.size() && s_[pos_] == '.') {
      throw ParseError("decimal literals are not supported, use ratios", pos_);
    }
    return Expr::integer(v);
  }

  Expr parse_base() {
    const char c = peek();
    if (c == '\0') throw ParseError("unexpected end of input", pos_);
    if (std::isdigit(static_cast<unsigned char>(c))) return parse_number();
    if (c == '(') {
      ++pos_;
      Expr e = parse_expr();
      expect(')');
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_ident();
    throw ParseError(std::string("unexpected character '") + c + "'", pos_);
  }

  Expr parse_ident() {
    skip_ws();
    const std::size_t start = pos_;
    std::string name;
    while (pos_ < s_.size() &&
           std::isalnum(static_cast<unsigned char>(s_[pos_]))) {
      name += s_[pos_++];
    }
    if (name == "exp") {
      expect('(');
      Expr a = parse_expr();
      expect(')');
      return Expr::exp(a);
    }
    if (name == "root2" || name == "root4") {
      const int index = name == "root2" ? 2 : 4;
      int branch = 0;
      if (accept('[')) {
        skip_ws();
        if (pos_ >= s_.size() ||
            !std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
          throw ParseError("expected root branch digit", pos_);
        }
        branch = s_[pos_++] - '0';
        expect(']');
        if (branch >= index) {
          throw ParseError("root branch out of range", start);
        }
      }
      expect('(');
      Expr a = parse_expr();
      expect(')');
      return Expr::root(index, a, branch);
    }
    if (name == "a13") return Expr::var(JetVar::A13);
    if (name.size() == 1) {
      switch (name[0]) {
        case 'x': return Expr::var(JetVar::X);
        case 'u': return Expr::var(JetVar::U);
        case 'p': return Expr::var(JetVar::P);
        case 'q': return Expr::var(JetVar::Q);
        case 'r': return Expr::var(JetVar::R);
        default: break;
      }
    }
    for (char ch : name) {
      if (!std::isalpha(static_cast<unsigned char>(ch))) {
        throw ParseError("unknown identifier '" + name + "'", start);
      }
    }
    return Expr::param(name);
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expression(const std::string& text) { return Parser(text).run(); }

}  // namespace odeq
