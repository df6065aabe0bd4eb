#include "dacurv/poly_parse.hpp"

#include <cctype>
#include <string>

namespace dacurv {
namespace {

class Parser {
 public:
  Parser(std::string_view text, std::size_t line, std::size_t offset)
      : text_(text), line_(line), offset_(offset) {}

  Polynomial parse() {
    skip_ws();
    if (at_end()) fail("empty polynomial");
    Polynomial p = parse_sum();
    skip_ws();
    if (!at_end()) fail(std::string("unexpected '") + text_[pos_] + "'");
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    std::size_t col = offset_ + pos_ + 1;
    throw ParseError(msg + " at line " + std::to_string(line_) + ", column " + std::to_string(col),
                     line_, col);
  }

  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }
  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  Polynomial parse_sum() {
    Polynomial acc;
    bool first = true;
    for (;;) {
      skip_ws();
      bool negative = false;
      if (peek() == '+' || peek() == '-') {
        negative = peek() == '-';
        ++pos_;
        skip_ws();
      } else if (!first) {
        break;
      }
      Polynomial t = parse_product();
      if (negative) acc -= t;
      else acc += t;
      first = false;
      skip_ws();
      if (peek() != '+' && peek() != '-') break;
    }
    return acc;
  }

  Polynomial parse_product() {
    Polynomial acc = parse_power();
    for (;;) {
      skip_ws();
      if (peek() == '*') {
        ++pos_;
        skip_ws();
        acc = acc * parse_power();
      } else if (peek() == '/') {
        ++pos_;
        skip_ws();
        if (!std::isdigit(static_cast<unsigned char>(peek()))) fail("only division by a number is allowed");
        mpz_class den = parse_integer();
        if (den == 0) fail("division by zero");
        acc *= Rational(1, den);
      } else {
        return acc;
      }
    }
  }

  Polynomial parse_power() {
    Polynomial base = parse_atom();
    skip_ws();
    if (peek() != '^') return base;
    ++pos_;
    skip_ws();
    if (peek() == '-') fail("negative exponent");
    if (!std::isdigit(static_cast<unsigned char>(peek()))) fail("expected exponent");
    mpz_class e = parse_integer();
    if (e > 1000) fail("exponent too large");
    Polynomial out(1L);
    for (long k = 0; k < e.get_si(); ++k) out = out * base;
    return out;
  }

  Polynomial parse_atom() {
    skip_ws();
    char c = peek();
    if (std::isdigit(static_cast<unsigned char>(c))) {
      mpz_class num = parse_integer();
      return Polynomial(Rational(num));
    }
    if (c == 'z') {
      ++pos_;
      if (!std::isdigit(static_cast<unsigned char>(peek()))) fail("expected variable index after 'z'");
      mpz_class idx = parse_integer();
      if (idx < 1 || idx > 100000) fail("variable index out of range");
      return Polynomial::variable(static_cast<std::uint32_t>(idx.get_ui()));
    }
    if (c == '(') {
      ++pos_;
      Polynomial inner = parse_sum();
      skip_ws();
      if (peek() != ')') fail("expected ')'");
      ++pos_;
      return inner;
    }
    if (at_end()) fail("unexpected end of input");
    fail(std::string("unexpected '") + c + "'");
  }

  mpz_class parse_integer() {
    std::size_t start = pos_;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    return mpz_class(std::string(text_.substr(start, pos_ - start)));
  }

  std::string_view text_;
  std::size_t line_;
  std::size_t offset_;
  std::size_t pos_ = 0;
};

}  // namespace

Polynomial parse_polynomial(std::string_view text, std::size_t line, std::size_t column_offset) {
  return Parser(text, line, column_offset).parse();
}

}  // namespace dacurv
