// Recursive-descent parser for the polynomial grammar:
//
//   expr   := term (('+'|'-') term)*
//   term   := factor ('*' factor)*
//   factor := coeff | var ('^' uint)? | '(' expr ')' | '-' factor
//   coeff  := int | int '/' posint
//   var    := [A-Za-z_][A-Za-z0-9_]*

#include <cctype>
#include <limits>

#include "whitneyopt/error.hpp"
#include "whitneyopt/polynomial.hpp"

namespace whitneyopt {

namespace {

class Parser {
 public:
  Parser(std::string_view text, const VariableOrder& order) : text_(text), order_(order) {}

  Polynomial parse() {
    Polynomial result = expr();
    skip_ws();
    if (pos_ != text_.size()) fail(ErrorCode::kSyntax, "unexpected character '" + current() + "'");
    return result;
  }

 private:
  Polynomial expr() {
    Polynomial acc = term();
    for (;;) {
      skip_ws();
      if (accept('+')) {
        acc = acc + term();
      } else if (accept('-')) {
        acc = acc - term();
      } else {
        return acc;
      }
    }
  }

  Polynomial term() {
    Polynomial acc = factor();
    for (;;) {
      skip_ws();
      if (!accept('*')) return acc;
      acc = acc * factor();
    }
  }

  Polynomial factor() {
    skip_ws();
    if (at_end()) fail(ErrorCode::kSyntax, "expected a factor, found end of input");
    const char c = text_[pos_];
    if (c == '-') {
      ++pos_;
      return -factor();
    }
    if (c == '(') {
      ++pos_;
      Polynomial inner = expr();
      skip_ws();
      if (!accept(')')) fail(ErrorCode::kSyntax, "expected ')'");
      skip_ws();
      if (peek('^')) fail(ErrorCode::kSyntax, "'^' is only allowed directly after a variable");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return coefficient();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return power();
    fail(ErrorCode::kSyntax, "expected a factor, found '" + current() + "'");
  }

  Polynomial coefficient() {
    mpz_class numerator(digits(), 10);
    skip_ws();
    if (peek('^')) fail(ErrorCode::kSyntax, "'^' is only allowed directly after a variable");
    if (!accept('/')) return Polynomial(order_, Rational(numerator));
    skip_ws();
    if (at_end() || !std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      fail(ErrorCode::kSyntax, "expected a positive integer denominator");
    }
    const auto denom_pos = pos_;
    mpz_class denominator(digits(), 10);
    if (denominator == 0) {
      fail_at(ErrorCode::kSyntax, denom_pos, "denominator must be positive");
    }
    Rational value(numerator, denominator);
    value.canonicalize();
    return Polynomial(order_, value);
  }

  Polynomial power() {
    const auto start = pos_;
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    const auto name = text_.substr(start, pos_ - start);
    const auto index = order_.index_of(name);
    if (!index) {
      fail_at(ErrorCode::kUnknownVariable, start, "unknown variable '" + std::string(name) + "'");
    }
    skip_ws();
    if (!accept('^')) return Polynomial::variable(order_, *index);
    skip_ws();
    const auto exp_pos = pos_;
    if (at_end() || !std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      fail_at(ErrorCode::kBadExponent, exp_pos, "exponent must be a nonnegative integer literal");
    }
    const std::string literal = digits();
    if (!at_end() && (text_[pos_] == '.' || text_[pos_] == '/')) {
      fail_at(ErrorCode::kBadExponent, exp_pos, "exponent must be a nonnegative integer literal");
    }
    mpz_class exponent(literal, 10);
    if (exponent > std::numeric_limits<std::uint32_t>::max()) {
      fail_at(ErrorCode::kBadExponent, exp_pos, "exponent " + literal + " is too large");
    }
    TermMap terms;
    terms.emplace(Monomial::variable(*index, static_cast<std::uint32_t>(exponent.get_ui())),
                  Rational(1));
    return Polynomial(order_, std::move(terms));
  }

  std::string digits() {
    const auto start = pos_;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool at_end() const { return pos_ >= text_.size(); }
  bool peek(char c) const { return !at_end() && text_[pos_] == c; }
  bool accept(char c) {
    if (!peek(c)) return false;
    ++pos_;
    return true;
  }
  std::string current() const { return at_end() ? std::string("<end>") : std::string(1, text_[pos_]); }

  [[noreturn]] void fail(ErrorCode code, const std::string& message) const { fail_at(code, pos_, message); }
  [[noreturn]] void fail_at(ErrorCode code, std::size_t offset, const std::string& message) const {
    throw ParseError(code, offset, message + " at offset " + std::to_string(offset));
  }

  using TermMap = Polynomial::TermMap;

  std::string_view text_;
  const VariableOrder& order_;
  std::size_t pos_ = 0;
};

}  // namespace

Polynomial parse_polynomial(std::string_view text, const VariableOrder& order) {
  return Parser(text, order).parse();
}

}  // namespace whitneyopt
