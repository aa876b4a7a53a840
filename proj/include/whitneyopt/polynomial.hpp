#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace whitneyopt {

using Rational = mpq_class;

/// Ascending variable order. Position is rank: index 0 is the smallest variable.
class VariableOrder {
 public:
  explicit VariableOrder(std::vector<std::string> names);

  std::size_t size() const { return names_->size(); }
  const std::string& name(std::size_t index) const { return (*names_)[index]; }
  std::span<const std::string> names() const { return *names_; }
  std::optional<std::size_t> index_of(std::string_view name) const;

  friend bool operator==(const VariableOrder& a, const VariableOrder& b) {
    return a.names_ == b.names_ || *a.names_ == *b.names_;
  }

 private:
  std::shared_ptr<const std::vector<std::string>> names_;
};

/// Power product. Only positive exponents are stored.
class Monomial {
 public:
  Monomial() = default;
  static Monomial variable(std::size_t var, std::uint32_t exponent = 1);

  std::uint32_t degree(std::size_t var) const;
  std::uint32_t total_degree() const;
  bool is_one() const { return exponents_.empty(); }
  std::optional<std::size_t> greatest_variable() const;
  const std::map<std::size_t, std::uint32_t>& exponents() const { return exponents_; }

  Monomial operator*(const Monomial& other) const;
  /// Drops `var` from the monomial.
  Monomial without(std::size_t var) const;

  friend bool operator==(const Monomial&, const Monomial&) = default;

 private:
  std::map<std::size_t, std::uint32_t> exponents_;
};

/// Graded order, ties broken lexicographically from the greatest variable down.
/// Used as a "greater" comparator so term maps iterate leading term first.
struct GradedLexGreater {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

class Polynomial {
 public:
  using TermMap = std::map<Monomial, Rational, GradedLexGreater>;

  explicit Polynomial(VariableOrder order);
  Polynomial(VariableOrder order, const Rational& constant);
  Polynomial(VariableOrder order, TermMap terms);

  static Polynomial variable(const VariableOrder& order, std::size_t var);

  const VariableOrder& order() const { return order_; }
  const TermMap& terms() const { return terms_; }

  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  Rational constant_term() const;
  std::uint32_t degree(std::size_t var) const;
  std::uint32_t total_degree() const;
  bool involves(std::size_t var) const { return degree(var) > 0; }
  /// Indices of variables that appear, ascending.
  std::vector<std::size_t> variables() const;

  Polynomial operator-() const;
  Polynomial operator+(const Polynomial& other) const;
  Polynomial operator-(const Polynomial& other) const;
  Polynomial operator*(const Polynomial& other) const;
  Polynomial operator*(const Rational& scalar) const;
  Polynomial pow(std::uint32_t exponent) const;

  /// Re-expresses the polynomial over `target`. `index_map[i]` is the target
  /// index for source variable i; every variable that appears must be mapped.
  Polynomial remap(const VariableOrder& target,
                   std::span<const std::optional<std::size_t>> index_map) const;

  /// Canonical text: terms in descending graded-lex order, factors ascending.
  std::string to_string() const;

  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.order_ == b.order_ && a.terms_ == b.terms_;
  }

 private:
  void check_same_order(const Polynomial& other) const;

  VariableOrder order_;
  TermMap terms_;
};

std::string to_string(const Rational& value);

Polynomial parse_polynomial(std::string_view text, const VariableOrder& order);

/// Evaluates `p` at `point` (one value per variable in p's order).
double evaluate(const Polynomial& p, std::span<const double> point);

Polynomial partial_derivative(const Polynomial& p, std::size_t var);

/// Greatest variable with positive degree; nullopt for constants.
std::optional<std::size_t> main_variable(const Polynomial& p);

struct Decomposition {
  std::size_t main_variable;
  Polynomial initial;
  std::uint32_t main_degree;
  Monomial rank;
  Polynomial tail;
  Polynomial head;
};

/// Splits p = initial * rank + tail with respect to the main variable.
/// Throws Error(kInvalidArgument) for constant polynomials.
Decomposition decompose(const Polynomial& p);

/// x^n by repeated squaring.
double ipow(double base, std::uint32_t exponent);

/// Floating-point snapshot of a polynomial for repeated evaluation.
class CompiledPolynomial {
 public:
  CompiledPolynomial() = default;
  explicit CompiledPolynomial(const Polynomial& p);

  double operator()(std::span<const double> point) const;
  bool is_zero() const { return terms_.empty(); }

 private:
  struct Term {
    double coefficient;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> powers;
  };
  std::vector<Term> terms_;
};

}  // namespace whitneyopt
