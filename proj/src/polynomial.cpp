#include "whitneyopt/polynomial.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <set>
#include <unordered_set>

#include "whitneyopt/error.hpp"

namespace whitneyopt {

namespace {

bool is_identifier(std::string_view name) {
  if (name.empty()) return false;
  auto head = static_cast<unsigned char>(name.front());
  if (!(std::isalpha(head) || head == '_')) return false;
  return std::all_of(name.begin() + 1, name.end(), [](char c) {
    auto uc = static_cast<unsigned char>(c);
    return std::isalnum(uc) || uc == '_';
  });
}

void add_term(Polynomial::TermMap& terms, const Monomial& m, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = terms.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms.erase(it);
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// VariableOrder

VariableOrder::VariableOrder(std::vector<std::string> names) {
  if (names.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "variable order must not be empty");
  }
  std::unordered_set<std::string> seen;
  for (const auto& name : names) {
    if (!is_identifier(name)) {
      throw Error(ErrorCode::kInvalidArgument, "invalid variable name '" + name + "'");
    }
    if (!seen.insert(name).second) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate variable '" + name + "'");
    }
  }
  names_ = std::make_shared<const std::vector<std::string>>(std::move(names));
}

std::optional<std::size_t> VariableOrder::index_of(std::string_view name) const {
  auto it = std::find(names_->begin(), names_->end(), name);
  if (it == names_->end()) return std::nullopt;
  return static_cast<std::size_t>(it - names_->begin());
}

// ---------------------------------------------------------------------------
// Monomial

Monomial Monomial::variable(std::size_t var, std::uint32_t exponent) {
  Monomial m;
  if (exponent > 0) m.exponents_.emplace(var, exponent);
  return m;
}

std::uint32_t Monomial::degree(std::size_t var) const {
  auto it = exponents_.find(var);
  return it == exponents_.end() ? 0 : it->second;
}

std::uint32_t Monomial::total_degree() const {
  std::uint32_t total = 0;
  for (const auto& [var, e] : exponents_) total += e;
  return total;
}

std::optional<std::size_t> Monomial::greatest_variable() const {
  if (exponents_.empty()) return std::nullopt;
  return exponents_.rbegin()->first;
}

Monomial Monomial::operator*(const Monomial& other) const {
  Monomial out = *this;
  for (const auto& [var, e] : other.exponents_) out.exponents_[var] += e;
  return out;
}

Monomial Monomial::without(std::size_t var) const {
  Monomial out = *this;
  out.exponents_.erase(var);
  return out;
}

bool GradedLexGreater::operator()(const Monomial& a, const Monomial& b) const {
  auto da = a.total_degree();
  auto db = b.total_degree();
  if (da != db) return da > db;
  const auto& ea = a.exponents();
  const auto& eb = b.exponents();
  auto ia = ea.rbegin();
  auto ib = eb.rbegin();
  for (; ia != ea.rend() && ib != eb.rend(); ++ia, ++ib) {
    if (ia->first != ib->first) return ia->first > ib->first;
    if (ia->second != ib->second) return ia->second > ib->second;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Polynomial

Polynomial::Polynomial(VariableOrder order) : order_(std::move(order)) {}

Polynomial::Polynomial(VariableOrder order, const Rational& constant)
    : order_(std::move(order)) {
  if (constant != 0) terms_.emplace(Monomial{}, constant);
}

Polynomial::Polynomial(VariableOrder order, TermMap terms)
    : order_(std::move(order)), terms_(std::move(terms)) {
  for (auto it = terms_.begin(); it != terms_.end();) {
    if (auto g = it->first.greatest_variable(); g && *g >= order_.size()) {
      throw Error(ErrorCode::kInvalidArgument, "monomial references a variable outside the order");
    }
    if (it->second == 0) {
      it = terms_.erase(it);
    } else {
      it->second.canonicalize();
      ++it;
    }
  }
}

Polynomial Polynomial::variable(const VariableOrder& order, std::size_t var) {
  if (var >= order.size()) {
    throw Error(ErrorCode::kInvalidArgument, "variable index out of range");
  }
  TermMap terms;
  terms.emplace(Monomial::variable(var), Rational(1));
  return Polynomial(order, std::move(terms));
}

bool Polynomial::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_one());
}

Rational Polynomial::constant_term() const {
  auto it = terms_.find(Monomial{});
  return it == terms_.end() ? Rational(0) : it->second;
}

std::uint32_t Polynomial::degree(std::size_t var) const {
  std::uint32_t d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m.degree(var));
  return d;
}

std::uint32_t Polynomial::total_degree() const {
  // Leading term under a graded order has the largest total degree.
  return terms_.empty() ? 0 : terms_.begin()->first.total_degree();
}

std::vector<std::size_t> Polynomial::variables() const {
  std::set<std::size_t> vars;
  for (const auto& [m, c] : terms_) {
    for (const auto& [var, e] : m.exponents()) vars.insert(var);
  }
  return {vars.begin(), vars.end()};
}

void Polynomial::check_same_order(const Polynomial& other) const {
  if (!(order_ == other.order_)) {
    throw Error(ErrorCode::kOrderMismatch, "polynomials use different variable orders");
  }
}

Polynomial Polynomial::operator-() const {
  Polynomial out = *this;
  for (auto& [m, c] : out.terms_) c = -c;
  return out;
}

Polynomial Polynomial::operator+(const Polynomial& other) const {
  check_same_order(other);
  Polynomial out = *this;
  for (const auto& [m, c] : other.terms_) add_term(out.terms_, m, c);
  return out;
}

Polynomial Polynomial::operator-(const Polynomial& other) const {
  check_same_order(other);
  Polynomial out = *this;
  for (const auto& [m, c] : other.terms_) add_term(out.terms_, m, -c);
  return out;
}

Polynomial Polynomial::operator*(const Polynomial& other) const {
  check_same_order(other);
  Polynomial out(order_);
  for (const auto& [ma, ca] : terms_) {
    for (const auto& [mb, cb] : other.terms_) add_term(out.terms_, ma * mb, ca * cb);
  }
  return out;
}

Polynomial Polynomial::operator*(const Rational& scalar) const {
  if (scalar == 0) return Polynomial(order_);
  Polynomial out = *this;
  for (auto& [m, c] : out.terms_) c *= scalar;
  return out;
}

Polynomial Polynomial::pow(std::uint32_t exponent) const {
  Polynomial result(order_, Rational(1));
  Polynomial base = *this;
  while (exponent > 0) {
    if (exponent & 1U) result = result * base;
    exponent >>= 1U;
    if (exponent > 0) base = base * base;
  }
  return result;
}

Polynomial Polynomial::remap(const VariableOrder& target,
                             std::span<const std::optional<std::size_t>> index_map) const {
  if (index_map.size() != order_.size()) {
    throw Error(ErrorCode::kInvalidArgument, "remap index map has the wrong length");
  }
  TermMap out;
  for (const auto& [m, c] : terms_) {
    Monomial mapped;
    for (const auto& [var, e] : m.exponents()) {
      const auto& to = index_map[var];
      if (!to || *to >= target.size()) {
        throw Error(ErrorCode::kInvalidArgument,
                    "variable '" + order_.name(var) + "' has no image in the target order");
      }
      mapped = mapped * Monomial::variable(*to, e);
    }
    add_term(out, mapped, c);
  }
  return Polynomial(target, std::move(out));
}

std::string to_string(const Rational& value) { return value.get_str(); }

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    const bool negative = c < 0;
    if (first) {
      if (negative) out += "-";
    } else {
      out += negative ? " - " : " + ";
    }
    first = false;

    Rational magnitude = abs(c);
    std::string factors;
    for (const auto& [var, e] : m.exponents()) {
      if (!factors.empty()) factors += "*";
      factors += order_.name(var);
      if (e > 1) factors += "^" + std::to_string(e);
    }
    if (factors.empty()) {
      out += whitneyopt::to_string(magnitude);
    } else if (magnitude == 1) {
      out += factors;
    } else {
      out += whitneyopt::to_string(magnitude) + "*" + factors;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Free functions

double ipow(double base, std::uint32_t exponent) {
  double result = 1.0;
  while (exponent > 0) {
    if (exponent & 1U) result *= base;
    exponent >>= 1U;
    if (exponent > 0) base *= base;
  }
  return result;
}

double evaluate(const Polynomial& p, std::span<const double> point) {
  if (point.size() != p.order().size()) {
    throw Error(ErrorCode::kInvalidArgument, "point dimension does not match variable order");
  }
  double sum = 0.0;
  for (const auto& [m, c] : p.terms()) {
    double term = c.get_d();
    for (const auto& [var, e] : m.exponents()) term *= ipow(point[var], e);
    sum += term;
  }
  return sum;
}

Polynomial partial_derivative(const Polynomial& p, std::size_t var) {
  if (var >= p.order().size()) {
    throw Error(ErrorCode::kInvalidArgument, "variable index out of range");
  }
  Polynomial::TermMap out;
  for (const auto& [m, c] : p.terms()) {
    auto e = m.degree(var);
    if (e == 0) continue;
    Monomial lowered = m.without(var) * Monomial::variable(var, e - 1);
    add_term(out, lowered, c * Rational(e));
  }
  return Polynomial(p.order(), std::move(out));
}

std::optional<std::size_t> main_variable(const Polynomial& p) {
  std::optional<std::size_t> best;
  for (const auto& [m, c] : p.terms()) {
    auto g = m.greatest_variable();
    if (g && (!best || *g > *best)) best = g;
  }
  return best;
}

Decomposition decompose(const Polynomial& p) {
  auto mvar = main_variable(p);
  if (!mvar) {
    throw Error(ErrorCode::kInvalidArgument,
                "cannot decompose constant polynomial " + p.to_string());
  }
  const auto d = p.degree(*mvar);
  Polynomial::TermMap initial_terms;
  Polynomial::TermMap tail_terms;
  for (const auto& [m, c] : p.terms()) {
    if (m.degree(*mvar) == d) {
      add_term(initial_terms, m.without(*mvar), c);
    } else {
      add_term(tail_terms, m, c);
    }
  }
  Polynomial tail(p.order(), std::move(tail_terms));
  return Decomposition{
      .main_variable = *mvar,
      .initial = Polynomial(p.order(), std::move(initial_terms)),
      .main_degree = d,
      .rank = Monomial::variable(*mvar, d),
      .tail = tail,
      .head = p - tail,
  };
}

CompiledPolynomial::CompiledPolynomial(const Polynomial& p) {
  terms_.reserve(p.terms().size());
  for (const auto& [m, c] : p.terms()) {
    Term t{c.get_d(), {}};
    for (const auto& [var, e] : m.exponents()) {
      t.powers.emplace_back(static_cast<std::uint32_t>(var), e);
    }
    terms_.push_back(std::move(t));
  }
}

double CompiledPolynomial::operator()(std::span<const double> point) const {
  double sum = 0.0;
  for (const auto& t : terms_) {
    double term = t.coefficient;
    for (const auto& [var, e] : t.powers) term *= ipow(point[var], e);
    sum += term;
  }
  return sum;
}

}  // namespace whitneyopt
