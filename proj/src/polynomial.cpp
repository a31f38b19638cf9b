// SPDX-License-Identifier: Apache-2.0
#include "oscibound/polynomial.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "oscibound/errors.hpp"

namespace oscibound {

namespace {

double ipow(double base, unsigned e) {
  double r = 1.0;
  for (unsigned i = 0; i < e; ++i) r *= base;
  return r;
}

Rational ipow(const Rational& base, unsigned e) {
  Rational r = 1;
  for (unsigned i = 0; i < e; ++i) r *= base;
  return r;
}

}  // namespace

unsigned total_degree(const MultiIndex& exponents) {
  return std::accumulate(exponents.begin(), exponents.end(), 0u);
}

HomogeneousPolynomial::HomogeneousPolynomial(std::size_t num_vars,
                                             unsigned degree)
    : num_vars_(num_vars), degree_(degree) {
  if (num_vars == 0) throw InputError("polynomial needs at least one variable");
}

HomogeneousPolynomial HomogeneousPolynomial::monomial(
    const MultiIndex& exponents, const Rational& coeff) {
  HomogeneousPolynomial p(exponents.size(), total_degree(exponents));
  p.add_term(exponents, coeff);
  return p;
}

void HomogeneousPolynomial::check_arity(const MultiIndex& exponents) const {
  if (exponents.size() != num_vars_) {
    throw InputError("multi-index has " + std::to_string(exponents.size()) +
                     " entries, polynomial has " + std::to_string(num_vars_) +
                     " variables");
  }
}

void HomogeneousPolynomial::add_term(const MultiIndex& exponents,
                                     const Rational& coeff) {
  check_arity(exponents);
  if (total_degree(exponents) != degree_) {
    throw InputError("monomial of degree " +
                     std::to_string(total_degree(exponents)) +
                     " added to homogeneous polynomial of degree " +
                     std::to_string(degree_));
  }
  if (coeff == 0) return;
  auto [it, inserted] = terms_.try_emplace(exponents, coeff);
  if (!inserted) {
    it->second += coeff;
    if (it->second == 0) terms_.erase(it);
  }
}

Rational HomogeneousPolynomial::coefficient(const MultiIndex& exponents) const {
  auto it = terms_.find(exponents);
  return it == terms_.end() ? Rational(0) : it->second;
}

double HomogeneousPolynomial::evaluate(std::span<const double> v) const {
  if (v.size() != num_vars_) {
    throw InputError("evaluation point has dimension " +
                     std::to_string(v.size()) + ", expected " +
                     std::to_string(num_vars_));
  }
  double sum = 0.0;
  for (const auto& [exps, c] : terms_) {
    double t = c.get_d();
    for (std::size_t k = 0; k < num_vars_; ++k) t *= ipow(v[k], exps[k]);
    sum += t;
  }
  return sum;
}

Rational HomogeneousPolynomial::evaluate_exact(
    std::span<const Rational> v) const {
  if (v.size() != num_vars_) {
    throw InputError("evaluation point has dimension " +
                     std::to_string(v.size()) + ", expected " +
                     std::to_string(num_vars_));
  }
  Rational sum = 0;
  for (const auto& [exps, c] : terms_) {
    Rational t = c;
    for (std::size_t k = 0; k < num_vars_; ++k) t *= ipow(v[k], exps[k]);
    sum += t;
  }
  return sum;
}

double HomogeneousPolynomial::coefficient_l1() const {
  double s = 0.0;
  for (const auto& [exps, c] : terms_) s += std::abs(c.get_d());
  return s;
}

HomogeneousPolynomial& HomogeneousPolynomial::operator+=(
    const HomogeneousPolynomial& rhs) {
  if (rhs.num_vars_ != num_vars_ || rhs.degree_ != degree_) {
    throw InputError("adding polynomials of different arity or degree");
  }
  for (const auto& [exps, c] : rhs.terms_) add_term(exps, c);
  return *this;
}

HomogeneousPolynomial& HomogeneousPolynomial::operator-=(
    const HomogeneousPolynomial& rhs) {
  if (rhs.num_vars_ != num_vars_ || rhs.degree_ != degree_) {
    throw InputError("subtracting polynomials of different arity or degree");
  }
  for (const auto& [exps, c] : rhs.terms_) add_term(exps, -c);
  return *this;
}

HomogeneousPolynomial& HomogeneousPolynomial::operator*=(const Rational& scale) {
  if (scale == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [exps, c] : terms_) c *= scale;
  return *this;
}

HomogeneousPolynomial operator*(const HomogeneousPolynomial& lhs,
                                const HomogeneousPolynomial& rhs) {
  if (lhs.num_vars_ != rhs.num_vars_) {
    throw InputError("multiplying polynomials of different arity");
  }
  HomogeneousPolynomial out(lhs.num_vars_, lhs.degree_ + rhs.degree_);
  MultiIndex e(lhs.num_vars_);
  for (const auto& [ea, ca] : lhs.terms_) {
    for (const auto& [eb, cb] : rhs.terms_) {
      for (std::size_t k = 0; k < e.size(); ++k) e[k] = ea[k] + eb[k];
      out.add_term(e, ca * cb);
    }
  }
  return out;
}

std::string HomogeneousPolynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [exps, c] : terms_) {
    if (!first) os << (c < 0 ? " - " : " + ");
    else if (c < 0) os << "-";
    first = false;
    Rational a = abs(c);
    bool unit = (a == 1) && degree_ > 0;
    if (!unit) os << a.get_str();
    bool need_star = !unit;
    for (std::size_t k = 0; k < num_vars_; ++k) {
      if (exps[k] == 0) continue;
      if (need_star) os << "*";
      os << "x" << k;
      if (exps[k] > 1) os << "^" << exps[k];
      need_star = true;
    }
  }
  return os.str();
}

HomogeneousPolynomial partial_derivative(const HomogeneousPolynomial& p,
                                         std::size_t axis) {
  if (axis >= p.num_vars()) {
    throw InputError("derivative axis " + std::to_string(axis) +
                     " out of range for " + std::to_string(p.num_vars()) +
                     " variables");
  }
  HomogeneousPolynomial out(p.num_vars(), p.degree() == 0 ? 0 : p.degree() - 1);
  for (const auto& [exps, c] : p.terms()) {
    if (exps[axis] == 0) continue;
    MultiIndex e = exps;
    --e[axis];
    out.add_term(e, c * exps[axis]);
  }
  return out;
}

std::vector<double> gradient(const HomogeneousPolynomial& p,
                             std::span<const double> v) {
  std::vector<double> g(p.num_vars(), 0.0);
  for (const auto& [exps, c] : p.terms()) {
    const double cd = c.get_d();
    for (std::size_t a = 0; a < p.num_vars(); ++a) {
      if (exps[a] == 0) continue;
      double t = cd * exps[a];
      for (std::size_t k = 0; k < p.num_vars(); ++k) {
        t *= ipow(v[k], k == a ? exps[k] - 1 : exps[k]);
      }
      g[a] += t;
    }
  }
  return g;
}

HomogeneousPolynomial restrict_to_variables(const HomogeneousPolynomial& p,
                                            std::span<const std::size_t> keep) {
  HomogeneousPolynomial out(keep.size(), p.degree());
  std::vector<bool> kept(p.num_vars(), false);
  for (auto k : keep) {
    if (k >= p.num_vars()) throw InputError("restriction index out of range");
    kept[k] = true;
  }
  for (const auto& [exps, c] : p.terms()) {
    bool survives = true;
    for (std::size_t k = 0; k < exps.size(); ++k) {
      if (!kept[k] && exps[k] != 0) {
        survives = false;
        break;
      }
    }
    if (!survives) continue;
    MultiIndex e(keep.size());
    for (std::size_t j = 0; j < keep.size(); ++j) e[j] = exps[keep[j]];
    out.add_term(e, c);
  }
  return out;
}

HomogeneousPolynomial sum_of_squares(
    std::span<const HomogeneousPolynomial> ps) {
  if (ps.empty()) throw InputError("sum of squares of an empty family");
  HomogeneousPolynomial out(ps.front().num_vars(), 2 * ps.front().degree());
  for (const auto& p : ps) out += p * p;
  return out;
}

CompiledPolynomial::CompiledPolynomial(const HomogeneousPolynomial& p)
    : num_vars(p.num_vars()), degree(p.degree()) {
  for (const auto& [exps, c] : p.terms()) {
    coeffs.push_back(c.get_d());
    exponents.insert(exponents.end(), exps.begin(), exps.end());
  }
}

double CompiledPolynomial::operator()(std::span<const double> v) const {
  double sum = 0.0;
  for (std::size_t t = 0; t < coeffs.size(); ++t) {
    double term = coeffs[t];
    const unsigned* e = exponents.data() + t * num_vars;
    for (std::size_t k = 0; k < num_vars; ++k) term *= ipow(v[k], e[k]);
    sum += term;
  }
  return sum;
}

}  // namespace oscibound
