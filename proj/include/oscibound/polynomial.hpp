// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace oscibound {

using Rational = mpq_class;

/// Exponent vector of a monomial; its length is the number of variables.
using MultiIndex = std::vector<unsigned>;

unsigned total_degree(const MultiIndex& exponents);

/// Homogeneous polynomial with exact rational coefficients.
///
/// Every stored monomial has total degree exactly degree(), and zero
/// coefficients are never stored. The zero polynomial keeps its nominal
/// degree so that derivative chains stay well typed.
class HomogeneousPolynomial {
 public:
  using TermMap = std::map<MultiIndex, Rational>;

  HomogeneousPolynomial() = default;
  HomogeneousPolynomial(std::size_t num_vars, unsigned degree);

  static HomogeneousPolynomial monomial(const MultiIndex& exponents,
                                        const Rational& coeff);

  std::size_t num_vars() const noexcept { return num_vars_; }
  unsigned degree() const noexcept { return degree_; }
  const TermMap& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }

  /// Adds coeff * x^exponents; throws InputError on a degree or arity mismatch.
  void add_term(const MultiIndex& exponents, const Rational& coeff);

  Rational coefficient(const MultiIndex& exponents) const;

  double evaluate(std::span<const double> v) const;
  Rational evaluate_exact(std::span<const Rational> v) const;

  /// Sum of |coeff| over all terms.
  double coefficient_l1() const;

  HomogeneousPolynomial& operator+=(const HomogeneousPolynomial& rhs);
  HomogeneousPolynomial& operator-=(const HomogeneousPolynomial& rhs);
  HomogeneousPolynomial& operator*=(const Rational& scale);

  friend HomogeneousPolynomial operator+(HomogeneousPolynomial lhs,
                                         const HomogeneousPolynomial& rhs) {
    return lhs += rhs;
  }
  friend HomogeneousPolynomial operator-(HomogeneousPolynomial lhs,
                                         const HomogeneousPolynomial& rhs) {
    return lhs -= rhs;
  }
  friend HomogeneousPolynomial operator*(HomogeneousPolynomial lhs,
                                         const Rational& scale) {
    return lhs *= scale;
  }
  friend HomogeneousPolynomial operator*(const HomogeneousPolynomial& lhs,
                                         const HomogeneousPolynomial& rhs);

  friend bool operator==(const HomogeneousPolynomial& a,
                         const HomogeneousPolynomial& b) {
    return a.num_vars_ == b.num_vars_ && a.degree_ == b.degree_ &&
           a.terms_ == b.terms_;
  }

  /// Human-readable form such as "1/3*x0^3*x1 + 1/3*x0*x1^3".
  std::string to_string() const;

 private:
  void check_arity(const MultiIndex& exponents) const;

  std::size_t num_vars_ = 0;
  unsigned degree_ = 0;
  TermMap terms_;
};

HomogeneousPolynomial partial_derivative(const HomogeneousPolynomial& p,
                                         std::size_t axis);

/// Gradient of p evaluated in double precision.
std::vector<double> gradient(const HomogeneousPolynomial& p,
                             std::span<const double> v);

/// Keeps only the variables listed in `keep` after setting every other
/// variable to zero. Terms that involve a dropped variable vanish.
HomogeneousPolynomial restrict_to_variables(const HomogeneousPolynomial& p,
                                            std::span<const std::size_t> keep);

/// Sum of squares of the given polynomials (all of the same arity/degree).
HomogeneousPolynomial sum_of_squares(std::span<const HomogeneousPolynomial> ps);

/// Double-precision monomial table for hot loops (kernel assembly, sampling).
struct CompiledPolynomial {
  std::size_t num_vars = 0;
  unsigned degree = 0;
  std::vector<double> coeffs;
  std::vector<unsigned> exponents;  // row-major, coeffs.size() x num_vars

  explicit CompiledPolynomial(const HomogeneousPolynomial& p);
  double operator()(std::span<const double> v) const;
};

}  // namespace oscibound
