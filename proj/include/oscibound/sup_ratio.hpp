// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <span>
#include <vector>

#include "oscibound/polynomial.hpp"

namespace oscibound {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const noexcept { return hi - lo; }
  double center() const noexcept { return 0.5 * (lo + hi); }
  /// Same center, twice the length.
  Interval doubled() const noexcept {
    const double r = length();
    return {lo - 0.5 * r, hi + 0.5 * r};
  }
};

/// Univariate polynomial, coefficients in ascending powers.
using UnivariatePoly = std::vector<double>;

UnivariatePoly derivative(const UnivariatePoly& p);
double evaluate(const UnivariatePoly& p, double t);

/// t -> p(base + t * direction), expanded into a univariate polynomial.
UnivariatePoly restrict_to_line(const HomogeneousPolynomial& p,
                                std::span<const double> base,
                                std::span<const double> direction);

/// [sum_{k=0}^{d_max} |I*|^k sup_{I*} |P^(k)|] / sup_I |P| with suprema taken
/// over uniform samples (endpoints included). Returns nullopt when P vanishes
/// on every sample of I, where the ratio is undefined.
std::optional<double> derivative_sup_ratio(const UnivariatePoly& p,
                                           Interval I, unsigned d_max,
                                           std::size_t samples = 4096);

/// Same diagnostic for Q = |P|^sigma on a sign-definite interval J, with I*
/// replaced by I* intersected with J. Derivatives of Q come from the power
/// series recurrence for P^sigma. Returns nullopt when P changes sign or
/// vanishes on J.
std::optional<double> power_sup_ratio(const UnivariatePoly& p, double sigma,
                                      Interval I, Interval J, unsigned d_max,
                                      std::size_t samples = 4096);

}  // namespace oscibound
