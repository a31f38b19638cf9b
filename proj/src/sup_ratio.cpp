// SPDX-License-Identifier: Apache-2.0
#include "oscibound/sup_ratio.hpp"

#include <algorithm>
#include <cmath>

#include "oscibound/errors.hpp"

namespace oscibound {

UnivariatePoly derivative(const UnivariatePoly& p) {
  if (p.size() <= 1) return {0.0};
  UnivariatePoly d(p.size() - 1);
  for (std::size_t k = 1; k < p.size(); ++k) d[k - 1] = k * p[k];
  return d;
}

double evaluate(const UnivariatePoly& p, double t) {
  double r = 0.0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) r = r * t + *it;
  return r;
}

namespace {

UnivariatePoly multiply(const UnivariatePoly& a, const UnivariatePoly& b) {
  UnivariatePoly out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

std::vector<double> sample_points(Interval I, std::size_t samples) {
  std::vector<double> t(samples + 1);
  for (std::size_t i = 0; i <= samples; ++i) {
    t[i] = I.lo + I.length() * static_cast<double>(i) / samples;
  }
  t.back() = I.hi;
  return t;
}

double sup_abs(const UnivariatePoly& p, const std::vector<double>& ts) {
  double s = 0.0;
  for (double t : ts) s = std::max(s, std::abs(evaluate(p, t)));
  return s;
}

}  // namespace

UnivariatePoly restrict_to_line(const HomogeneousPolynomial& p,
                                std::span<const double> base,
                                std::span<const double> direction) {
  if (base.size() != p.num_vars() || direction.size() != p.num_vars()) {
    throw InputError("line restriction dimension mismatch");
  }
  UnivariatePoly out(p.degree() + 1, 0.0);
  for (const auto& [exps, c] : p.terms()) {
    UnivariatePoly term{c.get_d()};
    for (std::size_t k = 0; k < exps.size(); ++k) {
      for (unsigned e = 0; e < exps[k]; ++e) {
        term = multiply(term, {base[k], direction[k]});
      }
    }
    for (std::size_t i = 0; i < term.size(); ++i) out[i] += term[i];
  }
  return out;
}

std::optional<double> derivative_sup_ratio(const UnivariatePoly& p,
                                           Interval I, unsigned d_max,
                                           std::size_t samples) {
  if (!(I.length() > 0.0)) throw InputError("interval must have positive length");
  if (samples < 4096) samples = 4096;
  const double denom = sup_abs(p, sample_points(I, samples));
  if (denom == 0.0) return std::nullopt;

  const Interval star = I.doubled();
  const auto ts = sample_points(star, samples);
  double num = 0.0;
  UnivariatePoly dk = p;
  double len_pow = 1.0;
  for (unsigned k = 0; k <= d_max; ++k) {
    num += len_pow * sup_abs(dk, ts);
    dk = derivative(dk);
    len_pow *= star.length();
  }
  return num / denom;
}

std::optional<double> power_sup_ratio(const UnivariatePoly& p, double sigma,
                                      Interval I, Interval J, unsigned d_max,
                                      std::size_t samples) {
  if (I.lo < J.lo || I.hi > J.hi) throw InputError("I must lie inside J");
  if (!(I.length() > 0.0)) throw InputError("interval must have positive length");
  if (samples < 4096) samples = 4096;

  const auto j_pts = sample_points(J, samples);
  double sign = 0.0;
  for (double t : j_pts) {
    const double v = evaluate(p, t);
    if (v == 0.0) return std::nullopt;
    const double s = v > 0 ? 1.0 : -1.0;
    if (sign == 0.0) sign = s;
    if (s != sign) return std::nullopt;
  }

  // Taylor coefficients of |P|^sigma at t, up to order d_max, times k!.
  auto derivs_at = [&](double t) {
    std::vector<double> s(d_max + 1);
    UnivariatePoly dk = p;
    double fact = 1.0;
    for (unsigned k = 0; k <= d_max; ++k) {
      if (k > 0) fact *= k;
      s[k] = sign * evaluate(dk, t) / fact;
      dk = derivative(dk);
    }
    std::vector<double> q(d_max + 1);
    q[0] = std::pow(s[0], sigma);
    for (unsigned n = 1; n <= d_max; ++n) {
      double acc = 0.0;
      for (unsigned k = 1; k <= n; ++k) {
        acc += ((sigma + 1.0) * k - n) * s[k] * q[n - k];
      }
      q[n] = acc / (n * s[0]);
    }
    fact = 1.0;
    for (unsigned k = 0; k <= d_max; ++k) {
      if (k > 0) fact *= k;
      q[k] = std::abs(q[k] * fact);
    }
    return q;
  };

  double denom = 0.0;
  for (double t : sample_points(I, samples)) denom = std::max(denom, derivs_at(t)[0]);

  Interval star = I.doubled();
  star.lo = std::max(star.lo, J.lo);
  star.hi = std::min(star.hi, J.hi);
  std::vector<double> sups(d_max + 1, 0.0);
  for (double t : sample_points(star, samples)) {
    const auto q = derivs_at(t);
    for (unsigned k = 0; k <= d_max; ++k) sups[k] = std::max(sups[k], q[k]);
  }
  double num = 0.0, len_pow = 1.0;
  for (unsigned k = 0; k <= d_max; ++k) {
    num += len_pow * sups[k];
    len_pow *= star.length();
  }
  return num / denom;
}

}  // namespace oscibound
