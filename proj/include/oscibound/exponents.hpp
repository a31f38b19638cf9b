// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <nlohmann/json.hpp>

#include <optional>
#include <string>

#include "oscibound/certify.hpp"
#include "oscibound/phase.hpp"
#include "oscibound/polynomial.hpp"

namespace oscibound {

/// Lebesgue exponent p in [1, inf], stored through its reciprocal so that
/// p = inf is simply 1/p = 0.
class LpExponent {
 public:
  static LpExponent from_p(const Rational& p);
  static LpExponent infinity() { return LpExponent(Rational(0)); }
  /// Parses "2", "3/2", "1.5", "inf".
  static LpExponent parse(const std::string& text);

  const Rational& inv() const noexcept { return inv_p_; }
  Rational inv_conjugate() const { return 1 - inv_p_; }
  LpExponent conjugate() const { return LpExponent(1 - inv_p_); }
  bool is_infinite() const { return inv_p_ == 0; }
  /// p itself; only valid when finite.
  Rational value() const;
  double to_double() const;
  std::string to_string() const;

  friend bool operator==(const LpExponent&, const LpExponent&) = default;

 private:
  explicit LpExponent(Rational inv) : inv_p_(std::move(inv)) {}
  Rational inv_p_;
};

/// gamma = (nx/d)(1/p) + (ny/d)(1/p').
Rational decay_exponent(int nx, int ny, int d, const LpExponent& p);

struct PRange {
  Rational lower;  // (d - ny + nx) / (d - ny)
  Rational upper;  // (d - nx + ny) / ny
  bool closed = false;

  bool contains(const LpExponent& p) const;
};

PRange admissible_p_range(int nx, int ny, int d, bool endpoint_eligible);

struct DampingPrediction {
  Rational exponent;
  bool log_factor = false;
  Rational threshold;  // (d - nx - ny) / (2 dD)
};

/// Three-regime decay law for |D|^sigma damped operators.
DampingPrediction predicted_damping_decay(int nx, int ny, int d, int dD,
                                          const Rational& sigma);

/// sigma0 = (d - nx - ny) / 2.
Rational critical_damping_exponent(int nx, int ny, int d);

struct InterpolationResult {
  Rational weight_exponent;  // a*theta - (1 - theta)*nx
  LpExponent p;              // 1/p = theta/2 + 1 - theta
};

InterpolationResult interpolation_exponent(const Rational& a, int nx,
                                           const Rational& theta);

struct Eligibility {
  bool eligible = false;
  std::string reason;
};

Eligibility endpoint_eligibility(const PhaseDescriptor& phase,
                                 const CertificateResult& rank_one,
                                 const RadialCertificates& radial);

struct ExponentReport {
  int nx = 0, ny = 0, d = 0;
  LpExponent p = LpExponent::from_p(2);
  Rational gamma;
  PRange range;
  Rational sigma0;
  bool in_range = false;
  std::optional<int> dD;
  std::optional<Rational> sigma;
  std::optional<DampingPrediction> damping;
};

/// Throws InputError when d <= nx + ny.
ExponentReport exponent_report(const PhaseDescriptor& phase,
                               const LpExponent& p, bool endpoint_eligible,
                               std::optional<int> dD = std::nullopt,
                               std::optional<Rational> sigma = std::nullopt);

/// Parses "3/4", "-1/2", "0.75" exactly.
Rational parse_rational(const std::string& text);

nlohmann::json rational_json(const Rational& q);
nlohmann::json to_json(const ExponentReport& r);

}  // namespace oscibound
