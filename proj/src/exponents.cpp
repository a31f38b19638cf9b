// SPDX-License-Identifier: Apache-2.0
#include "oscibound/exponents.hpp"

#include <algorithm>
#include <cctype>
#include <limits>

#include "oscibound/errors.hpp"

namespace oscibound {

namespace {

// mpq_class(n, d) is not reduced automatically; GMP arithmetic and equality
// assume canonical operands.
Rational ratio(long n, long d) {
  Rational q(n, d);
  q.canonicalize();
  return q;
}

}  // namespace

Rational parse_rational(const std::string& raw) {
  std::string text;
  for (char c : raw) {
    if (!std::isspace(static_cast<unsigned char>(c))) text.push_back(c);
  }
  if (text.empty()) throw InputError("empty number");
  auto bad = [&] { return InputError("cannot parse '" + raw + "' as a rational"); };

  bool negative = false;
  std::size_t pos = 0;
  if (text[0] == '-' || text[0] == '+') {
    negative = text[0] == '-';
    pos = 1;
  }
  std::string body = text.substr(pos);
  if (body.empty()) throw bad();

  Rational q;
  if (auto slash = body.find('/'); slash != std::string::npos) {
    const std::string num = body.substr(0, slash), den = body.substr(slash + 1);
    auto digits = [](const std::string& s) {
      return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
        return std::isdigit(static_cast<unsigned char>(c));
      });
    };
    if (!digits(num) || !digits(den)) throw bad();
    mpz_class n(num, 10), d(den, 10);
    if (d == 0) throw InputError("zero denominator in '" + raw + "'");
    q = Rational(n, d);
  } else {
    const auto dot = body.find('.');
    std::string ip = body.substr(0, dot);
    std::string fp = dot == std::string::npos ? "" : body.substr(dot + 1);
    if (ip.empty() && fp.empty()) throw bad();
    for (char c : ip + fp) {
      if (!std::isdigit(static_cast<unsigned char>(c))) throw bad();
    }
    mpz_class n(ip.empty() && !fp.empty() ? "0" + fp : ip + fp, 10);
    mpz_class d = 1;
    for (std::size_t i = 0; i < fp.size(); ++i) d *= 10;
    q = Rational(n, d);
  }
  q.canonicalize();
  return negative ? Rational(-q) : q;
}

LpExponent LpExponent::from_p(const Rational& p) {
  if (p < 1) throw InputError("Lebesgue exponent must satisfy p >= 1");
  Rational inv = 1 / p;
  return LpExponent(inv);
}

LpExponent LpExponent::parse(const std::string& text) {
  std::string t;
  for (char c : text) t.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (t == "inf" || t == "infinity" || t == "oo") return infinity();
  return from_p(parse_rational(text));
}

Rational LpExponent::value() const {
  if (is_infinite()) throw InputError("p = inf has no finite value");
  return 1 / inv_p_;
}

double LpExponent::to_double() const {
  return is_infinite() ? std::numeric_limits<double>::infinity()
                       : value().get_d();
}

std::string LpExponent::to_string() const {
  return is_infinite() ? "inf" : value().get_str();
}

namespace {

void require_theorem(int nx, int ny, int d) {
  if (nx <= 0 || ny <= 0) throw InputError("nx and ny must be positive");
  if (d <= nx + ny) {
    throw InputError("theorem hypothesis d > nx + ny fails (d = " +
                     std::to_string(d) + ", nx + ny = " +
                     std::to_string(nx + ny) + ")");
  }
}

}  // namespace

Rational decay_exponent(int nx, int ny, int d, const LpExponent& p) {
  require_theorem(nx, ny, d);
  return ratio(nx, d) * p.inv() + ratio(ny, d) * p.inv_conjugate();
}

bool PRange::contains(const LpExponent& p) const {
  if (p.is_infinite()) return false;
  const Rational v = p.value();
  return closed ? (lower <= v && v <= upper) : (lower < v && v < upper);
}

PRange admissible_p_range(int nx, int ny, int d, bool endpoint_eligible) {
  require_theorem(nx, ny, d);
  PRange r;
  r.lower = ratio(d - ny + nx, d - ny);
  r.upper = ratio(d - nx + ny, ny);
  r.closed = endpoint_eligible;
  return r;
}

Rational critical_damping_exponent(int nx, int ny, int d) {
  return ratio(d - nx - ny, 2);
}

DampingPrediction predicted_damping_decay(int nx, int ny, int d, int dD,
                                          const Rational& sigma) {
  require_theorem(nx, ny, d);
  if (dD < 1) throw InputError("damping degree must be at least 1");
  const Rational floor_strip = ratio(-std::min(nx, ny), dD);
  if (sigma <= floor_strip) {
    throw InputError("sigma must exceed -min(nx, ny)/dD = " +
                     floor_strip.get_str());
  }
  DampingPrediction out;
  out.threshold = ratio(d - nx - ny, 2 * dD);
  if (sigma > out.threshold) {
    out.exponent = Rational(1, 2);
  } else if (sigma == out.threshold) {
    out.exponent = Rational(1, 2);
    out.log_factor = true;
  } else {
    out.exponent = ratio(dD, d) * sigma + ratio(nx + ny, 2 * d);
    out.exponent.canonicalize();
  }
  return out;
}

InterpolationResult interpolation_exponent(const Rational& a, int nx,
                                           const Rational& theta) {
  if (!(theta > 0 && theta < 1)) throw InputError("theta must lie in (0, 1)");
  if (nx <= 0) throw InputError("nx must be positive");
  if (a == ratio(-nx, 2)) {
    throw InputError("a = -nx/2 makes the weak-type weight exponent vanish");
  }
  InterpolationResult r{a * theta - (1 - theta) * nx,
                        LpExponent::from_p(1 / (theta / 2 + 1 - theta))};
  return r;
}

Eligibility endpoint_eligibility(const PhaseDescriptor& phase,
                                 const CertificateResult& rank_one,
                                 const RadialCertificates& radial) {
  auto describe = [](const char* what, const CertificateResult& c) {
    return std::string(what) + " is " + to_string(c.status);
  };
  if (!phase.theorem_applicable()) {
    return {false, "degree " + std::to_string(phase.degree()) +
                       " does not exceed nx + ny"};
  }
  if (rank_one.status != CertStatus::CertifiedPositive) {
    return {false, describe("rank-one certificate", rank_one)};
  }
  if (radial.x_side.status != CertStatus::CertifiedPositive) {
    return {false, describe("x-side radial certificate", radial.x_side)};
  }
  if (radial.y_side.status != CertStatus::CertifiedPositive) {
    return {false, describe("y-side radial certificate", radial.y_side)};
  }
  return {true, "all certificates positive"};
}

ExponentReport exponent_report(const PhaseDescriptor& phase,
                               const LpExponent& p, bool endpoint_eligible,
                               std::optional<int> dD,
                               std::optional<Rational> sigma) {
  ExponentReport r;
  r.nx = static_cast<int>(phase.nx);
  r.ny = static_cast<int>(phase.ny);
  r.d = static_cast<int>(phase.degree());
  r.p = p;
  r.gamma = decay_exponent(r.nx, r.ny, r.d, p);
  r.range = admissible_p_range(r.nx, r.ny, r.d, endpoint_eligible);
  r.in_range = r.range.contains(p);
  r.sigma0 = critical_damping_exponent(r.nx, r.ny, r.d);
  r.dD = dD;
  r.sigma = sigma;
  if (dD && sigma) r.damping = predicted_damping_decay(r.nx, r.ny, r.d, *dD, *sigma);
  return r;
}

nlohmann::json rational_json(const Rational& q) {
  return {{"exact", q.get_str()}, {"value", q.get_d()}};
}

nlohmann::json to_json(const ExponentReport& r) {
  nlohmann::json j{{"nx", r.nx},
                   {"ny", r.ny},
                   {"d", r.d},
                   {"p", r.p.to_string()},
                   {"gamma", rational_json(r.gamma)},
                   {"p_lower", rational_json(r.range.lower)},
                   {"p_upper", rational_json(r.range.upper)},
                   {"endpoint_inclusive", r.range.closed},
                   {"p_in_range", r.in_range},
                   {"sigma0", rational_json(r.sigma0)}};
  if (r.dD) j["d_D"] = *r.dD;
  if (r.sigma) j["sigma"] = rational_json(*r.sigma);
  if (r.damping) {
    j["damping"] = {{"exponent", rational_json(r.damping->exponent)},
                    {"log_factor", r.damping->log_factor},
                    {"threshold", rational_json(r.damping->threshold)}};
  }
  return j;
}

}  // namespace oscibound
