// SPDX-License-Identifier: Apache-2.0
#include "oscibound/certify.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>

#include "oscibound/errors.hpp"

namespace oscibound {

std::string to_string(CertStatus s) {
  switch (s) {
    case CertStatus::CertifiedPositive: return "CertifiedPositive";
    case CertStatus::WitnessFound: return "WitnessFound";
    case CertStatus::Inconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

nlohmann::json to_json(const CertificateResult& r) {
  nlohmann::json j{{"status", to_string(r.status)},
                   {"boxes_explored", r.boxes_explored},
                   {"max_depth_hit", r.max_depth_hit},
                   {"budget_hit", r.budget_hit},
                   {"best_sample", r.best_sample}};
  if (r.status == CertStatus::CertifiedPositive) j["lower_bound"] = r.lower_bound;
  if (r.status == CertStatus::WitnessFound) {
    j["witness"] = r.witness;
    j["witness_value"] = r.witness_value;
  }
  return j;
}

namespace {

// A box on face (axis, sign) of the cube. Free coordinate k spans
// [-1 + idx[k] * w, -1 + (idx[k] + 1) * w] with w = 2^(1 - depth).
struct Box {
  double key;
  std::uint64_t seq;
  int axis;
  int sign;
  int depth;
  std::vector<std::int64_t> idx;
};

struct BoxOrder {
  bool operator()(const Box& a, const Box& b) const {
    if (a.key != b.key) return a.key > b.key;
    return a.seq > b.seq;
  }
};

struct Bounder {
  const CompiledPolynomial& poly;
  std::vector<double> abs_coeffs;
  std::size_t n;

  explicit Bounder(const CompiledPolynomial& p) : poly(p), n(p.num_vars) {
    for (double c : p.coeffs) abs_coeffs.push_back(std::abs(c));
  }

  struct Eval {
    double sphere_lb;     // lower bound of p(v)/|v|^deg over the box
    double center_value;  // p at the normalized center
    std::vector<double> unit_center;
  };

  Eval operator()(const Box& b) const {
    const double w = std::ldexp(2.0, -b.depth);
    std::vector<double> center(n), maxabs(n), halfw(n, 0.0);
    std::size_t f = 0;
    for (std::size_t k = 0; k < n; ++k) {
      if (static_cast<int>(k) == b.axis) {
        center[k] = b.sign;
        maxabs[k] = 1.0;
        continue;
      }
      const double lo = -1.0 + static_cast<double>(b.idx[f]) * w;
      const double hi = lo + w;
      center[k] = 0.5 * (lo + hi);
      maxabs[k] = std::max(std::abs(lo), std::abs(hi));
      halfw[k] = 0.5 * w;
      ++f;
    }

    const double value = poly(center);
    double mon_sum = 0.0;
    std::vector<double> lip(n, 0.0);
    for (std::size_t t = 0; t < poly.coeffs.size(); ++t) {
      const unsigned* e = poly.exponents.data() + t * n;
      double mon = abs_coeffs[t];
      for (std::size_t k = 0; k < n; ++k) mon *= std::pow(maxabs[k], e[k]);
      mon_sum += mon;
      for (std::size_t j = 0; j < n; ++j) {
        if (e[j] == 0 || halfw[j] == 0.0) continue;
        double d = abs_coeffs[t] * e[j];
        for (std::size_t k = 0; k < n; ++k) {
          d *= std::pow(maxabs[k], k == j ? e[k] - 1 : e[k]);
        }
        lip[j] += d;
      }
    }
    double L2 = 0.0, r2 = 0.0, v2max = 0.0, c2 = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      L2 += lip[k] * lip[k];
      r2 += halfw[k] * halfw[k];
      v2max += maxabs[k] * maxabs[k];
      c2 += center[k] * center[k];
    }
    // Rounding slack for the center evaluation and the bound arithmetic.
    const double slack = 1e-13 * (poly.degree + 2) * mon_sum;
    const double lb = value - std::sqrt(L2) * std::sqrt(r2) * (1.0 + 1e-12) - slack;
    const double denom = std::pow(v2max, 0.5 * poly.degree) * (1.0 + 1e-12);

    Eval ev;
    ev.sphere_lb = lb > 0 ? lb / denom : lb;
    const double cn = std::sqrt(c2);
    ev.unit_center.resize(n);
    for (std::size_t k = 0; k < n; ++k) ev.unit_center[k] = center[k] / cn;
    ev.center_value = poly(ev.unit_center);
    return ev;
  }
};

// Projected gradient descent on the unit sphere with backtracking. Returns the
// final point; used to turn a near-zero sample into an exact witness.
std::vector<double> descend_on_sphere(const CompiledPolynomial& poly,
                                      const std::vector<CompiledPolynomial>& grad,
                                      std::vector<double> v, double* value) {
  const std::size_t n = v.size();
  double f = poly(v);
  double step = 1.0;
  std::vector<double> g(n), trial(n);
  for (int it = 0; it < 2000 && f > 0.0; ++it) {
    double gv = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      g[k] = grad[k](v);
      gv += g[k] * v[k];
    }
    double gn = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      g[k] -= gv * v[k];  // tangential part
      gn += g[k] * g[k];
    }
    if (gn == 0.0) break;
    bool moved = false;
    for (int ls = 0; ls < 60; ++ls) {
      double tn = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        trial[k] = v[k] - step * g[k];
        tn += trial[k] * trial[k];
      }
      tn = std::sqrt(tn);
      for (double& t : trial) t /= tn;
      const double ft = poly(trial);
      if (ft < f) {
        v.swap(trial);
        f = ft;
        step *= 2.0;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
  }
  *value = f;
  return v;
}

}  // namespace

CertificateResult certify_positive_on_sphere(const HomogeneousPolynomial& p,
                                             const CertifyOptions& opts) {
  const CompiledPolynomial poly(p);
  const Bounder bound(poly);
  const std::size_t n = p.num_vars();

  CertificateResult res;
  res.best_sample = std::numeric_limits<double>::infinity();
  std::vector<CompiledPolynomial> grad;
  for (std::size_t k = 0; k < n; ++k) grad.emplace_back(partial_derivative(p, k));
  std::vector<double> best_point;
  double refined_from = std::numeric_limits<double>::infinity();
  // Polishes the best sample when it improved since the last attempt.
  auto refine = [&]() -> bool {
    if (best_point.empty() || !(res.best_sample < refined_from)) return false;
    refined_from = res.best_sample;
    double value = 0.0;
    auto v = descend_on_sphere(poly, grad, best_point, &value);
    if (std::abs(value) <= opts.witness_tol) {
      res.status = CertStatus::WitnessFound;
      res.witness = std::move(v);
      res.witness_value = value;
      return true;
    }
    return false;
  };

  std::priority_queue<Box, std::vector<Box>, BoxOrder> queue;
  std::uint64_t seq = 0;
  auto push = [&](Box b) -> bool {
    const auto ev = bound(b);
    ++res.boxes_explored;
    if (ev.center_value < res.best_sample) {
      res.best_sample = ev.center_value;
      best_point = ev.unit_center;
    }
    if (std::abs(ev.center_value) <= opts.witness_tol) {
      res.status = CertStatus::WitnessFound;
      res.witness = ev.unit_center;
      res.witness_value = ev.center_value;
      return true;
    }
    b.key = ev.sphere_lb;
    b.seq = seq++;
    queue.push(std::move(b));
    return false;
  };

  for (int axis = 0; axis < static_cast<int>(n); ++axis) {
    for (int sign : {1, -1}) {
      if (push(Box{0.0, 0, axis, sign, 0, std::vector<std::int64_t>(n - 1, 0)})) {
        return res;
      }
    }
  }

  bool unresolved = false;
  std::size_t next_refine = 4096;
  while (!queue.empty()) {
    Box top = queue.top();
    if (top.key > 0 && top.key >= (1.0 - opts.relative_gap) * res.best_sample) {
      // Every queued box has a bound at least this large.
      res.lower_bound = top.key;
      res.status = unresolved ? CertStatus::Inconclusive
                              : CertStatus::CertifiedPositive;
      return res;
    }
    queue.pop();
    if (res.boxes_explored >= next_refine) {
      next_refine = res.boxes_explored + 4096;
      if (refine()) return res;
    }
    if (top.depth >= opts.max_depth || n == 1) {
      res.max_depth_hit = res.max_depth_hit || top.depth >= opts.max_depth;
      unresolved = true;
      continue;
    }
    if (res.boxes_explored >= opts.box_budget) {
      if (refine()) return res;
      res.budget_hit = true;
      res.status = CertStatus::Inconclusive;
      return res;
    }
    const std::size_t free = n - 1;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << free); ++mask) {
      Box child{0.0, 0, top.axis, top.sign, top.depth + 1, top.idx};
      for (std::size_t k = 0; k < free; ++k) {
        child.idx[k] = 2 * top.idx[k] + static_cast<std::int64_t>((mask >> k) & 1u);
      }
      if (push(std::move(child))) return res;
    }
  }
  if (refine()) return res;
  res.status = CertStatus::Inconclusive;
  return res;
}

CertificateResult check_rank_one(const PhaseDescriptor& phase,
                                 const CertifyOptions& opts) {
  return certify_positive_on_sphere(hessian_frobenius_squared(phase), opts);
}

RadialCertificates check_radial_nondegeneracy(const PhaseDescriptor& phase,
                                              const CertifyOptions& opts) {
  const auto g = boundary_gradients(phase);
  return {certify_positive_on_sphere(sum_of_squares(g.P), opts),
          certify_positive_on_sphere(sum_of_squares(g.Q), opts)};
}

}  // namespace oscibound
