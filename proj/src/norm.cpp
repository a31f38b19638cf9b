// SPDX-License-Identifier: Apache-2.0
#include "oscibound/norm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "oscibound/errors.hpp"

namespace oscibound {

std::string to_string(NormKind k) {
  switch (k) {
    case NormKind::Exact1: return "Exact1";
    case NormKind::ExactInf: return "ExactInf";
    case NormKind::PowerIter2: return "PowerIter2";
    case NormKind::BoydLowerP: return "BoydLowerP";
    case NormKind::SchurUpper: return "SchurUpper";
    case NormKind::TestFnLower: return "TestFnLower";
    case NormKind::InterpolatedUpper: return "InterpolatedUpper";
  }
  return "PowerIter2";
}

nlohmann::json to_json(const NormEstimate& e) {
  nlohmann::json j{{"kind", to_string(e.kind)},
                   {"value", e.value},
                   {"iterations", e.iterations},
                   {"residual", e.residual}};
  if (std::isinf(e.p)) {
    j["p"] = "inf";
  } else {
    j["p"] = e.p;
  }
  return j;
}

namespace {

void check_p(double p) {
  if (!(p >= 1.0)) throw InputError("Lebesgue exponent must satisfy p >= 1");
}

// Largest absolute column (or row) sum. Each sum runs sequentially in index
// order so the result is reproducible bit for bit.
double max_abs_line_sum(const Eigen::MatrixXcd& A, bool columns) {
  const Eigen::Index lines = columns ? A.cols() : A.rows();
  const Eigen::Index len = columns ? A.rows() : A.cols();
  double best = 0.0;
  for (Eigen::Index l = 0; l < lines; ++l) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < len; ++i) s += std::abs(columns ? A(i, l) : A(l, i));
    best = std::max(best, s);
  }
  return best;
}

double inv(double p) { return std::isinf(p) ? 0.0 : 1.0 / p; }

using Vec = Eigen::VectorXcd;

Vec start_vector(Eigen::Index n, std::uint64_t seed, int which) {
  if (which == 0) return Vec::Ones(n);
  std::mt19937_64 gen(seed + static_cast<std::uint64_t>(which));
  std::normal_distribution<double> normal;
  Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double re = normal(gen);
    v(i) = {re, normal(gen)};
  }
  return v;
}

NormEstimate power_method(const Eigen::MatrixXcd& A, Vec v, const NormOptions& opts) {
  NormEstimate out;
  v.normalize();
  double theta = 0.0, resid = std::numeric_limits<double>::infinity();
  for (std::size_t it = 1; it <= opts.max_iterations; ++it) {
    const Vec w = A.adjoint() * (A * v);
    theta = v.dot(w).real();
    out.iterations = it;
    if (theta <= 0.0) {
      out.value = 0.0;
      out.residual = 0.0;
      return out;
    }
    resid = (w - theta * v).norm() / theta;
    if (resid <= opts.tolerance) {
      out.value = std::sqrt(theta);
      out.residual = resid;
      return out;
    }
    v = w / w.norm();
  }
  throw ConvergenceError("power iteration did not reach the requested residual",
                         std::sqrt(std::max(theta, 0.0)), resid);
}

// Lanczos on B = A*A with full reorthogonalization and explicit restarts from
// the leading Ritz vector. Every exit is confirmed by an explicit residual.
NormEstimate lanczos_method(const Eigen::MatrixXcd& A, Vec v, const NormOptions& opts) {
  const Eigen::Index n = A.cols();
  const Eigen::Index kmax =
      std::max<Eigen::Index>(1, std::min<Eigen::Index>(n, static_cast<Eigen::Index>(opts.krylov_dim)));
  NormEstimate out;
  std::size_t applications = 0;
  double theta = 0.0, resid = std::numeric_limits<double>::infinity();

  while (true) {
    Eigen::MatrixXcd Q(n, kmax);
    std::vector<double> alpha, beta;
    Vec q = v / v.norm();
    Eigen::VectorXd ritz;
    Eigen::Index k = 0;
    Eigen::Index next_check = 8;
    while (true) {
      Q.col(k) = q;
      Vec w = A.adjoint() * (A * q);
      ++applications;
      const double a = q.dot(w).real();
      alpha.push_back(a);
      for (int pass = 0; pass < 2; ++pass) {
        const Vec c = Q.leftCols(k + 1).adjoint() * w;
        w.noalias() -= Q.leftCols(k + 1) * c;
      }
      const double b = w.norm();
      ++k;
      const bool full = k == kmax || applications >= opts.max_iterations;
      const bool breakdown = b <= 1e-14 * std::max(std::abs(a), 1e-300);
      if (full || breakdown || k >= next_check) {
        next_check = k + std::max<Eigen::Index>(8, k / 8);
        Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(alpha.data(), k);
        Eigen::VectorXd sub = k > 1 ? Eigen::Map<Eigen::VectorXd>(beta.data(), k - 1)
                                    : Eigen::VectorXd();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
        es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
        const double t = es.eigenvalues()(k - 1);
        ritz = es.eigenvectors().col(k - 1);
        const double estimate = t > 0.0 ? b * std::abs(ritz(k - 1)) / t : 0.0;
        if (full || breakdown || estimate <= 0.1 * opts.tolerance) break;
      }
      beta.push_back(b);
      q = w / b;
    }

    Vec y = Q.leftCols(k) * ritz.cast<std::complex<double>>();
    y.normalize();
    const Vec Ay = A * y;
    const Vec By = A.adjoint() * Ay;
    ++applications;
    theta = Ay.squaredNorm();
    out.iterations = applications;
    if (theta <= 0.0) {
      out.value = 0.0;
      out.residual = 0.0;
      return out;
    }
    resid = (By - theta * y).norm() / theta;
    if (resid <= opts.tolerance) {
      out.value = std::sqrt(theta);
      out.residual = resid;
      return out;
    }
    if (applications >= opts.max_iterations) break;
    v = y;
  }
  throw ConvergenceError("Lanczos iteration did not reach the requested residual",
                         std::sqrt(theta), resid);
}

double lp_norm(const Vec& v, double p) {
  if (std::isinf(p)) return v.cwiseAbs().maxCoeff();
  double s = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += std::pow(std::abs(v(i)), p);
  return std::pow(s, 1.0 / p);
}

// u with ||u||_q = 1 and <u, v> = ||v||_p, for 1 < p < inf.
Vec dual_vector(const Vec& v, double p) {
  const double nv = lp_norm(v, p);
  Vec u(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v(i));
    u(i) = a == 0.0 ? std::complex<double>(0.0, 0.0)
                    : (v(i) / a) * std::pow(a / nv, p - 1.0);
  }
  return u;
}

NormEstimate boyd_method(const Eigen::MatrixXcd& A, double p, const NormOptions& opts) {
  const double q = p / (p - 1.0);
  NormEstimate out;
  out.kind = NormKind::BoydLowerP;
  out.p = p;
  bool any = false;
  for (int s = 0; s < opts.boyd_seeds; ++s) {
    Vec x = start_vector(A.cols(), opts.seed, s);
    x /= lp_norm(x, p);
    double best = 0.0, gap = 0.0;
    for (std::size_t it = 0; it < opts.boyd_max_iterations; ++it) {
      ++out.iterations;
      const Vec y = A * x;
      const double g = lp_norm(y, p);
      if (g == 0.0) break;  // trapped at zero; try the next seed
      any = true;
      const bool stalled = g <= best * (1.0 + opts.boyd_tolerance);
      best = std::max(best, g);
      const Vec z = A.adjoint() * dual_vector(y, p);
      const double zq = lp_norm(z, q);
      const double zx = z.dot(x).real();
      gap = zq > 0.0 ? (zq - zx) / zq : 0.0;
      if (zq <= zx * (1.0 + opts.boyd_tolerance) || stalled) break;
      x = dual_vector(z, q);
    }
    if (best > out.value) {
      out.value = best;
      out.residual = gap;
    }
  }
  if (!any && A.size() > 0 && A.cwiseAbs().maxCoeff() > 0.0) {
    throw ConvergenceError("every p-norm seed was mapped to zero", 0.0, 0.0);
  }
  return out;
}

}  // namespace

double continuum_scale(const KernelMatrix& K, double p) {
  const double ip = inv(p);
  return std::pow(K.x_grid.cell_volume(), ip) * std::pow(K.y_grid.cell_volume(), 1.0 - ip);
}

NormEstimate spectral_norm(const Eigen::MatrixXcd& A, const NormOptions& opts) {
  if (A.size() == 0) return NormEstimate{2.0, 0.0, NormKind::PowerIter2, 0, 0.0};
  Vec v = start_vector(A.cols(), opts.seed, 0) + start_vector(A.cols(), opts.seed, 1);
  NormEstimate e = opts.method == SpectralMethod::Lanczos ? lanczos_method(A, v, opts)
                                                          : power_method(A, v, opts);
  e.p = 2.0;
  e.kind = NormKind::PowerIter2;
  return e;
}

NormEstimate op_norm(const KernelMatrix& K, double p, const NormOptions& opts) {
  check_p(p);
  const Eigen::MatrixXcd& A = K.entries;
  NormEstimate e;
  e.p = p;
  if (p == 1.0) {
    e.kind = NormKind::Exact1;
    e.value = max_abs_line_sum(A, true);
  } else if (std::isinf(p)) {
    e.kind = NormKind::ExactInf;
    e.value = max_abs_line_sum(A, false);
  } else if (p == 2.0) {
    e = spectral_norm(A, opts);
  } else {
    e = boyd_method(A, p, opts);
  }
  e.value *= continuum_scale(K, p);
  return e;
}

NormEstimate schur_bound(const KernelMatrix& K, double p) {
  check_p(p);
  const double rows = max_abs_line_sum(K.entries, false) * K.y_grid.cell_volume();
  const double cols = max_abs_line_sum(K.entries, true) * K.x_grid.cell_volume();
  const double ip = inv(p);
  NormEstimate e;
  e.p = p;
  e.kind = NormKind::SchurUpper;
  e.value = std::pow(rows, 1.0 - ip) * std::pow(cols, ip);
  return e;
}

NormEstimate interpolated_upper(const KernelMatrix& K, double p, const NormOptions& opts) {
  check_p(p);
  const NormEstimate n2 = op_norm(K, 2.0, opts);
  NormEstimate e;
  e.p = p;
  e.kind = NormKind::InterpolatedUpper;
  e.iterations = n2.iterations;
  e.residual = n2.residual;
  if (p == 2.0) {
    e.value = n2.value;
  } else if (p < 2.0) {
    const double t = 2.0 * (1.0 - 1.0 / p);  // 2/p'
    e.value = std::pow(n2.value, t) * std::pow(op_norm(K, 1.0).value, 1.0 - t);
  } else {
    const double t = 2.0 * inv(p);  // 2/p
    e.value = std::pow(n2.value, t) *
              std::pow(op_norm(K, std::numeric_limits<double>::infinity()).value, 1.0 - t);
  }
  return e;
}

NormEstimate lower_bound_via_testfn(const KernelMatrix& K, unsigned degree,
                                    double p, double eps0) {
  check_p(p);
  const std::vector<double> f = sharpness_test_function(K.lambda, eps0, degree, K.y_grid);
  Vec fv(static_cast<Eigen::Index>(f.size()));
  std::size_t count = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    fv(static_cast<Eigen::Index>(i)) = f[i];
    count += f[i] != 0.0;
  }
  const double vx = K.x_grid.cell_volume(), vy = K.y_grid.cell_volume();
  const Vec g = (K.entries * fv) * vy;
  NormEstimate e;
  e.p = p;
  e.kind = NormKind::TestFnLower;
  if (std::isinf(p)) {
    e.value = g.cwiseAbs().maxCoeff();
  } else {
    const double gp = lp_norm(g, p) * std::pow(vx, 1.0 / p);
    const double fp = std::pow(static_cast<double>(count) * vy, 1.0 / p);
    e.value = gp / fp;
  }
  return e;
}

}  // namespace oscibound
