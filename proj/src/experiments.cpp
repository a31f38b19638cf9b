// SPDX-License-Identifier: Apache-2.0
#include "oscibound/experiments.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "oscibound/certify.hpp"
#include "oscibound/errors.hpp"

namespace oscibound {

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InputError("line fit needs two or more points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw InputError("line fit needs two distinct abscissae");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - f.intercept - f.slope * x[i];
    ss_res += r * r;
  }
  f.r_squared = syy == 0.0 ? 1.0 : 1.0 - ss_res / syy;
  return f;
}

namespace {

nlohmann::json to_json(const LineFit& f) {
  return {{"slope", f.slope}, {"intercept", f.intercept}, {"r_squared", f.r_squared}};
}

bool is_power_of_two(double v) {
  if (!(v > 0.0) || !std::isfinite(v)) return false;
  int e = 0;
  return std::frexp(v, &e) == 0.5;
}

Rational exact(double v) { return Rational(v); }

std::size_t budget_m(const PhaseDescriptor& phase, const ResolutionRule& rule) {
  const double maxdim = static_cast<double>(std::max(phase.nx, phase.ny));
  auto cap = static_cast<std::size_t>(
      std::floor(std::pow(static_cast<double>(rule.max_nodes_per_side), 1.0 / maxdim) + 1e-9));
  return std::bit_floor(std::max<std::size_t>(cap, 1));
}

struct PointEstimate {
  NormEstimate norm;
  std::optional<NormEstimate> upper;
  std::optional<NormEstimate> testfn;
};

PointEstimate estimate(const KernelMatrix& K, unsigned degree, double p,
                       const DecayOptions& opts, bool with_extras) {
  PointEstimate e;
  if (with_extras || p != 2.0) {
    try {
      e.testfn = lower_bound_via_testfn(K, degree, p, opts.eps0);
    } catch (const InputError&) {
      e.testfn.reset();
    }
  }
  e.norm = op_norm(K, p, opts.norm);
  const bool exact = p == 1.0 || std::isinf(p);
  if (p != 2.0 && !exact) {
    if (e.testfn && e.testfn->value > e.norm.value) {
      const std::size_t it = e.norm.iterations;
      e.norm = *e.testfn;
      e.norm.iterations = it;
    }
    if (with_extras) e.upper = interpolated_upper(K, p, opts.norm);
  }
  return e;
}

std::string describe_lambda(double lambda) {
  std::ostringstream os;
  os << "2^" << std::log2(lambda);
  return os.str();
}

}  // namespace

std::vector<double> DecayFit::lambdas() const {
  std::vector<double> v;
  for (const auto& pt : points) v.push_back(pt.lambda);
  return v;
}

std::vector<double> DecayFit::norms() const {
  std::vector<double> v;
  for (const auto& pt : points) v.push_back(pt.norm.value);
  return v;
}

nlohmann::json to_json(const DecayFit& f) {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& pt : f.points) {
    nlohmann::json j{{"lambda", pt.lambda},
                     {"m", pt.m},
                     {"requested_m", pt.requested_m},
                     {"cap_hit", pt.cap_hit},
                     {"norm", to_json(pt.norm)},
                     {"schur", to_json(pt.schur)},
                     {"sandwich_ok", pt.sandwich_ok},
                     {"excluded_nodes", pt.excluded_nodes}};
    if (pt.upper) j["upper"] = to_json(*pt.upper);
    if (pt.testfn) j["testfn"] = to_json(*pt.testfn);
    pts.push_back(std::move(j));
  }
  nlohmann::json j{{"p", std::isinf(f.p) ? nlohmann::json("inf") : nlohmann::json(f.p)},
                   {"points", pts},
                   {"fit", to_json(f.fit)},
                   {"truncated", f.truncated},
                   {"dropped_lambdas", f.dropped_lambdas},
                   {"rank_one", f.rank_one_status},
                   {"warnings", f.warnings}};
  if (f.predicted) j["predicted_slope"] = *f.predicted;
  if (f.upper_fit) j["upper_fit"] = to_json(*f.upper_fit);
  if (f.truncated_at) j["truncated_at"] = *f.truncated_at;
  j["stability"] = {{"performed", f.stability.performed},
                    {"alternate_m", f.stability.alternate_m},
                    {"alternate_slope", f.stability.alternate_slope},
                    {"delta", f.stability.delta},
                    {"passed", f.stability.passed}};
  return j;
}

void require_dyadic(const std::vector<double>& lambdas) {
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (!is_power_of_two(lambdas[i])) {
      std::ostringstream os;
      os << "lambda = " << lambdas[i] << " is not a power of two";
      throw InputError(os.str());
    }
    if (i > 0 && !(lambdas[i] > lambdas[i - 1])) {
      throw InputError("lambda values must be strictly increasing");
    }
  }
}

std::vector<double> dyadic_range(int lo, int hi, int step) {
  if (step <= 0) throw InputError("lambda step must be positive");
  if (hi < lo) throw InputError("lambda range is empty");
  std::vector<double> v;
  for (int e = lo; e <= hi; e += step) v.push_back(std::ldexp(1.0, e));
  return v;
}

KernelRequest default_request(const PhaseDescriptor& phase, const CutoffSpec& cutoff) {
  KernelRequest r;
  r.cutoff = cutoff;
  r.x_grid = GridSpec::centered(phase.nx, 32, cutoff.support_radius);
  r.y_grid = GridSpec::centered(phase.ny, 32, cutoff.support_radius);
  return r;
}

DecayFit decay_fit(const PhaseDescriptor& phase, double p,
                   const std::vector<double>& lambdas, const KernelRequest& base,
                   const DecayOptions& opts) {
  if (!(p >= 1.0)) throw InputError("Lebesgue exponent must satisfy p >= 1");
  if (lambdas.size() < 5) throw InputError("decay_fit needs at least 5 lambda values");
  require_dyadic(lambdas);

  DecayFit out;
  out.p = p;
  const int nx = static_cast<int>(phase.nx), ny = static_cast<int>(phase.ny);
  const int d = static_cast<int>(phase.degree());

  if (opts.certify_rank_one) {
    const auto cert = check_rank_one(phase);
    out.rank_one_status = to_string(cert.status);
    if (cert.status != CertStatus::CertifiedPositive) {
      out.warnings.push_back("rank-one condition not certified (" + out.rank_one_status + ")");
    }
  }
  if (phase.theorem_applicable()) {
    if (base.damping) {
      out.predicted = -predicted_damping_decay(nx, ny, d, base.damping->dD,
                                               exact(base.damping->z.real()))
                           .exponent.get_d();
    } else {
      const LpExponent pe = std::isinf(p) ? LpExponent::infinity() : LpExponent::from_p(exact(p));
      out.predicted = -decay_exponent(nx, ny, d, pe).get_d();
    }
  } else {
    out.warnings.push_back("no predicted slope: degree does not exceed nx + ny");
  }

  const std::size_t cap_m = budget_m(phase, opts.rule);
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    KernelRequest req = base;
    req.lambda = lambdas[i];
    GridChoice gc;
    if (opts.fixed_m) {
      gc.m = gc.requested_m = *opts.fixed_m;
    } else {
      gc = choose_grid(phase, req, opts.rule);
    }
    if (gc.cap_hit && opts.budget_mode == BudgetMode::Truncate) {
      out.truncated = true;
      out.truncated_at = lambdas[i];
      out.dropped_lambdas.assign(lambdas.begin() + static_cast<std::ptrdiff_t>(i), lambdas.end());
      out.warnings.push_back("sweep truncated at lambda = " + describe_lambda(lambdas[i]) +
                             ": grid budget exceeded");
      break;
    }
    if (gc.cap_hit) {
      out.warnings.push_back("lambda = " + describe_lambda(lambdas[i]) +
                             " run at the budget grid m = " + std::to_string(gc.m) +
                             " (rule asks for " + std::to_string(gc.requested_m) + ")");
    }
    const KernelMatrix K = build_kernel(phase, with_resolution(req, gc.m));
    const PointEstimate e = estimate(K, phase.degree(), p, opts, true);
    DecayPoint pt;
    pt.lambda = lambdas[i];
    pt.m = gc.m;
    pt.requested_m = gc.requested_m;
    pt.cap_hit = gc.cap_hit;
    pt.norm = e.norm;
    pt.upper = e.upper;
    pt.testfn = e.testfn;
    pt.schur = schur_bound(K, p);
    pt.excluded_nodes = K.excluded_nodes;
    const double slack = 1.0 + 1e-6;
    pt.sandwich_ok = pt.norm.value <= pt.schur.value * slack &&
                     (!pt.testfn || pt.testfn->value <= pt.norm.value * slack);
    if (!pt.sandwich_ok) {
      out.warnings.push_back("sandwich TestFnLower <= estimate <= SchurUpper violated at lambda = " +
                             describe_lambda(lambdas[i]));
    }
    out.points.push_back(std::move(pt));
  }
  if (out.points.size() < 2) {
    throw BudgetExceeded("grid budget leaves fewer than two lambda values to fit",
                         out.truncated_at.value_or(lambdas.front()));
  }
  if (out.points.size() < 5) {
    out.warnings.push_back("fit uses only " + std::to_string(out.points.size()) + " lambda values");
  }

  std::vector<double> lx, ly, uy;
  for (const auto& pt : out.points) {
    lx.push_back(std::log2(pt.lambda));
    ly.push_back(std::log2(pt.norm.value));
    if (pt.upper) uy.push_back(std::log2(pt.upper->value));
  }
  out.fit = fit_line(lx, ly);
  if (uy.size() == lx.size()) out.upper_fit = fit_line(lx, uy);

  if (opts.stability_gate && !opts.fixed_m) {
    const double maxdim = static_cast<double>(std::max(phase.nx, phase.ny));
    std::vector<double> alt;
    for (const auto& pt : out.points) {
      std::size_t m2 = 2 * pt.m;
      if (m2 > cap_m || std::pow(static_cast<double>(m2), maxdim) >
                            static_cast<double>(opts.rule.max_nodes_per_side)) {
        m2 = pt.m / 2;
      }
      KernelRequest req = base;
      req.lambda = pt.lambda;
      const KernelMatrix K = build_kernel(phase, with_resolution(req, m2));
      alt.push_back(std::log2(estimate(K, phase.degree(), p, opts, false).norm.value));
      out.stability.alternate_m.push_back(m2);
    }
    out.stability.performed = true;
    out.stability.alternate_slope = fit_line(lx, alt).slope;
    out.stability.delta = std::abs(out.stability.alternate_slope - out.fit.slope);
    out.stability.passed = out.stability.delta < opts.stability_tolerance;
    if (!out.stability.passed) out.warnings.push_back("m-doubling stability gate failed");
  }
  return out;
}

std::vector<DampingRow> damping_scan(const PhaseDescriptor& phase,
                                     const DampingSpec& damping,
                                     const std::vector<double>& sigmas,
                                     const std::vector<double>& lambdas,
                                     const KernelRequest& base,
                                     const DecayOptions& opts, double tolerance) {
  const int nx = static_cast<int>(phase.nx), ny = static_cast<int>(phase.ny);
  const int d = static_cast<int>(phase.degree());
  std::vector<DampingRow> rows;
  for (double sigma : sigmas) {
    DampingRow row;
    row.sigma = sigma;
    row.tolerance = tolerance;
    const double strip = -static_cast<double>(std::min(nx, ny)) / damping.dD;
    if (!phase.theorem_applicable()) {
      row.skipped = "degree does not exceed nx + ny";
    } else if (!(sigma > strip)) {
      std::ostringstream os;
      os << "sigma = " << sigma << " outside the strip sigma > " << strip;
      row.skipped = os.str();
    }
    if (!row.skipped.empty()) {
      rows.push_back(std::move(row));
      continue;
    }
    row.prediction = predicted_damping_decay(nx, ny, d, damping.dD, exact(sigma));
    KernelRequest req = base;
    req.damping = damping;
    req.damping->z = {sigma, 0.0};
    row.fit = decay_fit(phase, 2.0, lambdas, req, opts);
    row.agrees = std::abs(row.fit->fit.slope + row.prediction->exponent.get_d()) <= tolerance;
    rows.push_back(std::move(row));
  }
  return rows;
}

nlohmann::json to_json(const DampingRow& r) {
  nlohmann::json j{{"sigma", r.sigma}, {"tolerance", r.tolerance}, {"agrees", r.agrees}};
  if (!r.skipped.empty()) j["skipped"] = r.skipped;
  if (r.prediction) {
    j["predicted_slope"] = -r.prediction->exponent.get_d();
    j["predicted_exponent"] = rational_json(r.prediction->exponent);
    j["log_factor"] = r.prediction->log_factor;
    j["threshold"] = rational_json(r.prediction->threshold);
  }
  if (r.fit) j["fit"] = to_json(*r.fit);
  return j;
}

std::string to_string(ShellRegime r) {
  switch (r) {
    case ShellRegime::Size: return "size";
    case ShellRegime::Transition: return "transition";
    case ShellRegime::Oscillation: return "oscillation";
  }
  return "transition";
}

std::size_t measured_overlap(const std::vector<KernelMatrix>& shells) {
  const std::size_t n = shells.size();
  std::vector<std::vector<bool>> rows(n), cols(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::MatrixXd a = shells[i].entries.cwiseAbs();
    rows[i].resize(static_cast<std::size_t>(a.rows()));
    cols[i].resize(static_cast<std::size_t>(a.cols()));
    for (Eigen::Index r = 0; r < a.rows(); ++r) rows[i][static_cast<std::size_t>(r)] = a.row(r).maxCoeff() > 0.0;
    for (Eigen::Index c = 0; c < a.cols(); ++c) cols[i][static_cast<std::size_t>(c)] = a.col(c).maxCoeff() > 0.0;
  }
  auto overlap = [](const std::vector<bool>& a, const std::vector<bool>& b) {
    for (std::size_t k = 0; k < a.size(); ++k) {
      if (a[k] && b[k]) return true;
    }
    return false;
  };
  for (std::size_t N = 1; N <= n; ++N) {
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) {
      for (std::size_t j = i + N; j < n && ok; ++j) {
        ok = !overlap(rows[i], rows[j]) && !overlap(cols[i], cols[j]);
      }
    }
    if (ok) return N;
  }
  return std::max<std::size_t>(n, 1);
}

nlohmann::json to_json(const ShellProfile& s) {
  nlohmann::json shells = nlohmann::json::array();
  for (const auto& r : s.shells) {
    shells.push_back({{"k", r.k},
                      {"mu", r.mu},
                      {"regime", to_string(r.regime)},
                      {"m", r.m},
                      {"norm", r.norm},
                      {"size_bound", r.size_bound},
                      {"oscillation_bound", r.oscillation_bound},
                      {"ratio_to_size", r.ratio_to_size},
                      {"ratio_to_oscillation", r.ratio_to_oscillation}});
  }
  nlohmann::json j{{"lambda", s.lambda},
                   {"shells", shells},
                   {"dropped", s.dropped},
                   {"size_target", s.size_target},
                   {"oscillation_target", s.oscillation_target},
                   {"sum_sup",
                    {{"common_m", s.common_m},
                     {"window", s.common_window},
                     {"sum_norm", s.sum_norm},
                     {"sup_norm", s.sup_norm},
                     {"measured_n0", s.measured_n0},
                     {"holds", s.sum_sup_holds},
                     {"ratio", s.sum_sup_ratio}}}};
  if (s.size_fit) j["size_fit"] = to_json(*s.size_fit);
  if (s.oscillation_fit) j["oscillation_fit"] = to_json(*s.oscillation_fit);
  return j;
}

ShellProfile shell_profile(const PhaseDescriptor& phase, double lambda,
                           const std::vector<int>& ks, const CutoffSpec& cutoff,
                           const ShellOptions& opts) {
  if (ks.empty()) throw InputError("shell_profile needs at least one shell index");
  for (int k : ks) {
    if (k > 0) throw InputError("shell indices must satisfy k <= 0");
  }
  if (!(lambda >= 0.0)) throw InputError("lambda must be nonnegative");
  std::vector<int> sorted = ks;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

  const double n = static_cast<double>(phase.nx + phase.ny);
  const double d = phase.degree();
  ShellProfile out;
  out.lambda = lambda;
  out.size_target = n / 2.0;
  out.oscillation_target = n / 2.0 - d / 2.0;

  ResolutionRule rule = opts.rule;
  rule.min_m = std::max(rule.min_m, opts.min_m);
  std::vector<double> sk, sy, ok, oy;
  for (int k : sorted) {
    KernelRequest req;
    req.lambda = lambda;
    req.cutoff = cutoff;
    req.shell = ShellSpec{k};
    const double radius = std::min(std::ldexp(2.0, k), cutoff.support_radius);
    req.x_grid = GridSpec::centered(phase.nx, rule.min_m, radius);
    req.y_grid = GridSpec::centered(phase.ny, rule.min_m, radius);
    const GridChoice gc = choose_grid(phase, req, rule);
    if (gc.cap_hit) {
      out.dropped.push_back(k);
      continue;
    }
    const KernelMatrix K = build_kernel(phase, with_resolution(req, gc.m));
    ShellRecord r;
    r.k = k;
    r.mu = lambda * std::pow(2.0, k * d);
    r.m = gc.m;
    r.norm = op_norm(K, 2.0, opts.norm).value;
    r.size_bound = std::pow(2.0, k * n / 2.0);
    r.oscillation_bound = std::min(1.0, r.mu > 0 ? 1.0 / std::sqrt(r.mu) : 1.0) * r.size_bound;
    r.ratio_to_size = r.norm / r.size_bound;
    r.ratio_to_oscillation = r.norm / r.oscillation_bound;
    if (r.mu <= opts.size_mu_max) {
      r.regime = ShellRegime::Size;
      sk.push_back(k);
      sy.push_back(std::log2(r.norm));
    } else if (r.mu >= opts.oscillation_mu_min) {
      r.regime = ShellRegime::Oscillation;
      ok.push_back(k);
      oy.push_back(std::log2(r.norm));
    }
    out.shells.push_back(r);
  }
  if (sk.size() >= 2) out.size_fit = fit_line(sk, sy);
  if (ok.size() >= 2) out.oscillation_fit = fit_line(ok, oy);

  // Sum versus sup on one grid over the whole cut-off support.
  const std::size_t cap_m = budget_m(phase, opts.rule);
  out.common_m = std::min(cap_m, opts.common_m.value_or(std::size_t{1024}));
  out.common_window = sorted;
  KernelRequest common;
  common.lambda = lambda;
  common.cutoff = cutoff;
  common.x_grid = GridSpec::centered(phase.nx, out.common_m, cutoff.support_radius);
  common.y_grid = GridSpec::centered(phase.ny, out.common_m, cutoff.support_radius);
  std::vector<KernelMatrix> pieces;
  Eigen::MatrixXcd sum;
  for (int k : sorted) {
    KernelRequest req = common;
    req.shell = ShellSpec{k};
    KernelMatrix K = build_kernel(phase, req);
    out.sup_norm = std::max(out.sup_norm, op_norm(K, 2.0, opts.norm).value);
    if (sum.size() == 0) {
      sum = K.entries;
    } else {
      sum += K.entries;
    }
    // Only the support pattern is kept for the overlap count.
    K.entries = (K.entries.cwiseAbs().array() > 0.0).cast<std::complex<double>>().matrix();
    pieces.push_back(std::move(K));
  }
  KernelMatrix total = pieces.front();
  total.entries = std::move(sum);
  total.shell.reset();
  out.sum_norm = op_norm(total, 2.0, opts.norm).value;
  out.measured_n0 = measured_overlap(pieces);
  out.sum_sup_holds =
      out.sum_norm <= static_cast<double>(out.measured_n0) * out.sup_norm * (1.0 + 1e-9);
  out.sum_sup_ratio = out.sup_norm > 0.0 ? out.sum_norm / out.sup_norm : 0.0;
  return out;
}

nlohmann::json to_json(const VdcResult& r) {
  return {{"fit", to_json(r.fit)},
          {"hessian_min", r.hessian_min},
          {"hessian_max", r.hessian_max}};
}

VdcResult vdc_check(const VdcConfig& cfg, const std::vector<double>& lambdas,
                    const DecayOptions& opts) {
  const PhaseDescriptor& phase = cfg.phase;
  if (phase.nx != 1 || phase.ny != 1) throw InputError("vdc_check needs a (1+1) phase");
  if (!(cfg.mu > 0.0) || !(cfg.A >= 1.0)) throw InputError("vdc_check needs mu > 0 and A >= 1");
  if (!(cfg.x_hi > cfg.x_lo) || !(cfg.y_hi > cfg.y_lo)) throw InputError("empty trapezoid box");

  const CompiledPolynomial sxy(partial_derivative(partial_derivative(phase.S, 0), 1));
  VdcResult res;
  res.hessian_min = std::numeric_limits<double>::infinity();
  res.hessian_max = 0.0;
  const std::size_t ns = cfg.hessian_samples_per_axis;
  for (std::size_t i = 0; i <= ns; ++i) {
    const double x = cfg.x_lo + (cfg.x_hi - cfg.x_lo) * static_cast<double>(i) / static_cast<double>(ns);
    const double lo = cfg.g(x), hi = cfg.h(x);
    if (hi < lo) throw InputError("trapezoid graphs cross: h(x) < g(x)");
    for (std::size_t j = 0; j <= ns; ++j) {
      const double y = lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(ns);
      const double v[2] = {x, y};
      const double a = std::abs(sxy(v));
      res.hessian_min = std::min(res.hessian_min, a);
      res.hessian_max = std::max(res.hessian_max, a);
    }
  }
  const double rel = 1e-12;
  if (res.hessian_min < cfg.mu * (1.0 - rel) || res.hessian_max > cfg.A * cfg.mu * (1.0 + rel)) {
    std::ostringstream os;
    os << "mixed Hessian bound violated: sampled |S_xy| in [" << res.hessian_min << ", "
       << res.hessian_max << "], required [" << cfg.mu << ", " << cfg.A * cfg.mu << "]";
    throw InputError(os.str());
  }

  KernelRequest req;
  req.cutoff = CutoffSpec{1.0, CutoffProfile::Unit};
  req.x_grid = GridSpec{1, 32, cfg.x_lo, cfg.x_hi};
  req.y_grid = GridSpec{1, 32, cfg.y_lo, cfg.y_hi};
  const auto g = cfg.g, h = cfg.h;
  req.region = [g, h](double x, double y) { return g(x) <= y && y <= h(x); };

  DecayOptions o = opts;
  o.certify_rank_one = false;
  res.fit = decay_fit(phase, 2.0, lambdas, req, o);
  std::erase_if(res.fit.warnings,
                [](const std::string& w) { return w.rfind("no predicted slope", 0) == 0; });
  res.fit.predicted = -0.5;
  return res;
}

std::string to_string(GrowthClass c) {
  switch (c) {
    case GrowthClass::Bounded: return "Bounded";
    case GrowthClass::Logarithmic: return "Logarithmic";
    case GrowthClass::SuperLogarithmic: return "SuperLogarithmic";
  }
  return "SuperLogarithmic";
}

nlohmann::json to_json(const LogGrowthVerdict& v) {
  return {{"classification", to_string(v.classification)},
          {"u", v.u},
          {"mean", v.mean},
          {"residual_constant", v.residual_constant},
          {"log_fit", to_json(v.log_fit)},
          {"upper_half_fit", to_json(v.upper_half_fit)},
          {"slope_per_decade", v.slope_per_decade}};
}

LogGrowthVerdict log_factor_detect(const std::vector<double>& lambdas,
                                   const std::vector<double>& norms,
                                   const LogFactorRule& rule) {
  if (lambdas.size() != norms.size()) throw InputError("lambda and norm lists differ in length");
  if (lambdas.size() < 6) throw InputError("log_factor_detect needs at least 6 lambda values");
  require_dyadic(lambdas);

  LogGrowthVerdict v;
  std::vector<double> lx;
  for (std::size_t j = 0; j < lambdas.size(); ++j) {
    lx.push_back(std::log2(lambdas[j]));
    v.u.push_back(norms[j] * std::sqrt(lambdas[j]));
  }
  const double n = static_cast<double>(v.u.size());
  v.mean = std::accumulate(v.u.begin(), v.u.end(), 0.0) / n;
  for (double u : v.u) v.residual_constant += (u - v.mean) * (u - v.mean);
  v.log_fit = fit_line(lx, v.u);
  double residual_log = 0.0;
  for (std::size_t j = 0; j < v.u.size(); ++j) {
    const double r = v.u[j] - v.log_fit.intercept - v.log_fit.slope * lx[j];
    residual_log += r * r;
  }
  const std::size_t half = v.u.size() / 2;
  v.upper_half_fit = fit_line(std::vector<double>(lx.begin() + static_cast<std::ptrdiff_t>(half), lx.end()),
                              std::vector<double>(v.u.begin() + static_cast<std::ptrdiff_t>(half), v.u.end()));
  v.slope_per_decade = v.log_fit.slope * std::log2(10.0);

  const double b = v.log_fit.slope;
  if (v.slope_per_decade < rule.bounded_fraction * std::abs(v.mean)) {
    v.classification = GrowthClass::Bounded;
  } else if (b > 0.0 && std::abs(v.upper_half_fit.slope - b) <= rule.stability_band * b &&
             residual_log < rule.residual_ratio * v.residual_constant) {
    v.classification = GrowthClass::Logarithmic;
  } else {
    v.classification = GrowthClass::SuperLogarithmic;
  }
  return v;
}

}  // namespace oscibound
