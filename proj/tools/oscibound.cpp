// SPDX-License-Identifier: Apache-2.0
// oscibound: certificates, predicted exponents and decay experiments for
// oscillatory integral operators with homogeneous polynomial phases.
//
// Exit codes: 0 success, 2 inconclusive certificate, 3 tolerance failure,
// 4 input error. Errors are also written to stderr as one JSON object.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "oscibound/certify.hpp"
#include "oscibound/errors.hpp"
#include "oscibound/experiments.hpp"
#include "oscibound/exponents.hpp"
#include "oscibound/norm.hpp"
#include "oscibound/phase.hpp"
#include "oscibound/report.hpp"

namespace {

using namespace oscibound;
using nlohmann::json;

constexpr int kOk = 0;
constexpr int kInconclusive = 2;
constexpr int kToleranceFailure = 3;
constexpr int kInputError = 4;

struct Common {
  std::string phase_positional;
  std::string phase;
  std::string out;
  bool json_out = false;
  std::uint64_t seed = NormOptions{}.seed;
  std::size_t max_nodes = ResolutionRule{}.max_nodes_per_side;
  std::size_t m_max = 0;
  std::size_t max_boxes = CertifyOptions{}.box_budget;
  std::size_t max_iterations = NormOptions{}.max_iterations;

  std::string source() const {
    if (!phase.empty()) return phase;
    if (!phase_positional.empty()) return phase_positional;
    throw InputError("no phase given (positional argument or --phase)");
  }
};

struct Params {
  std::string p = "2";
  double lambda = 0.0;
  std::size_t m = 0;
  std::string sigma;
  std::string sigmas = "0.25,0.5,0.75";
  int dD = 0;
  std::string damping = "radial";
  int lambda_min = 6;
  int lambda_max = 12;
  int lambda_step = 1;
  std::string budget_mode = "truncate";
  double tolerance = -1.0;
  double eps0 = 0.5;
  bool no_stability = false;
  bool no_certify = false;
  int k_min = -8;
  int k_max = -1;
  std::string region = "rect";
  double mu = 1.0;
  double A = 1.0;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("phase_source", c.phase_positional, "phase JSON file or built-in name");
  sub->add_option("--phase", c.phase, "phase JSON file or built-in name");
  sub->add_option("--out", c.out, "directory for report files");
  sub->add_flag("--json", c.json_out, "print the full JSON report on stdout");
  sub->add_option("--seed", c.seed, "seed for pseudo-random start vectors");
  sub->add_option("--max-nodes", c.max_nodes, "grid budget in nodes per side");
  sub->add_option("--m-max", c.m_max, "cap on points per axis");
  sub->add_option("--max-boxes", c.max_boxes, "certifier box budget");
  sub->add_option("--max-iterations", c.max_iterations, "p = 2 iteration cap");
}

json phase_config(const std::string& source, const PhaseDescriptor& phase) {
  return {{"source", source}, {"polynomial", to_json(phase)}};
}

ResolutionRule make_rule(const Common& c, const PhaseDescriptor& phase) {
  ResolutionRule r;
  r.max_nodes_per_side = c.max_nodes;
  if (c.m_max > 0) {
    const double dim = static_cast<double>(std::max(phase.nx, phase.ny));
    r.max_nodes_per_side = std::min<std::size_t>(
        r.max_nodes_per_side, static_cast<std::size_t>(std::pow(static_cast<double>(c.m_max), dim)));
  }
  return r;
}

NormOptions make_norm_options(const Common& c) {
  NormOptions o;
  o.seed = c.seed;
  o.max_iterations = c.max_iterations;
  return o;
}

CertifyOptions make_cert_options(const Common& c) {
  CertifyOptions o;
  o.box_budget = c.max_boxes;
  return o;
}

json budgets_json(const Common& c) {
  return {{"max_nodes_per_side", c.max_nodes},
          {"m_max", c.m_max},
          {"max_boxes", c.max_boxes},
          {"max_iterations", c.max_iterations},
          {"seed", c.seed}};
}

double parse_p(const std::string& text) { return LpExponent::parse(text).to_double(); }

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(parse_rational(item).get_d());
  }
  if (out.empty()) throw InputError("empty list '" + text + "'");
  return out;
}

std::optional<DampingSpec> make_damping(const Params& p, const PhaseDescriptor& phase,
                                        const std::string& sigma_text) {
  if (sigma_text.empty()) return std::nullopt;
  const double sigma = parse_rational(sigma_text).get_d();
  const std::complex<double> z{sigma, 0.0};
  if (p.damping == "radial") {
    if (p.dD != 0 && p.dD != 2) throw InputError("radial damping |x|^2 + |y|^2 has dD = 2");
    return DampingSpec::radial_square(phase.nx, phase.ny, z);
  }
  if (p.damping == "x" || p.damping == "y") {
    if (p.dD < 1) throw InputError("--dD is required for |x|^dD and |y|^dD damping");
    return p.damping == "x" ? DampingSpec::x_norm(phase.nx, phase.ny, p.dD, z)
                            : DampingSpec::y_norm(phase.nx, phase.ny, p.dD, z);
  }
  if (p.damping == "hessian") return DampingSpec::hessian_norm(phase, z);
  throw InputError("unknown damping '" + p.damping + "' (radial, x, y, hessian)");
}

double default_tolerance(const Params& p, const PhaseDescriptor& phase) {
  if (p.tolerance > 0) return p.tolerance;
  return phase.nx + phase.ny == 2 ? 0.05 : 0.07;
}

void emit(const Common& c, const std::string& stem, const json& report,
          const std::string& human) {
  if (!c.out.empty()) {
    std::filesystem::create_directories(c.out);
    write_text_file((std::filesystem::path(c.out) / (stem + ".json")).string(), report.dump(2) + "\n");
  }
  if (c.json_out) {
    std::cout << report.dump(2) << "\n";
  } else {
    std::cout << human;
  }
}

void emit_fit_files(const Common& c, const std::string& stem, const DecayFit& fit,
                    const std::string& title) {
  if (c.out.empty()) return;
  std::filesystem::create_directories(c.out);
  const std::filesystem::path dir(c.out);
  write_text_file((dir / (stem + ".csv")).string(), decay_csv(fit));
  write_text_file((dir / (stem + ".svg")).string(), plot_decay(fit, title));
}

struct CheckOutcome {
  json result;
  bool eligible = false;
  bool inconclusive = false;
};

CheckOutcome run_check_core(const PhaseDescriptor& phase, const CertifyOptions& co) {
  CheckOutcome o;
  const auto rank = check_rank_one(phase, co);
  const auto radial = check_radial_nondegeneracy(phase, co);
  const auto elig = endpoint_eligibility(phase, rank, radial);
  o.eligible = elig.eligible;
  o.inconclusive = rank.status == CertStatus::Inconclusive ||
                   radial.x_side.status == CertStatus::Inconclusive ||
                   radial.y_side.status == CertStatus::Inconclusive;
  o.result = {{"rank_one", to_json(rank)},
              {"radial_x", to_json(radial.x_side)},
              {"radial_y", to_json(radial.y_side)},
              {"theorem_applicable", phase.theorem_applicable()},
              {"endpoint_eligible", elig.eligible},
              {"eligibility_reason", elig.reason}};
  return o;
}

int cmd_check(const Common& c) {
  const std::string src = c.source();
  const PhaseDescriptor phase = load_phase(src);
  const auto o = run_check_core(phase, make_cert_options(c));
  const json config{{"command", "check"}, {"phase", phase_config(src, phase)}, {"budgets", budgets_json(c)}};
  std::ostringstream h;
  h << "rank_one: " << o.result["rank_one"]["status"].get<std::string>() << "\n"
    << "radial_x: " << o.result["radial_x"]["status"].get<std::string>() << "\n"
    << "radial_y: " << o.result["radial_y"]["status"].get<std::string>() << "\n"
    << "eligible: " << (o.eligible ? "true" : "false") << " (" << o.result["eligibility_reason"].get<std::string>()
    << ")\n";
  emit(c, "check", make_report(config, o.result), h.str());
  return o.inconclusive ? kInconclusive : kOk;
}

int cmd_predict(const Common& c, const Params& p) {
  const std::string src = c.source();
  const PhaseDescriptor phase = load_phase(src);
  const LpExponent pe = LpExponent::parse(p.p);
  bool eligible = false;
  json certs;
  if (!p.no_certify) {
    const auto o = run_check_core(phase, make_cert_options(c));
    eligible = o.eligible;
    certs = o.result;
  }
  std::optional<int> dD;
  std::optional<Rational> sigma;
  if (!p.sigma.empty()) {
    if (p.dD < 1) throw InputError("--sigma needs --dD");
    dD = p.dD;
    sigma = parse_rational(p.sigma);
  }
  const ExponentReport rep = exponent_report(phase, pe, eligible, dD, sigma);
  json result = to_json(rep);
  if (!p.no_certify) result["certificates"] = certs;
  const json config{{"command", "predict"},
                    {"phase", phase_config(src, phase)},
                    {"p", p.p},
                    {"sigma", p.sigma},
                    {"dD", p.dD},
                    {"certify", !p.no_certify},
                    {"budgets", budgets_json(c)}};
  std::ostringstream h;
  h << "gamma(p=" << pe.to_string() << ") = " << rep.gamma.get_str() << "\n"
    << "admissible p: " << (rep.range.closed ? "[" : "(") << rep.range.lower.get_str() << ", "
    << rep.range.upper.get_str() << (rep.range.closed ? "]" : ")") << "\n"
    << "sigma0 = " << rep.sigma0.get_str() << "\n";
  if (rep.damping) {
    h << "damped decay exponent = " << rep.damping->exponent.get_str()
      << (rep.damping->log_factor ? " with log factor" : "") << "\n";
  }
  emit(c, "predict", make_report(config, result), h.str());
  return kOk;
}

int cmd_norm(const Common& c, const Params& p) {
  const std::string src = c.source();
  const PhaseDescriptor phase = load_phase(src);
  const double pv = parse_p(p.p);
  if (!(p.lambda >= 0.0)) throw InputError("--lambda must be nonnegative");
  KernelRequest req = default_request(phase);
  req.lambda = p.lambda;
  req.damping = make_damping(p, phase, p.sigma);
  req.phase_id = src;
  const ResolutionRule rule = make_rule(c, phase);
  std::size_t m = p.m;
  GridChoice gc;
  if (m == 0) {
    gc = choose_grid(phase, req, rule);
    if (gc.cap_hit) {
      std::ostringstream os;
      os << "grid budget exceeded at lambda = " << p.lambda << " (rule asks for m = " << gc.requested_m << ")";
      throw BudgetExceeded(os.str(), p.lambda);
    }
    m = gc.m;
  }
  const NormOptions no = make_norm_options(c);
  const KernelMatrix K = build_kernel(phase, with_resolution(req, m));
  json estimates = json::array();
  estimates.push_back(to_json(op_norm(K, pv, no)));
  if (pv != 1.0) estimates.push_back(to_json(op_norm(K, 1.0, no)));
  if (pv != 2.0) estimates.push_back(to_json(op_norm(K, 2.0, no)));
  if (!std::isinf(pv)) estimates.push_back(to_json(op_norm(K, std::numeric_limits<double>::infinity(), no)));
  estimates.push_back(to_json(schur_bound(K, pv)));
  if (pv != 1.0 && pv != 2.0 && !std::isinf(pv)) estimates.push_back(to_json(interpolated_upper(K, pv, no)));
  try {
    estimates.push_back(to_json(lower_bound_via_testfn(K, phase.degree(), pv, p.eps0)));
  } catch (const InputError& e) {
    estimates.push_back({{"kind", "TestFnLower"}, {"skipped", e.what()}});
  }
  const json result{{"m", m},
                    {"gradient_bound", gc.gradient_bound},
                    {"excluded_nodes", K.excluded_nodes},
                    {"estimates", estimates}};
  const json config{{"command", "norm"},
                    {"phase", phase_config(src, phase)},
                    {"lambda", p.lambda},
                    {"p", p.p},
                    {"m", p.m},
                    {"sigma", p.sigma},
                    {"damping", p.damping},
                    {"dD", p.dD},
                    {"eps0", p.eps0},
                    {"cutoff", req.cutoff.to_json()},
                    {"budgets", budgets_json(c)}};
  std::ostringstream h;
  h.precision(10);
  for (const auto& e : estimates) {
    if (e.contains("value")) h << e["kind"].get<std::string>() << " " << e["value"].get<double>() << "\n";
  }
  emit(c, "norm", make_report(config, result), h.str());
  return kOk;
}

DecayOptions make_decay_options(const Common& c, const Params& p, const PhaseDescriptor& phase) {
  DecayOptions o;
  o.rule = make_rule(c, phase);
  o.norm = make_norm_options(c);
  if (p.budget_mode == "truncate") {
    o.budget_mode = BudgetMode::Truncate;
  } else if (p.budget_mode == "cap") {
    o.budget_mode = BudgetMode::Cap;
  } else {
    throw InputError("--budget-mode must be truncate or cap");
  }
  o.stability_gate = !p.no_stability;
  o.eps0 = p.eps0;
  if (p.m > 0) o.fixed_m = p.m;
  return o;
}

json sweep_config(const Params& p) {
  return {{"lambda_min_log2", p.lambda_min},
          {"lambda_max_log2", p.lambda_max},
          {"lambda_step_log2", p.lambda_step},
          {"budget_mode", p.budget_mode},
          {"stability_gate", !p.no_stability},
          {"eps0", p.eps0},
          {"m", p.m}};
}

bool fit_within(const DecayFit& f, double tol) {
  return f.predicted && std::abs(f.fit.slope - *f.predicted) <= tol &&
         (!f.stability.performed || f.stability.passed);
}

int cmd_decay(const Common& c, const Params& p) {
  const std::string src = c.source();
  const PhaseDescriptor phase = load_phase(src);
  const double pv = parse_p(p.p);
  KernelRequest base = default_request(phase);
  base.damping = make_damping(p, phase, p.sigma);
  base.phase_id = src;
  const double tol = default_tolerance(p, phase);
  const DecayFit fit = decay_fit(phase, pv, dyadic_range(p.lambda_min, p.lambda_max, p.lambda_step),
                                 base, make_decay_options(c, p, phase));
  const bool ok = fit_within(fit, tol);
  json result = to_json(fit);
  result["tolerance"] = tol;
  result["within_tolerance"] = ok;
  const json config{{"command", "decay"},
                    {"phase", phase_config(src, phase)},
                    {"p", p.p},
                    {"sigma", p.sigma},
                    {"damping", p.damping},
                    {"dD", p.dD},
                    {"sweep", sweep_config(p)},
                    {"tolerance", tol},
                    {"cutoff", base.cutoff.to_json()},
                    {"budgets", budgets_json(c)}};
  emit_fit_files(c, "decay", fit, src + ", p = " + p.p);
  std::ostringstream h;
  h << "slope " << fit.fit.slope;
  if (fit.predicted) h << " predicted " << *fit.predicted;
  h << " tolerance " << tol << (ok ? " PASS" : " FAIL") << "\n";
  for (const auto& w : fit.warnings) h << "warning: " << w << "\n";
  emit(c, "decay", make_report(config, result), h.str());
  return ok ? kOk : kToleranceFailure;
}

int cmd_damp(const Common& c, const Params& p) {
  const std::string src = c.source();
  const PhaseDescriptor phase = load_phase(src);
  const std::vector<double> sigmas = parse_list(p.sigmas);
  const auto damping = make_damping(p, phase, "0");
  const double tol = p.tolerance > 0 ? p.tolerance : 0.07;
  KernelRequest base = default_request(phase);
  base.phase_id = src;
  const auto rows = damping_scan(phase, *damping, sigmas,
                                 dyadic_range(p.lambda_min, p.lambda_max, p.lambda_step), base,
                                 make_decay_options(c, p, phase), tol);
  json result = json::array();
  bool ok = true;
  std::ostringstream h;
  for (const auto& r : rows) {
    result.push_back(to_json(r));
    if (!r.skipped.empty()) {
      h << "sigma " << r.sigma << " skipped: " << r.skipped << "\n";
      continue;
    }
    const bool critical = r.prediction->log_factor;
    // The critical case carries a log factor and is judged by the log classifier.
    if (!critical) ok = ok && r.agrees;
    h << "sigma " << r.sigma << " slope " << r.fit->fit.slope << " predicted "
      << -r.prediction->exponent.get_d() << (critical ? " (critical)" : (r.agrees ? " PASS" : " FAIL")) << "\n";
    if (critical && r.fit->points.size() >= 6) {
      const auto v = log_factor_detect(r.fit->lambdas(), r.fit->norms());
      result.back()["log_factor_verdict"] = to_json(v);
      result.back()["label"] = "open-problem diagnostic";
      h << "  log-factor verdict: " << to_string(v.classification) << "\n";
    }
    std::ostringstream stem;
    stem << "damp_sigma_" << r.sigma;
    emit_fit_files(c, stem.str(), *r.fit, src + ", sigma = " + std::to_string(r.sigma));
  }
  const json config{{"command", "damp"},
                    {"phase", phase_config(src, phase)},
                    {"sigmas", p.sigmas},
                    {"damping", p.damping},
                    {"dD", p.dD},
                    {"sweep", sweep_config(p)},
                    {"tolerance", tol},
                    {"budgets", budgets_json(c)}};
  emit(c, "damp", make_report(config, result), h.str());
  return ok ? kOk : kToleranceFailure;
}

int cmd_shells(const Common& c, const Params& p) {
  const std::string src = c.source();
  const PhaseDescriptor phase = load_phase(src);
  if (!(p.lambda > 0.0)) throw InputError("--lambda must be positive");
  if (p.k_min > p.k_max) throw InputError("--k-min exceeds --k-max");
  std::vector<int> ks;
  for (int k = p.k_min; k <= p.k_max; ++k) ks.push_back(k);
  ShellOptions so;
  so.rule = make_rule(c, phase);
  so.norm = make_norm_options(c);
  const ShellProfile s = shell_profile(phase, p.lambda, ks, CutoffSpec{}, so);
  const double tol = p.tolerance > 0 ? p.tolerance : 0.15;
  bool ok = s.sum_sup_holds;
  if (s.size_fit) ok = ok && std::abs(s.size_fit->slope - s.size_target) <= tol;
  if (s.oscillation_fit) ok = ok && std::abs(s.oscillation_fit->slope - s.oscillation_target) <= tol;
  json result = to_json(s);
  result["tolerance"] = tol;
  result["within_tolerance"] = ok;
  const json config{{"command", "shells"},
                    {"phase", phase_config(src, phase)},
                    {"lambda", p.lambda},
                    {"k_min", p.k_min},
                    {"k_max", p.k_max},
                    {"tolerance", tol},
                    {"budgets", budgets_json(c)}};
  std::ostringstream h;
  if (s.size_fit) h << "size regime slope " << s.size_fit->slope << " target " << s.size_target << "\n";
  if (s.oscillation_fit) {
    h << "oscillation regime slope " << s.oscillation_fit->slope << " target " << s.oscillation_target << "\n";
  }
  h << "sum/sup " << s.sum_sup_ratio << " with measured N0 = " << s.measured_n0
    << (s.sum_sup_holds ? " (holds)" : " (VIOLATED)") << "\n";
  emit(c, "shells", make_report(config, result), h.str());
  return ok ? kOk : kToleranceFailure;
}

int cmd_vdc(const Common& c, const Params& p) {
  std::string src;
  try {
    src = c.source();
  } catch (const InputError&) {
    src = "xy";
  }
  VdcConfig cfg;
  cfg.phase = load_phase(src);
  cfg.mu = p.mu;
  cfg.A = p.A;
  if (p.region == "triangle") {
    cfg.h = [](double x) { return x; };
  } else if (p.region != "rect") {
    throw InputError("--region must be rect or triangle");
  }
  const double tol = p.tolerance > 0 ? p.tolerance : 0.05;
  const VdcResult r = vdc_check(cfg, dyadic_range(p.lambda_min, p.lambda_max, p.lambda_step),
                                make_decay_options(c, p, cfg.phase));
  const bool ok = fit_within(r.fit, tol);
  json result = to_json(r);
  result["tolerance"] = tol;
  result["within_tolerance"] = ok;
  const json config{{"command", "vdc"},
                    {"phase", phase_config(src, cfg.phase)},
                    {"region", p.region},
                    {"mu", p.mu},
                    {"A", p.A},
                    {"sweep", sweep_config(p)},
                    {"tolerance", tol},
                    {"budgets", budgets_json(c)}};
  emit_fit_files(c, "vdc", r.fit, src + " on " + p.region);
  std::ostringstream h;
  h << "slope " << r.fit.fit.slope << " intercept " << r.fit.fit.intercept << " predicted -0.5"
    << (ok ? " PASS" : " FAIL") << "\n";
  emit(c, "vdc", make_report(config, result), h.str());
  return ok ? kOk : kToleranceFailure;
}

int cmd_report(const Common& c, const Params& p) {
  const std::string src = c.source();
  const PhaseDescriptor phase = load_phase(src);
  const auto check = run_check_core(phase, make_cert_options(c));
  json result{{"check", check.result}};
  if (!phase.theorem_applicable()) {
    result["status"] = "not applicable: degree does not exceed nx + ny";
    const json config{{"command", "report"}, {"phase", phase_config(src, phase)}, {"budgets", budgets_json(c)}};
    emit(c, "report", make_report(config, result), "theorem not applicable to this phase\n");
    return check.inconclusive ? kInconclusive : kOk;
  }
  const int nx = static_cast<int>(phase.nx), ny = static_cast<int>(phase.ny);
  const int d = static_cast<int>(phase.degree());
  const PRange range = admissible_p_range(nx, ny, d, check.eligible);
  // 1/p midpoints between 1/2 and each end of the range; endpoints when closed.
  std::vector<LpExponent> ps{LpExponent::from_p(2)};
  ps.push_back(LpExponent::from_p(1 / ((1 / range.lower + Rational(1, 2)) / 2)));
  ps.push_back(LpExponent::from_p(1 / ((1 / range.upper + Rational(1, 2)) / 2)));
  if (range.closed) {
    ps.push_back(LpExponent::from_p(range.lower));
    ps.push_back(LpExponent::from_p(range.upper));
  }
  const double tol = default_tolerance(p, phase);
  bool ok = true;
  json runs = json::array();
  std::ostringstream h;
  h << "eligible: " << (check.eligible ? "true" : "false") << "\n";
  KernelRequest base = default_request(phase);
  base.phase_id = src;
  for (const auto& pe : ps) {
    json run{{"p", pe.to_string()},
             {"prediction", to_json(exponent_report(phase, pe, check.eligible))}};
    const DecayFit fit = decay_fit(phase, pe.to_double(),
                                   dyadic_range(p.lambda_min, p.lambda_max, p.lambda_step), base,
                                   make_decay_options(c, p, phase));
    run["decay"] = to_json(fit);
    // Away from p = 2 the measured curve is a lower bound; its slope may sit
    // above or below the prediction, so only p = 2 gates the exit code.
    const bool gate = pe == LpExponent::from_p(2);
    const bool within = fit_within(fit, tol);
    run["within_tolerance"] = within;
    run["gating"] = gate;
    if (gate) ok = ok && within;
    h << "p = " << pe.to_string() << ": slope " << fit.fit.slope << " predicted "
      << fit.predicted.value_or(NAN) << (within ? " PASS" : " FAIL") << (gate ? "" : " (non-gating)") << "\n";
    std::string stem = "report_p_" + pe.to_string();
    std::replace(stem.begin(), stem.end(), '/', '_');
    emit_fit_files(c, stem, fit, src + ", p = " + pe.to_string());
    runs.push_back(std::move(run));
  }
  result["decay"] = runs;
  result["tolerance"] = tol;
  const json config{{"command", "report"},
                    {"phase", phase_config(src, phase)},
                    {"sweep", sweep_config(p)},
                    {"tolerance", tol},
                    {"budgets", budgets_json(c)}};
  emit(c, "report", make_report(config, result), h.str());
  if (check.inconclusive) return kInconclusive;
  return ok ? kOk : kToleranceFailure;
}

int fail(const char* type, const std::string& message, int code, const json& extra = {}) {
  json j{{"error", type}, {"message", message}, {"exit_code", code}};
  if (!extra.is_null()) j.update(extra);
  std::cerr << j.dump() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certificates, exponents and decay experiments for oscillatory integral operators"};
  app.require_subcommand(1);
  Common c;
  Params p;

  auto* check = app.add_subcommand("check", "certify rank-one and radial conditions");
  add_common(check, c);

  auto* predict = app.add_subcommand("predict", "exact decay exponents and admissible range");
  add_common(predict, c);
  predict->add_option("--p", p.p, "Lebesgue exponent (2, 3/2, 1.5, inf)");
  predict->add_option("--sigma", p.sigma, "damping exponent");
  predict->add_option("--dD", p.dD, "damping degree");
  predict->add_flag("--no-certify", p.no_certify, "skip certificates (open range)");

  auto* norm = app.add_subcommand("norm", "operator-norm estimates at one lambda");
  add_common(norm, c);
  norm->add_option("--lambda", p.lambda, "frequency")->required();
  norm->add_option("--p", p.p, "Lebesgue exponent");
  norm->add_option("--m", p.m, "points per axis (default: resolution rule)");
  norm->add_option("--sigma", p.sigma, "damping exponent");
  norm->add_option("--damping", p.damping, "radial, x, y or hessian");
  norm->add_option("--dD", p.dD, "damping degree for x and y damping");
  norm->add_option("--eps0", p.eps0, "test-function radius factor");

  auto add_sweep = [&](CLI::App* sub) {
    sub->add_option("--lambda-min", p.lambda_min, "log2 of the smallest lambda");
    sub->add_option("--lambda-max", p.lambda_max, "log2 of the largest lambda");
    sub->add_option("--lambda-step", p.lambda_step, "log2 step");
    sub->add_option("--budget-mode", p.budget_mode, "truncate or cap");
    sub->add_option("--tolerance", p.tolerance, "slope tolerance");
    sub->add_option("--eps0", p.eps0, "test-function radius factor");
    sub->add_option("--m", p.m, "fixed points per axis (disables the rule and the gate)");
    sub->add_flag("--no-stability", p.no_stability, "skip the m-doubling gate");
  };

  auto* decay = app.add_subcommand("decay", "fit the decay of ||T_lambda||_p");
  add_common(decay, c);
  add_sweep(decay);
  decay->add_option("--p", p.p, "Lebesgue exponent");
  decay->add_option("--sigma", p.sigma, "damping exponent");
  decay->add_option("--damping", p.damping, "radial, x, y or hessian");
  decay->add_option("--dD", p.dD, "damping degree for x and y damping");

  auto* damp = app.add_subcommand("damp", "scan damping exponents");
  add_common(damp, c);
  add_sweep(damp);
  damp->add_option("--sigma", p.sigmas, "comma-separated damping exponents");
  damp->add_option("--damping", p.damping, "radial, x, y or hessian");
  damp->add_option("--dD", p.dD, "damping degree for x and y damping");

  auto* shells = app.add_subcommand("shells", "dyadic shell profile at one lambda");
  add_common(shells, c);
  shells->add_option("--lambda", p.lambda, "frequency")->required();
  shells->add_option("--k-min", p.k_min, "smallest shell index");
  shells->add_option("--k-max", p.k_max, "largest shell index (<= 0)");
  shells->add_option("--tolerance", p.tolerance, "slope tolerance");

  auto* vdc = app.add_subcommand("vdc", "operator van der Corput check on a (1+1) region");
  add_common(vdc, c);
  add_sweep(vdc);
  vdc->add_option("--region", p.region, "rect ([0,1]^2) or triangle (0 <= y <= x)");
  vdc->add_option("--mu", p.mu, "lower Hessian bound");
  vdc->add_option("--A", p.A, "Hessian ratio bound");

  auto* report = app.add_subcommand("report", "check, predict and decay in one run");
  add_common(report, c);
  add_sweep(report);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("UsageError", e.what(), kInputError);
  }

  try {
    if (*check) return cmd_check(c);
    if (*predict) return cmd_predict(c, p);
    if (*norm) return cmd_norm(c, p);
    if (*decay) return cmd_decay(c, p);
    if (*damp) return cmd_damp(c, p);
    if (*shells) return cmd_shells(c, p);
    if (*vdc) return cmd_vdc(c, p);
    if (*report) return cmd_report(c, p);
  } catch (const BudgetExceeded& e) {
    return fail("BudgetExceeded", e.what(), kInputError, {{"lambda", e.lambda()}});
  } catch (const ConvergenceError& e) {
    return fail("ConvergenceError", e.what(), kToleranceFailure,
                {{"last_value", e.last_value()}, {"residual", e.residual()}});
  } catch (const InputError& e) {
    return fail("InputError", e.what(), kInputError);
  } catch (const std::exception& e) {
    return fail("Error", e.what(), kInputError);
  }
  return kInputError;
}
