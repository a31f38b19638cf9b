// SPDX-License-Identifier: Apache-2.0
#include "oscibound/discretize.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <thread>

#include "oscibound/errors.hpp"

namespace oscibound {

double smooth_bump(double t) {
  const double a = std::abs(t);
  if (a >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - a * a));
}

std::string to_string(CutoffProfile p) {
  switch (p) {
    case CutoffProfile::SmoothBump: return "SmoothBump";
    case CutoffProfile::Box: return "Box";
    case CutoffProfile::Unit: return "Unit";
  }
  return "SmoothBump";
}

CutoffProfile cutoff_profile_from_string(const std::string& s) {
  if (s == "SmoothBump" || s == "bump") return CutoffProfile::SmoothBump;
  if (s == "Box" || s == "box") return CutoffProfile::Box;
  if (s == "Unit" || s == "unit") return CutoffProfile::Unit;
  throw InputError("unknown cut-off profile '" + s + "'");
}

double CutoffSpec::operator()(double radius) const {
  switch (profile) {
    case CutoffProfile::SmoothBump: return smooth_bump(radius / support_radius);
    case CutoffProfile::Box: return radius <= support_radius ? 1.0 : 0.0;
    case CutoffProfile::Unit: return 1.0;
  }
  return 0.0;
}

nlohmann::json CutoffSpec::to_json() const {
  return {{"support_radius", support_radius}, {"profile", to_string(profile)}};
}

double shell_partition(double radius) {
  if (!(radius > 0.0)) return 0.0;
  const double s = std::log2(radius);
  const double j = std::floor(s);
  // Only the bumps centred at floor(s) and floor(s) + 1 can be nonzero.
  const double denom = smooth_bump(s - j) + smooth_bump(s - j - 1.0);
  return smooth_bump(s) / denom;
}

double ShellSpec::operator()(double radius) const {
  return shell_partition(std::ldexp(radius, -k));
}

namespace {

HomogeneousPolynomial coordinate_poly(std::size_t nvars, std::size_t axis) {
  MultiIndex e(nvars, 0);
  e[axis] = 1;
  return HomogeneousPolynomial::monomial(e, 1);
}

}  // namespace

DampingSpec DampingSpec::polynomial(HomogeneousPolynomial D,
                                    std::complex<double> z) {
  DampingSpec s;
  s.kind = DampingKind::Polynomial;
  s.dD = static_cast<int>(D.degree());
  s.components.push_back(std::move(D));
  s.z = z;
  return s;
}

DampingSpec DampingSpec::x_norm(std::size_t nx, std::size_t ny, int dD,
                                std::complex<double> z) {
  if (dD < 1) throw InputError("damping degree must be at least 1");
  DampingSpec s;
  s.kind = DampingKind::XNorm;
  for (std::size_t i = 0; i < nx; ++i) s.components.push_back(coordinate_poly(nx + ny, i));
  s.base_power = dD;
  s.dD = dD;
  s.z = z;
  return s;
}

DampingSpec DampingSpec::y_norm(std::size_t nx, std::size_t ny, int dD,
                                std::complex<double> z) {
  if (dD < 1) throw InputError("damping degree must be at least 1");
  DampingSpec s;
  s.kind = DampingKind::YNorm;
  for (std::size_t j = 0; j < ny; ++j) {
    s.components.push_back(coordinate_poly(nx + ny, nx + j));
  }
  s.base_power = dD;
  s.dD = dD;
  s.z = z;
  return s;
}

DampingSpec DampingSpec::hessian_norm(const PhaseDescriptor& phase,
                                      std::complex<double> z) {
  if (phase.degree() < 3) {
    throw InputError("Hessian-norm damping needs d >= 3 so that dD = d - 2 >= 1");
  }
  DampingSpec s;
  s.kind = DampingKind::HessianNorm;
  s.components = mixed_hessian(phase).entries;
  s.dD = static_cast<int>(phase.degree()) - 2;
  s.z = z;
  return s;
}

DampingSpec DampingSpec::radial_square(std::size_t nx, std::size_t ny,
                                       std::complex<double> z) {
  const std::size_t n = nx + ny;
  HomogeneousPolynomial D(n, 2);
  for (std::size_t k = 0; k < n; ++k) {
    MultiIndex e(n, 0);
    e[k] = 2;
    D.add_term(e, 1);
  }
  return polynomial(std::move(D), z);
}

double DampingSpec::base(std::span<const double> v) const {
  if (kind == DampingKind::Polynomial) {
    return std::pow(std::abs(components.front().evaluate(v)), base_power);
  }
  double s = 0.0;
  for (const auto& c : components) {
    const double x = c.evaluate(v);
    s += x * x;
  }
  return std::pow(std::sqrt(s), base_power);
}

namespace {

std::complex<double> power_of(double base, std::complex<double> z,
                              bool* excluded) {
  if (z == std::complex<double>(0.0, 0.0)) return 1.0;
  if (base == 0.0) {
    if (z.real() > 0.0) return 0.0;
    if (excluded) *excluded = true;
    return 0.0;
  }
  const double lb = std::log(base);
  return std::polar(std::exp(z.real() * lb), z.imag() * lb);
}

}  // namespace

std::complex<double> DampingSpec::factor(std::span<const double> v,
                                         bool* excluded) const {
  return power_of(base(v), z, excluded);
}

std::string DampingSpec::describe() const {
  std::ostringstream os;
  switch (kind) {
    case DampingKind::Polynomial: os << "|" << components.front().to_string() << "|"; break;
    case DampingKind::XNorm: os << "|x|^" << dD; break;
    case DampingKind::YNorm: os << "|y|^" << dD; break;
    case DampingKind::HessianNorm: os << "|Hess_xy S|_HS"; break;
  }
  os << "^(" << z.real();
  if (z.imag() != 0.0) os << (z.imag() > 0 ? "+" : "") << z.imag() << "i";
  os << ")";
  return os.str();
}

GridSpec GridSpec::centered(std::size_t dim, std::size_t m, double radius) {
  if (dim == 0 || m == 0) throw InputError("grid needs positive dimension and m");
  if (!(radius > 0.0)) throw InputError("grid radius must be positive");
  return GridSpec{dim, m, -radius, radius};
}

double GridSpec::cell_volume() const {
  return std::pow(h(), static_cast<double>(dim));
}

std::size_t GridSpec::num_nodes() const {
  std::size_t n = 1;
  for (std::size_t k = 0; k < dim; ++k) n *= m;
  return n;
}

void GridSpec::node(std::size_t node, std::span<double> out) const {
  for (std::size_t k = dim; k-- > 0;) {
    out[k] = coordinate(node % m);
    node /= m;
  }
}

nlohmann::json GridSpec::to_json() const {
  return {{"dim", dim}, {"m", m}, {"lo", lo}, {"hi", hi}, {"h", h()}};
}

double KernelRequest::amplitude(const PhaseDescriptor& phase,
                                std::span<const double> v) const {
  double r2 = 0.0;
  for (double c : v) r2 += c * c;
  const double r = std::sqrt(r2);
  double w = cutoff(r);
  if (w == 0.0) return 0.0;
  if (shell) w *= (*shell)(r);
  if (region && phase.nx == 1 && phase.ny == 1 && !region(v[0], v[1])) return 0.0;
  if (damping) {
    bool excluded = false;
    w *= std::abs(damping->factor(v, &excluded));
    if (excluded) return 0.0;
  }
  return w;
}

namespace {

constexpr unsigned kPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37,
                                41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89};

double radical_inverse(std::uint64_t i, unsigned base) {
  double f = 1.0, r = 0.0;
  while (i > 0) {
    f /= base;
    r += f * static_cast<double>(i % base);
    i /= base;
  }
  return r;
}

}  // namespace

double sampled_gradient_bound(const PhaseDescriptor& phase,
                              const KernelRequest& req,
                              const ResolutionRule& rule) {
  const std::size_t n = phase.num_vars();
  if (n > std::size(kPrimes)) throw InputError("too many variables for Halton sampling");
  std::vector<CompiledPolynomial> grad;
  for (std::size_t k = 0; k < n; ++k) grad.emplace_back(partial_derivative(phase.S, k));

  std::vector<double> lo(n), hi(n);
  for (std::size_t k = 0; k < n; ++k) {
    const GridSpec& g = k < phase.nx ? req.x_grid : req.y_grid;
    lo[k] = g.lo;
    hi[k] = g.hi;
    if (req.shell) {
      const double s = std::ldexp(2.0, req.shell->k);
      lo[k] = std::max(lo[k], -s);
      hi[k] = std::min(hi[k], s);
    }
  }

  std::vector<double> grads, weights;
  std::vector<double> v(n);
  const std::uint64_t max_draws = 64 * static_cast<std::uint64_t>(rule.samples);
  for (std::uint64_t i = 1; i <= max_draws && weights.size() < rule.samples; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      v[k] = lo[k] + radical_inverse(i, kPrimes[k]) * (hi[k] - lo[k]);
    }
    const double w = req.amplitude(phase, v);
    if (!(w > 0.0) || !std::isfinite(w)) continue;
    double g2 = 0.0;
    for (const auto& g : grad) {
      const double x = g(v);
      g2 += x * x;
    }
    grads.push_back(std::sqrt(g2));
    weights.push_back(w);
  }
  if (weights.empty()) return 0.0;
  const double wmax = *std::max_element(weights.begin(), weights.end());
  double G = 0.0;
  for (std::size_t i = 0; i < grads.size(); ++i) {
    G = std::max(G, rule.amplitude_weighted ? grads[i] * weights[i] / wmax : grads[i]);
  }
  return G;
}

GridChoice choose_grid(const PhaseDescriptor& phase, const KernelRequest& req,
                       const ResolutionRule& rule) {
  if (!(req.lambda >= 0.0)) throw InputError("lambda must be nonnegative");
  if (rule.min_m == 0 || !(rule.phase_step > 0.0)) {
    throw InputError("resolution rule needs min_m >= 1 and phase_step > 0");
  }
  GridChoice out;
  out.gradient_bound = sampled_gradient_bound(phase, req, rule);
  const double width = std::max(req.x_grid.hi - req.x_grid.lo, req.y_grid.hi - req.y_grid.lo);

  std::size_t m = std::bit_ceil(rule.min_m);
  while (width / static_cast<double>(m) * req.lambda * out.gradient_bound > rule.phase_step) {
    m *= 2;
  }
  out.requested_m = m;

  const double maxdim = static_cast<double>(std::max(phase.nx, phase.ny));
  auto cap = static_cast<std::size_t>(
      std::floor(std::pow(static_cast<double>(rule.max_nodes_per_side), 1.0 / maxdim) + 1e-9));
  cap = std::bit_floor(std::max<std::size_t>(cap, 1));
  out.cap_hit = m > cap;
  out.m = std::min(m, cap);
  return out;
}

std::size_t grid_resolution_for(const PhaseDescriptor& phase, double lambda,
                                const CutoffSpec& cutoff,
                                const ResolutionRule& rule) {
  if (!(lambda >= 1.0)) throw InputError("grid_resolution_for needs lambda >= 1");
  KernelRequest req;
  req.lambda = lambda;
  req.cutoff = cutoff;
  req.x_grid = GridSpec::centered(phase.nx, rule.min_m, cutoff.support_radius);
  req.y_grid = GridSpec::centered(phase.ny, rule.min_m, cutoff.support_radius);
  const GridChoice c = choose_grid(phase, req, rule);
  if (c.cap_hit) {
    std::ostringstream os;
    os << "grid budget of " << rule.max_nodes_per_side << " nodes per side exceeded at lambda = "
       << lambda << " (rule asks for m = " << c.requested_m << ")";
    throw BudgetExceeded(os.str(), lambda);
  }
  return c.m;
}

KernelRequest with_resolution(KernelRequest req, std::size_t m) {
  req.x_grid.m = m;
  req.y_grid.m = m;
  return req;
}

KernelMatrix KernelMatrix::adjoint() const {
  KernelMatrix a;
  a.entries = entries.adjoint();
  a.x_grid = y_grid;
  a.y_grid = x_grid;
  a.lambda = lambda;
  a.phase_id = phase_id;
  a.damping = damping;
  a.shell = shell;
  a.excluded_nodes = excluded_nodes;
  return a;
}

namespace {

// p(x, y) = sum_t coeff_t * xpart_t(x) * ypart_t(y), tabulated per node.
struct SplitTable {
  std::size_t terms = 0;
  std::vector<double> xs;  // rows x terms, coefficients folded in
  std::vector<double> ys;  // cols x terms

  SplitTable(const HomogeneousPolynomial& p, std::size_t nx, const std::vector<double>& xn,
             std::size_t rows, const std::vector<double>& yn, std::size_t cols) {
    const std::size_t ny = p.num_vars() - nx;
    terms = p.terms().size();
    xs.assign(rows * terms, 0.0);
    ys.assign(cols * terms, 0.0);
    std::size_t t = 0;
    for (const auto& [e, c] : p.terms()) {
      const double cd = c.get_d();
      for (std::size_t r = 0; r < rows; ++r) {
        double v = cd;
        for (std::size_t i = 0; i < nx; ++i) v *= std::pow(xn[r * nx + i], e[i]);
        xs[r * terms + t] = v;
      }
      for (std::size_t c2 = 0; c2 < cols; ++c2) {
        double v = 1.0;
        for (std::size_t j = 0; j < ny; ++j) v *= std::pow(yn[c2 * ny + j], e[nx + j]);
        ys[c2 * terms + t] = v;
      }
      ++t;
    }
  }

  double operator()(std::size_t r, std::size_t c) const {
    const double* a = xs.data() + r * terms;
    const double* b = ys.data() + c * terms;
    double s = 0.0;
    for (std::size_t t = 0; t < terms; ++t) s += a[t] * b[t];
    return s;
  }
};

std::size_t thread_count() {
  if (const char* env = std::getenv("OSCIBOUND_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<std::size_t>(v);
  }
  return 1;
}

}  // namespace

KernelMatrix build_kernel(const PhaseDescriptor& phase, const KernelRequest& req) {
  if (req.x_grid.dim != phase.nx || req.y_grid.dim != phase.ny) {
    throw InputError("grid dimensions do not match the phase (nx, ny)");
  }
  if (req.region && (phase.nx != 1 || phase.ny != 1)) {
    throw InputError("region masks are only supported for (1+1) phases");
  }
  if (!std::isfinite(req.lambda)) throw InputError("lambda must be finite");

  const std::size_t nx = phase.nx, ny = phase.ny;
  const std::size_t rows = req.x_grid.num_nodes(), cols = req.y_grid.num_nodes();
  std::vector<double> xn(rows * nx), yn(cols * ny), xr2(rows, 0.0), yr2(cols, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    req.x_grid.node(r, std::span<double>(xn.data() + r * nx, nx));
    for (std::size_t i = 0; i < nx; ++i) xr2[r] += xn[r * nx + i] * xn[r * nx + i];
  }
  for (std::size_t c = 0; c < cols; ++c) {
    req.y_grid.node(c, std::span<double>(yn.data() + c * ny, ny));
    for (std::size_t j = 0; j < ny; ++j) yr2[c] += yn[c * ny + j] * yn[c * ny + j];
  }

  const SplitTable S(phase.S, nx, xn, rows, yn, cols);
  std::vector<SplitTable> damp;
  if (req.damping) {
    for (const auto& comp : req.damping->components) damp.emplace_back(comp, nx, xn, rows, yn, cols);
  }

  KernelMatrix K;
  K.entries.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  K.x_grid = req.x_grid;
  K.y_grid = req.y_grid;
  K.lambda = req.lambda;
  K.phase_id = req.phase_id;
  K.damping = req.damping ? req.damping->describe() : "none";
  if (req.shell) K.shell = req.shell->k;

  auto fill_rows = [&](std::size_t r0, std::size_t r1, std::size_t* excluded) {
    for (std::size_t r = r0; r < r1; ++r) {
      for (std::size_t c = 0; c < cols; ++c) {
        const double rad = std::sqrt(xr2[r] + yr2[c]);
        double w = req.cutoff(rad);
        if (w != 0.0 && req.shell) w *= (*req.shell)(rad);
        if (w != 0.0 && req.region && !req.region(xn[r], yn[c])) w = 0.0;
        std::complex<double> dz = 1.0;
        if (req.damping) {
          double base;
          if (req.damping->kind == DampingKind::Polynomial) {
            base = std::pow(std::abs(damp.front()(r, c)), req.damping->base_power);
          } else {
            double s = 0.0;
            for (const auto& t : damp) {
              const double x = t(r, c);
              s += x * x;
            }
            base = std::pow(std::sqrt(s), req.damping->base_power);
          }
          bool ex = false;
          dz = power_of(base, req.damping->z, &ex);
          if (ex) ++*excluded;
        }
        K.entries(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
            w == 0.0 ? std::complex<double>(0.0, 0.0)
                     : std::polar(w, req.lambda * S(r, c)) * dz;
      }
    }
  };

  const std::size_t nthreads = std::min(thread_count(), std::max<std::size_t>(rows, 1));
  std::vector<std::size_t> excluded(nthreads, 0);
  if (nthreads == 1) {
    fill_rows(0, rows, &excluded[0]);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (rows + nthreads - 1) / nthreads;
    for (std::size_t t = 0; t < nthreads; ++t) {
      const std::size_t r0 = std::min(rows, t * chunk), r1 = std::min(rows, r0 + chunk);
      pool.emplace_back(fill_rows, r0, r1, &excluded[t]);
    }
    for (auto& th : pool) th.join();
  }
  for (std::size_t e : excluded) K.excluded_nodes += e;
  return K;
}

std::vector<double> sharpness_test_function(double lambda, double eps0,
                                            unsigned degree,
                                            const GridSpec& y_grid) {
  if (!(eps0 > 0.0)) throw InputError("eps0 must be positive (empty test-function support)");
  if (!(lambda > 0.0)) throw InputError("lambda must be positive");
  if (degree == 0) throw InputError("phase degree must be positive");
  const double radius = eps0 * std::pow(lambda, -1.0 / degree);
  if (radius < 2.0 * y_grid.h()) {
    std::ostringstream os;
    os << "test-function ball of radius " << radius << " spans fewer than two cells (h = "
       << y_grid.h() << "); refine the y-grid";
    throw InputError(os.str());
  }
  const std::size_t n = y_grid.num_nodes();
  std::vector<double> f(n, 0.0), y(y_grid.dim);
  for (std::size_t c = 0; c < n; ++c) {
    y_grid.node(c, y);
    double r2 = 0.0;
    for (double v : y) r2 += v * v;
    f[c] = std::sqrt(r2) <= radius ? 1.0 : 0.0;
  }
  return f;
}

namespace {

void put_u64(std::ostream& os, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 8);
}

void put_f64(std::ostream& os, double d) { put_u64(os, std::bit_cast<std::uint64_t>(d)); }

std::uint64_t get_u64(std::istream& is) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8)) throw InputError("truncated kernel file");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

}  // namespace

void write_kernel_binary(const KernelMatrix& k, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InputError("cannot open '" + path + "' for writing");
  put_u64(os, static_cast<std::uint64_t>(k.entries.rows()));
  put_u64(os, static_cast<std::uint64_t>(k.entries.cols()));
  put_f64(os, k.lambda);
  for (Eigen::Index r = 0; r < k.entries.rows(); ++r) {
    for (Eigen::Index c = 0; c < k.entries.cols(); ++c) {
      put_f64(os, k.entries(r, c).real());
      put_f64(os, k.entries(r, c).imag());
    }
  }
  if (!os) throw InputError("write to '" + path + "' failed");
}

Eigen::MatrixXcd read_kernel_binary(const std::string& path, double* lambda) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InputError("cannot open '" + path + "'");
  const auto rows = get_u64(is), cols = get_u64(is);
  const double lam = std::bit_cast<double>(get_u64(is));
  if (lambda) *lambda = lam;
  Eigen::MatrixXcd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const double re = std::bit_cast<double>(get_u64(is));
      const double im = std::bit_cast<double>(get_u64(is));
      m(r, c) = {re, im};
    }
  }
  return m;
}

}  // namespace oscibound
