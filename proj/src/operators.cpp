#include "wgnls/operators.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "wgnls/error.hpp"

namespace wgnls {

using std::numbers::pi;

void ModelParams::validate() const {
  if (!(sigma > 0.0 && sigma <= 1.0)) throw std::invalid_argument("sigma must lie in (0, 1]");
  if (mu < -1 || mu > 1) throw std::invalid_argument("mu must be -1, 0 or +1");
  if (!(p > 0.0) || !std::isfinite(p)) throw std::invalid_argument("p must be positive");
  if (d < 1 || n < 0) throw std::invalid_argument("invalid dimensions");
}

bool ModelParams::subcritical_window() const {
  if (sigma <= 0.5) return false;
  return 4.0 * sigma / d < p && p < 4.0 * sigma / (d + 1.0 - 2.0 * sigma);
}

Multiplier::Multiplier(GridPtr grid, double sigma) : grid_(std::move(grid)), sigma_(sigma) {
  if (!(sigma > 0.0 && sigma <= 1.0)) throw std::invalid_argument("sigma must lie in (0, 1]");
  const auto& g = *grid_;
  m_x_.resize(g.euclid_size());
  for (std::size_t e = 0; e < g.euclid_size(); ++e) m_x_[e] = std::pow(g.euclid_sq()[e], sigma);
  m_y_.resize(g.torus_size());
  for (std::size_t t = 0; t < g.torus_size(); ++t) m_y_[t] = std::pow(g.torus_sq()[t], sigma);
  m_total_.resize(g.size());
  for (std::size_t e = 0; e < g.euclid_size(); ++e)
    for (std::size_t t = 0; t < g.torus_size(); ++t)
      m_total_[e * g.torus_size() + t] = m_x_[e] + m_y_[t];
}

namespace {

// Applies op(spectral field) and returns in the input space.
template <class Op>
Field in_spectral(const Field& f, Op op) {
  const Space orig = f.space();
  Field w = to_space(f, Space::spectral);
  op(w);
  transform_in_place(w, orig);
  return w;
}

template <class EuclidSymbol>
Field apply_euclid_symbol(const Field& f, EuclidSymbol sym) {
  return in_spectral(f, [&](Field& w) {
    const auto& g = w.grid();
    const std::size_t ts = g.torus_size();
    for (std::size_t e = 0; e < g.euclid_size(); ++e) {
      const double s = sym(e);
      for (std::size_t t = 0; t < ts; ++t) w[e * ts + t] *= s;
    }
  });
}

}  // namespace

Field apply_multiplier(const Field& f, std::span<const double> symbol, Complex scale) {
  if (symbol.size() != f.size())
    throw std::invalid_argument("apply_multiplier: symbol shape does not match grid");
  return in_spectral(f, [&](Field& w) {
    for (std::size_t i = 0; i < w.size(); ++i) w[i] *= scale * symbol[i];
  });
}

Field frac_laplacian_x(const Field& f, double sigma) {
  const auto& sq = f.grid().euclid_sq();
  return apply_euclid_symbol(f, [&](std::size_t e) { return std::pow(sq[e], sigma); });
}

Field frac_laplacian_y(const Field& f, double sigma) {
  return in_spectral(f, [&](Field& w) {
    const auto& g = w.grid();
    std::vector<double> sym(g.torus_size());
    for (std::size_t t = 0; t < sym.size(); ++t) sym[t] = std::pow(g.torus_sq()[t], sigma);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] *= sym[g.torus_part(i)];
  });
}

Field dispersion_apply(const Field& f, const Multiplier& m) {
  return apply_multiplier(f, m.m_total());
}

// ---------------------------------------------------------------------------

double lp_cutoff(double t) {
  const double a = std::abs(t);
  if (a <= 1.0) return 1.0;
  if (a >= 2.0) return 0.0;
  const double s = a - 1.0;
  return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

double DyadicProjector::weight(std::span<const double> k) const {
  auto tensor = [&](double scale) {
    double w = 1.0;
    for (double kj : k) w *= lp_cutoff(kj / scale);
    return w;
  };
  switch (kind) {
    case DyadicKind::low:
      return tensor(N);
    case DyadicKind::high:
      return 1.0 - tensor(N);
    case DyadicKind::band:
    default:
      return tensor(N) - tensor(N / 2.0);
  }
}

std::vector<double> lp_symbol(const WaveguideGrid& g, const DyadicProjector& proj) {
  if (!(proj.N > 0.0)) throw std::invalid_argument("lp_project: N must be positive");
  std::vector<double> sym(g.size());
  std::vector<int> ex(g.d()), ty(g.n());
  std::vector<double> k(g.d() + g.n());
  for (std::size_t e = 0; e < g.euclid_size(); ++e) {
    g.euclid_axes(e, ex);
    for (int a = 0; a < g.d(); ++a) k[a] = g.euclid_freqs()[ex[a]];
    for (std::size_t t = 0; t < g.torus_size(); ++t) {
      if (g.n() > 0) {
        g.torus_axes(t, ty);
        for (int a = 0; a < g.n(); ++a) k[g.d() + a] = g.torus_freqs()[ty[a]];
      }
      sym[e * g.torus_size() + t] = proj.weight(k);
    }
  }
  return sym;
}

Field lp_project(const Field& f, const DyadicProjector& proj) {
  const auto& g = f.grid();
  const double nyq = g.n() > 0 ? std::min<double>(g.euclid_nyquist(), g.torus_nyquist())
                               : g.euclid_nyquist();
  if (proj.N > nyq)
    std::cerr << "warning: projector scale " << proj.N << " exceeds Nyquist " << nyq << '\n';
  const auto sym = lp_symbol(g, proj);
  return apply_multiplier(f, sym);
}

// ---------------------------------------------------------------------------

namespace {

// Distance of the rule's contour shift from the integrand poles at Im s = pi.
constexpr double kStripMargin = 0.5;
// exp(S) must stay finite in double precision.
constexpr double kMaxS = 700.0;

double discretization_bound(double step) {
  const double s = std::sin(kStripMargin);
  return 4.0 / (s * s) * std::exp(-2.0 * pi * (pi - kStripMargin) / step);
}

double tail_bound(double sigma, double S, double lam_min, double lam_max) {
  const double c = std::sin(pi * sigma) / pi;
  // Truncation of each integrand at s = -S and s = +S, relative to its exact value.
  const double low1 = std::exp(-sigma * S) * c / (sigma * std::pow(lam_min, sigma));
  const double low2 =
      std::exp(-(1.0 + sigma) * S) * c / ((1.0 + sigma) * sigma * std::pow(lam_min, 1.0 + sigma));
  const double high = std::pow(lam_max, 1.0 - sigma) * std::exp(-(1.0 - sigma) * S) * c /
                      ((1.0 - sigma) * sigma);
  return std::max(low1, low2) + high;
}

}  // namespace

double quadrature_error_bound(double sigma, double S, double step, double lam_min,
                              double lam_max) {
  return tail_bound(sigma, S, lam_min, lam_max) + discretization_bound(step);
}

QuadratureRule make_quadrature(double sigma, const QuadratureSpec& spec, double lam_min,
                               double lam_max) {
  if (!(sigma > 0.0 && sigma < 1.0))
    throw std::invalid_argument("Balakrishnan quadrature needs sigma in (0, 1)");
  if (!(spec.tolerance > 0.0)) throw std::invalid_argument("quadrature tolerance must be > 0");
  if (!(lam_min > 0.0 && lam_max >= lam_min))
    throw std::invalid_argument("quadrature: invalid eigenvalue range");

  const double tol = spec.tolerance;
  double S = spec.S;
  if (S <= 0.0) {
    S = 1.0;
    while (tail_bound(sigma, S, lam_min, lam_max) > tol / 2.0 && S < kMaxS) S *= 1.05;
  }
  if (S > kMaxS)
    throw QuadratureError("quadrature window S=" + std::to_string(S) + " exceeds the representable range");
  double step;
  int nodes = spec.nodes;
  if (nodes <= 0) {
    const double s = std::sin(kStripMargin);
    step = 2.0 * pi * (pi - kStripMargin) / std::log(8.0 / (s * s * tol));
    nodes = static_cast<int>(std::ceil(2.0 * S / step)) + 1;
  }
  if (nodes < 2) throw QuadratureError("quadrature needs at least two nodes");
  step = 2.0 * S / (nodes - 1);

  const double bound = quadrature_error_bound(sigma, S, step, lam_min, lam_max);
  if (bound > tol)
    throw QuadratureError("quadrature with S=" + std::to_string(S) + " and " +
                          std::to_string(nodes) + " nodes has error bound " +
                          std::to_string(bound) + " above tolerance " + std::to_string(tol));

  QuadratureRule rule;
  rule.S = S;
  rule.step = step;
  rule.m.resize(nodes);
  rule.weight.assign(nodes, step);
  rule.weight.front() = rule.weight.back() = step / 2.0;
  for (int j = 0; j < nodes; ++j) rule.m[j] = std::exp(-S + j * step);
  return rule;
}

QuadratureRule grid_quadrature(const WaveguideGrid& g, double sigma, const QuadratureSpec& spec) {
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (double l : g.euclid_sq())
    if (l > 0.0) {
      lo = std::min(lo, l);
      hi = std::max(hi, l);
    }
  return make_quadrature(sigma, spec, lo, hi);
}

std::vector<double> balakrishnan_symbol(const WaveguideGrid& g, double sigma,
                                        const QuadratureRule& rule) {
  const double c = std::sin(pi * sigma) / pi;
  std::vector<double> mpow(rule.m.size());
  for (std::size_t j = 0; j < rule.m.size(); ++j)
    mpow[j] = rule.weight[j] * std::pow(rule.m[j], sigma);
  std::vector<double> sym(g.euclid_size(), 0.0);
  for (std::size_t e = 0; e < g.euclid_size(); ++e) {
    const double lam = g.euclid_sq()[e];
    if (lam == 0.0) continue;
    double s = 0.0;
    for (std::size_t j = 0; j < rule.m.size(); ++j) s += mpow[j] * lam / (lam + rule.m[j]);
    sym[e] = c * s;
  }
  return sym;
}

Field balakrishnan_apply(const Field& f, double sigma, const QuadratureSpec& spec) {
  if (!(sigma > 0.0 && sigma < 1.0))
    throw std::invalid_argument("balakrishnan_apply needs sigma in (0, 1)");
  const auto rule = grid_quadrature(f.grid(), sigma, spec);
  const auto sym = balakrishnan_symbol(f.grid(), sigma, rule);
  return apply_euclid_symbol(f, [&](std::size_t e) { return sym[e]; });
}

Field resolvent(const Field& f, double m, double sigma) {
  if (!(m > 0.0)) throw std::invalid_argument("resolvent: m must be positive");
  const double c = std::sqrt(std::sin(pi * sigma) / pi);
  const auto& sq = f.grid().euclid_sq();
  return apply_euclid_symbol(f, [&](std::size_t e) { return c / (sq[e] + m); });
}

// ---------------------------------------------------------------------------

std::vector<Field> gradient_x(const Field& f) {
  const Field fh = to_space(f, Space::spectral);
  const auto& g = fh.grid();
  std::vector<Field> out;
  std::vector<int> ex(g.d());
  const std::size_t ts = g.torus_size();
  for (int k = 0; k < g.d(); ++k) {
    Field w = fh;
    for (std::size_t e = 0; e < g.euclid_size(); ++e) {
      g.euclid_axes(e, ex);
      const int j = ex[k];
      const Complex s = (j == g.nx() / 2) ? Complex{} : Complex{0.0, g.euclid_freqs()[j]};
      for (std::size_t t = 0; t < ts; ++t) w[e * ts + t] *= s;
    }
    transform_in_place(w, Space::physical);
    out.push_back(std::move(w));
  }
  return out;
}

namespace {

double radius_sq(std::span<const double> x) {
  double r2 = 0.0;
  for (double v : x) r2 += v * v;
  return r2;
}

}  // namespace

double WeightSpec::value(std::span<const double> x) const {
  switch (kind) {
    case WeightKind::half_square:
      return 0.5 * radius_sq(x);
    case WeightKind::abs_x_regularized:
      return std::sqrt(radius_sq(x) + eps * eps);
    case WeightKind::linear_x1:
    default:
      return x[0];
  }
}

void WeightSpec::gradient(std::span<const double> x, std::span<double> out) const {
  const std::size_t d = x.size();
  switch (kind) {
    case WeightKind::half_square:
      for (std::size_t k = 0; k < d; ++k) out[k] = x[k];
      break;
    case WeightKind::abs_x_regularized: {
      const double psi = std::sqrt(radius_sq(x) + eps * eps);
      for (std::size_t k = 0; k < d; ++k) out[k] = x[k] / psi;
      break;
    }
    case WeightKind::linear_x1:
      for (std::size_t k = 0; k < d; ++k) out[k] = k == 0 ? 1.0 : 0.0;
      break;
  }
}

void WeightSpec::hessian(std::span<const double> x, std::span<double> out) const {
  const std::size_t d = x.size();
  switch (kind) {
    case WeightKind::half_square:
      for (std::size_t k = 0; k < d; ++k)
        for (std::size_t l = 0; l < d; ++l) out[k * d + l] = k == l ? 1.0 : 0.0;
      break;
    case WeightKind::abs_x_regularized: {
      const double psi = std::sqrt(radius_sq(x) + eps * eps);
      const double p3 = psi * psi * psi;
      for (std::size_t k = 0; k < d; ++k)
        for (std::size_t l = 0; l < d; ++l)
          out[k * d + l] = (k == l ? 1.0 / psi : 0.0) - x[k] * x[l] / p3;
      break;
    }
    case WeightKind::linear_x1:
      std::fill(out.begin(), out.begin() + d * d, 0.0);
      break;
  }
}

double WeightSpec::laplacian(std::span<const double> x) const {
  const double d = static_cast<double>(x.size());
  switch (kind) {
    case WeightKind::half_square:
      return d;
    case WeightKind::abs_x_regularized: {
      const double psi = std::sqrt(radius_sq(x) + eps * eps);
      return (d - 1.0) / psi + eps * eps / (psi * psi * psi);
    }
    case WeightKind::linear_x1:
    default:
      return 0.0;
  }
}

double WeightSpec::bilaplacian(std::span<const double> x) const {
  if (kind != WeightKind::abs_x_regularized) return 0.0;
  const double d = static_cast<double>(x.size());
  const double psi = std::sqrt(radius_sq(x) + eps * eps);
  const double e2 = eps * eps;
  return -(d - 1.0) * (d - 3.0) * std::pow(psi, -3) + e2 * (18.0 - 6.0 * d) * std::pow(psi, -5) -
         15.0 * e2 * e2 * std::pow(psi, -7);
}

std::string WeightSpec::name() const {
  switch (kind) {
    case WeightKind::half_square:
      return "half_square";
    case WeightKind::abs_x_regularized:
      return "abs_x_regularized";
    case WeightKind::linear_x1:
    default:
      return "linear_x1";
  }
}

std::vector<Field> hessian_weight_apply(const Field& f, const WeightSpec& w) {
  auto grad = gradient_x(f);
  const auto& g = f.grid();
  const int d = g.d();
  if (w.constant_hessian()) {
    std::vector<double> x(d, 0.0), hess(d * d);
    w.hessian(x, hess);
    std::vector<Field> out;
    for (int k = 0; k < d; ++k) {
      Field acc(f.grid_ptr(), Space::physical);
      for (int l = 0; l < d; ++l)
        if (hess[k * d + l] != 0.0)
          for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += hess[k * d + l] * grad[l][i];
      out.push_back(std::move(acc));
    }
    return out;
  }
  std::vector<Field> out(d, Field(f.grid_ptr(), Space::physical));
  std::vector<int> ex(d);
  std::vector<double> x(d), hess(d * d);
  const std::size_t ts = g.torus_size();
  for (std::size_t e = 0; e < g.euclid_size(); ++e) {
    g.euclid_axes(e, ex);
    for (int a = 0; a < d; ++a) x[a] = g.euclid_nodes()[ex[a]];
    w.hessian(x, hess);
    for (std::size_t t = 0; t < ts; ++t) {
      const std::size_t i = e * ts + t;
      for (int k = 0; k < d; ++k) {
        Complex s = 0.0;
        for (int l = 0; l < d; ++l) s += hess[k * d + l] * grad[l][i];
        out[k][i] = s;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

AdmissibleResult admissible_check(double p, double q, double gamma, double sigma, int d) {
  auto inv = [](double v) { return std::isinf(v) ? 0.0 : 1.0 / v; };
  AdmissibleResult r;
  if (!(p >= 2.0 && q >= 2.0)) {
    r.residual = std::numeric_limits<double>::quiet_NaN();
    return r;
  }
  r.residual = 2.0 * sigma * inv(p) + d * inv(q) - (d / 2.0 - gamma);
  r.ok = std::abs(r.residual) <= 1e-12;
  return r;
}

}  // namespace wgnls
