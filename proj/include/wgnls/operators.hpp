#pragma once

// Fourier-multiplier calculus on a WaveguideGrid. Unless noted, operators take
// a field in either space and return it in the same space.

#include <array>
#include <string>
#include <vector>

#include "wgnls/grid.hpp"

namespace wgnls {

/// Model coefficients: i u_t + ((-Lap_x)^sigma + (-d_yy)^sigma) u = mu |u|^p u.
/// mu = 0 is allowed and means the linear flow.
struct ModelParams {
  double sigma = 1.0;
  int mu = -1;
  double p = 2.0;
  int d = 1;
  int n = 1;

  /// Throws std::invalid_argument for sigma outside (0, 1], mu outside
  /// {-1, 0, 1} or p <= 0.
  void validate() const;
  /// 4 sigma / d < p < 4 sigma / (d + 1 - 2 sigma), only meaningful for sigma > 1/2.
  bool subcritical_window() const;
  bool radial_strichartz_ok() const { return sigma > 0.5; }
};

/// Dispersion symbol tables: m_x = |xi|^{2 sigma} (per Euclidean index),
/// m_y = |eta|^{2 sigma} (per torus index), m_total over the full lattice.
class Multiplier {
 public:
  Multiplier(GridPtr grid, double sigma);

  const GridPtr& grid_ptr() const { return grid_; }
  double sigma() const { return sigma_; }
  const std::vector<double>& m_x() const { return m_x_; }
  const std::vector<double>& m_y() const { return m_y_; }
  const std::vector<double>& m_total() const { return m_total_; }
  double total(std::size_t flat) const { return m_total_[flat]; }

 private:
  GridPtr grid_;
  double sigma_;
  std::vector<double> m_x_;
  std::vector<double> m_y_;
  std::vector<double> m_total_;
};

/// Multiplies every spectral coefficient by scale * symbol[k]. The symbol has
/// one entry per lattice point.
Field apply_multiplier(const Field& f, std::span<const double> symbol, Complex scale = 1.0);

/// (-Lap_x)^sigma, (-d_yy)^sigma and their sum.
Field frac_laplacian_x(const Field& f, double sigma);
Field frac_laplacian_y(const Field& f, double sigma);
Field dispersion_apply(const Field& f, const Multiplier& m);

// ---------------------------------------------------------------------------
// Littlewood-Paley

/// Smooth even cutoff: 1 on |t| <= 1, 0 on |t| >= 2, exp(1 - 1/(1 - s^2))
/// with s = |t| - 1 in between.
double lp_cutoff(double t);

enum class DyadicKind { band, low, high };

/// P_N (band), P_{<=N} (low) or P_{>N} (high), tensor cutoffs over every
/// Euclidean and torus axis.
struct DyadicProjector {
  double N = 1.0;
  DyadicKind kind = DyadicKind::band;

  double weight(std::span<const double> k) const;
};

/// Spectral multiplication by the projector profile. Warns on stderr when N
/// exceeds the Nyquist frequency of any axis.
Field lp_project(const Field& f, const DyadicProjector& proj);

/// Profile values over the full lattice.
std::vector<double> lp_symbol(const WaveguideGrid& g, const DyadicProjector& proj);

// ---------------------------------------------------------------------------
// Balakrishnan representation and resolvents

/// Controls the trapezoid rule in s = log m on [-S, S]. With S == 0 and
/// nodes == 0 both are chosen from the tolerance; explicit values are
/// checked against the tolerance and rejected with QuadratureError.
struct QuadratureSpec {
  double tolerance = 1e-9;
  double S = 0.0;
  int nodes = 0;
};

/// Resolved nodes m_j = exp(s_j) with trapezoid weights in s.
struct QuadratureRule {
  double S = 0.0;
  double step = 0.0;
  std::vector<double> m;
  std::vector<double> weight;
};

/// Builds a rule accurate to spec.tolerance (relative) for both
///   int m^{sigma-1} lam/(lam+m) dm   and   int m^sigma lam/(lam+m)^2 dm
/// uniformly over lam in [lam_min, lam_max].
QuadratureRule make_quadrature(double sigma, const QuadratureSpec& spec, double lam_min,
                               double lam_max);

/// A-priori relative error bound of a rule for the two integrals above.
double quadrature_error_bound(double sigma, double S, double step, double lam_min,
                              double lam_max);

/// Rule covering every nonzero Euclidean |xi|^2 of the grid.
QuadratureRule grid_quadrature(const WaveguideGrid& g, double sigma, const QuadratureSpec& spec);

/// (sin(pi sigma)/pi) int m^{sigma-1} (-Lap_x)(-Lap_x+m)^{-1} u dm by quadrature.
Field balakrishnan_apply(const Field& f, double sigma, const QuadratureSpec& spec = {});

/// Per-Euclidean-mode symbol of balakrishnan_apply.
std::vector<double> balakrishnan_symbol(const WaveguideGrid& g, double sigma,
                                        const QuadratureRule& rule);

/// sqrt(sin(pi sigma)/pi) (-Lap_x + m)^{-1} u.
Field resolvent(const Field& f, double m, double sigma);

// ---------------------------------------------------------------------------
// Gradients and weights (Euclidean directions only)

/// d/dx_k u for k < d, physical space. The Nyquist slot is zeroed.
std::vector<Field> gradient_x(const Field& f);

enum class WeightKind { half_square, abs_x_regularized, linear_x1 };

/// Morawetz weight phi(x). half_square = |x|^2/2; abs_x_regularized =
/// sqrt(|x|^2 + eps^2); linear_x1 = x_1 (momentum check only).
struct WeightSpec {
  WeightKind kind = WeightKind::half_square;
  double eps = 0.0;

  static WeightSpec half_square() { return {WeightKind::half_square, 0.0}; }
  static WeightSpec abs_x(double eps) { return {WeightKind::abs_x_regularized, eps}; }
  /// Regularized |x| with eps = 2 dx.
  static WeightSpec abs_x_for(const WaveguideGrid& g) { return abs_x(2.0 * g.dx()); }
  static WeightSpec linear_x1() { return {WeightKind::linear_x1, 0.0}; }

  double value(std::span<const double> x) const;
  void gradient(std::span<const double> x, std::span<double> out) const;
  /// Row-major d x d Hessian.
  void hessian(std::span<const double> x, std::span<double> out) const;
  double laplacian(std::span<const double> x) const;
  double bilaplacian(std::span<const double> x) const;
  /// True when the Hessian is constant in x.
  bool constant_hessian() const { return kind != WeightKind::abs_x_regularized; }
  std::string name() const;
};

/// Components (Hess phi . grad_x u)_k, physical space.
std::vector<Field> hessian_weight_apply(const Field& f, const WeightSpec& w);

// ---------------------------------------------------------------------------

struct AdmissibleResult {
  bool ok = false;
  double residual = 0.0;
};

/// residual = 2 sigma / p + d / q - (d/2 - gamma); p, q may be infinity.
AdmissibleResult admissible_check(double p, double q, double gamma, double sigma, int d);

}  // namespace wgnls
