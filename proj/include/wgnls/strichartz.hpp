#pragma once

// Empirical space-time estimates for the free flow: dyadic Strichartz scaling
// fits, mixed-norm Strichartz ratios over data families, and the bilinear
// frequency-interaction experiment.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "wgnls/diagnostics.hpp"
#include "wgnls/grid.hpp"
#include "wgnls/operators.hpp"
#include "wgnls/stats.hpp"

namespace wgnls {

/// Exponent arithmetic for the dyadic estimate on R^{d-n} x T^n, with
/// d = d_euclid + n the total dimension.
struct StrichartzPrediction {
  double sigma = 1.0;
  int d = 2;
  int n = 1;
  /// Minimum of the counts of negative and positive Hessian eigenvalues.
  int k = 0;
  double p_endpoint = 4.0;

  static StrichartzPrediction make(double sigma, int d_euclid, int n);
  /// d/2 - (d+2)/p; p may be kInf.
  double slope(double p) const;
  /// min(N^{2(sigma-1)}, 1), the Hessian eigenvalue scale.
  double psi_min(double N) const;
  /// min(N^{2 sigma}, 1), the symbol value at scale N.
  double symbol_min(double N) const;
};

/// Seed for trial `trial` at dyadic scale N, independent of evaluation order.
std::uint64_t trial_seed(std::uint64_t seed, double N, int trial);

/// Unit-L^2 real field whose spectrum is supported where the P_N band profile
/// exceeds 1/2, with complex Gaussian coefficients on one half of the lattice
/// and their conjugates on the other. With spatial_width > 0 the field is
/// additionally multiplied by exp(-|x|^2 / width^2), re-restricted to the
/// band and renormalized. Throws std::invalid_argument when 2N exceeds the
/// Nyquist frequency of some axis or the band holds no lattice point.
Field random_localized_data(const GridPtr& grid, double N, std::uint64_t seed,
                            double spatial_width = 0.0);

/// Equispaced samples t_j = j T / (count - 1), j = 0..count-1.
std::vector<double> sample_times(double T, int count);

/// ||e^{i sign t m} u0||_{L^p(I x R^d x T^n)} with trapezoid quadrature over
/// the given times; p may be kInf. Equals mixed_norm with all exponents p.
double spacetime_lp_norm(const Field& u0, const Multiplier& mult, std::span<const double> times,
                         double p, int sign = 1);

/// ||(e^{i t m} u0)(e^{i t m} v0)||_{L^2(I x R^d x T^n)}.
double bilinear_norm(const Field& u0, const Field& v0, const Multiplier& mult,
                     std::span<const double> times);

// ---------------------------------------------------------------------------
// Dyadic scaling

enum class DataKind { box_filling, localized };

struct ScalingOptions {
  std::vector<double> Ns{4, 8, 16, 32};
  /// 0 selects the endpoint exponent.
  double p = 0.0;
  int trials = 16;
  int time_samples = 64;
  double T = 1.0;
  std::uint64_t seed = 1;
  DataKind data = DataKind::box_filling;
  /// Spatial window for localized data.
  double window_width = 2.0;
  /// Boundary leak limit for localized data, checked at every sample.
  double leak_threshold = 1e-6;
  double leak_window = 0.75;
  int propagator_sign = 1;
};

struct ScalingSample {
  double N = 0.0;
  int trial = 0;
  std::uint64_t seed = 0;
  double norm = 0.0;
};

struct ScalingResult {
  StrichartzPrediction prediction;
  double p = 0.0;
  double predicted_slope = 0.0;
  int time_samples = 0;
  std::vector<ScalingSample> samples;
  std::vector<double> Ns;
  /// Per-N medians of the Hessian-compensated log norm.
  std::vector<double> median_log_compensated;
  /// Fits of log(norm c(N)^{1/p}) on log N across every trial, with c the
  /// Hessian scale, the symbol scale, and 1.
  LineFit fit;
  LineFit fit_symbol;
  LineFit fit_raw;
  /// 1.96 slope standard error of `fit`.
  double band = 0.0;
  /// Median over N of the 95% half-width of the per-N mean log norm.
  double median_band = 0.0;
  /// "hessian" or "symbol": the compensation with the smaller |slope - predicted|.
  std::string flattest;
  bool leak_violation = false;
  double max_leak = 0.0;
  std::vector<std::string> notes;
};

/// Requires >= 4 dyadic N with max N <= Nyquist / 4 on every axis.
ScalingResult measure_scaling(const GridPtr& grid, double sigma, const ScalingOptions& opts);

/// CSV rows N,trial,seed,t_samples,norm.
void write_scaling_csv(std::ostream& os, const ScalingResult& res);
void write_scaling_json(std::ostream& os, const ScalingResult& res);

// ---------------------------------------------------------------------------
// Mixed-norm Strichartz ratios

struct MixedStrichartzSpec {
  double p = kInf;
  double q = 2.0;
  double gamma = 0.0;
  double T = 1.0;
  int time_samples = 64;
  /// Reject pairs failing 2 sigma / p + d / q = d/2 - gamma.
  bool require_admissible = true;
  /// Reject non-radial data (reflection and axis-swap symmetry in x).
  bool require_radial = true;
};

struct MixedStrichartzResult {
  std::vector<double> parameter;
  /// ||u||_{L^p_t L^q_x L^2_y} / ||u0||_{Hdot^gamma_x}.
  std::vector<double> ratios;
  bool admissible = false;
  /// max ratio / min ratio.
  double spread = 0.0;
  /// Slope of log ratio against log parameter.
  double slope = 0.0;
};

/// True when f is invariant under x_i -> -x_i for every axis and under swaps
/// of Euclidean axes, to relative tolerance tol. Grid points are reflected
/// about x = 0 (index j -> nx - j).
bool radial_in_x(const Field& f, double tol = 1e-12);

MixedStrichartzResult measure_mixed_strichartz(std::span<const Field> family,
                                               std::span<const double> parameter, double sigma,
                                               const MixedStrichartzSpec& spec);

// ---------------------------------------------------------------------------
// Bilinear interaction

struct BilinearOptions {
  std::vector<double> Ns{16, 32};
  std::vector<double> Ks{1, 2, 4};
  int trials = 8;
  int time_samples = 64;
  double T = 1.0;
  std::uint64_t seed = 7;
};

struct BilinearCell {
  double N = 0.0;
  double K = 0.0;
  std::vector<double> norms;
  double median = 0.0;
};

struct BilinearResult {
  std::vector<BilinearCell> cells;
  /// Slope of log median against log K, one per N (K < N cells only).
  std::vector<double> slope_per_N;
  /// Half the largest slope, floored at 0.
  double s_observed = 0.0;
  /// max |median(N', K) / median(N, K) - 1| over consecutive N and shared K.
  double max_uniformity_deviation = 0.0;
  /// max - min of slope_per_N.
  double slope_spread = 0.0;
};

/// K must satisfy K <= N/4 or K == N (then v0 = u0). Throws
/// std::invalid_argument for N/4 < K < N.
BilinearResult bilinear_experiment(const GridPtr& grid, double sigma, const BilinearOptions& opts);

void write_bilinear_csv(std::ostream& os, const BilinearResult& res);

}  // namespace wgnls
