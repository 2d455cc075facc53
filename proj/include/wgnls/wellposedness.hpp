#pragma once

// Contraction-mapping experiments: exact exponent bookkeeping for the
// Strichartz fixed-point scheme, Picard iteration of the Duhamel map on a
// snapshot lattice, and the associated space-time norms.

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wgnls/diagnostics.hpp"
#include "wgnls/grid.hpp"
#include "wgnls/operators.hpp"

namespace wgnls {

/// Exact rational with 64-bit terms; arithmetic throws std::overflow_error
/// when a reduced result no longer fits.
class Rational {
 public:
  Rational() = default;
  Rational(std::int64_t num, std::int64_t den = 1);

  /// Closest fraction with denominator <= max_den (continued fractions), so
  /// short decimals such as 0.83 convert exactly.
  static Rational from_double(double x, std::int64_t max_den = 1000000);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  double value() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  std::string str() const;

  friend Rational operator+(Rational a, Rational b);
  friend Rational operator-(Rational a, Rational b);
  friend Rational operator*(Rational a, Rational b);
  friend Rational operator/(Rational a, Rational b);
  friend Rational operator-(Rational a) { return Rational(-a.num_, a.den_); }
  friend bool operator==(Rational a, Rational b) { return a.num_ == b.num_ && a.den_ == b.den_; }
  friend std::strong_ordering operator<=>(Rational a, Rational b);

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

/// Exponents of the vector-valued local theory, stored as reciprocals
/// (0 stands for an infinite exponent). (q, r) carries regularity s,
/// (qt, rt) is its dual pair, (l, m) is sigma-admissible.
struct LwpExponents {
  Rational s, delta;
  Rational q_inv, r_inv;
  Rational qt_inv, rt_inv;
  Rational l_inv, m_inv;
};

/// Exponents of the decay argument: L^{2+r} decay via the weighted radial
/// embedding with weight |x|^beta and y-regularity tau.
struct DecayExponents {
  Rational beta, tau, s, r;
  /// Hypotheses of the weighted radial Sobolev embedding (L^2 source,
  /// target exponent 1/(1 - beta)) hold.
  bool radial_lemma_ok = false;
  std::string radial_note;
};

/// Exponents of the global space-time bound, with interpolation parameter
/// theta against L^inf_t L^{pd/2}_x.
struct ScatteringExponents {
  Rational s, delta, theta;
  Rational q_inv, r_inv;
  Rational qt_inv, rt_inv;
  Rational l_inv, m_inv;
};

struct IndexSystem {
  Rational sigma;
  Rational p;
  int d = 1;
  LwpExponents lwp;
  std::optional<DecayExponents> decay;
  std::optional<ScatteringExponents> scattering;
  std::vector<std::string> notes;
};

struct Relation {
  std::string name;
  bool ok = false;
  /// Signed margin as a double (>= 0 for satisfied inequalities, 0 for
  /// satisfied equalities).
  double slack = 0.0;
  bool strict = false;
};

std::vector<Relation> check_lwp(const IndexSystem& sys);
std::vector<Relation> check_decay(const IndexSystem& sys);
std::vector<Relation> check_scattering(const IndexSystem& sys);
/// Every relation of every present block.
std::vector<Relation> check_all(const IndexSystem& sys);
bool all_ok(std::span<const Relation> rels);

struct IndexSolution {
  std::optional<IndexSystem> system;
  /// Lattice used: s, 1/r, beta and 1/q_theta range over multiples of 1/lattice.
  int lattice = 0;
  /// Empty on success; otherwise names the relations that excluded lattice
  /// points, with counts of points each relation was the first to reject.
  std::string certificate;
  std::map<std::string, int> rejections;
};

/// Deterministic lattice search. Among feasible lattice points the one with
/// the largest minimum strict-inequality margin is returned (first in
/// lexicographic order on ties). Throws std::invalid_argument for
/// sigma <= 1/2 or p outside 4 sigma / d < p < 4 sigma / (d + 1 - 2 sigma).
IndexSolution solve_index_system(double sigma, int d, double p, int lattice = 120);

void write_index_system_json(std::ostream& os, const IndexSystem& sys);

// ---------------------------------------------------------------------------
// Space-time norms

/// Finite exponents for the X, Y^1, Y^2 norms; kInf allowed.
struct ZtExponents {
  double sigma = 1.0;
  double q = kInf, r = 2.0, delta = 0.0;
  double l = kInf, m = 2.0;
  static ZtExponents from_system(const IndexSystem& sys);
};

struct ZtNorms {
  double X = 0.0, Y1 = 0.0, Y2 = 0.0, Z = 0.0;
};

/// X = L^q_t L^r_x H^{1/2+delta}_y, Y^1 = sum_k |grad_x|^{k sigma} in
/// L^l_t L^m_x L^2_y, Y^2 likewise with |d_y|^{k sigma}; time range [0, T]
/// restricted to the samples with t <= T.
ZtNorms zt_norms(std::span<const Field> snapshots, std::span<const double> times,
                 const ZtExponents& ex, double T);
ZtNorms zt_norms(const Trajectory& traj, const ZtExponents& ex, double T);

// ---------------------------------------------------------------------------
// Picard iteration

struct PicardOptions {
  double T = 0.1;
  double dt = 0.01;
  /// Lattice spacing is dt * stride.
  int stride = 1;
  int iterations = 20;
  /// Contraction metric; default L^3_t L^3_x L^2_y.
  NormSpec metric = NormSpec{3.0, 3.0};
  /// Rejects data with ||u0||_{H^sigma} above this.
  double small_data_threshold = kInf;
  /// Stop when the step distance falls below this fraction of the metric norm
  /// of the current iterate.
  double stop_tolerance = 1e-13;
  /// Consecutive ratios above 1 that count as divergence.
  int divergence_run = 3;
  std::optional<ZtExponents> zt;
};

struct PicardStep {
  int k = 0;
  /// D(u^(k+1), u^(k)).
  double distance = 0.0;
  /// distance_k / distance_{k-1}; 0 when the previous distance is 0.
  double ratio = 0.0;
  /// Z-type norms of u^(k+1) when requested.
  std::optional<ZtNorms> z;
};

struct PicardResult {
  std::vector<double> times;
  /// Last iterate on the lattice.
  std::vector<Field> iterate;
  std::vector<PicardStep> steps;
  bool converged = false;
  bool diverged = false;
  std::string message;
  /// exp of the least-squares slope of log distance against k, over steps
  /// whose distance exceeds 1e-12 of the first; 0 with fewer than two.
  double geometric_rate = 0.0;
  /// Largest |log distance - fit| over the same steps.
  double max_log_residual = 0.0;
};

PicardResult picard_iterate(const Field& u0, const ModelParams& params, const PicardOptions& opts);

/// One JSON object per step: {"k", "rho", "distance", "X", "Y1", "Y2", "Z"}.
void write_picard_jsonl(std::ostream& os, const PicardResult& res);

/// Effective time gain: slope of log(||N(T)|| / ||u_lin||^{p+1}) against
/// log T, N the nonlinear Duhamel term of the free evolution, both in the
/// metric on [0, T].
struct TimeGainFit {
  std::vector<double> T;
  std::vector<double> ratio;
  double exponent = 0.0;
};
TimeGainFit measure_time_gain(const Field& u0, const ModelParams& params,
                              std::span<const double> Ts, double dt, const NormSpec& metric);

}  // namespace wgnls
