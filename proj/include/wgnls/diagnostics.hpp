#pragma once

// Functionals of states and trajectories: norms, conserved quantities,
// Morawetz quantities, decay and scattering diagnostics.

#include <iosfwd>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wgnls/evolve.hpp"
#include "wgnls/grid.hpp"
#include "wgnls/operators.hpp"

namespace wgnls {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

double mass(const Field& f);
/// 1/2 sum m |u^|^2 / V, the quadratic part of the energy.
double kinetic_energy(const Field& f, const Multiplier& m);
/// -mu/(p+2) int |u|^{p+2}.
double potential_energy(const Field& f, const ModelParams& params);
/// Conserved energy 1/2 <Lambda u, u> - mu/(p+2) int |u|^{p+2}.
double energy(const Field& f, const Multiplier& m, const ModelParams& params);
double energy(const Field& f, const ModelParams& params);

/// L^q over x and y; q may be kInf.
double lebesgue_norm(const Field& f, double q);
/// (sum w |u^|^2 / V)^{1/2} with w = (1 + |xi|^2 + |eta|^2)^s, or
/// (|xi|^2 + |eta|^2)^s when homogeneous. Rejects |s| > 20.
double sobolev_norm(const Field& f, double s, bool homogeneous = false);

/// Nested norm: optional pre-multiplier, then the y norm per x, then L^x_exp
/// over x, then (for trajectories) L^t_exp over time by trapezoid.
struct NormSpec {
  enum class YKind { lebesgue, sobolev, homogeneous_sobolev };
  enum class Pre { none, grad_x, grad_y };

  double t_exp = kInf;
  double x_exp = 2.0;
  YKind y_kind = YKind::lebesgue;
  double y_exp = 2.0;
  double y_order = 0.0;
  Pre pre = Pre::none;
  double pre_order = 0.0;

  void validate() const;
  std::string label() const;
};

double mixed_norm(const Field& f, const NormSpec& spec);
double mixed_norm(std::span<const Field> snapshots, std::span<const double> times,
                  const NormSpec& spec);
double mixed_norm(const Trajectory& traj, const NormSpec& spec);
/// Time integral by trapezoid of per-time values v(t)^e, returned as the 1/e
/// power; e = kInf gives the maximum.
double time_norm(std::span<const double> values, std::span<const double> times, double e);

// ---------------------------------------------------------------------------
// Morawetz

/// 2 Im int conj(u) grad_x phi . grad_x u.
double morawetz_action(const Field& f, const WeightSpec& w);

/// Terms of the Morawetz identity. `linear` is
///   int_0^inf m^sigma int (4 conj(d_k u_m) phi_kl d_l u_m - Lap^2 phi |u_m|^2)
/// with u_m the scaled resolvent, `nonlinear` is -(2 p mu/(p+2)) int Lap phi |u|^{p+2},
/// and `total` = -(linear + nonlinear) is dM/dt for the flow convention used here.
struct MorawetzRhs {
  double linear = 0.0;
  double nonlinear = 0.0;
  double total = 0.0;
};

/// Constant-Hessian weights use a per-mode Plancherel evaluation; other weights
/// sum over quadrature nodes in physical space. The Euclidean zero mode of u_m
/// is dropped from the Lap^2 phi term there (its m-integral diverges on a
/// finite box). Rejects sigma outside (0, 1).
MorawetzRhs morawetz_rhs(const Field& f, const WeightSpec& w, const ModelParams& params,
                         const QuadratureSpec& quad = {});

/// int |u|^{p+2} / phi_eps over the domain at one time.
double morawetz_density(const Field& f, double p, const WeightSpec& w);

/// Streaming spacetime integral int int |u|^{p+2} / phi_eps by trapezoid with
/// the running sup of ||u||_{H^sigma}^2.
class MorawetzSpacetime {
 public:
  MorawetzSpacetime(double p, double sigma, WeightSpec w) : p_(p), sigma_(sigma), w_(w) {}
  void add(double t, const Field& u);

  double value() const { return value_; }
  double sup_energy_norm_sq() const { return sup_h_; }
  double ratio() const { return sup_h_ > 0.0 ? value_ / sup_h_ : 0.0; }
  /// Running values after each add().
  const std::vector<double>& times() const { return times_; }
  const std::vector<double>& values() const { return values_; }
  const std::vector<double>& ratios() const { return ratios_; }

 private:
  double p_;
  double sigma_;
  WeightSpec w_;
  double value_ = 0.0;
  double sup_h_ = 0.0;
  double last_t_ = 0.0;
  double last_density_ = 0.0;
  bool started_ = false;
  std::vector<double> times_, values_, ratios_;
};

MorawetzSpacetime morawetz_spacetime(const Trajectory& traj, const WeightSpec& w);

// ---------------------------------------------------------------------------
// Decay

/// (2 + 4 sigma + d p + p + 2 p sigma) / (2 d).
double decay_r_bound(double sigma, int d, double p);

/// Fraction of consecutive decreases in values[transient..].
double decreasing_fraction(std::span<const double> values, std::size_t transient);

struct DecayScan {
  double q = 4.0;
  double r_bound = 0.0;
  bool in_theorem = true;
  std::vector<double> times;
  std::vector<double> norms;
  double decreasing_fraction = 0.0;
};

/// L^q_{x,y} per stored snapshot. q outside (2, 2 + r_bound] is computed but
/// labelled out of theorem with a warning on stderr.
DecayScan decay_scan(const Trajectory& traj, double q, std::size_t transient = 0);

// ---------------------------------------------------------------------------
// Radial Sobolev

struct RadialSobolevConditions {
  bool ok = false;
  std::string reason;
};

/// Hypotheses of the weighted radial Sobolev embedding for
/// || |x|^beta f ||_q <= C || |grad|^s f ||_p on R^d.
RadialSobolevConditions radial_sobolev_conditions(double beta, double s, double p, double q,
                                                  int d);

struct RadialSobolevStats {
  std::vector<double> ratios;
  double max_ratio = 0.0;
  double min_ratio = 0.0;
};

/// Ratios over the family; throws std::invalid_argument on violated
/// conditions or a zero field. The singular weight at x = 0 is replaced by
/// its average over a ball of the cell volume.
RadialSobolevStats radial_sobolev_check(std::span<const Field> family, double beta, double s,
                                        double p, double q);

// ---------------------------------------------------------------------------
// Scattering

struct ScatteringResult {
  std::vector<double> times;
  std::vector<Field> profiles;
  /// ||f(T_{i+1}) - f(T_i)||_{H^sigma}.
  std::vector<double> deltas;
  std::vector<std::string> warnings;
  bool decreasing() const;
};

/// Streaming pull-back f(T) = exp(-i T m) u(T) at requested times.
class ScatteringTracker {
 public:
  ScatteringTracker(double sigma, std::vector<double> sample_times, double leak_window = 0.75,
                    double leak_threshold = 1e-8);
  /// Feed states in time order; samples at the requested times are kept.
  void add(double t, const Field& u);
  ScatteringResult result() const { return result_; }

 private:
  double sigma_;
  std::vector<double> samples_;
  std::size_t next_ = 0;
  double leak_window_;
  double leak_threshold_;
  bool stopped_ = false;
  std::optional<Multiplier> mult_;
  ScatteringResult result_;
};

ScatteringResult scattering_extract(const Trajectory& traj, const std::vector<double>& samples,
                                    double leak_window = 0.75, double leak_threshold = 1e-8);

// ---------------------------------------------------------------------------
// Records

struct DiagnosticsRecord {
  double t = 0.0;
  double mass = 0.0;
  double energy = 0.0;
  double morawetz_action = 0.0;
  std::optional<double> morawetz_rhs;
  double boundary_leak = 0.0;
  std::map<std::string, double> norms;
};

struct RecordOptions {
  WeightSpec weight = WeightSpec::half_square();
  bool with_rhs = false;
  QuadratureSpec quadrature;
  double leak_window = 0.75;
  std::vector<std::pair<std::string, NormSpec>> norms;
};

DiagnosticsRecord diagnose(const Field& u, double t, const Multiplier& m,
                           const ModelParams& params, const RecordOptions& opts);

/// CSV columns: t, mass, energy, morawetz_action, morawetz_rhs, boundary_leak,
/// then the norm names in the given order. Doubles use %.17g.
void write_csv_header(std::ostream& os, const std::vector<std::string>& norm_names);
void write_csv_row(std::ostream& os, const DiagnosticsRecord& r,
                   const std::vector<std::string>& norm_names);
/// One JSON object per line.
void write_jsonl(std::ostream& os, const DiagnosticsRecord& r);

/// %.17g formatting shared by CSV writers.
std::string format_double(double x);

}  // namespace wgnls
