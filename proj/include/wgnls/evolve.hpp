#pragma once

// Time stepping for i u_t + Lambda u = mu |u|^p u, Lambda the dispersion
// multiplier. Spectrally u^(t) = exp(i t m) u^(0) for the linear part and the
// pointwise flow u -> u exp(-i mu |u|^p t) for the nonlinear part.

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wgnls/grid.hpp"
#include "wgnls/operators.hpp"

namespace wgnls {

enum class Integrator { linear_exact, strang, triple_jump };

const char* to_string(Integrator i);
Integrator integrator_from_string(const std::string& s);

/// exp(i t m) applied per mode; returns in the input space.
Field linear_propagate(const Field& f, const Multiplier& m, double t);
Field linear_propagate(const Field& f, double sigma, double t);

/// u -> u exp(-i mu |u|^p dt) pointwise; field must be physical.
Field nonlinear_phase_step(const Field& f, const ModelParams& params, double dt);

/// Half linear, full nonlinear, half linear. Input and output physical.
Field strang_step(const Field& f, const ModelParams& params, double dt);

/// Reusable stepper with cached phase tables. Operates on physical fields.
class SplitStepper {
 public:
  SplitStepper(GridPtr grid, ModelParams params, bool dealias = false);

  const Multiplier& multiplier() const { return mult_; }
  const ModelParams& params() const { return params_; }

  /// One Strang step of size dt (any sign).
  void strang(Field& u, double dt);
  /// One fourth-order triple-jump composition of Strang steps.
  void triple_jump(Field& u, double dt);
  /// `count` Strang steps with consecutive half-linear substeps fused. Stops
  /// early and returns false when `guard` rejects an intermediate state.
  bool strang_fused(Field& u, double dt, int count,
                    const std::function<bool(const Field&)>& guard = {});

  /// Nonlinear substep in place on a physical field. Returns max |u|.
  double nonlinear_in_place(Field& u, double dt) const;

 private:
  const std::vector<Complex>& phases(double t);
  void linear_spectral(Field& uh, double t);
  void dealias_spectral(Field& uh) const;

  GridPtr grid_;
  ModelParams params_;
  Multiplier mult_;
  bool dealias_;
  std::vector<char> keep_mask_;
  std::map<double, std::vector<Complex>> phase_cache_;
};

struct BlowupGuard {
  /// Abort when max |u| exceeds this multiple of the initial max |u|.
  double amplitude_factor = 10.0;
  /// Abort when the fraction of mass beyond 2/3 of the Nyquist frequency on
  /// some axis grows by more than this over its initial value.
  double high_frequency_fraction = 1e-3;
};

struct EvolveOptions {
  double T = 1.0;
  double dt = 0.01;
  int record_stride = 1;
  Integrator integrator = Integrator::strang;
  bool dealias = false;
  BlowupGuard guard;
  double leak_window = 0.75;
  double leak_threshold = 1e-8;
  /// Throw NumericalAbort instead of returning an aborted trajectory.
  bool throw_on_abort = false;
  /// Called on every recorded physical state, in order.
  std::function<void(int record, double t, const Field& u)> observer;
  /// Decides whether a recorded state is kept in Trajectory::snapshots.
  std::function<bool(int record, double t)> keep;
};

struct Trajectory {
  ModelParams params;
  Integrator integrator = Integrator::strang;
  double dt = 0.0;
  int record_stride = 1;
  std::vector<double> times;
  std::vector<Field> snapshots;
  std::vector<double> step_log;
  /// Boundary leak at every recorded time (including states not kept).
  std::vector<double> record_times;
  std::vector<double> leaks;
  std::vector<std::string> warnings;
  bool aborted = false;
  std::string abort_reason;
  /// Last finite state when aborted.
  std::optional<Field> last_finite;
  double abort_time = 0.0;
};

Trajectory evolve(const Field& u0, const ModelParams& params, const EvolveOptions& opts);

/// Phi(u)(t) = exp(i t m) u(0) - i mu int_0^t exp(i (t-s) m) |u|^p u (s) ds, the
/// integral by trapezoid over the stored snapshots in the interaction picture.
/// t must lie within the stored time range; the last partial interval is
/// linearly interpolated. Returns a physical field.
Field duhamel_rhs(const Trajectory& traj, double t);

/// Phi applied on a snapshot lattice: returns Phi(u)(t_j) for every j.
std::vector<Field> duhamel_lattice(const Field& u0, const std::vector<Field>& u,
                                   const std::vector<double>& times, const ModelParams& params,
                                   const Multiplier& mult);

/// Writes snapshot checkpoints and manifest.json into dir.
void save_trajectory(const std::filesystem::path& dir, const Trajectory& traj);

}  // namespace wgnls
