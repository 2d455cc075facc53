#include "wgnls/evolve.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "wgnls/checkpoint.hpp"
#include "wgnls/error.hpp"

namespace wgnls {

const char* to_string(Integrator i) {
  switch (i) {
    case Integrator::linear_exact:
      return "linear_exact";
    case Integrator::triple_jump:
      return "triple_jump";
    case Integrator::strang:
    default:
      return "strang";
  }
}

Integrator integrator_from_string(const std::string& s) {
  if (s == "linear_exact") return Integrator::linear_exact;
  if (s == "strang") return Integrator::strang;
  if (s == "triple_jump") return Integrator::triple_jump;
  throw std::invalid_argument("unknown integrator '" + s + "'");
}

Field linear_propagate(const Field& f, const Multiplier& m, double t) {
  const Space orig = f.space();
  Field w = to_space(f, Space::spectral);
  for (std::size_t i = 0; i < w.size(); ++i) w[i] *= std::polar(1.0, t * m.total(i));
  transform_in_place(w, orig);
  return w;
}

Field linear_propagate(const Field& f, double sigma, double t) {
  return linear_propagate(f, Multiplier(f.grid_ptr(), sigma), t);
}

namespace {

inline double modulus_power(double a, double p) {
  if (p == 2.0) return a * a;
  if (p == 1.0) return a;
  if (p == 1.5) return a * std::sqrt(a);
  return std::pow(a, p);
}

double nonlinear_kernel(std::span<Complex> u, int mu, double p, double dt) {
  double amax = 0.0;
  const double c = -mu * dt;
  for (auto& v : u) {
    const double a = std::abs(v);
    if (!(a <= amax)) amax = a;  // also propagates NaN
    if (a == 0.0 || mu == 0) continue;
    v *= std::polar(1.0, c * modulus_power(a, p));
  }
  return amax;
}

std::vector<char> two_thirds_mask(const WaveguideGrid& g) {
  std::vector<char> keep(g.size(), 1);
  std::vector<int> ex(g.d()), ty(g.n());
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.euclid_axes(g.euclid_part(i), ex);
    bool k = true;
    for (int a : ex) k = k && 3 * std::abs(WaveguideGrid::signed_index(a, g.nx())) <= g.nx();
    if (g.n() > 0) {
      g.torus_axes(g.torus_part(i), ty);
      for (int a : ty) k = k && 3 * std::abs(WaveguideGrid::signed_index(a, g.ny())) <= g.ny();
    }
    keep[i] = k ? 1 : 0;
  }
  return keep;
}

}  // namespace

Field nonlinear_phase_step(const Field& f, const ModelParams& params, double dt) {
  require_space(f, Space::physical, "nonlinear_phase_step");
  Field out = f;
  nonlinear_kernel(out.values(), params.mu, params.p, dt);
  return out;
}

Field strang_step(const Field& f, const ModelParams& params, double dt) {
  require_space(f, Space::physical, "strang_step");
  SplitStepper stepper(f.grid_ptr(), params);
  Field u = f;
  stepper.strang(u, dt);
  return u;
}

// ---------------------------------------------------------------------------

SplitStepper::SplitStepper(GridPtr grid, ModelParams params, bool dealias)
    : grid_(std::move(grid)), params_(params), mult_(grid_, params.sigma), dealias_(dealias) {
  params_.validate();
  keep_mask_ = two_thirds_mask(*grid_);
}

const std::vector<Complex>& SplitStepper::phases(double t) {
  auto it = phase_cache_.find(t);
  if (it != phase_cache_.end()) return it->second;
  if (phase_cache_.size() > 8) phase_cache_.clear();
  std::vector<Complex> ph(grid_->size());
  for (std::size_t i = 0; i < ph.size(); ++i) ph[i] = std::polar(1.0, t * mult_.total(i));
  return phase_cache_.emplace(t, std::move(ph)).first->second;
}

void SplitStepper::linear_spectral(Field& uh, double t) {
  const auto& ph = phases(t);
  auto v = uh.values();
  for (std::size_t i = 0; i < v.size(); ++i) v[i] *= ph[i];
}

void SplitStepper::dealias_spectral(Field& uh) const {
  if (!dealias_) return;
  auto v = uh.values();
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!keep_mask_[i]) v[i] = 0.0;
}

double SplitStepper::nonlinear_in_place(Field& u, double dt) const {
  require_space(u, Space::physical, "nonlinear substep");
  return nonlinear_kernel(u.values(), params_.mu, params_.p, dt);
}

void SplitStepper::strang(Field& u, double dt) { strang_fused(u, dt, 1); }

void SplitStepper::triple_jump(Field& u, double dt) {
  const double cbrt2 = std::cbrt(2.0);
  const double w1 = 1.0 / (2.0 - cbrt2);
  const double w0 = -cbrt2 / (2.0 - cbrt2);
  strang(u, w1 * dt);
  strang(u, w0 * dt);
  strang(u, w1 * dt);
}

bool SplitStepper::strang_fused(Field& u, double dt, int count,
                                const std::function<bool(const Field&)>& guard) {
  require_space(u, Space::physical, "strang_fused");
  transform_in_place(u, Space::spectral);
  linear_spectral(u, 0.5 * dt);
  for (int s = 0; s < count; ++s) {
    transform_in_place(u, Space::physical);
    const double amax = nonlinear_in_place(u, dt);
    if (!std::isfinite(amax)) return false;
    if (guard && !guard(u)) return false;
    transform_in_place(u, Space::spectral);
    dealias_spectral(u);
    linear_spectral(u, s + 1 < count ? dt : 0.5 * dt);
  }
  transform_in_place(u, Space::physical);
  return true;
}

// ---------------------------------------------------------------------------

namespace {

double max_modulus(const Field& u) {
  double m = 0.0;
  for (const auto& v : u.values()) {
    const double a = std::abs(v);
    if (!(a <= m)) m = a;
  }
  return m;
}

double high_frequency_fraction(const Field& u, const std::vector<char>& keep) {
  const Field uh = to_space(u, Space::spectral);
  double total = 0.0, high = 0.0;
  for (std::size_t i = 0; i < uh.size(); ++i) {
    const double w = std::norm(uh[i]);
    total += w;
    if (!keep[i]) high += w;
  }
  return total > 0.0 ? high / total : 0.0;
}

std::string fmt_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

}  // namespace

Trajectory evolve(const Field& u0, const ModelParams& params, const EvolveOptions& opts) {
  require_space(u0, Space::physical, "evolve");
  params.validate();
  if (!(opts.T > 0.0) || !(opts.dt > 0.0))
    throw std::invalid_argument("evolve: T and dt must be positive");
  if (opts.record_stride < 1) throw std::invalid_argument("evolve: record_stride must be >= 1");
  if (u0.grid().n() > 1 && params.mu != 0 && opts.integrator != Integrator::linear_exact)
    throw std::invalid_argument("evolve: nonlinear evolution supports n <= 1");
  const long steps = std::lround(opts.T / opts.dt);
  if (steps < 1 || std::abs(steps * opts.dt - opts.T) > 1e-9 * opts.T)
    throw std::invalid_argument("evolve: T must be an integer multiple of dt");

  Trajectory traj;
  traj.params = params;
  traj.integrator = opts.integrator;
  traj.dt = opts.dt;
  traj.record_stride = opts.record_stride;
  traj.step_log.assign(steps, opts.dt);

  const auto hf_keep = two_thirds_mask(u0.grid());
  const double amp0 = max_modulus(u0);
  const double amp_cap = opts.guard.amplitude_factor * amp0;
  const double hf0 = high_frequency_fraction(u0, hf_keep);
  int record = 0;
  bool leak_warned = false;

  auto record_state = [&](double t, const Field& u) {
    const double leak = boundary_leak(u, opts.leak_window);
    traj.record_times.push_back(t);
    traj.leaks.push_back(leak);
    if (leak > opts.leak_threshold && !leak_warned) {
      traj.warnings.push_back("boundary leak " + fmt_double(leak) + " exceeds " +
                              fmt_double(opts.leak_threshold) + " at t=" + fmt_double(t));
      leak_warned = true;
    }
    if (opts.observer) opts.observer(record, t, u);
    if (!opts.keep || opts.keep(record, t)) {
      traj.times.push_back(t);
      traj.snapshots.push_back(u);
    }
    ++record;
  };

  auto abort_with = [&](const std::string& why, double t, const Field& last) {
    traj.aborted = true;
    traj.abort_reason = why;
    traj.abort_time = t;
    traj.last_finite = last;
    traj.warnings.push_back("aborted at t=" + fmt_double(t) + ": " + why);
    if (opts.throw_on_abort) throw NumericalAbort(traj.warnings.back());
  };

  Field u = u0;
  Field last_good = u0;
  record_state(0.0, u);

  SplitStepper stepper(u0.grid_ptr(), params, opts.dealias);
  const Multiplier* mult = &stepper.multiplier();
  auto amplitude_ok = [&](const Field& state) { return max_modulus(state) <= amp_cap; };

  long done = 0;
  while (done < steps) {
    const int chunk = static_cast<int>(std::min<long>(opts.record_stride, steps - done));
    bool ok = true;
    switch (opts.integrator) {
      case Integrator::linear_exact:
        u = linear_propagate(u0, *mult, (done + chunk) * opts.dt);
        break;
      case Integrator::strang:
        ok = stepper.strang_fused(u, opts.dt, chunk, amplitude_ok);
        break;
      case Integrator::triple_jump:
        for (int s = 0; s < chunk && ok; ++s) {
          stepper.triple_jump(u, opts.dt);
          ok = std::isfinite(max_modulus(u)) && amplitude_ok(u);
        }
        break;
    }
    done += chunk;
    const double t = (done == steps) ? opts.T : done * opts.dt;
    if (!ok) {
      abort_with("amplitude exceeded " + fmt_double(opts.guard.amplitude_factor) +
                     "x initial or non-finite values",
                 t, last_good);
      return traj;
    }
    const double hf = high_frequency_fraction(u, hf_keep);
    if (!std::isfinite(hf) || hf - hf0 > opts.guard.high_frequency_fraction) {
      abort_with("high-frequency mass fraction grew from " + fmt_double(hf0) + " to " +
                     fmt_double(hf),
                 t, last_good);
      return traj;
    }
    record_state(t, u);
    last_good = u;
  }
  return traj;
}

// ---------------------------------------------------------------------------

namespace {

// Pulled-back nonlinearity exp(-i t m) F(|u|^p u) in spectral space.
Field pulled_back_forcing(const Field& u, double t, const ModelParams& params,
                          const Multiplier& mult) {
  Field f = to_space(u, Space::physical);
  for (auto& v : f.values()) v *= modulus_power(std::abs(v), params.p);
  transform_in_place(f, Space::spectral);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] *= std::polar(1.0, -t * mult.total(i));
  return f;
}

Field push_forward(const Field& u0h, const Field& integral, double t, const ModelParams& params,
                   const Multiplier& mult) {
  Field out = u0h;
  const Complex c{0.0, -static_cast<double>(params.mu)};
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = std::polar(1.0, t * mult.total(i)) * (out[i] + c * integral[i]);
  transform_in_place(out, Space::physical);
  return out;
}

}  // namespace

std::vector<Field> duhamel_lattice(const Field& u0, const std::vector<Field>& u,
                                   const std::vector<double>& times, const ModelParams& params,
                                   const Multiplier& mult) {
  if (u.size() != times.size() || u.empty())
    throw std::invalid_argument("duhamel_lattice: snapshot/time mismatch");
  const Field u0h = to_space(u0, Space::spectral);
  std::vector<Field> out;
  Field integral(u0.grid_ptr(), Space::spectral);
  Field prev = pulled_back_forcing(u[0], times[0], params, mult);
  out.push_back(push_forward(u0h, integral, times[0], params, mult));
  for (std::size_t j = 1; j < u.size(); ++j) {
    Field cur = pulled_back_forcing(u[j], times[j], params, mult);
    const double h = 0.5 * (times[j] - times[j - 1]);
    for (std::size_t i = 0; i < cur.size(); ++i) integral[i] += h * (prev[i] + cur[i]);
    out.push_back(push_forward(u0h, integral, times[j], params, mult));
    prev = std::move(cur);
  }
  return out;
}

Field duhamel_rhs(const Trajectory& traj, double t) {
  const auto& ts = traj.times;
  if (ts.empty() || ts.front() != 0.0)
    throw std::invalid_argument("duhamel_rhs: trajectory must store t = 0");
  if (t < ts.front() || t > ts.back() * (1.0 + 1e-12))
    throw std::out_of_range("duhamel_rhs: t outside the stored time range");
  const Multiplier mult(traj.snapshots.front().grid_ptr(), traj.params.sigma);
  const Field u0h = to_space(traj.snapshots.front(), Space::spectral);
  Field integral(u0h.grid_ptr(), Space::spectral);
  Field prev = pulled_back_forcing(traj.snapshots[0], ts[0], traj.params, mult);
  for (std::size_t j = 1; j < ts.size() && ts[j - 1] < t; ++j) {
    Field cur = pulled_back_forcing(traj.snapshots[j], ts[j], traj.params, mult);
    const double full = ts[j] - ts[j - 1];
    const double part = std::min(t, ts[j]) - ts[j - 1];
    const double frac = part / full;
    for (std::size_t i = 0; i < cur.size(); ++i) {
      const Complex end = prev[i] + frac * (cur[i] - prev[i]);
      integral[i] += 0.5 * part * (prev[i] + end);
    }
    prev = std::move(cur);
  }
  return push_forward(u0h, integral, t, traj.params, mult);
}

void save_trajectory(const std::filesystem::path& dir, const Trajectory& traj) {
  std::filesystem::create_directories(dir);
  nlohmann::ordered_json man;
  man["version"] = 1;
  man["params"] = {{"sigma", traj.params.sigma}, {"mu", traj.params.mu}, {"p", traj.params.p},
                   {"d", traj.params.d},         {"n", traj.params.n}};
  man["integrator"] = to_string(traj.integrator);
  man["dt"] = traj.dt;
  man["record_stride"] = traj.record_stride;
  man["times"] = traj.times;
  auto files = nlohmann::json::array();
  for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "snap_%05zu.bin", i);
    write_checkpoint(dir / name, traj.snapshots[i], traj.times[i]);
    files.push_back(name);
  }
  man["snapshots"] = files;
  man["warnings"] = traj.warnings;
  man["aborted"] = traj.aborted;
  if (traj.aborted) {
    man["abort_reason"] = traj.abort_reason;
    man["abort_time"] = traj.abort_time;
  }
  std::ofstream os(dir / "manifest.json");
  os << man.dump(2) << '\n';
}

}  // namespace wgnls
