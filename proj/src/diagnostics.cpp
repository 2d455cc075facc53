#include "wgnls/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "wgnls/error.hpp"

namespace wgnls {

using std::numbers::pi;

namespace {

double pow_abs(double a, double e) {
  if (e == 2.0) return a * a;
  if (e == 4.0) return (a * a) * (a * a);
  return std::pow(a, e);
}

// Lebesgue sum with measure w; e = kInf gives the max.
double lp_combine(std::span<const double> vals, double w, double e) {
  if (std::isinf(e)) {
    double m = 0.0;
    for (double v : vals) m = std::max(m, v);
    return m;
  }
  double s = 0.0;
  for (double v : vals) s += pow_abs(v, e);
  return std::pow(s * w, 1.0 / e);
}

void check_order(double s) {
  if (!std::isfinite(s) || std::abs(s) > 20.0)
    throw std::invalid_argument("Sobolev order must satisfy |s| <= 20");
}

template <class Fn>
void for_each_euclid_node(const WaveguideGrid& g, Fn fn) {
  std::vector<int> ex(g.d());
  std::vector<double> x(g.d());
  for (std::size_t e = 0; e < g.euclid_size(); ++e) {
    g.euclid_axes(e, ex);
    for (int a = 0; a < g.d(); ++a) x[a] = g.euclid_nodes()[ex[a]];
    fn(e, std::span<const double>(x));
  }
}

}  // namespace

double mass(const Field& f) {
  const double n = l2_norm(f);
  return n * n;
}

double kinetic_energy(const Field& f, const Multiplier& m) {
  const Field fh = to_space(f, Space::spectral);
  double s = 0.0;
  for (std::size_t i = 0; i < fh.size(); ++i) s += m.total(i) * std::norm(fh[i]);
  return 0.5 * s / fh.grid().volume();
}

double potential_energy(const Field& f, const ModelParams& params) {
  if (params.mu == 0) return 0.0;
  const Field u = to_space(f, Space::physical);
  double s = 0.0;
  for (const auto& v : u.values()) s += std::pow(std::abs(v), params.p + 2.0);
  return -params.mu / (params.p + 2.0) * s * u.grid().cell_volume();
}

double energy(const Field& f, const Multiplier& m, const ModelParams& params) {
  return kinetic_energy(f, m) + potential_energy(f, params);
}

double energy(const Field& f, const ModelParams& params) {
  return energy(f, Multiplier(f.grid_ptr(), params.sigma), params);
}

double lebesgue_norm(const Field& f, double q) {
  if (!(q >= 1.0)) throw std::invalid_argument("Lebesgue exponent must be >= 1");
  const Field u = to_space(f, Space::physical);
  std::vector<double> a(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) a[i] = std::abs(u[i]);
  return lp_combine(a, u.grid().cell_volume(), q);
}

double sobolev_norm(const Field& f, double s, bool homogeneous) {
  check_order(s);
  const Field fh = to_space(f, Space::spectral);
  const auto& g = fh.grid();
  double acc = 0.0;
  for (std::size_t i = 0; i < fh.size(); ++i) {
    const double k2 = g.euclid_sq()[g.euclid_part(i)] + g.torus_sq()[g.torus_part(i)];
    const double base = homogeneous ? k2 : 1.0 + k2;
    const double w = (homogeneous && k2 == 0.0 && s != 0.0) ? 0.0 : std::pow(base, s);
    acc += w * std::norm(fh[i]);
  }
  return std::sqrt(acc / g.volume());
}

// ---------------------------------------------------------------------------

void NormSpec::validate() const {
  if (!(x_exp >= 1.0) || !(t_exp >= 1.0)) throw std::invalid_argument("norm exponents must be >= 1");
  if (y_kind == YKind::lebesgue && !(y_exp >= 1.0))
    throw std::invalid_argument("norm exponents must be >= 1");
  if (y_kind != YKind::lebesgue) check_order(y_order);
  if (pre != Pre::none) check_order(pre_order);
}

std::string NormSpec::label() const {
  auto e = [](double v) { return std::isinf(v) ? std::string("inf") : format_double(v); };
  std::string s;
  if (pre == Pre::grad_x) s += "|grad_x|^" + format_double(pre_order) + " ";
  if (pre == Pre::grad_y) s += "|d_y|^" + format_double(pre_order) + " ";
  s += "L^" + e(t_exp) + "_t L^" + e(x_exp) + "_x ";
  switch (y_kind) {
    case YKind::lebesgue:
      s += "L^" + e(y_exp) + "_y";
      break;
    case YKind::sobolev:
      s += "H^" + format_double(y_order) + "_y";
      break;
    case YKind::homogeneous_sobolev:
      s += "Hdot^" + format_double(y_order) + "_y";
      break;
  }
  return s;
}

double mixed_norm(const Field& f, const NormSpec& spec) {
  spec.validate();
  Field u = to_space(f, Space::physical);
  if (spec.pre == NormSpec::Pre::grad_x) u = frac_laplacian_x(u, spec.pre_order / 2.0);
  if (spec.pre == NormSpec::Pre::grad_y) u = frac_laplacian_y(u, spec.pre_order / 2.0);
  const auto& g = u.grid();
  const std::size_t ts = g.torus_size();
  const double ymeas = g.n() > 0 ? std::pow(g.dy(), g.n()) : 1.0;
  std::vector<double> rows(g.euclid_size());
  std::vector<double> mag(ts);
  std::vector<Complex> buf(ts);
  std::vector<double> yw;
  if (spec.y_kind != NormSpec::YKind::lebesgue) {
    yw.resize(ts);
    const bool hom = spec.y_kind == NormSpec::YKind::homogeneous_sobolev;
    for (std::size_t t = 0; t < ts; ++t) {
      const double k2 = g.torus_sq()[t];
      yw[t] = (hom && k2 == 0.0 && spec.y_order != 0.0) ? 0.0
                                                        : std::pow(hom ? k2 : 1.0 + k2, spec.y_order);
    }
  }
  for (std::size_t e = 0; e < g.euclid_size(); ++e) {
    const Complex* row = &u[e * ts];
    if (spec.y_kind == NormSpec::YKind::lebesgue || g.n() == 0) {
      for (std::size_t t = 0; t < ts; ++t) mag[t] = std::abs(row[t]);
      rows[e] = g.n() == 0 ? mag[0] : lp_combine(mag, ymeas, spec.y_exp);
    } else {
      std::copy(row, row + ts, buf.begin());
      g.torus_forward_raw(buf.data());
      double s = 0.0;
      for (std::size_t t = 0; t < ts; ++t) s += yw[t] * std::norm(buf[t]);
      rows[e] = std::sqrt(s / g.torus_volume());
    }
  }
  return lp_combine(rows, std::pow(g.dx(), g.d()), spec.x_exp);
}

double time_norm(std::span<const double> values, std::span<const double> times, double e) {
  if (values.size() != times.size() || values.empty())
    throw std::invalid_argument("time_norm: values and times mismatch");
  if (std::isinf(e)) return *std::max_element(values.begin(), values.end());
  if (values.size() == 1) return 0.0;
  double s = 0.0;
  for (std::size_t j = 1; j < values.size(); ++j)
    s += 0.5 * (times[j] - times[j - 1]) * (pow_abs(values[j - 1], e) + pow_abs(values[j], e));
  return std::pow(s, 1.0 / e);
}

double mixed_norm(std::span<const Field> snapshots, std::span<const double> times,
                  const NormSpec& spec) {
  std::vector<double> v;
  v.reserve(snapshots.size());
  for (const auto& f : snapshots) v.push_back(mixed_norm(f, spec));
  return time_norm(v, times, spec.t_exp);
}

double mixed_norm(const Trajectory& traj, const NormSpec& spec) {
  return mixed_norm(traj.snapshots, traj.times, spec);
}

// ---------------------------------------------------------------------------

double morawetz_action(const Field& f, const WeightSpec& w) {
  const Field u = to_space(f, Space::physical);
  const auto grad = gradient_x(u);
  const auto& g = u.grid();
  const std::size_t ts = g.torus_size();
  std::vector<double> gphi(g.d());
  double acc = 0.0;
  for_each_euclid_node(g, [&](std::size_t e, std::span<const double> x) {
    w.gradient(x, gphi);
    for (std::size_t t = 0; t < ts; ++t) {
      const std::size_t i = e * ts + t;
      Complex s = 0.0;
      for (int k = 0; k < g.d(); ++k) s += gphi[k] * grad[k][i];
      acc += (std::conj(u[i]) * s).imag();
    }
  });
  return 2.0 * acc * g.cell_volume();
}

namespace {

double nonlinear_morawetz(const Field& u, const WeightSpec& w, const ModelParams& params) {
  if (params.mu == 0) return 0.0;
  const auto& g = u.grid();
  const std::size_t ts = g.torus_size();
  double acc = 0.0;
  for_each_euclid_node(g, [&](std::size_t e, std::span<const double> x) {
    const double lap = w.laplacian(x);
    if (lap == 0.0) return;
    double row = 0.0;
    for (std::size_t t = 0; t < ts; ++t) row += std::pow(std::abs(u[e * ts + t]), params.p + 2.0);
    acc += lap * row;
  });
  return -(2.0 * params.p * params.mu / (params.p + 2.0)) * acc * g.cell_volume();
}

}  // namespace

MorawetzRhs morawetz_rhs(const Field& f, const WeightSpec& w, const ModelParams& params,
                         const QuadratureSpec& quad) {
  const double sigma = params.sigma;
  if (!(sigma > 0.0 && sigma < 1.0))
    throw std::invalid_argument("morawetz_rhs needs sigma in (0, 1)");
  const Field uh = to_space(f, Space::spectral);
  const Field u = to_space(f, Space::physical);
  const auto& g = uh.grid();
  const int d = g.d();
  const std::size_t ts = g.torus_size();
  const auto rule = grid_quadrature(g, sigma, quad);
  const double c2 = std::sin(pi * sigma) / pi;

  double linear = 0.0;
  if (w.constant_hessian()) {
    std::vector<double> x0(d, 0.0), hess(d * d);
    w.hessian(x0, hess);
    std::vector<int> ex(d);
    std::vector<double> xi(d);
    for (std::size_t e = 0; e < g.euclid_size(); ++e) {
      const double lam = g.euclid_sq()[e];
      if (lam == 0.0) continue;
      g.euclid_axes(e, ex);
      for (int a = 0; a < d; ++a) xi[a] = ex[a] == g.nx() / 2 ? 0.0 : g.euclid_freqs()[ex[a]];
      double form = 0.0;
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) form += xi[k] * hess[k * d + l] * xi[l];
      if (form == 0.0) continue;
      double q = 0.0;
      for (std::size_t j = 0; j < rule.m.size(); ++j) {
        const double den = lam + rule.m[j];
        q += rule.weight[j] * std::pow(rule.m[j], sigma + 1.0) / (den * den);
      }
      double row = 0.0;
      for (std::size_t t = 0; t < ts; ++t) row += std::norm(uh[e * ts + t]);
      linear += 4.0 * c2 * form * q * row;
    }
    linear /= g.volume();
  } else {
    // Weight tables per Euclidean node.
    std::vector<double> hess_tab(g.euclid_size() * d * d), bilap(g.euclid_size());
    for_each_euclid_node(g, [&](std::size_t e, std::span<const double> x) {
      w.hessian(x, std::span<double>(hess_tab).subspan(e * d * d, d * d));
      bilap[e] = w.bilaplacian(x);
    });
    for (std::size_t j = 0; j < rule.m.size(); ++j) {
      Field um = resolvent(uh, rule.m[j], sigma);
      const auto grad = gradient_x(um);
      for (std::size_t t = 0; t < ts; ++t) um[t] = 0.0;  // Euclidean zero mode
      transform_in_place(um, Space::physical);
      double acc = 0.0;
      for (std::size_t e = 0; e < g.euclid_size(); ++e) {
        const double* h = &hess_tab[e * d * d];
        for (std::size_t t = 0; t < ts; ++t) {
          const std::size_t i = e * ts + t;
          double form = 0.0;
          for (int k = 0; k < d; ++k)
            for (int l = 0; l < d; ++l)
              if (h[k * d + l] != 0.0) form += h[k * d + l] * (std::conj(grad[k][i]) * grad[l][i]).real();
          acc += 4.0 * form - bilap[e] * std::norm(um[i]);
        }
      }
      linear += rule.weight[j] * std::pow(rule.m[j], sigma + 1.0) * acc * g.cell_volume();
    }
  }
  MorawetzRhs r;
  r.linear = linear;
  r.nonlinear = nonlinear_morawetz(u, w, params);
  r.total = -(r.linear + r.nonlinear);
  return r;
}

double morawetz_density(const Field& f, double p, const WeightSpec& w) {
  const Field u = to_space(f, Space::physical);
  const auto& g = u.grid();
  const std::size_t ts = g.torus_size();
  double acc = 0.0;
  for_each_euclid_node(g, [&](std::size_t e, std::span<const double> x) {
    const double phi = w.value(x);
    double row = 0.0;
    for (std::size_t t = 0; t < ts; ++t) row += std::pow(std::abs(u[e * ts + t]), p + 2.0);
    acc += row / phi;
  });
  return acc * g.cell_volume();
}

void MorawetzSpacetime::add(double t, const Field& u) {
  const double dens = morawetz_density(u, p_, w_);
  const double h = sobolev_norm(u, sigma_);
  sup_h_ = std::max(sup_h_, h * h);
  if (started_) value_ += 0.5 * (t - last_t_) * (last_density_ + dens);
  started_ = true;
  last_t_ = t;
  last_density_ = dens;
  times_.push_back(t);
  values_.push_back(value_);
  ratios_.push_back(ratio());
}

MorawetzSpacetime morawetz_spacetime(const Trajectory& traj, const WeightSpec& w) {
  MorawetzSpacetime acc(traj.params.p, traj.params.sigma, w);
  for (std::size_t i = 0; i < traj.snapshots.size(); ++i) acc.add(traj.times[i], traj.snapshots[i]);
  return acc;
}

// ---------------------------------------------------------------------------

double decay_r_bound(double sigma, int d, double p) {
  return (2.0 + 4.0 * sigma + d * p + p + 2.0 * p * sigma) / (2.0 * d);
}

double decreasing_fraction(std::span<const double> values, std::size_t transient) {
  if (values.size() < transient + 2) return 0.0;
  std::size_t dec = 0, total = 0;
  for (std::size_t i = transient + 1; i < values.size(); ++i, ++total)
    if (values[i] < values[i - 1]) ++dec;
  return static_cast<double>(dec) / static_cast<double>(total);
}

DecayScan decay_scan(const Trajectory& traj, double q, std::size_t transient) {
  DecayScan scan;
  scan.q = q;
  scan.r_bound = decay_r_bound(traj.params.sigma, traj.params.d, traj.params.p);
  scan.in_theorem = q > 2.0 && q <= 2.0 + scan.r_bound;
  if (!scan.in_theorem)
    std::cerr << "warning: decay exponent q=" << q << " outside (2, " << 2.0 + scan.r_bound
              << "]; labelled out of theorem\n";
  scan.times = traj.times;
  for (const auto& f : traj.snapshots) scan.norms.push_back(lebesgue_norm(f, q));
  scan.decreasing_fraction = decreasing_fraction(scan.norms, transient);
  return scan;
}

// ---------------------------------------------------------------------------

RadialSobolevConditions radial_sobolev_conditions(double beta, double s, double p, double q,
                                                  int d) {
  auto inv = [](double v) { return std::isinf(v) ? 0.0 : 1.0 / v; };
  auto fail = [](std::string why) { return RadialSobolevConditions{false, std::move(why)}; };
  if (d < 1) return fail("d must be >= 1");
  if (!(q >= 1.0) || !(p >= 1.0)) return fail("exponents must be >= 1");
  if (!(s > 0.0 && s < d)) return fail("need 0 < s < d");
  if (!(beta > -d * inv(q))) return fail("need beta > -d/q");
  const double gap = inv(p) - inv(q);
  if (gap < -1e-14 || gap > s + 1e-14) return fail("need 0 <= 1/p - 1/q <= s");
  if (std::abs(beta + s - d * gap) > 1e-12) return fail("scaling condition beta + s = d/p - d/q fails");
  int equalities = (p == 1.0) + std::isinf(p) + (q == 1.0) + std::isinf(q) +
                   (std::abs(gap - s) <= 1e-14);
  if (equalities > 1) return fail("more than one endpoint equality holds");
  return {true, ""};
}

RadialSobolevStats radial_sobolev_check(std::span<const Field> family, double beta, double s,
                                        double p, double q) {
  if (family.empty()) throw std::invalid_argument("radial_sobolev_check: empty family");
  const int d = family.front().grid().d();
  const auto cond = radial_sobolev_conditions(beta, s, p, q, d);
  if (!cond.ok) throw std::invalid_argument("radial_sobolev_check: " + cond.reason);
  RadialSobolevStats st;
  st.min_ratio = kInf;
  for (const auto& f0 : family) {
    const Field f = to_space(f0, Space::physical);
    const auto& g = f.grid();
    const double h = g.dx();
    const double ball_volume = std::pow(pi, d / 2.0) / std::tgamma(d / 2.0 + 1.0);
    const double R = h / std::pow(ball_volume, 1.0 / d);
    const std::size_t ts = g.torus_size();
    std::vector<double> weighted(f.size());
    double bq = std::isinf(q) ? beta : beta * q;
    for_each_euclid_node(g, [&](std::size_t e, std::span<const double> x) {
      double r2 = 0.0;
      for (double v : x) r2 += v * v;
      double wt;
      if (r2 == 0.0) {
        wt = std::isinf(q) ? 0.0 : std::pow(d * std::pow(R, bq) / (d + bq), 1.0 / q);
      } else {
        wt = std::pow(std::sqrt(r2), beta);
      }
      for (std::size_t t = 0; t < ts; ++t) weighted[e * ts + t] = wt * std::abs(f[e * ts + t]);
    });
    const double num = lp_combine(weighted, g.cell_volume(), q);
    const double den = lebesgue_norm(frac_laplacian_x(f, s / 2.0), p);
    if (!(den > 0.0)) throw std::invalid_argument("radial_sobolev_check: zero field");
    const double r = num / den;
    st.ratios.push_back(r);
    st.max_ratio = std::max(st.max_ratio, r);
    st.min_ratio = std::min(st.min_ratio, r);
  }
  return st;
}

// ---------------------------------------------------------------------------

bool ScatteringResult::decreasing() const {
  if (deltas.size() < 2) return false;
  for (std::size_t i = 1; i < deltas.size(); ++i)
    if (!(deltas[i] < deltas[i - 1])) return false;
  return true;
}

ScatteringTracker::ScatteringTracker(double sigma, std::vector<double> sample_times,
                                     double leak_window, double leak_threshold)
    : sigma_(sigma),
      samples_(std::move(sample_times)),
      leak_window_(leak_window),
      leak_threshold_(leak_threshold) {
  std::sort(samples_.begin(), samples_.end());
}

void ScatteringTracker::add(double t, const Field& u) {
  if (stopped_ || next_ >= samples_.size()) return;
  const double tol = 1e-9 * std::max(1.0, std::abs(t));
  while (next_ < samples_.size() && samples_[next_] < t - tol) {
    result_.warnings.push_back("sample time " + format_double(samples_[next_]) +
                               " not on the snapshot lattice; skipped");
    ++next_;
  }
  if (next_ >= samples_.size() || std::abs(samples_[next_] - t) > tol) return;
  ++next_;
  const Field phys = to_space(u, Space::physical);
  const double leak = boundary_leak(phys, leak_window_);
  if (leak > leak_threshold_) {
    result_.warnings.push_back("boundary leak " + format_double(leak) + " at t=" +
                               format_double(t) + "; sample list truncated");
    stopped_ = true;
    return;
  }
  if (!mult_) mult_.emplace(u.grid_ptr(), sigma_);
  Field prof = linear_propagate(to_space(u, Space::spectral), *mult_, -t);
  if (!result_.profiles.empty())
    result_.deltas.push_back(sobolev_norm(prof - result_.profiles.back(), sigma_));
  result_.times.push_back(t);
  result_.profiles.push_back(std::move(prof));
}

ScatteringResult scattering_extract(const Trajectory& traj, const std::vector<double>& samples,
                                    double leak_window, double leak_threshold) {
  ScatteringTracker tr(traj.params.sigma, samples, leak_window, leak_threshold);
  for (std::size_t i = 0; i < traj.snapshots.size(); ++i) tr.add(traj.times[i], traj.snapshots[i]);
  return tr.result();
}

// ---------------------------------------------------------------------------

DiagnosticsRecord diagnose(const Field& f, double t, const Multiplier& m,
                           const ModelParams& params, const RecordOptions& opts) {
  const Field u = to_space(f, Space::physical);
  DiagnosticsRecord r;
  r.t = t;
  r.mass = mass(u);
  r.energy = energy(u, m, params);
  r.morawetz_action = morawetz_action(u, opts.weight);
  if (opts.with_rhs) r.morawetz_rhs = morawetz_rhs(u, opts.weight, params, opts.quadrature).total;
  r.boundary_leak = boundary_leak(u, opts.leak_window);
  for (const auto& [name, spec] : opts.norms) r.norms[name] = mixed_norm(u, spec);
  return r;
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_csv_header(std::ostream& os, const std::vector<std::string>& norm_names) {
  os << "t,mass,energy,morawetz_action,morawetz_rhs,boundary_leak";
  for (const auto& n : norm_names) os << ',' << n;
  os << '\n';
}

void write_csv_row(std::ostream& os, const DiagnosticsRecord& r,
                   const std::vector<std::string>& norm_names) {
  os << format_double(r.t) << ',' << format_double(r.mass) << ',' << format_double(r.energy) << ','
     << format_double(r.morawetz_action) << ','
     << (r.morawetz_rhs ? format_double(*r.morawetz_rhs) : std::string()) << ','
     << format_double(r.boundary_leak);
  for (const auto& n : norm_names) {
    auto it = r.norms.find(n);
    os << ',' << (it != r.norms.end() ? format_double(it->second) : std::string());
  }
  os << '\n';
}

void write_jsonl(std::ostream& os, const DiagnosticsRecord& r) {
  nlohmann::ordered_json j;
  j["t"] = r.t;
  j["mass"] = r.mass;
  j["energy"] = r.energy;
  j["morawetz_action"] = r.morawetz_action;
  if (r.morawetz_rhs) j["morawetz_rhs"] = *r.morawetz_rhs;
  j["boundary_leak"] = r.boundary_leak;
  j["norms"] = r.norms;
  os << j.dump() << '\n';
}

}  // namespace wgnls
