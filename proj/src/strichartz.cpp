#include "wgnls/strichartz.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <ostream>
#include <stdexcept>

#include "json.hpp"
#include "wgnls/evolve.hpp"
#include "wgnls/rng.hpp"

namespace wgnls {

StrichartzPrediction StrichartzPrediction::make(double sigma, int d_euclid, int n) {
  if (!(sigma > 0.0 && sigma <= 1.0)) throw std::invalid_argument("sigma must lie in (0, 1]");
  StrichartzPrediction pr;
  pr.sigma = sigma;
  pr.d = d_euclid + n;
  pr.n = n;
  // Hessian of |xi|^{2 sigma}: radial eigenvalue 2 sigma (2 sigma - 1) |xi|^{2 sigma - 2},
  // tangential ones positive; the torus block is positive as well.
  const int negative = sigma < 0.5 ? 1 : 0;
  const int positive = pr.d - negative - (sigma == 0.5 ? 1 : 0);
  pr.k = std::min(negative, positive);
  if (pr.d - pr.k <= 0) throw std::invalid_argument("degenerate dimension count");
  pr.p_endpoint = 2.0 * (pr.d + 2 - pr.k) / (pr.d - pr.k);
  return pr;
}

double StrichartzPrediction::slope(double p) const {
  return d / 2.0 - (std::isinf(p) ? 0.0 : (d + 2.0) / p);
}

double StrichartzPrediction::psi_min(double N) const {
  return std::min(std::pow(N, 2.0 * (sigma - 1.0)), 1.0);
}

double StrichartzPrediction::symbol_min(double N) const {
  return std::min(std::pow(N, 2.0 * sigma), 1.0);
}

std::uint64_t trial_seed(std::uint64_t seed, double N, int trial) {
  return splitmix64(splitmix64(seed) ^ splitmix64(std::bit_cast<std::uint64_t>(N)) ^
                    (static_cast<std::uint64_t>(trial) * 0x9e3779b97f4a7c15ULL));
}

namespace {

void check_band_resolved(const WaveguideGrid& g, double N, double factor, const char* where) {
  if (!(N > 0.0)) throw std::invalid_argument(std::string(where) + ": N must be positive");
  if (factor * N > g.euclid_nyquist() || (g.n() > 0 && factor * N > g.torus_nyquist()))
    throw std::invalid_argument(std::string(where) + ": N = " + format_double(N) +
                                " beyond the resolved range (needs " + format_double(factor) +
                                " N <= Nyquist)");
}

std::size_t partner_index(const WaveguideGrid& g, std::size_t flat, std::vector<int>& ex,
                          std::vector<int>& ty) {
  const std::size_t e = g.euclid_part(flat), t = g.torus_part(flat);
  g.euclid_axes(e, ex);
  std::size_t pe = 0;
  for (int a = 0; a < g.d(); ++a) pe = pe * g.nx() + (g.nx() - ex[a]) % g.nx();
  std::size_t pt = 0;
  if (g.n() > 0) {
    g.torus_axes(t, ty);
    for (int a = 0; a < g.n(); ++a) pt = pt * g.ny() + (g.ny() - ty[a]) % g.ny();
  }
  return pe * g.torus_size() + pt;
}

inline double abs_pow(Complex z, double p) {
  const double n2 = std::norm(z);
  if (p == 2.0) return n2;
  if (p == 4.0) return n2 * n2;
  if (p == 6.0) return n2 * n2 * n2;
  return std::pow(n2, 0.5 * p);
}

std::vector<double> trapezoid_weights(std::span<const double> times) {
  std::vector<double> w(times.size(), 0.0);
  for (std::size_t j = 1; j < times.size(); ++j) {
    const double h = 0.5 * (times[j] - times[j - 1]);
    w[j - 1] += h;
    w[j] += h;
  }
  return w;
}

// Spectral support of a field and a reusable physical buffer for the free
// evolution sampled at given times.
class FreeSampler {
 public:
  FreeSampler(const Field& u0, const Multiplier& mult, int sign)
      : g_(u0.grid_ptr()), mult_(mult), sign_(sign), buf_(u0.size()) {
    const Field uh = to_space(u0, Space::spectral);
    for (std::size_t i = 0; i < uh.size(); ++i)
      if (uh[i] != Complex{}) {
        idx_.push_back(i);
        val_.push_back(uh[i]);
      }
  }
  const std::vector<Complex>& at(double t) {
    std::fill(buf_.begin(), buf_.end(), Complex{});
    for (std::size_t j = 0; j < idx_.size(); ++j)
      buf_[idx_[j]] = val_[j] * std::polar(1.0, sign_ * t * mult_.total(idx_[j]));
    g_->inverse_raw(buf_.data());
    return buf_;
  }

 private:
  GridPtr g_;
  const Multiplier& mult_;
  int sign_;
  std::vector<std::size_t> idx_;
  std::vector<Complex> val_;
  std::vector<Complex> buf_;
};

}  // namespace

Field random_localized_data(const GridPtr& grid, double N, std::uint64_t seed, double spatial_width) {
  const auto& g = *grid;
  check_band_resolved(g, N, 2.0, "random_localized_data");
  const auto sym = lp_symbol(g, DyadicProjector{N, DyadicKind::band});
  Field uh(grid, Space::spectral);
  CounterRng rng(seed);
  std::vector<int> ex(g.d()), ty(g.n());
  std::size_t active = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!(sym[i] > 0.5)) continue;
    ++active;
    const std::size_t j = partner_index(g, i, ex, ty);
    if (j < i) continue;
    const Complex z = rng.complex_normal();
    uh[i] = z;
    uh[j] = std::conj(z);
  }
  if (active == 0) throw std::invalid_argument("random_localized_data: empty band");
  if (spatial_width > 0.0) {
    Field u = to_space(uh, Space::physical);
    const double w2 = spatial_width * spatial_width;
    const auto& xs = g.euclid_nodes();
    std::vector<int> axes(g.d());
    for (std::size_t e = 0; e < g.euclid_size(); ++e) {
      g.euclid_axes(e, axes);
      double r2 = 0.0;
      for (int a = 0; a < g.d(); ++a) r2 += xs[axes[a]] * xs[axes[a]];
      const double win = std::exp(-r2 / w2);
      for (std::size_t t = 0; t < g.torus_size(); ++t) u[e * g.torus_size() + t] *= win;
    }
    uh = to_space(u, Space::spectral);
    for (std::size_t i = 0; i < g.size(); ++i)
      if (!(sym[i] > 0.5)) uh[i] = 0.0;
  }
  uh *= 1.0 / l2_norm(uh);
  Field out = to_space(uh, Space::physical);
  // The field is real up to rounding; drop the residue so reflections of the
  // propagator act exactly by conjugation.
  for (auto& z : out.values()) z = z.real();
  out *= 1.0 / l2_norm(out);
  return out;
}

std::vector<double> sample_times(double T, int count) {
  if (count < 2 || !(T > 0.0)) throw std::invalid_argument("sample_times: need T > 0, count >= 2");
  std::vector<double> ts(static_cast<std::size_t>(count));
  for (int j = 0; j < count; ++j) ts[static_cast<std::size_t>(j)] = T * j / (count - 1);
  return ts;
}

double spacetime_lp_norm(const Field& u0, const Multiplier& mult, std::span<const double> times,
                         double p, int sign) {
  if (times.empty()) throw std::invalid_argument("spacetime_lp_norm: no times");
  if (!(p >= 1.0)) throw std::invalid_argument("spacetime_lp_norm: p must be >= 1");
  FreeSampler s(u0, mult, sign);
  const double cv = u0.grid().cell_volume();
  if (std::isinf(p)) {
    double mx = 0.0;
    for (double t : times)
      for (const auto& z : s.at(t)) mx = std::max(mx, std::abs(z));
    return mx;
  }
  if (times.size() < 2) throw std::invalid_argument("spacetime_lp_norm: need >= 2 times");
  const auto w = trapezoid_weights(times);
  double acc = 0.0;
  for (std::size_t j = 0; j < times.size(); ++j) {
    double sum = 0.0;
    for (const auto& z : s.at(times[j])) sum += abs_pow(z, p);
    acc += w[j] * sum * cv;
  }
  return std::pow(acc, 1.0 / p);
}

double bilinear_norm(const Field& u0, const Field& v0, const Multiplier& mult,
                     std::span<const double> times) {
  require_same_grid(u0, v0, "bilinear_norm");
  if (times.size() < 2) throw std::invalid_argument("bilinear_norm: need >= 2 times");
  FreeSampler su(u0, mult, 1), sv(v0, mult, 1);
  const auto w = trapezoid_weights(times);
  const double cv = u0.grid().cell_volume();
  double acc = 0.0;
  for (std::size_t j = 0; j < times.size(); ++j) {
    const auto& a = su.at(times[j]);
    const auto& b = sv.at(times[j]);
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += std::norm(a[i] * b[i]);
    acc += w[j] * sum * cv;
  }
  return std::sqrt(acc);
}

// ---------------------------------------------------------------------------

namespace {

bool is_dyadic(double N) {
  if (!(N > 0.0)) return false;
  const double l = std::log2(N);
  return std::abs(l - std::round(l)) < 1e-12;
}

double max_leak(const Field& u0, const Multiplier& mult, std::span<const double> times, double window) {
  double mx = 0.0;
  const Field uh = to_space(u0, Space::spectral);
  for (double t : times) mx = std::max(mx, boundary_leak(to_space(linear_propagate(uh, mult, t), Space::physical), window));
  return mx;
}

}  // namespace

ScalingResult measure_scaling(const GridPtr& grid, double sigma, const ScalingOptions& opts) {
  const auto& g = *grid;
  ScalingResult res;
  res.prediction = StrichartzPrediction::make(sigma, g.d(), g.n());
  res.p = opts.p > 0.0 ? opts.p : res.prediction.p_endpoint;
  res.predicted_slope = res.prediction.slope(res.p);
  res.time_samples = opts.time_samples;
  if (opts.Ns.size() < 4) throw std::invalid_argument("measure_scaling: need >= 4 dyadic N");
  if (opts.trials < 2) throw std::invalid_argument("measure_scaling: need >= 2 trials");
  if (opts.propagator_sign != 1 && opts.propagator_sign != -1)
    throw std::invalid_argument("measure_scaling: propagator_sign must be +-1");
  for (double N : opts.Ns) {
    if (!is_dyadic(N)) throw std::invalid_argument("measure_scaling: N = " + format_double(N) + " is not dyadic");
    check_band_resolved(g, N, 4.0, "measure_scaling");
  }
  res.Ns = opts.Ns;
  const auto times = sample_times(opts.T, opts.time_samples);
  const Multiplier mult(grid, sigma);
  const double inv_p = std::isinf(res.p) ? 0.0 : 1.0 / res.p;

  const double Nmax = *std::max_element(opts.Ns.begin(), opts.Ns.end());
  const double speed = 2.0 * sigma * std::pow(2.0 * Nmax, 2.0 * sigma - 1.0);
  if (speed * opts.T >= g.half_length() / 2.0)
    res.notes.push_back("group velocity " + format_double(speed) + " times T exceeds L/2 = " +
                        format_double(g.half_length() / 2.0));
  if (opts.data == DataKind::box_filling)
    res.notes.push_back("box-filling data: the periodic Euclidean box is part of the model and the leak check does not apply");

  std::vector<double> lx, lh, ls, lr;
  for (double N : opts.Ns) {
    std::vector<double> per;
    for (int trial = 0; trial < opts.trials; ++trial) {
      ScalingSample s;
      s.N = N;
      s.trial = trial;
      s.seed = trial_seed(opts.seed, N, trial);
      const Field u0 = random_localized_data(grid, N, s.seed,
                                             opts.data == DataKind::localized ? opts.window_width : 0.0);
      s.norm = spacetime_lp_norm(u0, mult, times, res.p, opts.propagator_sign);
      if (opts.data == DataKind::localized) {
        const double leak = max_leak(u0, mult, times, opts.leak_window);
        res.max_leak = std::max(res.max_leak, leak);
      }
      res.samples.push_back(s);
      const double logN = std::log(N);
      lx.push_back(logN);
      const double base = std::log(s.norm);
      lh.push_back(base + inv_p * std::log(res.prediction.psi_min(N)));
      ls.push_back(base + inv_p * std::log(res.prediction.symbol_min(N)));
      lr.push_back(base);
      per.push_back(lh.back());
    }
    res.median_log_compensated.push_back(median(per));
  }
  if (opts.data == DataKind::localized && res.max_leak >= opts.leak_threshold) {
    res.leak_violation = true;
    res.notes.push_back("boundary leak " + format_double(res.max_leak) + " above " +
                        format_double(opts.leak_threshold) + ": shrink the N list or enlarge the box");
  }
  res.fit = fit_line(lx, lh);
  res.fit_symbol = fit_line(lx, ls);
  res.fit_raw = fit_line(lx, lr);
  res.band = 1.96 * res.fit.slope_stderr;
  std::vector<double> bands;
  const auto per_n = static_cast<std::size_t>(opts.trials);
  for (std::size_t a = 0; a < opts.Ns.size(); ++a) {
    double mean = 0.0, var = 0.0;
    for (std::size_t i = 0; i < per_n; ++i) mean += lh[a * per_n + i];
    mean /= per_n;
    for (std::size_t i = 0; i < per_n; ++i) var += std::pow(lh[a * per_n + i] - mean, 2);
    var /= (per_n - 1);
    bands.push_back(1.96 * std::sqrt(var / per_n));
  }
  res.median_band = median(bands);
  res.flattest = std::abs(res.fit.slope - res.predicted_slope) <= std::abs(res.fit_symbol.slope - res.predicted_slope)
                     ? "hessian"
                     : "symbol";
  return res;
}

void write_scaling_csv(std::ostream& os, const ScalingResult& res) {
  os << "N,trial,seed,t_samples,norm\n";
  for (const auto& s : res.samples)
    os << format_double(s.N) << ',' << s.trial << ',' << s.seed << ',' << res.time_samples << ','
       << format_double(s.norm) << '\n';
}

void write_scaling_json(std::ostream& os, const ScalingResult& res) {
  nlohmann::ordered_json j;
  j["sigma"] = res.prediction.sigma;
  j["d"] = res.prediction.d;
  j["n"] = res.prediction.n;
  j["k"] = res.prediction.k;
  j["p"] = std::isinf(res.p) ? nlohmann::ordered_json("inf") : nlohmann::ordered_json(res.p);
  j["p_endpoint"] = res.prediction.p_endpoint;
  j["predicted_slope"] = res.predicted_slope;
  j["slope"] = res.fit.slope;
  j["slope_stderr"] = res.fit.slope_stderr;
  j["band"] = res.band;
  j["median_band"] = res.median_band;
  j["slope_symbol"] = res.fit_symbol.slope;
  j["slope_raw"] = res.fit_raw.slope;
  j["flattest"] = res.flattest;
  j["Ns"] = res.Ns;
  j["median_log_compensated"] = res.median_log_compensated;
  j["leak_violation"] = res.leak_violation;
  j["max_leak"] = res.max_leak;
  j["notes"] = res.notes;
  os << j.dump(2) << '\n';
}

// ---------------------------------------------------------------------------

bool radial_in_x(const Field& f, double tol) {
  const Field u = to_space(f, Space::physical);
  const auto& g = u.grid();
  const std::size_t ts = g.torus_size();
  double scale = 0.0;
  for (const auto& z : u.values()) scale = std::max(scale, std::abs(z));
  if (scale == 0.0) return true;
  std::vector<int> ax(g.d()), img(g.d());
  auto flat = [&](const std::vector<int>& a) {
    std::size_t e = 0;
    for (int v : a) e = e * g.nx() + v;
    return e;
  };
  auto compare = [&](auto map) {
    for (std::size_t e = 0; e < g.euclid_size(); ++e) {
      g.euclid_axes(e, ax);
      img = ax;
      map(img);
      const std::size_t o = flat(img);
      for (std::size_t t = 0; t < ts; ++t)
        if (std::abs(u[e * ts + t] - u[o * ts + t]) > tol * scale) return false;
    }
    return true;
  };
  for (int a = 0; a < g.d(); ++a)
    if (!compare([&](std::vector<int>& v) { v[a] = (g.nx() - v[a]) % g.nx(); })) return false;
  for (int a = 0; a < g.d(); ++a)
    for (int b = a + 1; b < g.d(); ++b)
      if (!compare([&](std::vector<int>& v) { std::swap(v[a], v[b]); })) return false;
  return true;
}

MixedStrichartzResult measure_mixed_strichartz(std::span<const Field> family,
                                               std::span<const double> parameter, double sigma,
                                               const MixedStrichartzSpec& spec) {
  if (family.empty() || family.size() != parameter.size())
    throw std::invalid_argument("measure_mixed_strichartz: family/parameter mismatch");
  const GridPtr grid = family.front().grid_ptr();
  MixedStrichartzResult res;
  res.admissible = admissible_check(spec.p, spec.q, spec.gamma, sigma, grid->d()).ok;
  if (spec.require_admissible && !res.admissible)
    throw std::invalid_argument("measure_mixed_strichartz: (p, q, gamma) is not sigma-admissible");
  const auto times = sample_times(spec.T, spec.time_samples);
  const Multiplier mult(grid, sigma);
  NormSpec ns{spec.p, spec.q};
  for (std::size_t i = 0; i < family.size(); ++i) {
    const Field& f = family[i];
    require_same_grid(f, family.front(), "measure_mixed_strichartz");
    if (spec.require_radial && !radial_in_x(f, 1e-10))
      throw std::invalid_argument("measure_mixed_strichartz: data not radial in x");
    const Field fh = to_space(f, Space::spectral);
    std::vector<Field> snaps;
    snaps.reserve(times.size());
    for (double t : times) snaps.push_back(to_space(linear_propagate(fh, mult, t), Space::physical));
    const double num = mixed_norm(snaps, times, ns);
    const double den = spec.gamma == 0.0 ? l2_norm(fh) : l2_norm(frac_laplacian_x(fh, spec.gamma / 2.0));
    res.parameter.push_back(parameter[i]);
    res.ratios.push_back(num / den);
  }
  const auto [mn, mx] = std::minmax_element(res.ratios.begin(), res.ratios.end());
  res.spread = *mx / *mn;
  if (res.ratios.size() >= 2) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < res.ratios.size(); ++i) {
      lx.push_back(std::log(res.parameter[i]));
      ly.push_back(std::log(res.ratios[i]));
    }
    res.slope = fit_line(lx, ly).slope;
  }
  return res;
}

// ---------------------------------------------------------------------------

BilinearResult bilinear_experiment(const GridPtr& grid, double sigma, const BilinearOptions& opts) {
  if (opts.Ns.empty() || opts.Ks.empty() || opts.trials < 1)
    throw std::invalid_argument("bilinear_experiment: empty N, K list or trials");
  for (double N : opts.Ns) {
    check_band_resolved(*grid, N, 2.0, "bilinear_experiment");
    for (double K : opts.Ks)
      if (K > N / 4.0 && K != N)
        throw std::invalid_argument("bilinear_experiment: K = " + format_double(K) +
                                    " too close to N = " + format_double(N) + " to separate the bands");
  }
  const auto times = sample_times(opts.T, opts.time_samples);
  const Multiplier mult(grid, sigma);
  BilinearResult res;
  std::map<std::pair<double, double>, double> med;
  for (double N : opts.Ns) {
    std::vector<double> lk, lm;
    for (double K : opts.Ks) {
      BilinearCell c;
      c.N = N;
      c.K = K;
      for (int trial = 0; trial < opts.trials; ++trial) {
        const Field u0 = random_localized_data(grid, N, trial_seed(opts.seed, N, trial));
        const Field v0 = K == N ? u0 : random_localized_data(grid, K, trial_seed(~opts.seed, K, trial));
        c.norms.push_back(bilinear_norm(u0, v0, mult, times));
      }
      c.median = median(c.norms);
      med[{N, K}] = c.median;
      if (K < N) {
        lk.push_back(std::log(K));
        lm.push_back(std::log(c.median));
      }
      res.cells.push_back(std::move(c));
    }
    if (lk.size() >= 2) res.slope_per_N.push_back(fit_line(lk, lm).slope);
  }
  if (!res.slope_per_N.empty()) {
    const auto [mn, mx] = std::minmax_element(res.slope_per_N.begin(), res.slope_per_N.end());
    res.s_observed = std::max(0.0, *mx / 2.0);
    res.slope_spread = *mx - *mn;
  }
  std::vector<double> Ns = opts.Ns;
  std::sort(Ns.begin(), Ns.end());
  for (std::size_t a = 1; a < Ns.size(); ++a)
    for (double K : opts.Ks)
      if (K <= Ns[a - 1] / 4.0)
        res.max_uniformity_deviation =
            std::max(res.max_uniformity_deviation, std::abs(med[{Ns[a], K}] / med[{Ns[a - 1], K}] - 1.0));
  return res;
}

void write_bilinear_csv(std::ostream& os, const BilinearResult& res) {
  os << "N,K,trial,norm\n";
  for (const auto& c : res.cells)
    for (std::size_t i = 0; i < c.norms.size(); ++i)
      os << format_double(c.N) << ',' << format_double(c.K) << ',' << i << ',' << format_double(c.norms[i]) << '\n';
}

}  // namespace wgnls
