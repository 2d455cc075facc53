// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 when any
// criterion fails. Tolerances are fixed here and not read from configs.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "wgnls/diagnostics.hpp"
#include "wgnls/evolve.hpp"
#include "wgnls/strichartz.hpp"
#include "wgnls/wellposedness.hpp"

using namespace wgnls;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
  bool pass = true;
  std::string detail;
  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    detail += (detail.empty() ? "" : "; ") + what + (ok ? "" : " [fails]");
  }
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Verdict()>& body) {
  const auto t0 = Clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v.pass = false;
    v.detail = std::string("exception: ") + e.what();
  }
  if (!v.pass) ++failures;
  std::cout << "criterion " << id << " " << name << ": " << (v.pass ? "PASS" : "FAIL") << "  " << v.detail << " ("
            << fmt(seconds_since(t0)) << " s)" << std::endl;
}

// ---------------------------------------------------------------------------
// Defocusing radial run shared by criteria 1, 3, 4 and 8: sigma = 0.75,
// d = 3 radial data, n = 1, p = 1.5, T = 2.

constexpr double kT = 2.0;
const ModelParams kRadial{0.75, -1, 1.5, 3, 1};

GridPtr radial_grid() {
  static const GridPtr g = make_grid(3, 1, 16.0, 64, 16);
  return g;
}

Field radial_data() { return fixture::gaussian(radial_grid(), 1.0, 1.0, 0.3); }

struct RadialRun {
  double mass_drift = 0.0;
  double energy_error = 0.0;
  double max_identity_residual = 0.0;
  int identity_checks = 0;
  double stepping_seconds = 0.0;
  std::vector<double> times, l4, morawetz_ratio;
  ScatteringResult scattering;
  Trajectory traj;
};

RadialRun radial_run(double dt, bool full) {
  const auto g = radial_grid();
  const Field u0 = radial_data();
  const Multiplier mult(g, kRadial.sigma);
  const double m0 = mass(u0), e0 = energy(u0, mult, kRadial);
  const auto w = WeightSpec::half_square();
  SplitStepper fd(g, kRadial);
  MorawetzSpacetime ms(kRadial.p, kRadial.sigma, WeightSpec::abs_x_for(*g));
  ScatteringTracker tracker(kRadial.sigma, {0.25, 0.5, 1.0, 2.0}, 0.75, 1e-5);
  const long per_check = std::lround(0.25 / dt);
  RadialRun r;
  double observer_seconds = 0.0;
  EvolveOptions o;
  o.T = kT;
  o.dt = dt;
  o.leak_threshold = 1e-5;
  o.keep = [](int, double) { return false; };
  o.observer = [&](int rec, double t, const Field& u) {
    const auto t0 = Clock::now();
    r.mass_drift = std::max(r.mass_drift, std::abs(mass(u) - m0) / m0);
    r.energy_error = std::abs(energy(u, mult, kRadial) - e0);
    if (rec > 0 && rec % per_check == 0) {
      Field up = u, um = u;
      fd.strang(up, dt);
      fd.strang(um, -dt);
      const double d = (morawetz_action(up, w) - morawetz_action(um, w)) / (2.0 * dt);
      const double rhs = morawetz_rhs(u, w, kRadial, {1e-10}).total;
      r.max_identity_residual = std::max(r.max_identity_residual, std::abs(rhs - d) / std::abs(d));
      ++r.identity_checks;
    }
    if (full) {
      r.times.push_back(t);
      r.l4.push_back(lebesgue_norm(u, 4.0));
      ms.add(t, u);
      r.morawetz_ratio.push_back(ms.ratio());
      tracker.add(t, u);
    }
    observer_seconds += seconds_since(t0);
  };
  const auto t0 = Clock::now();
  r.traj = evolve(u0, kRadial, o);
  r.stepping_seconds = seconds_since(t0) - observer_seconds;
  r.scattering = tracker.result();
  return r;
}

const RadialRun& coarse() {
  static const RadialRun r = radial_run(0.05, true);
  return r;
}

const RadialRun& fine() {
  static const RadialRun r = radial_run(0.025, false);
  return r;
}

double value_at(const std::vector<double>& ts, const std::vector<double>& vs, double t) {
  for (std::size_t i = 0; i < ts.size(); ++i)
    if (std::abs(ts[i] - t) < 1e-9) return vs[i];
  throw std::runtime_error("time " + fmt(t) + " not recorded");
}

// ---------------------------------------------------------------------------

Verdict conservation() {
  const auto& a = coarse();
  const auto& b = fine();
  Verdict v;
  v.require(!a.traj.aborted && !b.traj.aborted, "no guard abort");
  v.require(a.mass_drift <= 1e-12 && b.mass_drift <= 1e-12,
            "mass drift " + fmt(std::max(a.mass_drift, b.mass_drift)) + " <= 1e-12");
  const double ratio = a.energy_error / b.energy_error;
  v.require(ratio >= 3.5 && ratio <= 4.5, "energy error ratio " + fmt(ratio) + " in [3.5, 4.5]");
  v.require(a.stepping_seconds <= 120.0 && b.stepping_seconds <= 120.0,
            "64^3 x 16 stepping " + fmt(a.stepping_seconds) + " s at dt 0.05, " + fmt(b.stepping_seconds) +
                " s at dt 0.025, each <= 120 s");
  return v;
}

Verdict balakrishnan() {
  Verdict v;
  const auto g = make_grid(3, 1, 6.0, 16, 8);
  double worst = 0.0;
  for (double sigma : {0.25, 0.5, 0.75})
    for (std::uint64_t seed : {77u, 78u}) {
      const Field r = oracle::random_bandlimited(g, seed, 4.0);
      worst = std::max(worst, oracle::rel_diff(balakrishnan_apply(r, sigma, {1e-9}), frac_laplacian_x(r, sigma)));
    }
  v.require(worst <= 1e-6, "max relative L2 difference " + fmt(worst) + " <= 1e-6 over sigma {0.25, 0.5, 0.75}");
  return v;
}

Verdict morawetz_identity() {
  const auto& a = coarse();
  const auto& b = fine();
  Verdict v;
  v.require(a.identity_checks == 8 && b.identity_checks == 8, "8 checks on [0.25, 2]");
  v.require(a.max_identity_residual <= 1e-3, "max residual " + fmt(a.max_identity_residual) + " <= 1e-3 at dt 0.05");
  v.require(b.max_identity_residual < a.max_identity_residual,
            "decreases to " + fmt(b.max_identity_residual) + " at dt 0.025");
  return v;
}

Verdict morawetz_inequality() {
  const auto& a = coarse();
  const double r1 = value_at(a.times, a.morawetz_ratio, 1.0);
  const double r2 = value_at(a.times, a.morawetz_ratio, 2.0);
  Verdict v;
  v.require(r1 > 0.0, "ratio " + fmt(r1) + " at T = 1");
  v.require(r2 / r1 - 1.0 <= 0.2, "growth " + fmt(r2 / r1 - 1.0) + " <= 0.2 from T = 1 to T = 2");
  return v;
}

GridPtr strichartz_grid() {
  static const GridPtr g = make_grid(1, 1, 4.0 * std::numbers::pi, 1024, 256);
  return g;
}

Verdict strichartz() {
  Verdict v;
  const auto t0 = Clock::now();
  for (double sigma : {0.75, 1.0}) {
    ScalingOptions o;
    o.Ns = {4, 8, 16, 32};
    o.trials = 16;
    o.time_samples = 64;
    const auto r = measure_scaling(strichartz_grid(), sigma, o);
    const double lo = r.predicted_slope - 0.15, hi = r.predicted_slope + 0.25;
    v.require(r.p == r.prediction.p_endpoint && r.fit.slope >= lo && r.fit.slope <= hi,
              "sigma " + fmt(sigma) + " p " + fmt(r.p) + " slope " + fmt(r.fit.slope) + " +- " + fmt(r.band) +
                  " in [" + fmt(lo) + ", " + fmt(hi) + "]");
  }
  const double s = seconds_since(t0);
  v.require(s <= 300.0, "runtime " + fmt(s) + " s <= 300 s");
  return v;
}

Verdict bilinear() {
  BilinearOptions o;
  o.Ns = {16, 32};
  o.Ks = {1, 2, 4};
  o.trials = 8;
  const auto r = bilinear_experiment(strichartz_grid(), 1.0, o);
  Verdict v;
  v.require(r.max_uniformity_deviation <= 0.2,
            "max change under N doubling " + fmt(r.max_uniformity_deviation) + " <= 0.2 at K in {1, 2, 4}");
  return v;
}

Verdict contraction() {
  const cli::Json cfg = cli::load_config(cli::preset_path("picard", "smoke"));
  const auto& gj = cfg["grid"];
  const auto g = make_grid(gj["d"].get<int>(), gj["n"].get<int>(), gj["L"].get<double>(), gj["nx"].get<int>(),
                           gj["ny"].get<int>());
  const auto& dj = cfg["data"];
  const Field u0 = fixture::gaussian(g, dj["amplitude"].get<double>(), dj["width"].get<double>(), dj["ymod"].get<double>());
  const ModelParams mp{cfg["model"]["sigma"].get<double>(), cfg["model"]["mu"].get<int>(), cfg["model"]["p"].get<double>(),
                       g->d(), g->n()};
  const double T = cfg["experiment"]["T"].get<double>();
  const double dt = cfg["experiment"]["dt"].get<double>();
  auto picard = [&](double h) {
    PicardOptions po;
    po.T = T;
    po.dt = h;
    po.iterations = cfg["experiment"]["iterations"].get<int>();
    return picard_iterate(u0, mp, po);
  };
  auto mismatch = [&](const PicardResult& r, double h) {
    EvolveOptions eo;
    eo.T = T;
    eo.dt = h / 4;
    eo.record_stride = static_cast<int>(std::lround(T / eo.dt));
    const auto tr = evolve(u0, mp, eo);
    return l2_norm(tr.snapshots.back() - r.iterate.back()) / l2_norm(tr.snapshots.back());
  };
  const auto r1 = picard(dt);
  const auto r2 = picard(dt / 2);
  double worst = 0.0;
  for (std::size_t k = 1; k < r1.steps.size(); ++k) worst = std::max(worst, r1.steps[k].ratio);
  Verdict v;
  v.require(r1.converged, "converged in " + std::to_string(r1.steps.size()) + " steps");
  v.require(worst < 1.0, "max ratio " + fmt(worst) + " < 1");
  v.require(r1.max_log_residual < std::log(2.0),
            "geometric: rate " + fmt(r1.geometric_rate) + ", log-fit residual " + fmt(r1.max_log_residual) + " < ln 2");
  const double e1 = mismatch(r1, dt), e2 = mismatch(r2, dt / 2);
  v.require(e1 <= 1e-4 && e2 <= 1e-4, "split-step mismatch " + fmt(e1) + " at dt " + fmt(dt) + " <= 1e-4");
  v.require(e2 < e1, "refines to " + fmt(e2));
  return v;
}

Verdict decay_scattering() {
  const auto& a = coarse();
  Verdict v;
  const std::size_t transient = a.l4.size() / 10;
  const double frac = decreasing_fraction(a.l4, transient);
  v.require(frac >= 0.9, "L4 decreasing fraction " + fmt(frac) + " >= 0.9 after " + std::to_string(transient) + " records");
  const double ratio = a.l4.back() / a.l4.front();
  v.require(ratio <= 0.5, "final/initial " + fmt(ratio) + " <= 0.5");
  const auto& d = a.scattering.deltas;
  std::string ds;
  for (double x : d) ds += (ds.empty() ? "" : ", ") + fmt(x);
  v.require(d.size() == 3 && a.scattering.decreasing(), "pull-back differences {" + ds + "} strictly decreasing over 0.25 to 2");
  v.require(a.scattering.warnings.empty(), "leak below 1e-5 at every sample");
  return v;
}

// Brute-force comparisons on an 8 x 8 x 8 grid.
Verdict oracles() {
  const auto g = make_grid(2, 1, 3.0, 8, 8);
  const Field u = oracle::random_bandlimited(g, 21, 2.0);
  const Field v2 = oracle::random_bandlimited(g, 22, 2.0);
  const double cv = g->cell_volume();
  std::vector<std::pair<std::string, double>> errs;
  auto rel = [](double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); };

  const auto uh_ref = oracle::dft_forward(*g, u.values());
  const Field uh = forward_transform(u);
  errs.emplace_back("forward", oracle::max_abs_diff(uh.values(), uh_ref) / oracle::max_abs(uh_ref));
  const auto back = oracle::dft_inverse(*g, uh_ref);
  errs.emplace_back("inverse", oracle::max_abs_diff(inverse_transform(uh).values(), back) / oracle::max_abs(back));

  std::vector<oracle::Point> pts;
  for (std::size_t i = 0; i < g->size(); ++i) pts.push_back(oracle::point(*g, i));
  auto spectral_apply = [&](const std::function<Complex(const oracle::Point&)>& sym) {
    std::vector<Complex> w(uh_ref.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = uh_ref[i] * sym(pts[i]);
    return oracle::dft_inverse(*g, w);
  };
  auto kx2 = [&](const oracle::Point& p) { return p.k[0] * p.k[0] + p.k[1] * p.k[1]; };
  auto ky2 = [&](const oracle::Point& p) { return p.k[2] * p.k[2]; };

  const double sigma = 0.75;
  auto fl = spectral_apply([&](const oracle::Point& p) { return Complex{std::pow(kx2(p), sigma)}; });
  errs.emplace_back("frac_laplacian_x", oracle::max_abs_diff(frac_laplacian_x(u, sigma).values(), fl) / oracle::max_abs(fl));
  const Multiplier mult(g, sigma);
  auto prop = spectral_apply([&](const oracle::Point& p) {
    return std::polar(1.0, 0.3 * (std::pow(kx2(p), sigma) + std::pow(ky2(p), sigma)));
  });
  errs.emplace_back("linear_propagate", oracle::max_abs_diff(linear_propagate(u, mult, 0.3).values(), prop) / oracle::max_abs(prop));
  auto band = spectral_apply([&](const oracle::Point& p) {
    double lo = 1.0, hi = 1.0;
    for (double k : p.k) {
      hi *= lp_cutoff(k / 2.0);
      lo *= lp_cutoff(k / 1.0);
    }
    return Complex{hi - lo};
  });
  errs.emplace_back("lp_project",
                    oracle::max_abs_diff(lp_project(u, DyadicProjector{2.0, DyadicKind::band}).values(), band) / oracle::max_abs(band));

  double m_ref = 0.0, l3 = 0.0, linf = 0.0;
  for (const auto& z : u.values()) {
    m_ref += std::norm(z) * cv;
    l3 += std::pow(std::abs(z), 3.0) * cv;
    linf = std::max(linf, std::abs(z));
  }
  errs.emplace_back("mass", rel(mass(u), m_ref));
  errs.emplace_back("lebesgue 3", rel(lebesgue_norm(u, 3.0), std::cbrt(l3)));
  errs.emplace_back("lebesgue inf", rel(lebesgue_norm(u, kInf), linf));
  double h1 = 0.0, kin = 0.0;
  for (std::size_t i = 0; i < uh_ref.size(); ++i) {
    h1 += std::pow(1.0 + kx2(pts[i]) + ky2(pts[i]), 0.75) * std::norm(uh_ref[i]) / g->volume();
    kin += 0.5 * (std::pow(kx2(pts[i]), sigma) + std::pow(ky2(pts[i]), sigma)) * std::norm(uh_ref[i]) / g->volume();
  }
  errs.emplace_back("sobolev 0.75", rel(sobolev_norm(u, 0.75), std::sqrt(h1)));
  const ModelParams mp{sigma, -1, 1.5, 2, 1};
  double pot = 0.0;
  for (const auto& z : u.values()) pot += std::pow(std::abs(z), 3.5) * cv / 3.5;
  errs.emplace_back("energy", rel(energy(u, mult, mp), kin + pot));

  // L^3_x L^4_y and its time version over two snapshots.
  auto nested = [&](const Field& f) {
    const std::size_t ts = g->torus_size();
    double outer = 0.0;
    for (std::size_t e = 0; e < g->euclid_size(); ++e) {
      double inner = 0.0;
      for (std::size_t t = 0; t < ts; ++t) inner += std::pow(std::abs(f[e * ts + t]), 4.0) * g->dy();
      outer += std::pow(std::pow(inner, 0.25), 3.0) * g->dx() * g->dx();
    }
    return std::cbrt(outer);
  };
  const NormSpec spec{2.0, 3.0, NormSpec::YKind::lebesgue, 4.0};
  errs.emplace_back("mixed_norm x/y", rel(mixed_norm(u, spec), nested(u)));
  std::vector<Field> snaps{u, v2};
  std::vector<double> times{0.0, 0.5};
  const double tref = std::sqrt(0.25 * (std::pow(nested(u), 2) + std::pow(nested(v2), 2)));
  errs.emplace_back("mixed_norm t/x/y", rel(mixed_norm(snaps, times, spec), tref));

  const auto ts = sample_times(0.5, 3);
  double st = 0.0;
  for (std::size_t j = 0; j < ts.size(); ++j) {
    auto hat = spectral_apply([&](const oracle::Point& p) {
      return std::polar(1.0, ts[j] * (std::pow(kx2(p), sigma) + std::pow(ky2(p), sigma)));
    });
    double s = 0.0;
    for (const auto& z : hat) s += std::pow(std::abs(z), 4.0) * cv;
    st += (j == 0 || j + 1 == ts.size() ? 0.5 : 1.0) * 0.25 * s;
  }
  errs.emplace_back("spacetime L4", rel(spacetime_lp_norm(u, mult, ts, 4.0), std::pow(st, 0.25)));

  Verdict v;
  double worst = 0.0;
  std::string worst_name;
  for (const auto& [name, e] : errs)
    if (e >= worst) {
      worst = e;
      worst_name = name;
    }
  v.require(worst <= 1e-12, std::to_string(errs.size()) + " quantities, worst " + worst_name + " " + fmt(worst) + " <= 1e-12");
  return v;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

Verdict reproducibility() {
  Verdict v;
  const fs::path root = fs::temp_directory_path() / "wgnls_acceptance_repro";
  for (const char* scenario : {"conservation", "strichartz", "picard"}) {
    const cli::Json cfg = cli::load_config(cli::preset_path(scenario, "smoke"));
    const fs::path a = root / scenario / "a", b = root / scenario / "b";
    fs::remove_all(a);
    fs::remove_all(b);
    const int ca = cli::run_config(cfg, a), cb = cli::run_config(cfg, b);
    std::size_t files = 0;
    bool same = ca == cli::kExitOk && cb == cli::kExitOk;
    const cli::Json manifest = cli::Json::parse(slurp(a / "manifest.json"));
    for (const auto& f : manifest["files"]) {
      const std::string name = f["path"].get<std::string>();
      same = same && slurp(a / name) == slurp(b / name);
      ++files;
    }
    v.require(same && files > 1, std::string(scenario) + " smoke: " + std::to_string(files) + " files identical");
  }
  fs::remove_all(root);
  return v;
}

}  // namespace

int main() {
  report(1, "conservation", conservation);
  report(2, "balakrishnan oracle", balakrishnan);
  report(3, "morawetz identity", morawetz_identity);
  report(4, "morawetz inequality", morawetz_inequality);
  report(5, "strichartz scaling", strichartz);
  report(6, "bilinear N-uniformity", bilinear);
  report(7, "contraction", contraction);
  report(8, "decay and scattering", decay_scattering);
  report(9, "oracle equivalence", oracles);
  report(10, "reproducibility", reproducibility);
  std::cout << (failures == 0 ? "all criteria pass" : std::to_string(failures) + " criteria fail") << std::endl;
  return failures == 0 ? 0 : 1;
}
