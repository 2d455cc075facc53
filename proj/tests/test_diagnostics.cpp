#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "wgnls/diagnostics.hpp"
#include "wgnls/evolve.hpp"

using namespace wgnls;
using fixture::gaussian;
using fixture::mode;
using std::numbers::pi;

TEST_CASE("mass and energy of a single mode") {
  auto g = make_grid(1, 1, pi, 16, 8);
  const Complex a{0.7, -0.4};
  const double sigma = 0.75;
  auto u = mode(g, a, 3, 2);
  CHECK(mass(u) == doctest::Approx(std::norm(a) * g->volume()).epsilon(1e-13));
  Multiplier m(g, sigma);
  const double lin = 0.5 * std::norm(a) * (std::pow(3.0, 2 * sigma) + std::pow(2.0, 2 * sigma)) *
                     g->volume();
  CHECK(kinetic_energy(u, m) == doctest::Approx(lin).epsilon(1e-13));
  ModelParams lp{sigma, 0, 1.5, 1, 1};
  CHECK(energy(u, lp) == doctest::Approx(lin).epsilon(1e-13));
  ModelParams dp{sigma, -1, 2.0, 1, 1};
  const double pot = std::pow(std::abs(a), 4) * g->volume() / 4.0;
  CHECK(energy(u, dp) == doctest::Approx(lin + pot).epsilon(1e-13));

  Field z(g, Space::physical);
  CHECK(mass(z) == 0.0);
  CHECK(energy(z, dp) == 0.0);
}

TEST_CASE("energy drift is second order in dt") {
  auto g = make_grid(1, 1, 10.0, 64, 16);
  auto u0 = gaussian(g, 1.2, 1.5, 0.3);
  ModelParams mp{0.75, -1, 1.5, 1, 1};
  const double e0 = energy(u0, mp);
  auto drift = [&](double dt) {
    SplitStepper st(g, mp);
    Field u = u0;
    st.strang_fused(u, dt, static_cast<int>(std::lround(2.0 / dt)));
    return std::abs(energy(u, mp) - e0);
  };
  const double d1 = drift(0.05), d2 = drift(0.025);
  CAPTURE(d1);
  CAPTURE(d2);
  CHECK(d1 / d2 >= 3.5);
  CHECK(d1 / d2 <= 4.5);
}

TEST_CASE("Sobolev and Lebesgue norms") {
  auto g = make_grid(2, 1, 3.0, 8, 8);
  auto u = oracle::random_field(g, 12);
  CHECK(sobolev_norm(u, 0.0) == doctest::Approx(l2_norm(u)).epsilon(1e-13));
  CHECK(lebesgue_norm(u, 2.0) == doctest::Approx(l2_norm(u)).epsilon(1e-13));
  CHECK_THROWS(sobolev_norm(u, 21.0));

  double brute4 = 0.0, brute_inf = 0.0;
  for (const auto& v : u.values()) {
    brute4 += std::pow(std::abs(v), 4);
    brute_inf = std::max(brute_inf, std::abs(v));
  }
  brute4 = std::pow(brute4 * g->cell_volume(), 0.25);
  CHECK(std::abs(lebesgue_norm(u, 4.0) - brute4) <= 1e-12 * brute4);
  CHECK(lebesgue_norm(u, kInf) == brute_inf);

  // H^s against the direct-DFT oracle.
  auto uh = oracle::dft_forward(*g, u.values());
  double acc = 0.0;
  for (std::size_t i = 0; i < uh.size(); ++i) {
    const auto p = oracle::point(*g, i);
    double k2 = 0.0;
    for (double k : p.k) k2 += k * k;
    acc += std::pow(1.0 + k2, 0.8) * std::norm(uh[i]);
  }
  const double ref = std::sqrt(acc / g->volume());
  CHECK(std::abs(sobolev_norm(u, 0.8) - ref) <= 1e-12 * ref);
}

TEST_CASE("mixed norms against nested summation") {
  auto g = make_grid(1, 1, 2.0, 8, 8);
  auto u = oracle::random_field(g, 31);
  const std::size_t ts = g->torus_size();

  NormSpec l4l2;
  l4l2.x_exp = 4.0;
  double outer = 0.0;
  for (std::size_t e = 0; e < g->euclid_size(); ++e) {
    double inner = 0.0;
    for (std::size_t t = 0; t < ts; ++t) inner += std::norm(u[e * ts + t]) * g->dy();
    outer += std::pow(std::sqrt(inner), 4) * g->dx();
  }
  outer = std::pow(outer, 0.25);
  CHECK(std::abs(mixed_norm(u, l4l2) - outer) <= 1e-12 * outer);

  // L^3_x H^0.6_y with a per-row direct DFT over y.
  NormSpec l3h;
  l3h.x_exp = 3.0;
  l3h.y_kind = NormSpec::YKind::sobolev;
  l3h.y_order = 0.6;
  double o2 = 0.0;
  for (std::size_t e = 0; e < g->euclid_size(); ++e) {
    double s = 0.0;
    for (int eta = 0; eta < g->ny(); ++eta) {
      const int k = WaveguideGrid::signed_index(eta, g->ny());
      Complex c = 0.0;
      for (std::size_t t = 0; t < ts; ++t)
        c += u[e * ts + t] * std::polar(1.0, -k * g->torus_nodes()[t]) * g->dy();
      s += std::pow(1.0 + k * k, 0.6) * std::norm(c);
    }
    o2 += std::pow(std::sqrt(s / (2 * pi)), 3) * g->dx();
  }
  o2 = std::cbrt(o2);
  CHECK(std::abs(mixed_norm(u, l3h) - o2) <= 1e-12 * o2);

  // L^inf_x L^5_y.
  NormSpec linf;
  linf.x_exp = kInf;
  linf.y_exp = 5.0;
  double o3 = 0.0;
  for (std::size_t e = 0; e < g->euclid_size(); ++e) {
    double s = 0.0;
    for (std::size_t t = 0; t < ts; ++t) s += std::pow(std::abs(u[e * ts + t]), 5) * g->dy();
    o3 = std::max(o3, std::pow(s, 0.2));
  }
  CHECK(std::abs(mixed_norm(u, linf) - o3) <= 1e-12 * o3);

  // Constant field: |c| Vol_x^{1/q} Vol_y^{1/2} for any H^s_y.
  const Complex c{1.5, 2.0};
  Field cf(g, std::vector<Complex>(g->size(), c), Space::physical);
  NormSpec ch;
  ch.x_exp = 3.0;
  ch.y_kind = NormSpec::YKind::sobolev;
  ch.y_order = 0.5 + 0.1;
  const double exact = std::abs(c) * std::cbrt(g->euclid_volume()) * std::sqrt(g->torus_volume());
  CHECK(mixed_norm(cf, ch) == doctest::Approx(exact).epsilon(1e-13));

  // Pre-multiplier |grad_x|^a on a mode.
  const double kx = pi / 2 * 3;
  auto m = mode(g, 1.0, kx, 1);
  NormSpec pre;
  pre.pre = NormSpec::Pre::grad_x;
  pre.pre_order = 0.75;
  CHECK(mixed_norm(m, pre) == doctest::Approx(std::pow(kx, 0.75) * l2_norm(m)).epsilon(1e-12));
}

TEST_CASE("time norms") {
  std::vector<double> t{0.0, 0.5, 1.0}, v{1.0, 2.0, 3.0};
  const double s = 0.25 * (1 + 4) + 0.25 * (4 + 9);
  CHECK(time_norm(v, t, 2.0) == doctest::Approx(std::sqrt(s)).epsilon(1e-15));
  CHECK(time_norm(v, t, kInf) == 3.0);
}

TEST_CASE("Morawetz action") {
  auto g = make_grid(2, 1, 8.0, 64, 8);
  auto real = gaussian(g, 1.0, 1.3, 0.2);
  CHECK(std::abs(morawetz_action(real, WeightSpec::abs_x_for(*g))) <= 1e-13);
  CHECK(std::abs(morawetz_action(real, WeightSpec::half_square())) <= 1e-13);

  const double k1 = 2.0;
  auto mod = sample_function(g, [&](auto x, auto) {
    return std::polar(std::exp(-(x[0] * x[0] + x[1] * x[1]) / 2.0), k1 * x[0]);
  });
  const double ref = 2.0 * k1 * mass(mod);
  CHECK(morawetz_action(mod, WeightSpec::linear_x1()) == doctest::Approx(ref).epsilon(1e-12));

  // |M_|x|| <= C ||u||^2_{Hdot^1/2}: the measured constant stays bounded.
  auto g3 = make_grid(3, 1, 8.0, 32, 8);
  double cmax = 0.0, cmin = kInf;
  for (int s = 0; s < 6; ++s) {
    CounterRng rng(100 + s);
    const double kk = 0.5 + rng.uniform(), w = 1.0 + rng.uniform();
    auto u = sample_function(g3, [&](auto x, auto y) {
      const double r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
      return std::polar(std::exp(-r2 / (w * w)) * (1.0 + 0.3 * std::cos(y[0])), kk * std::sqrt(r2));
    });
    const double h = sobolev_norm(u, 0.5, true);
    const double c = std::abs(morawetz_action(u, WeightSpec::abs_x_for(*g3))) / (h * h);
    cmax = std::max(cmax, c);
    cmin = std::min(cmin, c);
  }
  CAPTURE(cmax);
  CHECK(cmax <= 4.0);
  CHECK(cmin > 0.0);
}

TEST_CASE("Morawetz identity terms") {
  const double sigma = 0.75;
  auto g = make_grid(2, 1, pi, 16, 8);
  const Complex a{0.6, 0.3};
  auto u = mode(g, a, 3, 1);
  ModelParams lin{sigma, 0, 1.5, 2, 1};
  auto r = morawetz_rhs(u, WeightSpec::half_square(), lin, {1e-10});
  const double exact = 4 * sigma * std::pow(9.0, sigma) * std::norm(a) * g->volume();
  CHECK(r.linear == doctest::Approx(exact).epsilon(1e-8));
  CHECK(r.nonlinear == 0.0);
  CHECK(r.total == doctest::Approx(-exact).epsilon(1e-8));

  Field z(g, Space::physical);
  CHECK(morawetz_rhs(z, WeightSpec::half_square(), lin).total == 0.0);
  CHECK(morawetz_rhs(z, WeightSpec::abs_x_for(*g), lin).total == 0.0);
  ModelParams one{1.0, -1, 1.5, 2, 1};
  CHECK_THROWS(morawetz_rhs(u, WeightSpec::half_square(), one));

  // The physical per-node path reproduces the Plancherel path for a nearly
  // quadratic weight: sqrt(|x|^2 + E^2) ~ E + |x|^2 / (2E).
  auto g3 = make_grid(3, 1, 6.0, 16, 8);
  auto q = gaussian(g3, 1.0, 1.0, 0.3);
  ModelParams mp{sigma, -1, 1.5, 3, 1};
  const double E = 1e3;
  auto fast = morawetz_rhs(q, WeightSpec::half_square(), mp, {1e-8});
  auto slow = morawetz_rhs(q, WeightSpec::abs_x(E), mp, {1e-8});
  CHECK(slow.linear * E == doctest::Approx(fast.linear).epsilon(1e-4));
}

TEST_CASE("Morawetz identity against a time finite difference") {
  // The half-square weight is a sawtooth on the periodic box; the nonlocal
  // dispersion couples to its jump with an error ~ L^{-1-2 sigma} in d = 1.
  auto g = make_grid(1, 1, 48.0, 512, 16);
  auto u0 = gaussian(g, 1.0, 1.5, 0.3);
  ModelParams mp{0.75, -1, 1.5, 1, 1};
  const auto w = WeightSpec::half_square();
  SplitStepper st(g, mp);
  const double dt = 0.002;
  Field u = u0;
  st.strang_fused(u, dt, 100);
  Field um = u, up = u;
  st.strang(up, dt);
  st.strang(um, -dt);
  const double fd = (morawetz_action(up, w) - morawetz_action(um, w)) / (2 * dt);
  const double rhs = morawetz_rhs(u, w, mp, {1e-10}).total;
  CAPTURE(fd);
  CAPTURE(rhs);
  CHECK(std::abs(rhs - fd) <= 1e-3 * std::abs(fd));
}

TEST_CASE("Morawetz spacetime integral") {
  auto g = make_grid(3, 1, 4.0, 16, 8);
  auto w = WeightSpec::abs_x_for(*g);
  Field z(g, Space::physical);
  MorawetzSpacetime acc(1.5, 0.75, w);
  for (double t : {0.0, 0.5, 1.0}) acc.add(t, z);
  CHECK(acc.value() == 0.0);

  auto u0 = mode(*&g, 0.8, pi / 4 * 2, 1);
  ModelParams lin{0.75, 0, 1.5, 3, 1};
  EvolveOptions opts;
  opts.T = 1.0;
  opts.dt = 0.1;
  opts.integrator = Integrator::linear_exact;
  auto traj = evolve(u0, lin, opts);
  auto st = morawetz_spacetime(traj, w);
  CHECK(st.value() == doctest::Approx(1.0 * morawetz_density(u0, 1.5, w)).epsilon(1e-12));
  CHECK(st.ratio() > 0.0);
}

TEST_CASE("decay diagnostics") {
  CHECK(decay_r_bound(0.75, 3, 1.5) == doctest::Approx(13.25 / 6).epsilon(1e-15));
  std::vector<double> v{5, 4, 4.5, 3, 2, 1};
  CHECK(decreasing_fraction(v, 0) == doctest::Approx(0.8));
  CHECK(decreasing_fraction(v, 2) == 1.0);

  auto g = make_grid(1, 1, pi, 16, 8);
  auto ym = sample_function(g, [](auto, auto y) { return std::polar(1.0, 2 * y[0]); });
  ModelParams lin{0.75, 0, 1.5, 1, 1};
  EvolveOptions opts;
  opts.T = 1.0;
  opts.dt = 0.1;
  auto traj = evolve(ym, lin, opts);
  auto scan = decay_scan(traj, 4.0);
  CHECK(scan.in_theorem);
  for (double n : scan.norms) CHECK(n == doctest::Approx(scan.norms.front()).epsilon(1e-12));

  // Linear dispersion of a radial Gaussian: sup norm decreases.
  auto g2 = make_grid(2, 1, 16.0, 64, 8);
  auto u0 = gaussian(g2, 1.0, 1.0);
  opts.T = 3.0;
  opts.dt = 0.1;
  opts.record_stride = 1;
  auto t2 = evolve(u0, lin, opts);
  std::vector<double> sup;
  for (const auto& f : t2.snapshots) sup.push_back(lebesgue_norm(f, kInf));
  CHECK(decreasing_fraction(sup, 2) >= 0.9);
}

TEST_CASE("radial Sobolev embedding") {
  CHECK(radial_sobolev_conditions(-1.0, 1.0, 2, 2, 3).ok);
  CHECK_FALSE(radial_sobolev_conditions(-2.0, 2.0, 2, 2, 3).ok);
  CHECK_FALSE(radial_sobolev_conditions(-0.5, 1.0, 2, 2, 3).ok);
  CHECK(radial_sobolev_conditions(0.25, 0.5, 2, 4, 3).ok);

  auto g = make_grid(3, 0, 12.0, 96, 0);
  Field z(g, Space::physical);
  std::vector<Field> zero{z};
  CHECK_THROWS(radial_sobolev_check(zero, 0.25, 0.5, 2, 4));
  CHECK_THROWS(radial_sobolev_check(zero, -2.0, 2.0, 2, 2));

  for (auto [beta, s, q] : {std::tuple{0.25, 0.5, 4.0}, std::tuple{-0.5, 0.5, 2.0}}) {
    std::vector<Field> fam;
    for (double lam : {0.5, 1.0, 2.0}) fam.push_back(gaussian(g, 1.0, 1.5 / lam));
    auto st = radial_sobolev_check(fam, beta, s, 2.0, q);
    CAPTURE(beta);
    CHECK(st.max_ratio / st.min_ratio <= 1.01);
  }
}

TEST_CASE("scattering extraction") {
  auto g = make_grid(2, 1, 10.0, 32, 8);
  auto u0 = gaussian(g, 1.0, 1.0, 0.2);
  ModelParams lin{0.75, 0, 1.5, 2, 1};
  EvolveOptions opts;
  opts.T = 2.0;
  opts.dt = 0.25;
  opts.leak_threshold = 1.0;
  auto traj = evolve(u0, lin, opts);
  auto sc = scattering_extract(traj, {0.25, 0.5, 1.0, 2.0}, 0.75, 1.0);
  REQUIRE(sc.deltas.size() == 3);
  for (double dlt : sc.deltas) CHECK(dlt <= 1e-12 * sobolev_norm(u0, 0.75));
  for (std::size_t i = 0; i < sc.times.size(); ++i) {
    auto it = std::find(traj.times.begin(), traj.times.end(), sc.times[i]);
    const auto& u = traj.snapshots[it - traj.times.begin()];
    CHECK(sobolev_norm(sc.profiles[i], 0.75) ==
          doctest::Approx(sobolev_norm(u, 0.75)).epsilon(1e-12));
  }

  Field z(g, Space::physical);
  ScatteringTracker tr(0.75, {0.0, 1.0}, 0.75, 1.0);
  tr.add(0.0, z);
  tr.add(1.0, z);
  CHECK(tr.result().deltas.at(0) == 0.0);

  // Leak above threshold truncates the samples.
  auto tight = scattering_extract(traj, {0.25, 0.5, 1.0, 2.0}, 0.75, 1e-30);
  CHECK(tight.profiles.empty());
  CHECK_FALSE(tight.warnings.empty());
}

TEST_CASE("record writers") {
  DiagnosticsRecord r;
  r.t = 0.5;
  r.mass = 1.0 / 3.0;
  r.norms["L4"] = 2.0;
  std::ostringstream os;
  write_csv_header(os, {"L4"});
  write_csv_row(os, r, {"L4"});
  CHECK(os.str() ==
        "t,mass,energy,morawetz_action,morawetz_rhs,boundary_leak,L4\n"
        "0.5,0.33333333333333331,0,0,,0,2\n");
  std::ostringstream js;
  write_jsonl(js, r);
  CHECK(js.str().find("\"mass\":0.3333333333333333") != std::string::npos);
}
