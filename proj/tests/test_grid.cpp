#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <thread>

#include "oracles.hpp"
#include "wgnls/checkpoint.hpp"
#include "wgnls/error.hpp"
#include "wgnls/grid.hpp"

using namespace wgnls;
using std::numbers::pi;

TEST_CASE("make_grid lattices") {
  auto g = make_grid(1, 1, pi, 8, 8);
  auto f = g->euclid_freqs();
  std::sort(f.begin(), f.end());
  for (int j = 0; j < 8; ++j) CHECK(f[j] == doctest::Approx(j - 4).epsilon(1e-15));
  CHECK(g->torus_freqs().size() == 8);

  auto g0 = make_grid(1, 0, 1.0, 8, 0);
  CHECK(g0->torus_freqs().empty());
  CHECK(g0->size() == 8);
  CHECK(g0->cell_volume() == doctest::Approx(0.25));

  auto g2 = make_grid(2, 1, 16.0, 128, 16);
  CHECK(g2->size() == 262144);
  CHECK(g2->cell_volume() ==
        doctest::Approx(std::pow(32.0 / 128, 2) * (2 * pi / 16)).epsilon(1e-15));
}

TEST_CASE("make_grid rejects bad input") {
  CHECK_THROWS(make_grid(1, 1, pi, 9, 8));
  CHECK_THROWS(make_grid(1, 1, pi, 8, 7));
  CHECK_THROWS(make_grid(1, 1, 0.0, 8, 8));
  CHECK_THROWS(make_grid(1, 1, -1.0, 8, 8));
  CHECK_THROWS(make_grid(0, 1, 1.0, 8, 8));
  CHECK_THROWS(make_grid(1, -1, 1.0, 8, 8));
  CHECK_THROWS(make_grid(1, 1, 1.0, 6, 8));
}

TEST_CASE("transforms match direct DFT at toy scale") {
  for (auto [d, n] : {std::pair{1, 1}, std::pair{2, 1}, std::pair{1, 2}, std::pair{2, 0}}) {
    auto g = make_grid(d, n, 3.0, 8, 8);
    auto u = oracle::random_field(g, 11 + d * 3 + n);
    auto uh = forward_transform(u);
    auto ref = oracle::dft_forward(*g, u.values());
    CHECK(oracle::max_abs_diff(uh.values(), ref) <= 1e-12 * oracle::max_abs(ref));
    auto back = oracle::dft_inverse(*g, uh.values());
    auto inv = inverse_transform(uh);
    CHECK(oracle::max_abs_diff(inv.values(), back) <= 1e-12 * oracle::max_abs(back));
  }
}

TEST_CASE("Plancherel and round trip") {
  auto g = make_grid(2, 1, 5.0, 16, 8);
  auto u = oracle::random_field(g, 3);
  auto uh = forward_transform(u);
  CHECK(std::abs(l2_norm(u) - l2_norm(uh)) <= 1e-12 * l2_norm(u));
  auto back = inverse_transform(uh);
  CHECK(oracle::rel_diff(back, u) <= 1e-12);
  CHECK_THROWS_AS(forward_transform(uh), SpaceMismatch);
  CHECK_THROWS_AS(inverse_transform(u), SpaceMismatch);
}

TEST_CASE("constant and plane waves are single spectral coefficients") {
  auto g = make_grid(2, 1, pi, 8, 8);
  auto c = sample_function(g, [](auto, auto) { return Complex{2.0, -1.0}; });
  auto ch = forward_transform(c);
  CHECK(std::abs(ch[0]) > 0.0);
  for (std::size_t i = 1; i < ch.size(); ++i) CHECK(std::abs(ch[i]) <= 1e-13 * std::abs(ch[0]));

  auto w = sample_function(g, [](auto x, auto y) {
    return std::polar(1.0, 3.0 * x[0] - 2.0 * x[1] + y[0]);
  });
  auto wh = forward_transform(w);
  std::size_t peak = 0;
  for (std::size_t i = 0; i < wh.size(); ++i)
    if (std::abs(wh[i]) > std::abs(wh[peak])) peak = i;
  auto p = oracle::point(*g, peak);
  CHECK(p.k[0] == doctest::Approx(3.0));
  CHECK(p.k[1] == doctest::Approx(-2.0));
  CHECK(p.k[2] == doctest::Approx(1.0));
  CHECK(std::abs(wh[peak]) == doctest::Approx(g->volume()).epsilon(1e-13));
  for (std::size_t i = 0; i < wh.size(); ++i)
    if (i != peak) CHECK(std::abs(wh[i]) <= 1e-13 * std::abs(wh[peak]));

  auto ey = forward_transform(
      sample_function(g, [](auto, auto y) { return std::polar(1.0, y[0]); }));
  CHECK(std::abs(ey[1]) == doctest::Approx(g->volume()).epsilon(1e-13));
}

TEST_CASE("sample_function quadrature") {
  auto g = make_grid(1, 1, 16.0, 128, 8);
  auto z = sample_function(g, [](auto, auto) { return Complex{}; });
  CHECK(l2_norm(z) == 0.0);
  auto gauss = sample_function(g, [](auto x, auto) { return Complex{std::exp(-x[0] * x[0])}; });
  const double mass = std::pow(l2_norm(gauss), 2);
  const double exact = std::sqrt(pi / 2.0) * 2.0 * pi;
  CHECK(std::abs(mass - exact) <= 1e-10 * exact);
}

TEST_CASE("boundary_leak") {
  auto g = make_grid(1, 1, 8.0, 64, 8);
  auto c = sample_function(g, [](auto, auto) { return Complex{1.0}; });
  CHECK(boundary_leak(c, 0.5) == doctest::Approx(0.5).epsilon(1e-15));
  auto bump = sample_function(g, [](auto x, auto) {
    const double t = x[0] / 2.0;
    return std::abs(t) < 1.0 ? Complex{std::exp(-1.0 / (1.0 - t * t))} : Complex{};
  });
  CHECK(boundary_leak(bump, 0.5) == 0.0);
  CHECK_THROWS(boundary_leak(c, 1.0));
  CHECK_THROWS_AS(boundary_leak(forward_transform(c), 0.5), SpaceMismatch);
}

TEST_CASE("concurrent transforms are independent") {
  auto g = make_grid(2, 1, 4.0, 32, 8);
  std::vector<Field> inputs;
  for (int i = 0; i < 4; ++i) inputs.push_back(oracle::random_field(g, 100 + i));
  std::vector<Field> serial;
  for (const auto& f : inputs) serial.push_back(inverse_transform(forward_transform(f)));
  std::vector<Field> par(inputs.size(), Field(g, Space::physical));
  std::vector<std::thread> ts;
  for (std::size_t i = 0; i < inputs.size(); ++i)
    ts.emplace_back([&, i] {
      for (int r = 0; r < 20; ++r) par[i] = inverse_transform(forward_transform(inputs[i]));
    });
  for (auto& t : ts) t.join();
  for (std::size_t i = 0; i < inputs.size(); ++i)
    CHECK(oracle::max_abs_diff(par[i].values(), serial[i].values()) == 0.0);
}

TEST_CASE("checkpoint round trip is bit exact") {
  auto g = make_grid(2, 1, 2.5, 8, 8);
  auto u = forward_transform(oracle::random_field(g, 5));
  std::stringstream ss;
  write_checkpoint(ss, u, 0.125);
  auto first = ss.str().substr(0, ss.str().find('\n'));
  CHECK(first.find("\"version\":1") != std::string::npos);
  auto cp = read_checkpoint(ss);
  CHECK(cp.time == 0.125);
  CHECK(cp.field.space() == Space::spectral);
  CHECK(cp.field.grid().same_shape(*g));
  for (std::size_t i = 0; i < u.size(); ++i) CHECK(cp.field[i] == u[i]);
  CHECK(ss.str().size() == first.size() + 1 + 16 * g->size());
}

TEST_CASE("l2_norm sums accurately on large fields") {
  auto g = make_grid(3, 1, 8.0, 64, 16);
  const Field f = oracle::random_field(g, 9);
  long double ref = 0.0L;
  for (const auto& v : f.values()) ref += static_cast<long double>(std::norm(v));
  ref *= g->cell_volume();
  const double n = l2_norm(f);
  CHECK(std::abs(static_cast<long double>(n) * n - ref) / ref < 1e-15L);
}
