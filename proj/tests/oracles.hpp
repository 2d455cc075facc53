#pragma once

// Brute-force reference implementations used only by tests. Everything here
// is O(size^2) or worse and meant for toy grids.

#include <cmath>
#include <complex>
#include <vector>

#include "wgnls/grid.hpp"
#include "wgnls/rng.hpp"

namespace oracle {

using wgnls::Complex;
using wgnls::Field;
using wgnls::GridPtr;
using wgnls::WaveguideGrid;

/// Physical coordinates and dual frequencies of a flat index.
struct Point {
  std::vector<double> z;
  std::vector<double> k;
};

inline Point point(const WaveguideGrid& g, std::size_t flat) {
  Point p;
  std::vector<int> ex(g.d()), ty(g.n());
  g.euclid_axes(g.euclid_part(flat), ex);
  for (int a : ex) {
    p.z.push_back(g.euclid_nodes()[a]);
    p.k.push_back(g.euclid_freqs()[a]);
  }
  if (g.n() > 0) {
    g.torus_axes(g.torus_part(flat), ty);
    for (int a : ty) {
      p.z.push_back(g.torus_nodes()[a]);
      p.k.push_back(g.torus_freqs()[a]);
    }
  }
  return p;
}

/// Direct double-sum forward DFT with the library normalization.
inline std::vector<Complex> dft_forward(const WaveguideGrid& g, std::span<const Complex> u) {
  std::vector<Point> pts;
  for (std::size_t i = 0; i < g.size(); ++i) pts.push_back(point(g, i));
  std::vector<Complex> out(g.size());
  for (std::size_t kk = 0; kk < g.size(); ++kk) {
    Complex s = 0.0;
    for (std::size_t zz = 0; zz < g.size(); ++zz) {
      double ph = 0.0;
      for (std::size_t a = 0; a < pts[zz].z.size(); ++a) ph += pts[zz].z[a] * pts[kk].k[a];
      s += u[zz] * std::polar(1.0, -ph);
    }
    out[kk] = s * g.cell_volume();
  }
  return out;
}

inline std::vector<Complex> dft_inverse(const WaveguideGrid& g, std::span<const Complex> uh) {
  std::vector<Point> pts;
  for (std::size_t i = 0; i < g.size(); ++i) pts.push_back(point(g, i));
  std::vector<Complex> out(g.size());
  for (std::size_t zz = 0; zz < g.size(); ++zz) {
    Complex s = 0.0;
    for (std::size_t kk = 0; kk < g.size(); ++kk) {
      double ph = 0.0;
      for (std::size_t a = 0; a < pts[zz].z.size(); ++a) ph += pts[zz].z[a] * pts[kk].k[a];
      s += uh[kk] * std::polar(1.0, ph);
    }
    out[zz] = s / g.volume();
  }
  return out;
}

inline double max_abs_diff(std::span<const Complex> a, std::span<const Complex> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_abs(std::span<const Complex> a) {
  double m = 0.0;
  for (const auto& v : a) m = std::max(m, std::abs(v));
  return m;
}

/// Relative L2 difference between two fields in the same space.
inline double rel_diff(const Field& a, const Field& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

/// Random physical field with iid complex Gaussian values.
inline Field random_field(const GridPtr& g, std::uint64_t seed) {
  wgnls::CounterRng rng(seed);
  Field f(g, wgnls::Space::physical);
  for (auto& v : f.values()) v = rng.complex_normal();
  return f;
}

/// Random spectral content restricted to |k_j| <= kmax on every axis, returned
/// in physical space.
inline Field random_bandlimited(const GridPtr& g, std::uint64_t seed, double kmax) {
  wgnls::CounterRng rng(seed);
  Field f(g, wgnls::Space::spectral);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto p = point(*g, i);
    bool keep = true;
    for (double k : p.k) keep = keep && std::abs(k) <= kmax;
    const Complex c = rng.complex_normal();
    f[i] = keep ? c : Complex{};
  }
  return wgnls::inverse_transform(f);
}

}  // namespace oracle
