#pragma once

// Discretized waveguide domain [-L, L)^d x [0, 2pi)^n and complex fields on it.
//
// Index layout is row-major over (x_1, ..., x_d, y_1, ..., y_n): the last torus
// axis varies fastest. Spectral arrays use the same layout with each axis in
// FFT order, i.e. index j carries the signed frequency index j for j < N/2 and
// j - N otherwise.
//
// Transform normalization:
//   forward:  u^(xi, eta) = cell_volume * sum_z u(z) exp(-i z.(xi, eta))
//   inverse:  u(z)        = (1 / volume) * sum_k u^(k) exp(+i z.k)
// so that  sum |u|^2 * cell_volume == sum |u^|^2 / volume  (Plancherel).

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace wgnls {

using Complex = std::complex<double>;

enum class Space { physical, spectral };

const char* to_string(Space s);
Space space_from_string(const std::string& s);

namespace detail {
class FftEngine;
}

class WaveguideGrid {
 public:
  WaveguideGrid(int d, int n, double half_length, int nx, int ny);
  ~WaveguideGrid();
  WaveguideGrid(const WaveguideGrid&) = delete;
  WaveguideGrid& operator=(const WaveguideGrid&) = delete;

  int d() const { return d_; }
  int n() const { return n_; }
  double half_length() const { return half_length_; }
  int nx() const { return nx_; }
  /// Points per torus axis; 0 when n == 0.
  int ny() const { return ny_; }

  std::size_t size() const { return euclid_size_ * torus_size_; }
  std::size_t euclid_size() const { return euclid_size_; }
  std::size_t torus_size() const { return torus_size_; }

  double dx() const { return 2.0 * half_length_ / nx_; }
  double dy() const;
  double cell_volume() const { return cell_volume_; }
  double euclid_volume() const;
  double torus_volume() const;
  double volume() const { return euclid_volume() * torus_volume(); }

  /// Per-axis Euclidean dual lattice (pi / L) * k in FFT order.
  const std::vector<double>& euclid_freqs() const { return euclid_freqs_; }
  /// Per-axis torus dual lattice in FFT order; empty when n == 0.
  const std::vector<int>& torus_freqs() const { return torus_freqs_; }
  const std::vector<double>& euclid_nodes() const { return euclid_nodes_; }
  const std::vector<double>& torus_nodes() const { return torus_nodes_; }

  double euclid_nyquist() const;
  int torus_nyquist() const { return ny_ / 2; }

  std::size_t euclid_part(std::size_t flat) const { return flat / torus_size_; }
  std::size_t torus_part(std::size_t flat) const { return flat % torus_size_; }

  /// |xi|^2 for every Euclidean spectral index (length euclid_size()).
  const std::vector<double>& euclid_sq() const { return euclid_sq_; }
  /// |eta|^2 for every torus spectral index (length torus_size()).
  const std::vector<double>& torus_sq() const { return torus_sq_; }

  /// Per-axis indices of a Euclidean flat index (length d).
  void euclid_axes(std::size_t e, std::span<int> out) const;
  /// Per-axis indices of a torus flat index (length n).
  void torus_axes(std::size_t t, std::span<int> out) const;

  /// Signed frequency index along one axis of length m for FFT slot j.
  static int signed_index(int j, int m) { return j < m / 2 ? j : j - m; }

  bool same_shape(const WaveguideGrid& other) const;

  // Raw in-place transforms including normalization and the phase coming from
  // the x-origin at -L. Safe to call concurrently on distinct buffers.
  void forward_raw(Complex* data) const;
  void inverse_raw(Complex* data) const;
  /// Forward transform over the torus axes of one contiguous row of
  /// torus_size() values, normalized by dy^n. No-op when n == 0.
  void torus_forward_raw(Complex* row) const;

 private:
  int d_;
  int n_;
  double half_length_;
  int nx_;
  int ny_;
  std::size_t euclid_size_;
  std::size_t torus_size_;
  double cell_volume_;
  std::vector<double> euclid_freqs_;
  std::vector<int> torus_freqs_;
  std::vector<double> euclid_nodes_;
  std::vector<double> torus_nodes_;
  std::vector<double> euclid_sq_;
  std::vector<double> torus_sq_;
  std::vector<signed char> euclid_parity_;
  std::unique_ptr<detail::FftEngine> fft_;
  std::unique_ptr<detail::FftEngine> torus_fft_;
};

using GridPtr = std::shared_ptr<const WaveguideGrid>;

/// Validated grid factory. Rejects nonpositive L, d < 1, n < 0, and odd or too
/// small resolutions (nx >= 8; ny >= 8 when n > 0).
GridPtr make_grid(int d, int n, double half_length, int nx, int ny);

class Field {
 public:
  Field(GridPtr grid, Space space);
  Field(GridPtr grid, std::vector<Complex> values, Space space);

  const WaveguideGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  Space space() const { return space_; }
  void set_space(Space s) { space_ = s; }

  std::size_t size() const { return values_.size(); }
  std::span<Complex> values() { return values_; }
  std::span<const Complex> values() const { return values_; }
  Complex& operator[](std::size_t i) { return values_[i]; }
  const Complex& operator[](std::size_t i) const { return values_[i]; }

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(Complex s);

 private:
  GridPtr grid_;
  std::vector<Complex> values_;
  Space space_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(Complex s, Field a);

void require_space(const Field& f, Space expected, const char* where);
void require_same_grid(const Field& a, const Field& b, const char* where);

Field forward_transform(const Field& f);
Field inverse_transform(const Field& f);
/// Returns the field in the requested space, transforming only if needed.
Field to_space(Field f, Space s);
void transform_in_place(Field& f, Space target);

/// L2 norm in whichever space the field lives (Plancherel-consistent).
double l2_norm(const Field& f);
/// <a, b> = integral conj(a) b over the domain; both fields in the same space.
Complex inner_product(const Field& a, const Field& b);

using SampleFn =
    std::function<Complex(std::span<const double> x, std::span<const double> y)>;

/// Pointwise evaluation at grid nodes; physical space.
Field sample_function(const GridPtr& grid, const SampleFn& fn);

/// Fraction of mass outside the centered window [-f L, f L) in any Euclidean
/// axis. Field must be physical.
double boundary_leak(const Field& f, double window_fraction);

}  // namespace wgnls
