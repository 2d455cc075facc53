#include "wgnls/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

#include "wgnls/error.hpp"

namespace wgnls {

namespace {

// FFTW's planner is not reentrant; plan execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::size_t ipow(std::size_t b, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

}  // namespace

namespace detail {

class FftEngine {
 public:
  FftEngine(const std::vector<int>& dims, std::size_t total) {
    std::lock_guard lock(planner_mutex());
    auto* buf = fftw_alloc_complex(total);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    const int rank = static_cast<int>(dims.size());
    forward_ = fftw_plan_dft(rank, dims.data(), buf, buf, FFTW_FORWARD, flags);
    backward_ = fftw_plan_dft(rank, dims.data(), buf, buf, FFTW_BACKWARD, flags);
    fftw_free(buf);
    if (!forward_ || !backward_) throw std::runtime_error("FFTW planning failed");
  }
  ~FftEngine() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
  }
  FftEngine(const FftEngine&) = delete;
  FftEngine& operator=(const FftEngine&) = delete;

  void forward(Complex* data) const {
    auto* p = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(forward_, p, p);
  }
  void backward(Complex* data) const {
    auto* p = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(backward_, p, p);
  }

 private:
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

}  // namespace detail

const char* to_string(Space s) { return s == Space::physical ? "physical" : "spectral"; }

Space space_from_string(const std::string& s) {
  if (s == "physical") return Space::physical;
  if (s == "spectral") return Space::spectral;
  throw std::invalid_argument("unknown space '" + s + "'");
}

WaveguideGrid::WaveguideGrid(int d, int n, double half_length, int nx, int ny)
    : d_(d), n_(n), half_length_(half_length), nx_(nx), ny_(n > 0 ? ny : 0) {
  if (d < 1) throw std::invalid_argument("grid: d must be >= 1");
  if (n < 0) throw std::invalid_argument("grid: n must be >= 0");
  if (!(half_length > 0.0) || !std::isfinite(half_length))
    throw std::invalid_argument("grid: half_length must be positive");
  if (nx < 8 || nx % 2 != 0) throw std::invalid_argument("grid: nx must be even and >= 8");
  if (n > 0 && (ny < 8 || ny % 2 != 0))
    throw std::invalid_argument("grid: ny must be even and >= 8");

  euclid_size_ = ipow(static_cast<std::size_t>(nx_), d_);
  torus_size_ = n_ > 0 ? ipow(static_cast<std::size_t>(ny_), n_) : 1;

  const double h = dx();
  euclid_freqs_.resize(nx_);
  euclid_nodes_.resize(nx_);
  for (int j = 0; j < nx_; ++j) {
    euclid_freqs_[j] = std::numbers::pi / half_length_ * signed_index(j, nx_);
    euclid_nodes_[j] = -half_length_ + j * h;
  }
  if (n_ > 0) {
    torus_freqs_.resize(ny_);
    torus_nodes_.resize(ny_);
    for (int j = 0; j < ny_; ++j) {
      torus_freqs_[j] = signed_index(j, ny_);
      torus_nodes_[j] = 2.0 * std::numbers::pi * j / ny_;
    }
  }
  cell_volume_ = std::pow(h, d_) * (n_ > 0 ? std::pow(dy(), n_) : 1.0);

  euclid_sq_.assign(euclid_size_, 0.0);
  euclid_parity_.assign(euclid_size_, 1);
  std::vector<int> axes(d_);
  for (std::size_t e = 0; e < euclid_size_; ++e) {
    euclid_axes(e, axes);
    double s = 0.0;
    int parity = 0;
    for (int a : axes) {
      const double f = euclid_freqs_[a];
      s += f * f;
      parity += a;
    }
    euclid_sq_[e] = s;
    euclid_parity_[e] = (parity % 2 == 0) ? 1 : -1;
  }
  torus_sq_.assign(torus_size_, 0.0);
  if (n_ > 0) {
    std::vector<int> taxes(n_);
    for (std::size_t t = 0; t < torus_size_; ++t) {
      torus_axes(t, taxes);
      double s = 0.0;
      for (int a : taxes) s += static_cast<double>(torus_freqs_[a]) * torus_freqs_[a];
      torus_sq_[t] = s;
    }
  }

  std::vector<int> dims(d_, nx_);
  for (int i = 0; i < n_; ++i) dims.push_back(ny_);
  fft_ = std::make_unique<detail::FftEngine>(dims, size());
  if (n_ > 0)
    torus_fft_ = std::make_unique<detail::FftEngine>(std::vector<int>(n_, ny_), torus_size_);
}

WaveguideGrid::~WaveguideGrid() = default;

double WaveguideGrid::dy() const {
  return n_ > 0 ? 2.0 * std::numbers::pi / ny_ : 0.0;
}

double WaveguideGrid::euclid_volume() const { return std::pow(2.0 * half_length_, d_); }

double WaveguideGrid::torus_volume() const {
  return n_ > 0 ? std::pow(2.0 * std::numbers::pi, n_) : 1.0;
}

double WaveguideGrid::euclid_nyquist() const {
  return std::numbers::pi / half_length_ * (nx_ / 2);
}

void WaveguideGrid::euclid_axes(std::size_t e, std::span<int> out) const {
  for (int a = d_ - 1; a >= 0; --a) {
    out[a] = static_cast<int>(e % nx_);
    e /= nx_;
  }
}

void WaveguideGrid::torus_axes(std::size_t t, std::span<int> out) const {
  for (int a = n_ - 1; a >= 0; --a) {
    out[a] = static_cast<int>(t % ny_);
    t /= ny_;
  }
}

bool WaveguideGrid::same_shape(const WaveguideGrid& o) const {
  return d_ == o.d_ && n_ == o.n_ && half_length_ == o.half_length_ && nx_ == o.nx_ &&
         ny_ == o.ny_;
}

void WaveguideGrid::forward_raw(Complex* data) const {
  fft_->forward(data);
  const double cv = cell_volume_;
  const std::size_t ts = torus_size_;
  for (std::size_t e = 0; e < euclid_size_; ++e) {
    const double s = cv * euclid_parity_[e];
    Complex* row = data + e * ts;
    for (std::size_t t = 0; t < ts; ++t) row[t] *= s;
  }
}

void WaveguideGrid::inverse_raw(Complex* data) const {
  // The origin phase multiplies the spectral input here, so it precedes the FFT.
  const double iv = 1.0 / volume();
  const std::size_t ts = torus_size_;
  for (std::size_t e = 0; e < euclid_size_; ++e) {
    const double s = iv * euclid_parity_[e];
    Complex* row = data + e * ts;
    for (std::size_t t = 0; t < ts; ++t) row[t] *= s;
  }
  fft_->backward(data);
}

void WaveguideGrid::torus_forward_raw(Complex* row) const {
  if (!torus_fft_) return;
  torus_fft_->forward(row);
  const double w = std::pow(dy(), n_);
  for (std::size_t t = 0; t < torus_size_; ++t) row[t] *= w;
}

GridPtr make_grid(int d, int n, double half_length, int nx, int ny) {
  return std::make_shared<const WaveguideGrid>(d, n, half_length, nx, ny);
}

// ---------------------------------------------------------------------------

Field::Field(GridPtr grid, Space space)
    : grid_(std::move(grid)), values_(grid_->size()), space_(space) {}

Field::Field(GridPtr grid, std::vector<Complex> values, Space space)
    : grid_(std::move(grid)), values_(std::move(values)), space_(space) {
  if (values_.size() != grid_->size())
    throw std::invalid_argument("field: value count does not match grid");
}

Field& Field::operator+=(const Field& o) {
  require_same_grid(*this, o, "operator+=");
  if (o.space_ != space_) throw SpaceMismatch("operator+=: space mismatch");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
  return *this;
}

Field& Field::operator-=(const Field& o) {
  require_same_grid(*this, o, "operator-=");
  if (o.space_ != space_) throw SpaceMismatch("operator-=: space mismatch");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
  return *this;
}

Field& Field::operator*=(Complex s) {
  for (auto& v : values_) v *= s;
  return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(Complex s, Field a) { return a *= s; }

void require_space(const Field& f, Space expected, const char* where) {
  if (f.space() != expected)
    throw SpaceMismatch(std::string(where) + ": expected " + to_string(expected) +
                        " field, got " + to_string(f.space()));
}

void require_same_grid(const Field& a, const Field& b, const char* where) {
  if (a.grid_ptr() != b.grid_ptr() && !a.grid().same_shape(b.grid()))
    throw std::invalid_argument(std::string(where) + ": fields live on different grids");
}

Field forward_transform(const Field& f) {
  require_space(f, Space::physical, "forward_transform");
  Field out = f;
  out.grid().forward_raw(out.values().data());
  out.set_space(Space::spectral);
  return out;
}

Field inverse_transform(const Field& f) {
  require_space(f, Space::spectral, "inverse_transform");
  Field out = f;
  out.grid().inverse_raw(out.values().data());
  out.set_space(Space::physical);
  return out;
}

void transform_in_place(Field& f, Space target) {
  if (f.space() == target) return;
  if (target == Space::spectral)
    f.grid().forward_raw(f.values().data());
  else
    f.grid().inverse_raw(f.values().data());
  f.set_space(target);
}

Field to_space(Field f, Space s) {
  transform_in_place(f, s);
  return f;
}

double l2_norm(const Field& f) {
  // Neumaier summation: conservation checks resolve drifts near 1e-13.
  double s = 0.0, c = 0.0;
  for (const auto& v : f.values()) {
    const double x = std::norm(v), t = s + x;
    c += std::abs(s) >= x ? (s - t) + x : (x - t) + s;
    s = t;
  }
  s += c;
  const double w =
      f.space() == Space::physical ? f.grid().cell_volume() : 1.0 / f.grid().volume();
  return std::sqrt(s * w);
}

Complex inner_product(const Field& a, const Field& b) {
  require_same_grid(a, b, "inner_product");
  if (a.space() != b.space()) throw SpaceMismatch("inner_product: space mismatch");
  Complex s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  const double w =
      a.space() == Space::physical ? a.grid().cell_volume() : 1.0 / a.grid().volume();
  return s * w;
}

Field sample_function(const GridPtr& grid, const SampleFn& fn) {
  Field out(grid, Space::physical);
  const auto& g = *grid;
  std::vector<int> ex(g.d()), ty(g.n());
  std::vector<double> x(g.d()), y(g.n());
  for (std::size_t e = 0; e < g.euclid_size(); ++e) {
    g.euclid_axes(e, ex);
    for (int a = 0; a < g.d(); ++a) x[a] = g.euclid_nodes()[ex[a]];
    for (std::size_t t = 0; t < g.torus_size(); ++t) {
      if (g.n() > 0) {
        g.torus_axes(t, ty);
        for (int a = 0; a < g.n(); ++a) y[a] = g.torus_nodes()[ty[a]];
      }
      out[e * g.torus_size() + t] = fn(x, y);
    }
  }
  return out;
}

double boundary_leak(const Field& f, double window_fraction) {
  require_space(f, Space::physical, "boundary_leak");
  if (!(window_fraction > 0.0 && window_fraction < 1.0))
    throw std::invalid_argument("boundary_leak: window_fraction must lie in (0, 1)");
  const auto& g = f.grid();
  const double edge = window_fraction * g.half_length();
  std::vector<char> inside_axis(g.nx());
  for (int j = 0; j < g.nx(); ++j) {
    const double x = g.euclid_nodes()[j];
    inside_axis[j] = (x >= -edge && x < edge) ? 1 : 0;
  }
  std::vector<int> ex(g.d());
  double total = 0.0;
  double outside = 0.0;
  for (std::size_t e = 0; e < g.euclid_size(); ++e) {
    g.euclid_axes(e, ex);
    bool in = true;
    for (int a : ex) in = in && inside_axis[a];
    double row = 0.0;
    for (std::size_t t = 0; t < g.torus_size(); ++t) row += std::norm(f[e * g.torus_size() + t]);
    total += row;
    if (!in) outside += row;
  }
  return total > 0.0 ? outside / total : 0.0;
}

}  // namespace wgnls
