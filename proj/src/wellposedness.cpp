#include "wgnls/wellposedness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "wgnls/evolve.hpp"
#include "wgnls/stats.hpp"

namespace wgnls {

// ---------------------------------------------------------------------------
// Rational

namespace {

using i128 = __int128;

Rational make_reduced(i128 num, i128 den) {
  if (den == 0) throw std::domain_error("rational division by zero");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  i128 a = num < 0 ? -num : num, b = den;
  while (b != 0) {
    const i128 t = a % b;
    a = b;
    b = t;
  }
  if (a > 1) {
    num /= a;
    den /= a;
  }
  constexpr i128 lim = std::numeric_limits<std::int64_t>::max();
  if (num > lim || -num > lim || den > lim) throw std::overflow_error("rational overflow");
  return Rational(static_cast<std::int64_t>(num), static_cast<std::int64_t>(den));
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw std::domain_error("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num, den);
  num_ = g > 1 ? num / g : num;
  den_ = g > 1 ? den / g : den;
}

Rational Rational::from_double(double x, std::int64_t max_den) {
  if (!std::isfinite(x)) throw std::invalid_argument("rational from non-finite value");
  // Continued-fraction convergents h/k.
  std::int64_t h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  double v = x;
  for (int it = 0; it < 64; ++it) {
    const double a = std::floor(v);
    if (std::abs(a) > 1e15) break;
    const auto ai = static_cast<std::int64_t>(a);
    const std::int64_t k2 = ai * k1 + k0;
    if (k2 > max_den) break;
    const std::int64_t h2 = ai * h1 + h0;
    h0 = h1;
    h1 = h2;
    k0 = k1;
    k1 = k2;
    const double frac = v - a;
    if (frac < 1e-12 || std::abs(static_cast<double>(h1) / static_cast<double>(k1) - x) <= 1e-15 * std::max(1.0, std::abs(x)))
      break;
    v = 1.0 / frac;
  }
  return Rational(h1, k1);
}

std::string Rational::str() const {
  return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
}

Rational operator+(Rational a, Rational b) {
  return make_reduced(i128(a.num_) * b.den_ + i128(b.num_) * a.den_, i128(a.den_) * b.den_);
}
Rational operator-(Rational a, Rational b) { return a + (-b); }
Rational operator*(Rational a, Rational b) {
  return make_reduced(i128(a.num_) * b.num_, i128(a.den_) * b.den_);
}
Rational operator/(Rational a, Rational b) {
  return make_reduced(i128(a.num_) * b.den_, i128(a.den_) * b.num_);
}
std::strong_ordering operator<=>(Rational a, Rational b) {
  const i128 l = i128(a.num_) * b.den_, r = i128(b.num_) * a.den_;
  return l < r ? std::strong_ordering::less
               : (l > r ? std::strong_ordering::greater : std::strong_ordering::equal);
}

// ---------------------------------------------------------------------------
// Relations

namespace {

const Rational kHalf(1, 2);
const Rational kZero(0);
const Rational kOne(1);

struct RelationList {
  std::vector<Relation> rels;
  void eq(std::string name, Rational lhs, Rational rhs) {
    rels.push_back({std::move(name), lhs == rhs, -std::abs((lhs - rhs).value())});
  }
  void lt(std::string name, Rational lhs, Rational rhs) {
    rels.push_back({std::move(name), lhs < rhs, (rhs - lhs).value(), true});
  }
  void le(std::string name, Rational lhs, Rational rhs) {
    rels.push_back({std::move(name), lhs <= rhs, (rhs - lhs).value()});
  }
  void range(const std::string& name, Rational v, Rational hi) {
    le(name + " >= 0", kZero, v);
    le(name + " <= " + hi.str(), v, hi);
  }
};

Rational positive_part(Rational x) { return x < kZero ? kZero : x; }

}  // namespace

std::vector<Relation> check_lwp(const IndexSystem& sys) {
  const auto& e = sys.lwp;
  const Rational sg = sys.sigma, p = sys.p, d(sys.d);
  RelationList L;
  L.lt("s > 0", kZero, e.s);
  L.lt("delta > 0", kZero, e.delta);
  L.le("regularity budget s + 1/2 + delta <= sigma", e.s + kHalf + e.delta, sg);
  L.range("1/q", e.q_inv, kHalf);
  L.range("1/r", e.r_inv, kHalf);
  L.range("1/l", e.l_inv, kHalf);
  L.range("1/m", e.m_inv, kHalf);
  L.range("1/qt", e.qt_inv, kOne);
  L.range("1/rt", e.rt_inv, kOne);
  L.eq("(q,r) admissible with regularity s", Rational(2) * sg * e.q_inv + d * e.r_inv, d / 2 - e.s);
  L.eq("(qt,rt) dual relation", Rational(2) * sg * e.qt_inv + d * e.rt_inv, d / 2 + e.s);
  L.eq("res1 space 1/rt' = (p+1)/r", kOne - e.rt_inv, (p + kOne) * e.r_inv);
  L.lt("res1 time 1/qt' > (p+1)/q", (p + kOne) * e.q_inv, kOne - e.qt_inv);
  L.eq("(l,m) sigma-admissible", Rational(2) * sg * e.l_inv + d * e.m_inv, d / 2);
  L.eq("res2 space 1/m' = 1/m + p/r", kOne - e.m_inv, e.m_inv + p * e.r_inv);
  L.lt("res2 time 1/l' > 1/l + p/q", e.l_inv + p * e.q_inv, kOne - e.l_inv);
  // mp/(m-2) = p / (1 - 2/m); m = 2 makes it infinite.
  const Rational denom = kOne - Rational(2) * e.m_inv;
  if (denom > kZero) {
    const Rational v = p / denom;
    L.lt("rec3 lower mp/(m-2) > 2", Rational(2), v);
    L.lt("rec3 upper mp/(m-2) < 2d/(d+1-2sigma)", v, Rational(2) * d / (d + kOne - Rational(2) * sg));
  } else {
    L.rels.push_back({"rec3 lower mp/(m-2) > 2", false, -1.0, true});
    L.rels.push_back({"rec3 upper mp/(m-2) < 2d/(d+1-2sigma)", false, -1.0, true});
  }
  return L.rels;
}

std::vector<Relation> check_decay(const IndexSystem& sys) {
  if (!sys.decay) return {};
  const auto& e = *sys.decay;
  const Rational sg = sys.sigma, p = sys.p, d(sys.d);
  RelationList L;
  L.lt("decay s > 0", kZero, e.s);
  L.lt("decay r > 0", kZero, e.r);
  L.lt("beta < 1", e.beta, kOne);
  L.le("decay regularity s + tau <= sigma", e.s + e.tau, sg);
  L.eq("1D Sobolev tau = (beta - 1/2)_+", e.tau, positive_part(e.beta - kHalf));
  L.eq("radial scaling beta + s = d/2 - d(1-beta)", e.beta + e.s, d / 2 - d * (kOne - e.beta));
  L.eq("(2+p) beta + 1 = 2 + r", (Rational(2) + p) * e.beta + kOne, Rational(2) + e.r);
  L.lt("beta < 1/2 + (1/2+sigma)/d", e.beta, kHalf + (kHalf + sg) / d);
  return L.rels;
}

std::vector<Relation> check_scattering(const IndexSystem& sys) {
  if (!sys.scattering) return {};
  const auto& e = *sys.scattering;
  const Rational sg = sys.sigma, p = sys.p, d(sys.d), two(2);
  RelationList L;
  L.lt("scattering delta > 0", kZero, e.delta);
  L.le("scattering regularity s + 1/2 + delta <= sigma", e.s + kHalf + e.delta, sg);
  L.lt("theta > 0", kZero, e.theta);
  L.le("theta <= 1", e.theta, kOne);
  L.range("1/q_theta", e.q_inv, kHalf);
  L.range("1/r_theta", e.r_inv, kHalf);
  L.range("1/l_theta", e.l_inv, kHalf);
  L.range("1/m_theta", e.m_inv, kHalf);
  L.range("1/qt_theta", e.qt_inv, kOne);
  L.range("1/rt_theta", e.rt_inv, kOne);
  L.eq("(q_theta,r_theta) admissible with regularity s", two * sg * e.q_inv + d * e.r_inv, d / 2 - e.s);
  L.eq("theta dual relation", two * sg * e.q_inv + d * e.rt_inv + two * sg * e.qt_inv + d * e.r_inv, d);
  L.eq("theta Holder time", (kOne - e.qt_inv) / (p + kOne), e.theta * e.q_inv);
  L.eq("theta Holder space", (kOne - e.rt_inv) / (p + kOne),
       e.theta * e.r_inv + two * (kOne - e.theta) / (p * d));
  L.eq("(l,m) theta sigma-admissible", two * sg * e.l_inv + d * e.m_inv, d / 2);
  L.eq("theta space 1/m' = 1/m + p/r_theta", kOne - e.m_inv, e.m_inv + p * e.r_inv);
  L.eq("theta time 1/l' = 1/l + p/q_theta", kOne - e.l_inv, e.l_inv + p * e.q_inv);
  return L.rels;
}

std::vector<Relation> check_all(const IndexSystem& sys) {
  auto all = check_lwp(sys);
  for (auto&& v : {check_decay(sys), check_scattering(sys)}) all.insert(all.end(), v.begin(), v.end());
  return all;
}

bool all_ok(std::span<const Relation> rels) {
  return std::all_of(rels.begin(), rels.end(), [](const Relation& r) { return r.ok; });
}

// ---------------------------------------------------------------------------
// Solver

namespace {

double strict_margin(const std::vector<Relation>& rels) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& r : rels)
    if (r.strict) m = std::min(m, r.slack);
  return m;
}

const Relation* first_failure(const std::vector<Relation>& rels) {
  for (const auto& r : rels)
    if (!r.ok) return &r;
  return nullptr;
}

LwpExponents lwp_candidate(Rational sg, Rational p, int d, Rational s, Rational r_inv) {
  const Rational D(d), two(2);
  LwpExponents e;
  e.s = s;
  e.delta = (sg - kHalf - s) / two;
  e.r_inv = r_inv;
  e.q_inv = (D / two - s - D * r_inv) / (two * sg);
  e.rt_inv = kOne - (p + kOne) * r_inv;
  e.qt_inv = (D / two + s - D * e.rt_inv) / (two * sg);
  e.m_inv = (kOne - p * r_inv) / two;
  e.l_inv = (D / two - D * e.m_inv) / (two * sg);
  return e;
}

std::optional<DecayExponents> solve_decay(Rational sg, Rational p, int d, int K,
                                          std::vector<std::string>& notes) {
  const Rational D(d);
  std::optional<DecayExponents> best;
  double best_margin = -1.0;
  IndexSystem probe;
  probe.sigma = sg;
  probe.p = p;
  probe.d = d;
  for (int i = 1; i < K; ++i) {
    DecayExponents e;
    e.beta = Rational(i, K);
    e.s = (D - kOne) * e.beta - D / 2;
    e.tau = positive_part(e.beta - kHalf);
    e.r = (Rational(2) + p) * e.beta - kOne;
    probe.decay = e;
    const auto rels = check_decay(probe);
    if (!all_ok(rels)) continue;
    const double m = strict_margin(rels);
    if (m > best_margin) {
      best_margin = m;
      best = e;
    }
  }
  if (!best) {
    notes.push_back("decay block infeasible on the beta lattice");
    return best;
  }
  // Weighted radial embedding |x|^beta f in L^{1/(1-beta)} from Hdot^s: needs
  // beta > -d(1-beta), 0 <= 1/2 - (1-beta) <= s, 0 < s < d.
  auto& e = *best;
  const Rational gap = kHalf - (kOne - e.beta);
  const bool c1 = e.beta > -D * (kOne - e.beta);
  const bool c2 = gap >= kZero && gap <= e.s;
  const bool c3 = e.s > kZero && e.s < D;
  e.radial_lemma_ok = c1 && c2 && c3;
  if (!e.radial_lemma_ok) {
    std::ostringstream os;
    os << "radial embedding hypotheses fail at beta=" << e.beta.str() << ": need 0 <= beta - 1/2 <= s = "
       << e.s.str() << " (beta - 1/2 = " << gap.str() << ")";
    e.radial_note = os.str();
    notes.push_back(e.radial_note);
  }
  return best;
}

std::optional<ScatteringExponents> solve_scattering(Rational sg, Rational p, int d, int K,
                                                    std::vector<std::string>& notes) {
  const Rational D(d), two(2);
  ScatteringExponents base;
  // Admissibility of (l, m) with both Holder equalities forces s to the
  // scaling-critical value d/2 - 2 sigma / p; theta = 1 then solves the dual
  // relation (for sigma = 1 every theta does).
  base.s = D / two - two * sg / p;
  base.delta = (sg - kHalf - base.s) / two;
  base.theta = kOne;
  std::optional<ScatteringExponents> best;
  double best_margin = -std::numeric_limits<double>::infinity();
  IndexSystem probe;
  probe.sigma = sg;
  probe.p = p;
  probe.d = d;
  for (int i = 0; i <= K / 2; ++i) {
    ScatteringExponents e = base;
    e.q_inv = Rational(i, K);
    e.r_inv = (two * sg / p - two * sg * e.q_inv) / D;
    e.qt_inv = kOne - (p + kOne) * e.theta * e.q_inv;
    e.rt_inv = kOne - (p + kOne) * (e.theta * e.r_inv + two * (kOne - e.theta) / (p * D));
    e.m_inv = (kOne - p * e.r_inv) / two;
    e.l_inv = (kOne - p * e.q_inv) / two;
    probe.scattering = e;
    const auto rels = check_scattering(probe);
    if (!all_ok(rels)) continue;
    // Prefer interior exponents: distance of the reciprocals from their bounds.
    double m = std::numeric_limits<double>::infinity();
    for (Rational v : {e.q_inv, e.r_inv, e.l_inv, e.m_inv})
      m = std::min({m, v.value(), 0.5 - v.value()});
    if (m > best_margin) {
      best_margin = m;
      best = e;
    }
  }
  if (!best) notes.push_back("global space-time block infeasible on the 1/q_theta lattice");
  return best;
}

}  // namespace

IndexSolution solve_index_system(double sigma, int d, double p, int lattice) {
  if (!(sigma > 0.5)) throw std::invalid_argument("solve_index_system: sigma must exceed 1/2");
  if (!(sigma <= 1.0)) throw std::invalid_argument("solve_index_system: sigma must not exceed 1");
  if (d < 1) throw std::invalid_argument("solve_index_system: d must be >= 1");
  if (lattice < 4 || lattice % 2 != 0) throw std::invalid_argument("solve_index_system: lattice must be even and >= 4");
  ModelParams mp;
  mp.sigma = sigma;
  mp.p = p;
  mp.d = d;
  if (!mp.subcritical_window())
    throw std::invalid_argument("solve_index_system: p outside the subcritical window");

  const int K = lattice;
  const Rational sg = Rational::from_double(sigma), pr = Rational::from_double(p);
  IndexSolution sol;
  sol.lattice = K;
  IndexSystem sys;
  sys.sigma = sg;
  sys.p = pr;
  sys.d = d;

  std::optional<LwpExponents> best;
  double best_margin = -1.0;
  for (int i = 1; i < K; ++i) {
    const Rational s(i, K);
    if (!(s + kHalf < sg)) break;
    for (int j = 1; j <= K / 2; ++j) {
      sys.lwp = lwp_candidate(sg, pr, d, s, Rational(j, K));
      const auto rels = check_lwp(sys);
      if (const Relation* f = first_failure(rels)) {
        ++sol.rejections[f->name];
        continue;
      }
      const double m = strict_margin(rels);
      if (m > best_margin) {
        best_margin = m;
        best = sys.lwp;
      }
    }
  }
  if (!best) {
    std::ostringstream os;
    os << "no point of the 1/" << K << " lattice in (s, 1/r) satisfies the local system;";
    for (const auto& [name, count] : sol.rejections) os << " [" << name << "]: " << count;
    const Rational bound = (Rational(d) - kOne + Rational(2) * sg) / (Rational(d) + kOne - Rational(2) * sg);
    if (pr >= bound)
      os << "; res1 needs r >= p+1 while rec3 needs r < 2d/(d+1-2sigma), i.e. p < " << bound.str();
    sol.certificate = os.str();
    return sol;
  }
  sys.lwp = *best;
  sys.decay = solve_decay(sg, pr, d, K, sys.notes);
  sys.scattering = solve_scattering(sg, pr, d, K, sys.notes);
  sol.system = std::move(sys);
  return sol;
}

void write_index_system_json(std::ostream& os, const IndexSystem& sys) {
  using nlohmann::ordered_json;
  auto q = [](Rational r) { return ordered_json{{"exact", r.str()}, {"value", r.value()}}; };
  ordered_json j;
  j["sigma"] = q(sys.sigma);
  j["p"] = q(sys.p);
  j["d"] = sys.d;
  const auto& e = sys.lwp;
  j["lwp"] = {{"s", q(e.s)},       {"delta", q(e.delta)}, {"q_inv", q(e.q_inv)}, {"r_inv", q(e.r_inv)},
              {"qt_inv", q(e.qt_inv)}, {"rt_inv", q(e.rt_inv)}, {"l_inv", q(e.l_inv)}, {"m_inv", q(e.m_inv)}};
  if (sys.decay) {
    const auto& k = *sys.decay;
    j["decay"] = {{"beta", q(k.beta)}, {"tau", q(k.tau)}, {"s", q(k.s)}, {"r", q(k.r)},
                  {"radial_lemma_ok", k.radial_lemma_ok}};
  } else {
    j["decay"] = nullptr;
  }
  if (sys.scattering) {
    const auto& k = *sys.scattering;
    j["scattering"] = {{"s", q(k.s)},         {"delta", q(k.delta)},   {"theta", q(k.theta)},
                       {"q_inv", q(k.q_inv)}, {"r_inv", q(k.r_inv)},   {"qt_inv", q(k.qt_inv)},
                       {"rt_inv", q(k.rt_inv)}, {"l_inv", q(k.l_inv)}, {"m_inv", q(k.m_inv)}};
  } else {
    j["scattering"] = nullptr;
  }
  ordered_json rels = ordered_json::array();
  for (const auto& r : check_all(sys)) rels.push_back({{"name", r.name}, {"ok", r.ok}, {"slack", r.slack}});
  j["relations"] = rels;
  j["notes"] = sys.notes;
  os << j.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Space-time norms

namespace {

double inv_to_exp(Rational v) { return v == kZero ? kInf : 1.0 / v.value(); }

}  // namespace

ZtExponents ZtExponents::from_system(const IndexSystem& sys) {
  ZtExponents ex;
  ex.sigma = sys.sigma.value();
  ex.q = inv_to_exp(sys.lwp.q_inv);
  ex.r = inv_to_exp(sys.lwp.r_inv);
  ex.delta = sys.lwp.delta.value();
  ex.l = inv_to_exp(sys.lwp.l_inv);
  ex.m = inv_to_exp(sys.lwp.m_inv);
  return ex;
}

ZtNorms zt_norms(std::span<const Field> snapshots, std::span<const double> times,
                 const ZtExponents& ex, double T) {
  if (snapshots.size() != times.size() || snapshots.empty())
    throw std::invalid_argument("zt_norms: snapshot/time mismatch");
  std::size_t count = 0;
  while (count < times.size() && times[count] <= T * (1.0 + 1e-12) + 1e-300) ++count;
  if (count == 0) throw std::invalid_argument("zt_norms: no samples in [0, T]");
  const auto snaps = snapshots.first(count);
  const auto ts = times.first(count);

  NormSpec x{ex.q, ex.r};
  x.y_kind = NormSpec::YKind::sobolev;
  x.y_order = 0.5 + ex.delta;
  NormSpec y{ex.l, ex.m};
  NormSpec yx = y, yy = y;
  yx.pre = NormSpec::Pre::grad_x;
  yx.pre_order = ex.sigma;
  yy.pre = NormSpec::Pre::grad_y;
  yy.pre_order = ex.sigma;

  ZtNorms z;
  z.X = mixed_norm(snaps, ts, x);
  const double base = mixed_norm(snaps, ts, y);
  z.Y1 = base + mixed_norm(snaps, ts, yx);
  z.Y2 = base + mixed_norm(snaps, ts, yy);
  z.Z = z.X + z.Y1 + z.Y2;
  return z;
}

ZtNorms zt_norms(const Trajectory& traj, const ZtExponents& ex, double T) {
  return zt_norms(traj.snapshots, traj.times, ex, T);
}

// ---------------------------------------------------------------------------
// Picard

namespace {

std::vector<double> lattice_times(double T, double h) {
  if (!(T > 0.0) || !(h > 0.0)) throw std::invalid_argument("picard: T and dt must be positive");
  const double steps = T / h;
  const long n = std::lround(steps);
  if (n < 1 || std::abs(steps - static_cast<double>(n)) > 1e-9 * steps)
    throw std::invalid_argument("picard: T must be a multiple of dt * stride");
  std::vector<double> ts(static_cast<std::size_t>(n) + 1);
  for (long j = 0; j <= n; ++j) ts[static_cast<std::size_t>(j)] = static_cast<double>(j) * h;
  return ts;
}

std::vector<Field> free_lattice(const Field& u0, const Multiplier& mult, const std::vector<double>& ts) {
  const Field u0h = to_space(u0, Space::spectral);
  std::vector<Field> out;
  out.reserve(ts.size());
  for (double t : ts) out.push_back(to_space(linear_propagate(u0h, mult, t), Space::physical));
  return out;
}

std::vector<Field> differences(const std::vector<Field>& a, const std::vector<Field>& b) {
  std::vector<Field> out;
  out.reserve(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) out.push_back(a[j] - b[j]);
  return out;
}

}  // namespace

PicardResult picard_iterate(const Field& u0, const ModelParams& params, const PicardOptions& opts) {
  params.validate();
  opts.metric.validate();
  if (opts.stride < 1 || opts.iterations < 1 || opts.divergence_run < 1)
    throw std::invalid_argument("picard: stride, iterations and divergence_run must be >= 1");
  const double size = sobolev_norm(u0, params.sigma);
  if (size > opts.small_data_threshold)
    throw std::invalid_argument("picard: ||u0||_{H^sigma} = " + format_double(size) +
                                " exceeds the small-data threshold " +
                                format_double(opts.small_data_threshold));

  PicardResult res;
  res.times = lattice_times(opts.T, opts.dt * opts.stride);
  const Multiplier mult(u0.grid_ptr(), params.sigma);
  std::vector<Field> cur = free_lattice(u0, mult, res.times);
  double prev_distance = 0.0;
  int above_one = 0;
  for (int k = 0; k < opts.iterations; ++k) {
    std::vector<Field> next = duhamel_lattice(u0, cur, res.times, params, mult);
    PicardStep step;
    step.k = k;
    step.distance = mixed_norm(differences(next, cur), res.times, opts.metric);
    step.ratio = prev_distance > 0.0 ? step.distance / prev_distance : 0.0;
    if (opts.zt) step.z = zt_norms(next, res.times, *opts.zt, opts.T);
    const double scale = mixed_norm(next, res.times, opts.metric);
    cur = std::move(next);
    res.steps.push_back(step);
    above_one = (prev_distance > 0.0 && step.ratio > 1.0) ? above_one + 1 : 0;
    prev_distance = step.distance;
    if (step.distance <= opts.stop_tolerance * scale) {
      res.converged = true;
      res.message = "converged after " + std::to_string(k + 1) + " applications";
      break;
    }
    if (above_one >= opts.divergence_run) {
      res.diverged = true;
      std::ostringstream os;
      os << "diverged: ratios";
      for (std::size_t i = res.steps.size() - static_cast<std::size_t>(above_one); i < res.steps.size(); ++i)
        os << ' ' << format_double(res.steps[i].ratio);
      os << " exceed 1";
      res.message = os.str();
      break;
    }
  }
  if (!res.converged && !res.diverged)
    res.message = "iteration budget exhausted at distance " + format_double(res.steps.back().distance);
  std::vector<double> ks, logs;
  const double floor = 1e-12 * res.steps.front().distance;
  for (const auto& s : res.steps)
    if (s.distance > 0.0 && s.distance > floor) {
      ks.push_back(s.k);
      logs.push_back(std::log(s.distance));
    }
  if (ks.size() >= 2) {
    const auto fit = fit_line(ks, logs);
    res.geometric_rate = std::exp(fit.slope);
    for (std::size_t i = 0; i < ks.size(); ++i)
      res.max_log_residual =
          std::max(res.max_log_residual, std::abs(logs[i] - fit.intercept - fit.slope * ks[i]));
  }
  res.iterate = std::move(cur);
  return res;
}

void write_picard_jsonl(std::ostream& os, const PicardResult& res) {
  for (const auto& s : res.steps) {
    nlohmann::ordered_json j;
    j["k"] = s.k;
    j["rho"] = s.ratio;
    j["distance"] = s.distance;
    if (s.z) {
      j["X"] = s.z->X;
      j["Y1"] = s.z->Y1;
      j["Y2"] = s.z->Y2;
      j["Z"] = s.z->Z;
    }
    os << j.dump() << '\n';
  }
}

TimeGainFit measure_time_gain(const Field& u0, const ModelParams& params,
                              std::span<const double> Ts, double dt, const NormSpec& metric) {
  params.validate();
  if (Ts.size() < 2) throw std::invalid_argument("measure_time_gain: need >= 2 horizons");
  const Multiplier mult(u0.grid_ptr(), params.sigma);
  TimeGainFit fit;
  std::vector<double> lx, ly;
  for (double T : Ts) {
    const auto ts = lattice_times(T, dt);
    const auto lin = free_lattice(u0, mult, ts);
    const auto phi = duhamel_lattice(u0, lin, ts, params, mult);
    const double nl = mixed_norm(differences(phi, lin), ts, metric);
    const double base = mixed_norm(lin, ts, metric);
    const double ratio = nl / std::pow(base, params.p + 1.0);
    fit.T.push_back(T);
    fit.ratio.push_back(ratio);
    lx.push_back(std::log(T));
    ly.push_back(std::log(ratio));
  }
  fit.exponent = fit_line(lx, ly).slope;
  return fit;
}

}  // namespace wgnls
