#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "cli.hpp"
#include "wgnls/diagnostics.hpp"
#include "wgnls/error.hpp"
#include "wgnls/evolve.hpp"
#include "wgnls/strichartz.hpp"
#include "wgnls/wellposedness.hpp"

namespace wgnls::cli {

namespace fs = std::filesystem;

namespace {

double num(const Json& v) {
  if (v.is_string()) return kInf;
  return v.get<double>();
}

std::vector<double> nums(const Json& v) { return v.get<std::vector<double>>(); }

GridPtr grid_from(const Json& cfg) {
  const Json& g = cfg["grid"];
  return make_grid(g["d"].get<int>(), g["n"].get<int>(), g["L"].get<double>(), g["nx"].get<int>(),
                   g["ny"].get<int>());
}

ModelParams model_from(const Json& cfg) {
  const Json& m = cfg["model"];
  ModelParams mp{m["sigma"].get<double>(), m["mu"].get<int>(), m["p"].get<double>(), cfg["grid"]["d"].get<int>(),
                 cfg["grid"]["n"].get<int>()};
  mp.validate();
  return mp;
}

Field data_from(const Json& cfg, const GridPtr& g) {
  const Json& d = cfg["data"];
  if (d["kind"].get<std::string>() != "gaussian") throw ConfigError("data.kind: only \"gaussian\" is supported");
  const double amp = d["amplitude"].get<double>(), w = d["width"].get<double>(), ym = d["ymod"].get<double>();
  if (!(w > 0.0)) throw ConfigError("data.width: must be positive");
  return sample_function(g, [=](auto x, auto y) {
    double r2 = 0.0;
    for (double v : x) r2 += v * v;
    const double m = y.empty() ? 1.0 : 1.0 + ym * std::cos(y[0]);
    return Complex{amp * m * std::exp(-r2 / (w * w))};
  });
}

EvolveOptions evolve_from(const Json& cfg) {
  const Json& e = cfg["evolve"];
  EvolveOptions o;
  o.T = e["T"].get<double>();
  o.dt = e["dt"].get<double>();
  o.record_stride = e["stride"].get<int>();
  try {
    o.integrator = integrator_from_string(e["integrator"].get<std::string>());
  } catch (const std::invalid_argument&) {
    throw ConfigError("evolve.integrator: unknown integrator " + e["integrator"].get<std::string>());
  }
  o.dealias = e["dealias"].get<bool>();
  o.leak_threshold = e["leak_threshold"].get<double>();
  o.keep = [](int, double) { return false; };
  return o;
}

struct Writer {
  fs::path dir;
  RunOutcome* outcome;
  std::ofstream open(const std::string& name) {
    outcome->files.push_back(name);
    std::ofstream os(dir / name, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + (dir / name).string());
    return os;
  }
};

// Leak warnings and guard aborts of an evolution run.
void note_trajectory(const Json& cfg, const Trajectory& tr, RunOutcome& out, const std::string& label) {
  Json w = Json::array();
  for (const auto& s : tr.warnings) w.push_back(s);
  out.summary["warnings_" + label] = w;
  if (tr.aborted) out.numerical_abort = "blow-up guard: " + tr.abort_reason;
  if (!out.numerical_abort && cfg["evolve"]["abort_on_leak"].get<bool>())
    for (const auto& s : tr.warnings)
      if (s.find("boundary leak") != std::string::npos) out.numerical_abort = "leak breach: " + s;
}

// ---------------------------------------------------------------------------

RunOutcome run_conservation(const Json& cfg, const fs::path& dir) {
  RunOutcome out;
  Writer wr{dir, &out};
  const auto g = grid_from(cfg);
  const auto mp = model_from(cfg);
  const Field u0 = data_from(cfg, g);
  const Multiplier mult(g, mp.sigma);
  const Json& ex = cfg["experiment"];
  const double m0 = mass(u0), e0 = energy(u0, mult, mp);
  RecordOptions ro;
  auto run = [&](double dt, const std::string& file, const std::string& label) {
    EvolveOptions o = evolve_from(cfg);
    o.dt = dt;
    auto os = wr.open(file);
    write_csv_header(os, {});
    double md = 0.0, ed = 0.0;
    o.observer = [&](int, double t, const Field& u) {
      const auto r = diagnose(u, t, mult, mp, ro);
      write_csv_row(os, r, {});
      md = std::max(md, std::abs(r.mass - m0) / m0);
      ed = std::abs(r.energy - e0);
    };
    const auto tr = evolve(u0, mp, o);
    note_trajectory(cfg, tr, out, label);
    return std::pair{md, ed};
  };
  const double dt = cfg["evolve"]["dt"].get<double>();
  const auto [md, ed] = run(dt, "diagnostics.csv", "dt");
  out.summary["mass_drift"] = md;
  out.summary["energy_drift"] = ed;
  bool pass = md <= ex["mass_tolerance"].get<double>();
  if (ex["refine"].get<bool>() && !out.numerical_abort) {
    const auto [md2, ed2] = run(dt / 2, "diagnostics_half_dt.csv", "half_dt");
    const double ratio = ed / ed2;
    out.summary["mass_drift_half_dt"] = md2;
    out.summary["energy_drift_half_dt"] = ed2;
    out.summary["refinement_ratio"] = ratio;
    pass = pass && ratio >= ex["ratio_min"].get<double>() && ratio <= ex["ratio_max"].get<double>();
  }
  out.summary["pass"] = pass;
  return out;
}

WeightSpec weight_from(const std::string& name, const WaveguideGrid& g) {
  if (name == "half_square") return WeightSpec::half_square();
  if (name == "abs_x") return WeightSpec::abs_x_for(g);
  if (name == "linear_x1") return WeightSpec::linear_x1();
  throw ConfigError("experiment.weight: unknown weight " + name);
}

RunOutcome run_morawetz(const Json& cfg, const fs::path& dir) {
  RunOutcome out;
  Writer wr{dir, &out};
  const auto g = grid_from(cfg);
  const auto mp = model_from(cfg);
  const Field u0 = data_from(cfg, g);
  const Json& ex = cfg["experiment"];
  const auto w = weight_from(ex["weight"].get<std::string>(), *g);
  const int checks = ex["checks"].get<int>();
  if (checks < 1) throw ConfigError("experiment.checks: must be >= 1");
  const QuadratureSpec quad{ex["quadrature_tolerance"].get<double>()};
  const double T = cfg["evolve"]["T"].get<double>();
  const int stride = cfg["evolve"]["stride"].get<int>();

  auto identity = std::make_shared<std::ofstream>(wr.open("identity.csv"));
  *identity << "dt,t,action,fd,rhs,residual\n";
  auto inequality = std::make_shared<std::ofstream>(wr.open("inequality.csv"));
  *inequality << "t,spacetime,sup_h_sigma_sq,ratio\n";

  auto run = [&](double dt, bool with_inequality, const std::string& label) {
    EvolveOptions o = evolve_from(cfg);
    o.dt = dt;
    SplitStepper fd_stepper(g, mp);
    MorawetzSpacetime ms(mp.p, mp.sigma, WeightSpec::abs_x_for(*g));
    const long steps_per_check = std::lround(T / checks / dt);
    double worst = 0.0;
    o.observer = [&](int rec, double t, const Field& u) {
      if (with_inequality) {
        ms.add(t, u);
        *inequality << format_double(t) << ',' << format_double(ms.value()) << ','
                    << format_double(ms.sup_energy_norm_sq()) << ',' << format_double(ms.ratio()) << '\n';
      }
      const long step = static_cast<long>(rec) * stride;
      if (step == 0 || steps_per_check == 0 || step % steps_per_check != 0) return;
      Field up = u, um = u;
      fd_stepper.strang(up, dt);
      fd_stepper.strang(um, -dt);
      const double fd = (morawetz_action(up, w) - morawetz_action(um, w)) / (2.0 * dt);
      const double rhs = morawetz_rhs(u, w, mp, quad).total;
      const double res = std::abs(rhs - fd) / std::abs(fd);
      worst = std::max(worst, res);
      *identity << format_double(dt) << ',' << format_double(t) << ',' << format_double(morawetz_action(u, w))
                << ',' << format_double(fd) << ',' << format_double(rhs) << ',' << format_double(res) << '\n';
    };
    const auto tr = evolve(u0, mp, o);
    note_trajectory(cfg, tr, out, label);
    return std::pair{worst, ms};
  };
  const double dt = cfg["evolve"]["dt"].get<double>();
  const auto [r1, ms] = run(dt, true, "dt");
  const double r2 = run(dt / 2, false, "half_dt").first;
  out.summary["max_residual"] = r1;
  out.summary["max_residual_half_dt"] = r2;
  out.summary["residual_decreasing"] = r2 < r1;
  // Ratio at T/2 and T from the running values.
  const auto& ts = ms.times();
  const auto& rs = ms.ratios();
  double half = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i)
    if (ts[i] <= T / 2 + 1e-12) half = rs[i];
  const double full = rs.empty() ? 0.0 : rs.back();
  out.summary["inequality_ratio_half_T"] = half;
  out.summary["inequality_ratio_T"] = full;
  out.summary["inequality_growth"] = half > 0.0 ? full / half - 1.0 : kInf;
  out.summary["pass"] = r1 <= ex["residual_tolerance"].get<double>() && r2 < r1 && half > 0.0 &&
                        full / half - 1.0 <= ex["growth_tolerance"].get<double>();
  return out;
}

RunOutcome run_decay(const Json& cfg, const fs::path& dir) {
  RunOutcome out;
  Writer wr{dir, &out};
  const auto g = grid_from(cfg);
  const auto mp = model_from(cfg);
  const Field u0 = data_from(cfg, g);
  const Json& ex = cfg["experiment"];
  const double q = num(ex["q"]);
  EvolveOptions o = evolve_from(cfg);
  std::vector<double> ts, ns;
  o.observer = [&](int, double t, const Field& u) {
    ts.push_back(t);
    ns.push_back(lebesgue_norm(u, q));
  };
  const auto tr = evolve(u0, mp, o);
  note_trajectory(cfg, tr, out, "run");
  auto os = wr.open("decay.csv");
  os << "t,norm\n";
  for (std::size_t i = 0; i < ts.size(); ++i) os << format_double(ts[i]) << ',' << format_double(ns[i]) << '\n';
  const auto transient = static_cast<std::size_t>(std::floor(ex["transient_fraction"].get<double>() * ts.size()));
  const double frac = ns.size() >= 2 ? decreasing_fraction(ns, transient) : 0.0;
  const double final_ratio = ns.empty() ? 0.0 : ns.back() / ns.front();
  const double rb = decay_r_bound(mp.sigma, mp.d, mp.p);
  out.summary["q"] = std::isinf(q) ? Json("inf") : Json(q);
  out.summary["r_bound"] = rb;
  out.summary["in_theorem"] = q > 2.0 && q <= 2.0 + rb;
  out.summary["decreasing_fraction"] = frac;
  out.summary["final_over_initial"] = final_ratio;
  out.summary["pass"] = frac >= ex["decreasing_min"].get<double>() && final_ratio <= ex["final_ratio_max"].get<double>();
  return out;
}

RunOutcome run_scattering(const Json& cfg, const fs::path& dir) {
  RunOutcome out;
  Writer wr{dir, &out};
  const auto g = grid_from(cfg);
  const auto mp = model_from(cfg);
  const Field u0 = data_from(cfg, g);
  const Json& ex = cfg["experiment"];
  ScatteringTracker tracker(mp.sigma, nums(ex["samples"]), 0.75, ex["leak_cutoff"].get<double>());
  EvolveOptions o = evolve_from(cfg);
  o.observer = [&](int, double t, const Field& u) { tracker.add(t, u); };
  const auto tr = evolve(u0, mp, o);
  note_trajectory(cfg, tr, out, "run");
  const auto res = tracker.result();
  auto os = wr.open("scattering.csv");
  os << "t0,t1,delta\n";
  for (std::size_t i = 0; i < res.deltas.size(); ++i)
    os << format_double(res.times[i]) << ',' << format_double(res.times[i + 1]) << ',' << format_double(res.deltas[i])
       << '\n';
  Json w = Json::array();
  for (const auto& s : res.warnings) w.push_back(s);
  out.summary["tracker_warnings"] = w;
  out.summary["deltas"] = res.deltas;
  out.summary["decreasing"] = res.decreasing();
  out.summary["pass"] = res.deltas.size() >= ex["min_deltas"].get<std::size_t>() && res.decreasing();
  return out;
}

RunOutcome run_strichartz(const Json& cfg, const fs::path& dir) {
  RunOutcome out;
  Writer wr{dir, &out};
  const auto g = grid_from(cfg);
  const Json& ex = cfg["experiment"];
  ScalingOptions o;
  o.Ns = nums(ex["Ns"]);
  o.p = num(ex["p"]);
  o.trials = ex["trials"].get<int>();
  o.time_samples = ex["time_samples"].get<int>();
  o.T = ex["T"].get<double>();
  o.seed = cfg["seed"].get<std::uint64_t>();
  const std::string data = ex["data"].get<std::string>();
  if (data == "box_filling") o.data = DataKind::box_filling;
  else if (data == "localized") o.data = DataKind::localized;
  else throw ConfigError("experiment.data: expected box_filling or localized");
  o.window_width = ex["window_width"].get<double>();
  o.leak_threshold = ex["leak_threshold"].get<double>();
  o.propagator_sign = ex["propagator_sign"].get<int>();
  const auto r = measure_scaling(g, ex["sigma"].get<double>(), o);
  {
    auto os = wr.open("scaling.csv");
    write_scaling_csv(os, r);
  }
  {
    auto os = wr.open("fit.json");
    write_scaling_json(os, r);
  }
  const double lo = r.predicted_slope + ex["band_low"].get<double>();
  const double hi = r.predicted_slope + ex["band_high"].get<double>();
  out.summary["slope"] = r.fit.slope;
  out.summary["predicted_slope"] = r.predicted_slope;
  out.summary["band"] = {lo, hi};
  out.summary["flattest"] = r.flattest;
  out.summary["pass"] = r.fit.slope >= lo && r.fit.slope <= hi && !r.leak_violation;
  if (r.leak_violation) out.numerical_abort = "leak breach: max leak " + format_double(r.max_leak);
  return out;
}

RunOutcome run_bilinear(const Json& cfg, const fs::path& dir) {
  RunOutcome out;
  Writer wr{dir, &out};
  const auto g = grid_from(cfg);
  const Json& ex = cfg["experiment"];
  BilinearOptions o;
  o.Ns = nums(ex["Ns"]);
  o.Ks = nums(ex["Ks"]);
  o.trials = ex["trials"].get<int>();
  o.time_samples = ex["time_samples"].get<int>();
  o.T = ex["T"].get<double>();
  o.seed = cfg["seed"].get<std::uint64_t>();
  const auto r = bilinear_experiment(g, ex["sigma"].get<double>(), o);
  auto os = wr.open("bilinear.csv");
  write_bilinear_csv(os, r);
  out.summary["slope_per_N"] = r.slope_per_N;
  out.summary["s_observed"] = r.s_observed;
  out.summary["slope_spread"] = r.slope_spread;
  out.summary["max_uniformity_deviation"] = r.max_uniformity_deviation;
  out.summary["pass"] = r.max_uniformity_deviation <= ex["uniformity_tolerance"].get<double>();
  return out;
}

RunOutcome run_picard(const Json& cfg, const fs::path& dir) {
  RunOutcome out;
  Writer wr{dir, &out};
  const auto g = grid_from(cfg);
  const auto mp = model_from(cfg);
  const Field u0 = data_from(cfg, g);
  const Json& ex = cfg["experiment"];
  PicardOptions o;
  o.T = ex["T"].get<double>();
  o.dt = ex["dt"].get<double>();
  o.stride = ex["stride"].get<int>();
  o.iterations = ex["iterations"].get<int>();
  o.metric = NormSpec{num(ex["metric_t"]), num(ex["metric_x"])};
  o.small_data_threshold = num(ex["small_data_threshold"]);
  if (ex["zt"].get<bool>()) {
    const auto sol = solve_index_system(mp.sigma, mp.d, mp.p);
    if (!sol.system) throw ConfigError("experiment.zt: no index system for this model: " + sol.certificate);
    o.zt = ZtExponents::from_system(*sol.system);
  }
  const auto r = picard_iterate(u0, mp, o);
  {
    auto os = wr.open("picard.jsonl");
    write_picard_jsonl(os, r);
  }
  out.summary["converged"] = r.converged;
  out.summary["diverged"] = r.diverged;
  out.summary["message"] = r.message;
  out.summary["geometric_rate"] = r.geometric_rate;
  out.summary["max_log_residual"] = r.max_log_residual;
  out.summary["iterations"] = r.steps.size();
  bool below_one = true;
  for (std::size_t k = 1; k < r.steps.size(); ++k) below_one = below_one && r.steps[k].ratio < 1.0;
  out.summary["pass"] = r.converged && below_one;
  return out;
}

RunOutcome run_index_system(const Json& cfg, const fs::path& dir) {
  RunOutcome out;
  Writer wr{dir, &out};
  const Json& ex = cfg["experiment"];
  const auto sol = solve_index_system(ex["sigma"].get<double>(), ex["d"].get<int>(), ex["p"].get<double>(),
                                      ex["lattice"].get<int>());
  out.summary["feasible"] = sol.system.has_value();
  out.summary["certificate"] = sol.certificate;
  Json rej = Json::object();
  for (const auto& [k, v] : sol.rejections) rej[k] = v;
  out.summary["rejections"] = rej;
  if (sol.system) {
    auto os = wr.open("index_system.json");
    write_index_system_json(os, *sol.system);
    out.summary["pass"] = all_ok(check_all(*sol.system));
  } else {
    out.summary["pass"] = false;
  }
  return out;
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

}  // namespace

const std::vector<Scenario>& registry() {
  static const std::vector<Scenario> reg{
      {"conservation", "conservation", "mass and energy drift with dt refinement",
       {"grid", "model", "evolve", "data"},
       {{"refine", KeyKind::boolean, false, true, "rerun at dt/2"},
        {"mass_tolerance", KeyKind::number, false, 1e-12, "relative mass drift limit"},
        {"ratio_min", KeyKind::number, false, 3.5, "lower energy refinement ratio"},
        {"ratio_max", KeyKind::number, false, 4.5, "upper energy refinement ratio"}},
       run_conservation},
      {"morawetz", "morawetz-identity", "Morawetz identity residual and spacetime inequality",
       {"grid", "model", "evolve", "data"},
       {{"weight", KeyKind::string, false, "half_square", "identity weight"},
        {"checks", KeyKind::integer, false, 8, "identity checks over [0, T]"},
        {"quadrature_tolerance", KeyKind::number, false, 1e-10, "resolvent quadrature tolerance"},
        {"residual_tolerance", KeyKind::number, false, 1e-3, "relative identity residual limit"},
        {"growth_tolerance", KeyKind::number, false, 0.2, "inequality ratio growth limit T/2 -> T"}},
       run_morawetz},
      {"decay", "decay", "L^q decay of the defocusing flow",
       {"grid", "model", "evolve", "data"},
       {{"q", KeyKind::extended_number, false, 4.0, "Lebesgue exponent"},
        {"transient_fraction", KeyKind::number, false, 0.1, "records skipped before counting"},
        {"decreasing_min", KeyKind::number, false, 0.9, "required decreasing fraction"},
        {"final_ratio_max", KeyKind::number, false, 0.5, "required final / initial"}},
       run_decay},
      {"scattering", "scattering", "pull-back Cauchy differences",
       {"grid", "model", "evolve", "data"},
       {{"samples", KeyKind::number_list, true, {}, "pull-back times"},
        {"leak_cutoff", KeyKind::number, false, 1e-5, "samples stop above this leak"},
        {"min_deltas", KeyKind::integer, false, 3, "required number of differences"}},
       run_scattering},
      {"strichartz", "strichartz-scaling", "dyadic Strichartz scaling fit",
       {"grid"},
       {{"sigma", KeyKind::number, true, {}, "dispersion order"},
        {"Ns", KeyKind::number_list, false, Json::array({4, 8, 16, 32}), "dyadic scales"},
        {"p", KeyKind::extended_number, false, 0.0, "space-time exponent, 0 for the endpoint"},
        {"trials", KeyKind::integer, false, 16, "trials per scale"},
        {"time_samples", KeyKind::integer, false, 64, "samples on [0, T]"},
        {"T", KeyKind::number, false, 1.0, "time interval length"},
        {"data", KeyKind::string, false, "box_filling", "box_filling or localized"},
        {"window_width", KeyKind::number, false, 2.0, "spatial window for localized data"},
        {"leak_threshold", KeyKind::number, false, 1e-6, "leak limit for localized data"},
        {"propagator_sign", KeyKind::integer, false, 1, "+1 or -1"},
        {"band_low", KeyKind::number, false, -0.15, "lower slope offset"},
        {"band_high", KeyKind::number, false, 0.25, "upper slope offset"}},
       run_strichartz},
      {"bilinear", "bilinear", "bilinear frequency interaction",
       {"grid"},
       {{"sigma", KeyKind::number, true, {}, "dispersion order"},
        {"Ns", KeyKind::number_list, false, Json::array({16, 32}), "high scales"},
        {"Ks", KeyKind::number_list, false, Json::array({1, 2, 4}), "low scales"},
        {"trials", KeyKind::integer, false, 8, "trials per cell"},
        {"time_samples", KeyKind::integer, false, 64, "samples on [0, T]"},
        {"T", KeyKind::number, false, 1.0, "time interval length"},
        {"uniformity_tolerance", KeyKind::number, false, 0.2, "N-doubling variation limit"}},
       run_bilinear},
      {"picard", "picard", "Picard iteration of the Duhamel map",
       {"grid", "model", "data"},
       {{"T", KeyKind::number, true, {}, "time horizon"},
        {"dt", KeyKind::number, true, {}, "lattice step"},
        {"stride", KeyKind::integer, false, 1, "lattice stride"},
        {"iterations", KeyKind::integer, false, 20, "iteration cap"},
        {"metric_t", KeyKind::extended_number, false, 3.0, "time exponent of the metric"},
        {"metric_x", KeyKind::extended_number, false, 3.0, "x exponent of the metric"},
        {"small_data_threshold", KeyKind::extended_number, false, "inf", "H^sigma limit on the data"},
        {"zt", KeyKind::boolean, false, false, "record X, Y1, Y2 norms from the index system"}},
       run_picard},
      {"index-system", "wellposedness", "exact exponent system search",
       {},
       {{"sigma", KeyKind::number, true, {}, "dispersion order"},
        {"d", KeyKind::integer, true, {}, "Euclidean dimension"},
        {"p", KeyKind::number, true, {}, "nonlinearity power"},
        {"lattice", KeyKind::integer, false, 120, "search lattice denominator"}},
       run_index_system},
  };
  return reg;
}

const Scenario& find_scenario(const std::string& name) {
  for (const auto& s : registry())
    if (s.name == name) return s;
  throw ConfigError("scenario: unknown scenario " + name);
}

int run_config(const Json& cfg, const fs::path& out) {
  const Scenario& sc = find_scenario(cfg["scenario"].get<std::string>());
  fs::create_directories(out);
  RunOutcome res;
  try {
    res = sc.run(cfg, out);
  } catch (const NumericalAbort& e) {
    res.numerical_abort = e.what();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (res.numerical_abort) res.summary["numerical_abort"] = *res.numerical_abort;
  {
    std::ofstream os(out / "summary.json", std::ios::binary);
    os << res.summary.dump(2) << '\n';
  }
  res.files.push_back("summary.json");
  Json files = Json::array();
  for (const auto& f : res.files)
    files.push_back({{"path", f}, {"bytes", fs::file_size(out / f)}, {"sha256", sha256_file(out / f)}});
  const int code = res.numerical_abort ? kExitNumerical : kExitOk;
  Json manifest;
  manifest["schema"] = "wgnls-manifest/1";
  manifest["version"] = version();
  manifest["created_utc"] = utc_now();
  manifest["scenario"] = sc.name;
  manifest["exit_code"] = code;
  manifest["config"] = cfg;
  manifest["files"] = files;
  std::ofstream os(out / "manifest.json", std::ios::binary);
  os << manifest.dump(2) << '\n';
  return code;
}

}  // namespace wgnls::cli
