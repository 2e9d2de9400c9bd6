#include <algorithm>
#include <cmath>
#include <numbers>

#include "qmkdv/error.hpp"
#include "qmkdv/parallel.hpp"
#include "studies.hpp"

namespace qmkdv::studies {

CoefficientSpec coefficient_from(const Config& cfg) {
  return CoefficientSpec::from_name(cfg.get_string("coeff.family", "linear"), cfg.get_double("coeff.a", 1.0),
                                    cfg.get_double("coeff.b", 0.0), cfg.get_double("coeff.c", 0.0));
}

BootstrapConstants constants_from(const Config& cfg) {
  BootstrapConstants k;
  k.delta = cfg.get_double("constants.delta", k.delta);
  k.p0 = cfg.get_double("constants.p0", k.p0);
  k.p1 = cfg.get_double("constants.p1", k.p1);
  k.gamma_l = cfg.get_double("constants.gamma_l", k.gamma_l);
  k.gamma_h = cfg.get_double("constants.gamma_h", k.gamma_h);
  k.s = cfg.get_double("constants.s", k.s);
  k.decay_exponent = cfg.get_double("constants.decay_exponent", k.decay_exponent);
  if (k.s < 3.0 || k.s > 14.0) throw Error(ErrorKind::ConfigError, "constants.s must lie in [3, 14]");
  k.validate();
  return k;
}

SimConfig sim_config_from(const Config& cfg, const SimConfig& fallback) {
  SimConfig s = fallback;
  const long n = cfg.get_long("grid.n", static_cast<long>(fallback.grid.n()));
  if (n <= 0) throw Error(ErrorKind::ConfigError, "grid.n must be positive");
  s.grid = GridSpec(static_cast<std::size_t>(n), cfg.get_double("grid.L", fallback.grid.length()));
  if (cfg.has("coeff.family") || cfg.has("coeff.a") || cfg.has("coeff.b") || cfg.has("coeff.c")) {
    s.coeff = coefficient_from(cfg);
  }
  s.init.amplitude = cfg.get_double("init.amplitude", fallback.init.amplitude);
  s.init.width = cfg.get_double("init.width", fallback.init.width);
  s.init.center = cfg.get_double("init.center", fallback.init.center);
  s.init.wavenumber = cfg.get_double("init.wavenumber", fallback.init.wavenumber);
  s.init.phase = cfg.get_double("init.phase", fallback.init.phase);
  s.init.snapshot_path = cfg.get_string("init.snapshot", fallback.init.snapshot_path);
  if (!(s.init.width > 0.0)) throw Error(ErrorKind::ConfigError, "init.width must be positive");
  s.t_start = cfg.get_double("time.t_start", fallback.t_start);
  s.t_end = cfg.get_double("time.t_end", fallback.t_end);
  s.dt_init = cfg.get_double("time.dt_init", fallback.dt_init);
  s.dt_max = cfg.get_double("time.dt_max", fallback.dt_max);
  s.tolerance = cfg.get_double("time.tolerance", fallback.tolerance);
  s.monitor_every = cfg.get_double("time.monitor_every", fallback.monitor_every);
  s.snapshot_every = cfg.get_double("time.snapshot_every", fallback.snapshot_every);
  s.pad_factor = static_cast<int>(cfg.get_long("grid.pad_factor", fallback.pad_factor));
  s.validate();
  return s;
}

NonlinearOptions default_nonlinear_options() {
  NonlinearOptions o;
  o.sim.grid = GridSpec(16384, 16384.0);
  o.sim.coeff = CoefficientSpec::linear(1.0);
  o.sim.init.amplitude = 0.02;
  o.sim.init.width = 4.0;
  o.sim.init.wavenumber = 1.0;
  o.sim.init.phase = -0.5 * std::numbers::pi;
  o.sim.t_end = 512.0;
  o.sim.tolerance = 1e-8;
  o.sim.monitor_every = 4.0;
  return o;
}

SimConfig default_conservation_config() {
  SimConfig s;
  s.grid = GridSpec(4096, 400.0);
  s.init.amplitude = 0.01;
  s.init.width = 1.0;
  s.t_end = 200.0;
  s.tolerance = 1e-8;
  s.monitor_every = 5.0;
  return s;
}

SimConfig default_order_config() {
  SimConfig s;
  s.grid = GridSpec(128, 40.0);
  s.init.amplitude = 0.3;
  // Width 3 keeps the data spectrum where dt xi^3 is small at dt = 0.02;
  // narrower data shows pre-asymptotic rates above 5.
  s.init.width = 3.0;
  s.t_end = 1.0;
  return s;
}

ConservationSummary conservation_run(const SimConfig& cfg, const RunCallbacks& extra) {
  RunResult res = run(cfg, extra);
  double mass_drift = 0.0;
  double l2_drift = 0.0;
  double ham_drift = 0.0;
  const auto& m0 = res.monitors.front();
  for (const auto& m : res.monitors) {
    mass_drift = std::max(mass_drift, std::abs(m.mass - m0.mass));
    if (m0.l2 > 0.0) l2_drift = std::max(l2_drift, std::abs(m.l2 - m0.l2) / m0.l2);
    if (m0.hamiltonian != 0.0) {
      ham_drift = std::max(ham_drift, std::abs(m.hamiltonian - m0.hamiltonian) / std::abs(m0.hamiltonian));
    }
  }
  const long steps = res.final_state.steps;
  const long rejected = res.final_state.rejected;
  return ConservationSummary{mass_drift, l2_drift, ham_drift, steps, rejected, std::move(res.monitors),
                             std::move(res.final_state)};
}

OrderStudy order_study(const SimConfig& cfg, const std::vector<double>& dts, double t_end) {
  if (dts.size() != 3) throw Error(ErrorKind::ConfigError, "the order study uses exactly three dt levels");
  OrderStudy out;
  out.dts = dts;
  const SpectralField phi0 = make_initial_field(cfg);
  std::vector<SpectralField> finals;
  for (double dt : dts) finals.push_back(integrate_fixed(phi0, cfg, dt, t_end));
  for (std::size_t i = 0; i + 1 < finals.size(); ++i) out.differences.push_back(spectral_l2(finals[i] - finals[i + 1]));
  out.observed_order = std::log(out.differences[0] / out.differences[1]) / std::log(dts[0] / dts[1]);

  SimConfig lin = cfg;
  lin.linear_only = true;
  lin.t_end = t_end;
  lin.monitor_every = t_end;
  const auto res = run(lin);
  const SpectralField exact = free_evolve(phi0, t_end);
  out.linear_error = norm(res.final_state.phi - exact, NormKind::L2);
  return out;
}

namespace {

std::vector<double> geometric(double lo, double hi, int count) {
  std::vector<double> t;
  for (int i = 0; i < count; ++i) t.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1)));
  return t;
}

}  // namespace

LinearDecayStudy linear_decay_study(const LinearDecayOptions& opt) {
  if (opt.samples < 8) throw Error(ErrorKind::InsufficientData, "linear decay needs at least 8 times");
  const double w = opt.width;
  // The mean is kept: the zero mode carries the t^{-1/3} Airy core.
  const SpectralField h = SpectralField::from_function(opt.grid, [w](double x) { return std::exp(-x * x / (w * w)); });
  LinearDecayStudy out;
  out.t = geometric(opt.t_lo, opt.t_hi, opt.samples);
  out.sup.resize(out.t.size());
  out.sup_dx.resize(out.t.size());
  out.sup_dx_env.resize(out.t.size());
  std::vector<std::vector<DispersiveSample>> ratio_slots(out.t.size());
  parallel_for(out.t.size(), [&](std::size_t i) {
    const double t = out.t[i];
    const SpectralField phi = free_evolve(h, t);
    out.sup[i] = sup_norm(phi);
    const auto dx = derivative(phi, 1).to_physical();
    const double t13 = std::cbrt(t);
    double plain = 0.0;
    double env = 0.0;
    for (std::size_t m = 0; m < dx.size(); ++m) {
      plain = std::max(plain, std::abs(dx[m]));
      env = std::max(env, std::abs(dx[m]) * std::pow(1.0 + std::abs(opt.grid.x(m)) / t13, -0.25));
    }
    out.sup_dx[i] = plain;
    out.sup_dx_env[i] = env;
    for (double beta : opt.betas) ratio_slots[i].push_back({t, beta, 0, dispersive_ratio(h, t, beta, 0)});
  });
  std::vector<std::pair<double, double>> s0, s1, s2;
  for (std::size_t i = 0; i < out.t.size(); ++i) {
    s0.emplace_back(out.t[i], out.sup[i]);
    s1.emplace_back(out.t[i], out.sup_dx[i]);
    s2.emplace_back(out.t[i], out.sup_dx_env[i]);
    for (const auto& r : ratio_slots[i]) out.ratios.push_back(r);
  }
  out.linf = decay_fit(s0, opt.t_lo, opt.t_hi);
  out.dx_plain = decay_fit(s1, opt.t_lo, opt.t_hi);
  out.dx_envelope = decay_fit(s2, opt.t_lo, opt.t_hi);
  out.ratio_min = std::numeric_limits<double>::infinity();
  for (const auto& r : out.ratios) {
    out.ratio_min = std::min(out.ratio_min, r.ratio);
    out.ratio_max = std::max(out.ratio_max, r.ratio);
  }
  return out;
}

namespace {

NonlinearSample sample_state(const SpectralField& phi, double t, const SimConfig& cfg, const BootstrapConstants& k) {
  NonlinearSample s;
  s.t = t;
  const auto u = phi.to_physical();
  const auto u1 = derivative(phi, 1).to_physical();
  const auto u2 = derivative(phi, 2).to_physical();
  const auto u3 = derivative(phi, 3).to_physical();
  for (std::size_t m = 0; m < u.size(); ++m) {
    s.sup_dx = std::max(s.sup_dx, std::abs(u1[m]));
    s.sup_dxx = std::max(s.sup_dxx, std::abs(u2[m]));
    const double a = std::abs(u[m]) + std::abs(u1[m]) + std::abs(u2[m]);
    const double b = std::abs(u1[m]) + std::abs(u2[m]) + std::abs(u3[m]);
    s.sup_product = std::max(s.sup_product, a * b);
  }
  const EnergyBreakdown e = energy(phi, t, cfg.coeff, k);
  s.energy = e.total;
  s.energy_weighted = e.total * std::pow(1.0 + t, -2.0 * k.p0);
  s.z_norm = e.z_norm;
  s.hamiltonian = e.hamiltonian;
  s.l2 = norm(phi, NormKind::L2);
  return s;
}

}  // namespace

NonlinearStudy nonlinear_study(const NonlinearOptions& opt) {
  const SimConfig& cfg = opt.sim;
  if (cfg.t_start != 0.0) throw Error(ErrorKind::ConfigError, "the nonlinear study starts at t = 0");
  if (cfg.t_end < std::exp2(opt.max_power)) {
    throw Error(ErrorKind::ConfigError, "time.t_end must reach the last dyadic record time");
  }
  for (double xi : opt.probe_xi) {
    if (frequency_window(cfg.t_end, xi, opt.constants) != 1.0) {
      throw Error(ErrorKind::ConfigError, "probe frequency " + std::to_string(xi) + " leaves the frequency window");
    }
  }
  SimConfig run_cfg = cfg;
  for (int m = 0; m <= opt.max_power; ++m) run_cfg.extra_stops.push_back(std::exp2(m));

  NonlinearStudy out;
  bool probe_started = false;
  auto advance_probe = [&](const SimState& st) {
    if (st.t < 1.0 || !probe_started || st.t <= out.probe.t_last) return;
    const SpectralField h = profile_from_solution(st.phi, st.t);
    theta_accumulate(out.probe, h, out.probe.t_last, st.t);
  };
  RunCallbacks cb;
  cb.on_stop = [&](const SimState& st) {
    SpectralField h = profile_from_solution(st.phi, st.t);
    if (!probe_started) {
      h.set_time(st.t);
      out.probe = make_probe(h, opt.probe_xi, cfg.coeff.alpha2());
      probe_started = true;
    } else {
      advance_probe(st);
    }
    record(out.probe, h);
  };
  cb.on_monitor = [&](const SimState& st, const MonitorRecord&) {
    advance_probe(st);
    out.samples.push_back(sample_state(st.phi, st.t, cfg, opt.constants));
  };
  const RunResult res = run(run_cfg, cb);
  out.steps = res.final_state.steps;
  out.rejected = res.final_state.rejected;

  std::vector<std::pair<double, double>> dx, dxx, prod;
  const auto& first = out.samples.front();
  for (const auto& s : out.samples) {
    dx.emplace_back(s.t, s.sup_dx);
    dxx.emplace_back(s.t, s.sup_dxx);
    prod.emplace_back(s.t, s.sup_product);
    const double re = s.energy_weighted / first.energy_weighted;
    const double rz = s.z_norm / first.z_norm;
    out.energy_factor = std::max({out.energy_factor, re, 1.0 / re});
    out.z_factor = std::max({out.z_factor, rz, 1.0 / rz});
  }
  out.dx = decay_fit(dx, opt.t_lo, opt.t_hi);
  out.dxx = decay_fit(dxx, opt.t_lo, opt.t_hi);
  out.product = decay_fit(prod, opt.t_lo, opt.t_hi);
  out.scattering = scattering_monitor(out.probe);
  return out;
}

ResonanceStudy resonance_study(const ResonanceOptions& opt) {
  if (opt.j_max < opt.j_min) throw Error(ErrorKind::ConfigError, "resonance.j_max must be >= resonance.j_min");
  ResonanceStudy out;
  for (DyadicSymbol which : {DyadicSymbol::T1, DyadicSymbol::dT1}) {
    for (int j = opt.j_min; j <= opt.j_max; ++j) out.rows.push_back({j, j, j, which, {}});
  }
  parallel_for(out.rows.size(), [&](std::size_t i) {
    auto& r = out.rows[i];
    r.bound = dyadic_symbol_bound(r.j1, r.j2, r.j3, opt.alpha2, r.which, opt.resolution);
  });
  auto spread = [&](DyadicSymbol which) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (const auto& r : out.rows) {
      if (r.which != which) continue;
      lo = std::min(lo, r.bound.ratio);
      hi = std::max(hi, r.bound.ratio);
    }
    return hi / lo;
  };
  out.spread_T1 = spread(DyadicSymbol::T1);
  out.spread_dT1 = spread(DyadicSymbol::dT1);
  for (const auto& r : out.rows) out.max_rel_change = std::max(out.max_rel_change, r.bound.rel_change);

  // With alpha2 = 0 the symbol is -psi_0 x psi_0 x psi_0, a pure tensor product.
  const int n = opt.resolution.samples_per_axis;
  const double tensor = s_infty_norm(dyadic_symbol(0, 0, 0, 0.0, DyadicSymbol::T1, n, opt.resolution.box_factor));
  const double period = 2.0 * std::numbers::pi * n / (opt.resolution.box_factor * 2.0 * 1.6);
  SymbolGrid line{{GridSpec(static_cast<std::size_t>(n), period)}, {}};
  for (long j = -n / 2; j < n / 2; ++j) line.values.push_back(psi_k(line.axes[0].dxi() * j, 0));
  const double one = s_infty_norm(line);
  out.factorization_rel_error = std::abs(tensor - one * one * one) / (one * one * one);
  return out;
}

OscillatoryStudy oscillatory_study(const OscillatoryOptions& opt) {
  OscillatoryStudy out;
  out.sweep.resize(opt.B.size());
  out.gaussian.resize(opt.B.size());
  parallel_for(opt.B.size(), [&](std::size_t i) {
    out.sweep[i] = two_pi_identity(opt.B[i]);
    out.gaussian[i] = gaussian_self_test(opt.B[i]);
  });
  for (const auto& r : out.sweep) out.max_scaled_error = std::max(out.max_scaled_error, r.error * std::sqrt(r.parameter));
  std::vector<double> t = opt.t;
  if (t.empty()) {
    for (int k = 4; k <= 12; ++k) t.push_back(std::exp2(0.5 * k));
  }
  out.separated = nonresonant_decay_study(t, DecayRegion::Separated, opt.n);
  out.overlap = nonresonant_decay_study(t, DecayRegion::ResonantOverlap, opt.n);
  return out;
}

}  // namespace qmkdv::studies
