#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>
#include <system_error>

#include "qmkdv/error.hpp"
#include "qmkdv/snapshot.hpp"
#include "report.hpp"

#ifndef QMKDV_VERSION
#define QMKDV_VERSION "unknown"
#endif

namespace qmkdv::studies {

namespace fs = std::filesystem;

namespace {

struct Context {
  const CommandOptions& opt;
  Config cfg;
  std::uint64_t seed = 1;
  BootstrapConstants constants;
  std::optional<GridSpec> grid;
  std::string coefficient = "none";
  std::ostream& log;
};

json metadata(const Context& ctx) {
  json m;
  m["artifact"] = "qmkdv";
  m["version"] = QMKDV_VERSION;
  m["study"] = ctx.opt.study;
  m["seed"] = ctx.seed;
  m["linear_only"] = ctx.opt.linear_only;
  const auto& k = ctx.constants;
  m["constants"] = {{"delta", k.delta}, {"p0", k.p0},           {"p1", k.p1},
                    {"gamma_l", k.gamma_l}, {"gamma_h", k.gamma_h}, {"s", k.s},
                    {"decay_exponent", k.decay_exponent}};
  if (ctx.grid) {
    m["grid"] = {{"n", ctx.grid->n()}, {"L", ctx.grid->length()}};
  } else {
    m["grid"] = "none";
  }
  m["coefficient"] = ctx.coefficient;
  if (k.s < 12.0) m["caveat"] = "s below 12: energy diagnostics run under the minimal regularity of the theorem";
  json entries = json::object();
  for (const auto& [key, value] : ctx.cfg.entries()) entries[key] = value;
  m["config"] = entries;
  return m;
}

json check_json(const Check& c) {
  return {{"group", c.group},   {"name", c.name}, {"measured", c.measured}, {"limit", c.limit},
          {"relation", c.upper ? "<=" : ">="}, {"pass", c.pass}};
}

json fit_json(const DecayFit& f) {
  return {{"exponent", f.exponent},
          {"stderr", f.stderr_exponent},
          {"ci95", {f.exponent - 1.96 * f.stderr_exponent, f.exponent + 1.96 * f.stderr_exponent}},
          {"prefactor", f.prefactor},
          {"residual_rms", f.residual_rms},
          {"samples", f.samples}};
}

// Writes <study>.json with metadata, payload and the checks, names each failing
// check on err and returns the exit code.
int finish(const Context& ctx, json payload, const std::vector<Check>& checks, std::ostream& err) {
  json body;
  body["metadata"] = metadata(ctx);
  for (auto it = payload.begin(); it != payload.end(); ++it) body[it.key()] = it.value();
  json list = json::array();
  json failed = json::array();
  for (const auto& c : checks) {
    list.push_back(check_json(c));
    if (!c.pass) failed.push_back(c.group + "/" + c.name);
  }
  body["checks"] = list;
  body["failed"] = failed;
  body["pass"] = failed.empty();
  write_json(ctx.opt.out_dir / (ctx.opt.study + ".json"), body);
  for (const auto& c : checks) {
    if (c.pass) continue;
    err << "check failed: " << c.group << "/" << c.name << " measured " << fmt(c.measured) << (c.upper ? " > " : " < ")
        << fmt(c.limit) << '\n';
  }
  ctx.log << ctx.opt.study << ": " << (checks.size() - failed.size()) << "/" << checks.size() << " checks passed\n";
  return failed.empty() ? kExitPass : kExitCheckFailure;
}

void require_all_used(const Config& cfg) {
  const auto unused = cfg.unused_keys();
  if (unused.empty()) return;
  std::string list;
  for (const auto& k : unused) list += (list.empty() ? "" : ", ") + k;
  throw Error(ErrorKind::ConfigError, "unknown config keys: " + list);
}

Check band_check(std::string group, std::string name, double measured, double target, double tol) {
  Check c = make_check(std::move(group), std::move(name), std::abs(measured - target), tol);
  return c;
}

NonlinearOptions nonlinear_from(Context& ctx) {
  NonlinearOptions o = default_nonlinear_options();
  o.sim = sim_config_from(ctx.cfg, o.sim);
  o.constants = ctx.constants;
  o.t_lo = ctx.cfg.get_double("fit.t_lo", o.t_lo);
  o.t_hi = ctx.cfg.get_double("fit.t_hi", o.t_hi);
  o.probe_xi = ctx.cfg.get_list("probe.xi", o.probe_xi);
  o.max_power = static_cast<int>(ctx.cfg.get_long("probe.max_power", o.max_power));
  o.sim.linear_only = ctx.opt.linear_only;
  ctx.grid = o.sim.grid;
  ctx.coefficient = o.sim.coeff.identifier();
  return o;
}

void write_samples(const Context& ctx, const NonlinearStudy& nl, const fs::path& path) {
  CsvWriter csv(path, metadata(ctx),
                {"t", "sup_dx", "sup_dxx", "sup_product", "energy", "energy_weighted", "z_norm", "l2", "hamiltonian"});
  for (const auto& s : nl.samples) {
    csv.row(std::vector<double>{s.t, s.sup_dx, s.sup_dxx, s.sup_product, s.energy, s.energy_weighted, s.z_norm, s.l2,
                                s.hamiltonian});
  }
}

// ------------------------------------------------------------------ studies

int cmd_identities(Context& ctx, std::ostream& err) {
  IdentityOptions o;
  o.seed = ctx.seed;
  o.samples = static_cast<int>(ctx.cfg.get_long("identities.samples", o.samples));
  o.lp_trials = static_cast<int>(ctx.cfg.get_long("identities.lp_trials", o.lp_trials));
  const std::string fault = ctx.cfg.get_string("identities.inject_fault", "none");
  if (fault == "bump") {
    o.corrupt_bump = true;
  } else if (fault != "none") {
    throw Error(ErrorKind::ConfigError, "identities.inject_fault must be none or bump");
  }
  if (o.samples < 1 || o.lp_trials < 1) throw Error(ErrorKind::ConfigError, "identity sample counts must be positive");
  require_all_used(ctx.cfg);
  const auto checks = identity_checks(o);
  json payload;
  payload["fault_injection"] = fault;
  return finish(ctx, payload, checks, err);
}

int cmd_simulate(Context& ctx, std::ostream& err) {
  SimConfig sim = sim_config_from(ctx.cfg, default_conservation_config());
  sim.linear_only = ctx.opt.linear_only;
  const bool diagnostics = ctx.cfg.get_bool("simulate.diagnostics", true);
  const double mass_tol = ctx.cfg.get_double("checks.mass_abs", 1e-12);
  const double l2_tol = ctx.cfg.get_double("checks.l2_rel", 1e-7);
  const double ham_tol = ctx.cfg.get_double("checks.hamiltonian_rel", 1e-6);
  const std::vector<double> dts = ctx.cfg.get_list("order.dts", {});
  const double order_t_end = ctx.cfg.get_double("order.t_end", 1.0);
  ctx.grid = sim.grid;
  ctx.coefficient = sim.coeff.identifier();
  require_all_used(ctx.cfg);

  const fs::path snap_dir = ctx.opt.out_dir / "snapshots";
  if (sim.snapshot_every > 0.0) fs::create_directories(snap_dir);
  CsvWriter csv(ctx.opt.out_dir / "monitors.csv", metadata(ctx),
                diagnostics ? std::vector<std::string>{"t", "mass", "l2", "hamiltonian", "energy", "z_norm", "sup"}
                            : std::vector<std::string>{"t", "mass", "l2", "hamiltonian"});
  RunCallbacks cb;
  cb.on_monitor = [&](const SimState& st, const MonitorRecord& m) {
    if (!diagnostics) {
      csv.row(std::vector<double>{m.t, m.mass, m.l2, m.hamiltonian});
      return;
    }
    const EnergyBreakdown e = energy(st.phi, st.t, sim.coeff, ctx.constants);
    csv.row(std::vector<double>{m.t, m.mass, m.l2, m.hamiltonian, e.total, e.z_norm, sup_norm(st.phi)});
  };
  long snap_index = 0;
  cb.on_snapshot = [&](const SimState& st) {
    char name[32];
    std::snprintf(name, sizeof name, "snap_%05ld.qmkdv", snap_index++);
    write_snapshot(snap_dir / name, st.phi, sim.coeff.identifier());
  };
  const ConservationSummary s = conservation_run(sim, cb);
  write_snapshot(ctx.opt.out_dir / "final.qmkdv", s.final_state.phi, sim.coeff.identifier());

  std::vector<Check> checks{
      make_check("conservation", "mass_drift_abs", s.mass_drift_abs, mass_tol),
      make_check("conservation", "l2_drift_rel", s.l2_drift_rel, l2_tol),
      make_check("conservation", "hamiltonian_drift_rel", s.hamiltonian_drift_rel, ham_tol),
  };
  json payload;
  payload["run"] = {{"t_end", s.final_state.t}, {"steps", s.steps}, {"rejected", s.rejected}};
  if (!dts.empty()) {
    SimConfig order_cfg = sim;
    const OrderStudy o = order_study(order_cfg, dts, order_t_end);
    payload["order"] = {{"dts", o.dts},
                        {"differences", o.differences},
                        {"observed_order", o.observed_order},
                        {"linear_error", o.linear_error}};
    checks.push_back(band_check("order", "observed_order_deviation", o.observed_order, 4.0, 0.3));
    checks.push_back(make_check("order", "linear_only_vs_free_group", o.linear_error, 1e-11));
  }
  return finish(ctx, payload, checks, err);
}

int cmd_decay(Context& ctx, std::ostream& err) {
  LinearDecayOptions lo;
  const long ln = ctx.cfg.get_long("linear.n", static_cast<long>(lo.grid.n()));
  if (ln <= 0) throw Error(ErrorKind::ConfigError, "linear.n must be positive");
  lo.grid = GridSpec(static_cast<std::size_t>(ln), ctx.cfg.get_double("linear.L", lo.grid.length()));
  lo.width = ctx.cfg.get_double("linear.width", lo.width);
  lo.t_lo = ctx.cfg.get_double("linear.t_lo", lo.t_lo);
  lo.t_hi = ctx.cfg.get_double("linear.t_hi", lo.t_hi);
  lo.samples = static_cast<int>(ctx.cfg.get_long("linear.samples", lo.samples));
  lo.betas = ctx.cfg.get_list("linear.betas", lo.betas);
  // The nonlinear keys are validated even when the run is skipped.
  std::optional<NonlinearOptions> nl_opt = nonlinear_from(ctx);
  if (ctx.opt.linear_only) {
    nl_opt.reset();
    ctx.grid = lo.grid;
    ctx.coefficient = "none (free Airy flow)";
  }
  require_all_used(ctx.cfg);

  const LinearDecayStudy lin = linear_decay_study(lo);
  {
    CsvWriter csv(ctx.opt.out_dir / "decay_linear.csv", metadata(ctx), {"t", "sup", "sup_dx", "sup_dx_envelope"});
    for (std::size_t i = 0; i < lin.t.size(); ++i) {
      csv.row(std::vector<double>{lin.t[i], lin.sup[i], lin.sup_dx[i], lin.sup_dx_env[i]});
    }
    CsvWriter rat(ctx.opt.out_dir / "dispersive_ratio.csv", metadata(ctx), {"t", "beta", "n", "ratio"});
    for (const auto& r : lin.ratios) rat.row(std::vector<double>{r.t, r.beta, static_cast<double>(r.n), r.ratio});
  }
  std::vector<Check> checks{
      band_check("linear", "linf_exponent_deviation", lin.linf.exponent, -1.0 / 3.0, 0.03),
      band_check("linear", "dx_envelope_exponent_deviation", lin.dx_envelope.exponent, -2.0 / 3.0, 0.05),
  };
  json payload;
  json per_beta = json::array();
  for (double beta : lo.betas) {
    double mn = std::numeric_limits<double>::infinity();
    double mx = 0.0;
    for (const auto& r : lin.ratios) {
      if (r.beta != beta) continue;
      mn = std::min(mn, r.ratio);
      mx = std::max(mx, r.ratio);
    }
    per_beta.push_back({{"beta", beta}, {"min", mn}, {"max", mx}});
    checks.push_back(make_check("linear", "dispersive_ratio_spread_beta_" + fmt(beta), mx / mn, 2.0));
  }
  payload["linear"] = {{"linf", fit_json(lin.linf)},
                       {"dx_plain", fit_json(lin.dx_plain)},
                       {"dx_envelope", fit_json(lin.dx_envelope)},
                       {"dispersive_ratio", {{"min", lin.ratio_min}, {"max", lin.ratio_max}, {"per_beta", per_beta}}}};

  if (nl_opt) {
    const NonlinearStudy nl = nonlinear_study(*nl_opt);
    write_samples(ctx, nl, ctx.opt.out_dir / "decay_nonlinear.csv");
    payload["nonlinear"] = {{"dx", fit_json(nl.dx)},
                            {"dxx", fit_json(nl.dxx)},
                            {"product", fit_json(nl.product)},
                            {"energy_factor", nl.energy_factor},
                            {"z_factor", nl.z_factor},
                            {"steps", nl.steps},
                            {"rejected", nl.rejected}};
    checks.push_back(band_check("nonlinear", "dx_exponent_deviation", nl.dx.exponent, -0.5, 0.07));
    checks.push_back(band_check("nonlinear", "dxx_exponent_deviation", nl.dxx.exponent, -0.5, 0.07));
    checks.push_back(band_check("nonlinear", "product_exponent_deviation", nl.product.exponent, -1.0, 0.15));
    checks.push_back(make_check("nonlinear", "weighted_energy_factor", nl.energy_factor, 4.0));
    checks.push_back(make_check("nonlinear", "z_norm_factor", nl.z_factor, 4.0));
  }
  return finish(ctx, payload, checks, err);
}

int cmd_scattering(Context& ctx, std::ostream& err) {
  NonlinearOptions o = nonlinear_from(ctx);
  require_all_used(ctx.cfg);
  const NonlinearStudy nl = nonlinear_study(o);
  const auto& probe = nl.probe;

  {
    CsvWriter csv(ctx.opt.out_dir / "probe_history.csv", metadata(ctx),
                  {"t", "xi", "variant", "value_re", "value_im", "abs"});
    for (const auto& rec : probe.history) {
      for (std::size_t i = 0; i < probe.xi.size(); ++i) {
        csv.row({fmt(rec.t), fmt(probe.xi[i]), "raw", fmt(rec.h[i].real()), fmt(rec.h[i].imag()), fmt(std::abs(rec.h[i]))});
        for (ThetaVariant v : kThetaVariants) {
          const cplx z = rec.v[static_cast<int>(v)][i];
          csv.row({fmt(rec.t), fmt(probe.xi[i]), to_string(v), fmt(z.real()), fmt(z.imag()), fmt(std::abs(z))});
        }
      }
    }
  }

  json entries = json::array();
  for (const auto& e : nl.scattering.entries) {
    entries.push_back({{"xi", e.xi},
                       {"variant", to_string(e.variant)},
                       {"cauchy_increments", e.cauchy_increments},
                       {"increments_decrease", e.increments_decrease},
                       {"drift_slope", e.drift_slope},
                       {"predicted_slope", e.predicted_slope},
                       {"slope_match", e.slope_match}});
  }
  json matches = json::object();
  for (ThetaVariant v : kThetaVariants) matches[to_string(v)] = nl.scattering.matches[static_cast<int>(v)];
  json matching = json::array();
  for (ThetaVariant v : nl.scattering.matching) matching.push_back(to_string(v));

  std::vector<Check> checks;
  if (ctx.opt.linear_only) {
    // Free flow freezes the profile, so v = hhat (Theta = 0) must not move.
    double drift = 0.0;
    const auto& first = probe.history.front();
    for (const auto& rec : probe.history) {
      for (std::size_t i = 0; i < probe.xi.size(); ++i) {
        drift = std::max(drift, std::abs(rec.h[i] - first.h[i]) / std::abs(first.h[i]));
      }
    }
    checks.push_back(make_check("scattering", "linear_profile_constant", drift, 1e-12));
  } else {
    int candidates = 0;
    for (ThetaVariant v : {ThetaVariant::A, ThetaVariant::B}) {
      const int m = nl.scattering.matches[static_cast<int>(v)];
      if (m >= 3) ++candidates;
    }
    checks.push_back(make_check("scattering", "candidate_variants_matching", candidates, 1.0));
    checks.push_back(make_check("scattering", "candidate_variants_matching_at_least_one", candidates, 1.0, false));
    checks.push_back(make_check("scattering", "variant_C_frequencies_matching",
                                nl.scattering.matches[static_cast<int>(ThetaVariant::C)], 3.0, false));
  }
  json payload;
  payload["probe"] = {{"xi", probe.xi}, {"modes", probe.modes}, {"alpha2", probe.alpha2}};
  payload["entries"] = entries;
  payload["matches"] = matches;
  payload["matching_variants"] = matching;
  payload["run"] = {{"steps", nl.steps}, {"rejected", nl.rejected}};
  return finish(ctx, payload, checks, err);
}

int cmd_resonance(Context& ctx, std::ostream& err) {
  ResonanceOptions o;
  o.j_min = static_cast<int>(ctx.cfg.get_long("resonance.j_min", o.j_min));
  o.j_max = static_cast<int>(ctx.cfg.get_long("resonance.j_max", o.j_max));
  o.alpha2 = ctx.cfg.get_double("resonance.alpha2", o.alpha2);
  o.resolution.samples_per_axis =
      static_cast<int>(ctx.cfg.get_long("resonance.samples_per_axis", o.resolution.samples_per_axis));
  o.resolution.oversample = static_cast<int>(ctx.cfg.get_long("resonance.oversample", o.resolution.oversample));
  o.resolution.box_factor = ctx.cfg.get_double("resonance.box_factor", o.resolution.box_factor);
  const double spread_limit = ctx.cfg.get_double("checks.spread", 10.0);
  const double change_limit = ctx.cfg.get_double("checks.rel_change", 0.02);
  if (o.resolution.samples_per_axis < 8 || o.resolution.oversample < 1) {
    throw Error(ErrorKind::ConfigError, "resonance resolution is too small");
  }
  ctx.coefficient = "alpha2=" + fmt(o.alpha2);
  require_all_used(ctx.cfg);
  const ResonanceStudy r = resonance_study(o);

  CsvWriter csv(ctx.opt.out_dir / "resonance.csv", metadata(ctx),
                {"symbol", "j1", "j2", "j3", "ratio", "s_infty", "refined_s_infty", "rel_change"});
  json rows = json::array();
  for (const auto& row : r.rows) {
    const std::string sym = row.which == DyadicSymbol::T1 ? "T1" : "dT1";
    csv.row({sym, std::to_string(row.j1), std::to_string(row.j2), std::to_string(row.j3), fmt(row.bound.ratio),
             fmt(row.bound.s_infty), fmt(row.bound.refined_s_infty), fmt(row.bound.rel_change)});
    rows.push_back({{"symbol", sym},
                    {"j", {row.j1, row.j2, row.j3}},
                    {"value", row.bound.s_infty},
                    {"refined_value", row.bound.refined_s_infty},
                    {"rel_change", row.bound.rel_change},
                    {"ratio", row.bound.ratio}});
  }
  std::vector<Check> checks{
      make_check("resonance", "T1_ratio_spread", r.spread_T1, spread_limit),
      make_check("resonance", "dT1_ratio_spread", r.spread_dT1, spread_limit),
      make_check("resonance", "refinement_rel_change", r.max_rel_change, change_limit),
      make_check("resonance", "tensor_factorization_rel_error", r.factorization_rel_error, change_limit),
  };
  json payload;
  payload["rows"] = rows;
  return finish(ctx, payload, checks, err);
}

int cmd_oscillatory(Context& ctx, std::ostream& err) {
  OscillatoryOptions o;
  o.B = ctx.cfg.get_list("oscillatory.B", o.B);
  o.t = ctx.cfg.get_list("oscillatory.t", o.t);
  o.n = static_cast<int>(ctx.cfg.get_long("oscillatory.n", o.n));
  const double scaled_limit = ctx.cfg.get_double("checks.scaled_error", 1.0);
  if (o.B.empty()) throw Error(ErrorKind::ConfigError, "oscillatory.B must not be empty");
  require_all_used(ctx.cfg);
  const OscillatoryStudy s = oscillatory_study(o);

  auto write = [&](const std::string& name, const std::vector<OscillatoryResult>& rows) {
    CsvWriter csv(ctx.opt.out_dir / name, metadata(ctx), {"parameter", "value_re", "value_im", "error"});
    for (const auto& r : rows) csv.row(std::vector<double>{r.parameter, r.value.real(), r.value.imag(), r.error});
  };
  write("two_pi_sweep.csv", s.sweep);
  write("gaussian_self_test.csv", s.gaussian);
  {
    CsvWriter csv(ctx.opt.out_dir / "region_contrast.csv", metadata(ctx),
                  {"region", "parameter", "value_re", "value_im", "refined_rel_change"});
    for (const DecayStudy* d : {&s.separated, &s.overlap}) {
      const std::string region = d->region == DecayRegion::Separated ? "separated" : "resonant_overlap";
      for (std::size_t i = 0; i < d->t.size(); ++i) {
        csv.row({region, fmt(d->t[i]), fmt(d->values[i].real()), fmt(d->values[i].imag()), fmt(d->refined_change[i])});
      }
    }
  }
  double gauss_err = 0.0;
  for (const auto& g : s.gaussian) gauss_err = std::max(gauss_err, g.error);
  std::vector<Check> checks{
      make_check("oscillatory", "two_pi_scaled_error_max", s.max_scaled_error, scaled_limit),
      make_check("oscillatory", "gaussian_self_test_error", gauss_err, 1e-8),
      make_check("oscillatory", "separated_slope", s.separated.fit.exponent, -0.9),
      make_check("oscillatory", "overlap_slope", s.overlap.fit.exponent, -0.7, false),
  };
  json payload;
  payload["separated"] = fit_json(s.separated.fit);
  payload["overlap"] = fit_json(s.overlap.fit);
  return finish(ctx, payload, checks, err);
}

using Handler = int (*)(Context&, std::ostream&);

Handler handler_for(const std::string& study) {
  if (study == "identities") return cmd_identities;
  if (study == "simulate") return cmd_simulate;
  if (study == "decay") return cmd_decay;
  if (study == "scattering") return cmd_scattering;
  if (study == "resonance") return cmd_resonance;
  if (study == "oscillatory") return cmd_oscillatory;
  throw Error(ErrorKind::ConfigError, "unknown study '" + study + "'");
}

}  // namespace

int run_command(const CommandOptions& opt, std::ostream& log, std::ostream& err) {
  try {
    const Handler handler = handler_for(opt.study);
    Context ctx{opt, Config::load(opt.config.string()), 1, {}, std::nullopt, "none", log};
    const std::string kind = ctx.cfg.get_string("study.kind", opt.study);
    if (kind != opt.study) {
      throw Error(ErrorKind::ConfigError, "config is for study '" + kind + "', not '" + opt.study + "'");
    }
    const long cfg_seed = ctx.cfg.get_long("seed", 1);
    if (cfg_seed < 0) throw Error(ErrorKind::ConfigError, "seed must be non-negative");
    ctx.seed = opt.seed.value_or(static_cast<std::uint64_t>(cfg_seed));
    ctx.constants = constants_from(ctx.cfg);
    std::error_code ec;
    fs::create_directories(opt.out_dir, ec);
    if (ec || !fs::is_directory(opt.out_dir)) {
      throw Error(ErrorKind::ConfigError, "output directory " + opt.out_dir.string() + " is not writable");
    }
    return handler(ctx, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.kind() == ErrorKind::ConfigError ? kExitConfigError : kExitCheckFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitCheckFailure;
  }
}

}  // namespace qmkdv::studies
