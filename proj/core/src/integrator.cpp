#include "qmkdv/integrator.hpp"

#include <algorithm>
#include <cmath>

#include "qmkdv/error.hpp"
#include "qmkdv/model.hpp"
#include "qmkdv/snapshot.hpp"

namespace qmkdv {

void SimConfig::validate() const {
  if (!(t_end > t_start) || t_start < 0.0) throw Error(ErrorKind::ConfigError, "need 0 <= t_start < t_end");
  if (!(tolerance >= 1e-12 && tolerance <= 1e-4)) {
    throw Error(ErrorKind::ConfigError, "tolerance must lie in [1e-12, 1e-4]");
  }
  if (!(monitor_every > 0.0)) throw Error(ErrorKind::ConfigError, "monitor cadence must be positive");
  if (snapshot_every < 0.0) throw Error(ErrorKind::ConfigError, "snapshot cadence must be nonnegative");
  if (!(dt_max > 0.0)) throw Error(ErrorKind::ConfigError, "dt_max must be positive");
  if (pad_factor < 1) throw Error(ErrorKind::ConfigError, "pad factor must be at least 1");
}

SpectralField make_initial_field(const SimConfig& cfg) {
  SpectralField phi(cfg.grid, cfg.t_start);
  if (!cfg.init.snapshot_path.empty()) {
    auto snap = read_snapshot(cfg.init.snapshot_path);
    if (!(snap.field.grid() == cfg.grid)) {
      throw Error(ErrorKind::GridMismatch, "snapshot grid differs from configured grid");
    }
    phi = snap.field;
    phi.set_time(cfg.t_start);
  } else {
    const auto& d = cfg.init;
    phi = SpectralField::from_function(
        cfg.grid,
        [&d](double x) {
          const double y = x - d.center;
          return d.amplitude * std::exp(-(y * y) / (d.width * d.width)) * std::cos(d.wavenumber * y + d.phase);
        },
        cfg.t_start);
  }
  enforce_real(phi);
  remove_mean(phi);
  return phi;
}

SimState initial_state(const SimConfig& cfg) {
  cfg.validate();
  SimState s{make_initial_field(cfg), cfg.t_start, cfg.dt_init, 0, 0};
  if (s.dt <= 0.0) {
    double cmax = 0.0;
    for (double u : s.phi.to_physical()) cmax = std::max(cmax, std::abs(cfg.coeff.c(u)));
    const double dx = cfg.grid.dx();
    s.dt = 0.5 * dx * dx / std::max(1.0, cmax * cmax);
  }
  s.dt = std::min(s.dt, cfg.dt_max);
  return s;
}

namespace {

// Right-hand side without the Airy part: -N(phi).
SpectralField forcing(const SpectralField& phi, const SimConfig& cfg) {
  if (cfg.linear_only) return SpectralField(phi.grid(), phi.time());
  SpectralField n = nonlinearity_full(phi, cfg.coeff, cfg.pad_factor);
  n *= -1.0;
  return n;
}

SpectralField propagate(const SpectralField& f, const std::vector<cplx>& phase) {
  SpectralField out = f;
  for (std::size_t i = 0; i < out.size(); ++i) out.coeffs()[i] *= phase[i];
  return out;
}

SpectralField axpy(const SpectralField& y, double a, const SpectralField& x) {
  SpectralField out = y;
  for (std::size_t i = 0; i < out.size(); ++i) out.coeffs()[i] += a * x.coeffs()[i];
  return out;
}

void clean(SpectralField& f) {
  enforce_real(f);
  remove_mean(f);
}

}  // namespace

SpectralField lawson_rk4(const SpectralField& phi, double dt, const SimConfig& cfg) {
  const auto& g = phi.grid();
  std::vector<cplx> half(g.n());
  std::vector<cplx> full(g.n());
  for (std::size_t i = 0; i < g.n(); ++i) {
    const double w = std::pow(g.xi(i), 3);
    half[i] = std::polar(1.0, 0.5 * dt * w);
    full[i] = std::polar(1.0, dt * w);
  }
  const double t0 = phi.time();
  SpectralField k1 = forcing(phi, cfg);

  SpectralField u2 = propagate(axpy(phi, 0.5 * dt, k1), half);
  u2.set_time(t0 + 0.5 * dt);
  SpectralField k2 = forcing(u2, cfg);

  SpectralField u3 = axpy(propagate(phi, half), 0.5 * dt, k2);
  u3.set_time(t0 + 0.5 * dt);
  SpectralField k3 = forcing(u3, cfg);

  SpectralField u4 = axpy(propagate(phi, full), dt, propagate(k3, half));
  u4.set_time(t0 + dt);
  SpectralField k4 = forcing(u4, cfg);

  SpectralField out = propagate(phi, full);
  const SpectralField k1f = propagate(k1, full);
  const SpectralField k23h = propagate(k2 + k3, half);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.coeffs()[i] += dt / 6.0 * (k1f.coeffs()[i] + 2.0 * k23h.coeffs()[i] + k4.coeffs()[i]);
  }
  out.set_time(t0 + dt);
  clean(out);
  return out;
}

void step(SimState& state, const SimConfig& cfg, double t_limit) {
  for (;;) {
    if (state.dt < 1e-12) {
      throw Error(ErrorKind::StepUnderflow, "time step fell below 1e-12 at t = " + std::to_string(state.t));
    }
    const double remaining = t_limit - state.t;
    const bool truncated = state.dt >= remaining;
    const double dt = truncated ? remaining : state.dt;

    const SpectralField full = lawson_rk4(state.phi, dt, cfg);
    const SpectralField mid = lawson_rk4(state.phi, 0.5 * dt, cfg);
    SpectralField fine = lawson_rk4(mid, 0.5 * dt, cfg);

    const double scale = spectral_l2(fine);
    const double err = spectral_l2(fine - full);
    const bool accept = err <= cfg.tolerance * scale;
    double factor = 5.0;
    if (err > 0.0) {
      factor = std::clamp(0.9 * std::pow(cfg.tolerance * scale / err, 0.2), 0.2, 5.0);
    }
    if (scale == 0.0) factor = 5.0;
    const double dt_next = std::min(dt * factor, cfg.dt_max);
    if (accept) {
      state.t = truncated ? t_limit : state.t + dt;
      fine.set_time(state.t);
      state.phi = std::move(fine);
      state.dt = truncated ? std::max(dt_next, std::min(state.dt, cfg.dt_max)) : dt_next;
      ++state.steps;
      return;
    }
    ++state.rejected;
    state.dt = dt_next;
  }
}

SpectralField integrate_fixed(const SpectralField& phi0, const SimConfig& cfg, double dt, double t_end) {
  SpectralField phi = phi0;
  const auto steps = static_cast<long>(std::llround((t_end - phi0.time()) / dt));
  for (long s = 0; s < steps; ++s) phi = lawson_rk4(phi, dt, cfg);
  return phi;
}

double mass(const SpectralField& phi) {
  double acc = 0.0;
  for (double v : phi.to_physical()) acc += v;
  return acc * phi.grid().dx();
}

double hamiltonian(const SpectralField& phi, const CoefficientSpec& c) {
  const auto& g = phi.grid();
  const GridSpec fine(g.n() * 3, g.length());
  auto lift = [&](const SpectralField& f) {
    std::vector<cplx> coeffs(fine.n(), cplx{0.0, 0.0});
    for (std::size_t i = 0; i < g.n(); ++i) coeffs[fine.storage_index(g.signed_index(i))] = f.coeffs()[i];
    return inverse_transform(fine, std::move(coeffs));
  };
  const auto u = lift(phi);
  const auto ux = lift(derivative(phi, 1));
  double acc = 0.0;
  for (std::size_t m = 0; m < u.size(); ++m) {
    const double v = u[m].real();
    const double vx = ux[m].real();
    const double cv = c.c(v);
    acc += -0.25 * v * v * v * v + 0.5 * (cv * cv + 1.0) * vx * vx;
  }
  return acc * fine.dx();
}

MonitorRecord monitor(const SpectralField& phi, const CoefficientSpec& c) {
  return {phi.time(), mass(phi), norm(phi, NormKind::L2), hamiltonian(phi, c)};
}

RunResult run(const SimConfig& cfg, const RunCallbacks& callbacks) {
  RunResult result{initial_state(cfg), {}};
  SimState& state = result.final_state;

  std::vector<double> stops = cfg.extra_stops;
  std::sort(stops.begin(), stops.end());
  std::size_t next_stop = 0;
  while (next_stop < stops.size() && stops[next_stop] <= cfg.t_start) ++next_stop;

  long monitor_index = 1;
  long snapshot_index = 1;
  auto emit_monitor = [&] {
    const auto rec = monitor(state.phi, cfg.coeff);
    result.monitors.push_back(rec);
    if (callbacks.on_monitor) callbacks.on_monitor(state, rec);
  };
  emit_monitor();
  if (callbacks.on_snapshot && cfg.snapshot_every > 0.0) callbacks.on_snapshot(state);

  const double eps = 1e-12 * std::max(1.0, cfg.t_end);
  try {
    while (state.t < cfg.t_end - eps) {
      double target = std::min(cfg.t_end, cfg.t_start + static_cast<double>(monitor_index) * cfg.monitor_every);
      if (cfg.snapshot_every > 0.0) {
        target = std::min(target, cfg.t_start + static_cast<double>(snapshot_index) * cfg.snapshot_every);
      }
      if (next_stop < stops.size()) target = std::min(target, stops[next_stop]);
      while (state.t < target - eps) step(state, cfg, target);
      state.t = target;
      state.phi.set_time(target);

      if (next_stop < stops.size() && std::abs(stops[next_stop] - target) <= eps) {
        if (callbacks.on_stop) callbacks.on_stop(state);
        ++next_stop;
      }
      if (std::abs(cfg.t_start + static_cast<double>(monitor_index) * cfg.monitor_every - target) <= eps) {
        emit_monitor();
        ++monitor_index;
      }
      if (cfg.snapshot_every > 0.0 &&
          std::abs(cfg.t_start + static_cast<double>(snapshot_index) * cfg.snapshot_every - target) <= eps) {
        if (callbacks.on_snapshot) callbacks.on_snapshot(state);
        ++snapshot_index;
      }
    }
    if (result.monitors.back().t < cfg.t_end - eps) emit_monitor();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::StepUnderflow && callbacks.on_snapshot) callbacks.on_snapshot(state);
    throw;
  }
  return result;
}

}  // namespace qmkdv
