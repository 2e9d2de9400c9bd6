#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "qmkdv/coefficient.hpp"
#include "qmkdv/spectral_core.hpp"

namespace qmkdv {

// phi0(x) = amplitude * exp(-((x - center) / width)^2) * cos(wavenumber (x - center) + phase),
// projected to zero mean. A nonempty snapshot path overrides the formula.
struct InitialData {
  double amplitude = 0.01;
  double width = 1.0;
  double center = 0.0;
  double wavenumber = 0.0;
  double phase = 0.0;
  std::string snapshot_path;
};

struct SimConfig {
  GridSpec grid{4096, 400.0};
  CoefficientSpec coeff = CoefficientSpec::linear(1.0);
  InitialData init;
  double t_start = 0.0;
  double t_end = 1.0;
  double dt_init = 0.0;  // 0 selects 0.5 dx^2 / max(1, max |c(phi0)|^2)
  double dt_max = std::numeric_limits<double>::infinity();
  double tolerance = 1e-9;
  double monitor_every = 1.0;
  double snapshot_every = 0.0;  // 0 disables periodic snapshots
  std::vector<double> extra_stops;  // additional times the stepper lands on exactly
  bool linear_only = false;
  int pad_factor = 3;

  void validate() const;
};

struct SimState {
  SpectralField phi;
  double t = 0.0;
  double dt = 0.0;
  long steps = 0;
  long rejected = 0;
};

SpectralField make_initial_field(const SimConfig& cfg);
SimState initial_state(const SimConfig& cfg);

// One Lawson RK4 step of size dt on phi_t = -phi_xxx - N(phi). The Airy part
// enters only through exact exponentials, so with the nonlinearity switched
// off this reproduces the free group.
SpectralField lawson_rk4(const SpectralField& phi, double dt, const SimConfig& cfg);

// Advances by one accepted step, never past t_limit. The step is accepted when
// ||full - two halves||_{L2} <= tolerance ||phi||_{L2}; the next dt follows the
// fourth-order controller.
void step(SimState& state, const SimConfig& cfg, double t_limit);

// Fixed-step integration without error control, for order studies.
SpectralField integrate_fixed(const SpectralField& phi0, const SimConfig& cfg, double dt, double t_end);

struct MonitorRecord {
  double t = 0.0;
  double mass = 0.0;
  double l2 = 0.0;
  double hamiltonian = 0.0;
};

// H = int -phi^4/4 + (c(phi)^2 + 1) phi_x^2 / 2 dx, on a grid padded by 3.
double hamiltonian(const SpectralField& phi, const CoefficientSpec& c);
double mass(const SpectralField& phi);
MonitorRecord monitor(const SpectralField& phi, const CoefficientSpec& c);

struct RunCallbacks {
  std::function<void(const SimState&, const MonitorRecord&)> on_monitor;
  std::function<void(const SimState&)> on_snapshot;
  // Called when the stepper lands on one of cfg.extra_stops.
  std::function<void(const SimState&)> on_stop;
};

struct RunResult {
  SimState final_state;
  std::vector<MonitorRecord> monitors;
};

// Integrates from t_start to t_end, landing exactly on monitor, snapshot and
// extra stop times. On StepUnderflow the final state is handed to
// on_snapshot before the error propagates.
RunResult run(const SimConfig& cfg, const RunCallbacks& callbacks = {});

}  // namespace qmkdv
