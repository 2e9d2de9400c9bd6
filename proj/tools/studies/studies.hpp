#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "config.hpp"
#include "qmkdv/coefficient.hpp"
#include "qmkdv/diagnostics.hpp"
#include "qmkdv/integrator.hpp"
#include "qmkdv/model.hpp"
#include "qmkdv/oscillatory.hpp"

namespace qmkdv::studies {

// One named numeric check: measured <= limit (upper) or measured >= limit.
struct Check {
  std::string group;
  std::string name;
  double measured = 0.0;
  double limit = 0.0;
  bool upper = true;
  bool pass = false;
};

Check make_check(std::string group, std::string name, double measured, double limit, bool upper = true);

// ---------------------------------------------------------------- identities

struct IdentityOptions {
  std::uint64_t seed = 1;
  int samples = 10000;
  int lp_trials = 100;
  // Replace the bump in the Littlewood-Paley checks by a slightly damaged one.
  bool corrupt_bump = false;
};

// Groups: "algebra" (phases, symbols, resonances, local expansion),
// "commutator", "littlewood_paley", "symbol_class", "nonlinearity".
std::vector<Check> identity_checks(const IdentityOptions& opt);

// ---------------------------------------------------------------- simulation

CoefficientSpec coefficient_from(const Config& cfg);
BootstrapConstants constants_from(const Config& cfg);
// Reads grid.*, coeff.*, init.*, time.* with the given fallbacks.
SimConfig sim_config_from(const Config& cfg, const SimConfig& fallback);

struct ConservationSummary {
  double mass_drift_abs = 0.0;
  double l2_drift_rel = 0.0;
  double hamiltonian_drift_rel = 0.0;
  long steps = 0;
  long rejected = 0;
  std::vector<MonitorRecord> monitors;
  SimState final_state;
};

// Drifts are maxima over all monitor times relative to t_start.
ConservationSummary conservation_run(const SimConfig& cfg, const RunCallbacks& extra = {});

struct OrderStudy {
  std::vector<double> dts;
  std::vector<double> differences;  // ||phi_dt - phi_{dt/2}|| for each dt but the last
  double observed_order = 0.0;
  double linear_error = 0.0;        // adaptive linear-only run vs the free group
};

// Three dt levels (and the reference at the smallest dt / 2), fixed-step.
OrderStudy order_study(const SimConfig& cfg, const std::vector<double>& dts, double t_end);

// ------------------------------------------------------------------- decay

struct LinearDecayOptions {
  GridSpec grid{1048576, 262144.0};  // wide enough that the Airy tail never wraps by t = 500
  double width = 1.0;
  double t_lo = 20.0;
  double t_hi = 500.0;
  int samples = 25;
  std::vector<double> betas{0.0, 0.5, 1.0};
};

struct DispersiveSample {
  double t = 0.0;
  double beta = 0.0;
  int n = 0;
  double ratio = 0.0;
};

struct LinearDecayStudy {
  std::vector<double> t;
  std::vector<double> sup;           // ||phi||_inf
  std::vector<double> sup_dx;        // ||phi_x||_inf
  std::vector<double> sup_dx_env;    // sup |phi_x| (1 + |x| / t^{1/3})^{-1/4}
  DecayFit linf;
  DecayFit dx_plain;
  DecayFit dx_envelope;
  std::vector<DispersiveSample> ratios;
  double ratio_min = 0.0;
  double ratio_max = 0.0;
};

LinearDecayStudy linear_decay_study(const LinearDecayOptions& opt);

struct NonlinearOptions {
  SimConfig sim;
  BootstrapConstants constants;
  double t_lo = 50.0;
  double t_hi = 500.0;
  std::vector<double> probe_xi{0.998, 1.0, 1.002, 1.004, 1.006};
  int max_power = 9;  // dyadic record times 1, 2, ..., 2^max_power
};

struct NonlinearSample {
  double t = 0.0;
  double sup_dx = 0.0;
  double sup_dxx = 0.0;
  double sup_product = 0.0;  // sup (|phi| + |phi_x| + |phi_xx|)(|phi_x| + |phi_xx| + |phi_xxx|)
  double energy = 0.0;
  double energy_weighted = 0.0;  // E (1 + t)^{-2 p0}
  double z_norm = 0.0;
  double l2 = 0.0;
  double hamiltonian = 0.0;
};

struct NonlinearStudy {
  std::vector<NonlinearSample> samples;
  DecayFit dx;
  DecayFit dxx;
  DecayFit product;
  double energy_factor = 0.0;  // max over t of max(r, 1/r), r = E_w(t) / E_w(0)
  double z_factor = 0.0;
  ScatteringProbe probe;
  ScatteringReport scattering;
  long steps = 0;
  long rejected = 0;
};

NonlinearStudy nonlinear_study(const NonlinearOptions& opt);

// Small-data run shared by the decay, boundedness and scattering studies:
// A = 0.02, phi0 = A exp(-(x/4)^2) sin(x), linear c with a = 1, n = L = 16384.
NonlinearOptions default_nonlinear_options();
// Conservation run: A = 0.01 Gaussian of width 1 on the default grid up to t = 200.
SimConfig default_conservation_config();
// Fixed-step order study problem on a 128-point grid.
SimConfig default_order_config();

// --------------------------------------------------------------- resonance

struct ResonanceOptions {
  int j_min = -4;
  int j_max = 4;
  double alpha2 = 1.0;
  DyadicResolution resolution{512, 1, 4.0};
};

struct ResonanceRow {
  int j1 = 0;
  int j2 = 0;
  int j3 = 0;
  DyadicSymbol which = DyadicSymbol::T1;
  DyadicBound bound;
};

struct ResonanceStudy {
  std::vector<ResonanceRow> rows;
  double spread_T1 = 0.0;   // max ratio / min ratio
  double spread_dT1 = 0.0;
  double max_rel_change = 0.0;
  double factorization_rel_error = 0.0;  // alpha2 = 0 symbol vs the 1D band norm cubed
};

// Diagonal sweep j1 = j2 = j3 over [j_min, j_max] for both symbols.
ResonanceStudy resonance_study(const ResonanceOptions& opt);

// ------------------------------------------------------------- oscillatory

struct OscillatoryOptions {
  std::vector<double> B{8.0, 16.0, 32.0, 64.0, 128.0};
  std::vector<double> t;  // empty selects 2^{k/2}, k = 4..12
  int n = 128;
};

struct OscillatoryStudy {
  std::vector<OscillatoryResult> sweep;
  std::vector<OscillatoryResult> gaussian;
  double max_scaled_error = 0.0;  // max error * B^{1/2}
  DecayStudy separated;
  DecayStudy overlap;
};

OscillatoryStudy oscillatory_study(const OscillatoryOptions& opt);

}  // namespace qmkdv::studies
