#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "qmkdv/coefficient.hpp"
#include "qmkdv/spectral_core.hpp"

namespace qmkdv {

// The six summands of the energy functional. x-side terms use the physical
// L2 norm, xi-side terms (H^s and the two profile weights) use dxi weights.
struct EnergyBreakdown {
  double antiderivative_sq = 0.0;         // ||d_x^{-1} phi||^2
  double sobolev_sq = 0.0;                // ||phi||_{H^s}^2
  double antiderivative_scaling_sq = 0.0; // ||d_x^{-1} S phi||^2
  double scaling_sq = 0.0;                // ||S phi||^2
  double xi_dxi_profile_sq = 0.0;         // ||xi d_xi hhat||^2
  double dxi_profile_sq = 0.0;            // ||d_xi hhat||^2
  double total = 0.0;
  double z_norm = 0.0;
  double hamiltonian = 0.0;
  double t = 0.0;
};

EnergyBreakdown energy(const SpectralField& phi, double t, const CoefficientSpec& c, const BootstrapConstants& k);

// sup over xi of (|xi|^gamma_l + |xi|^gamma_h) |phihat(xi)|.
double z_norm(const SpectralField& phi, const BootstrapConstants& k);

// d_xi hhat as the transform of (-i x) h, x the centered sawtooth.
SpectralField xi_derivative(const SpectralField& h);

// S phi recovered from the profile: S phi^ = -e^{i t xi^3} xi d_xi hhat - 3 t N^ - phi^.
SpectralField scaling_field_spectral(const SpectralField& phi, double t, const CoefficientSpec& c,
                                     bool include_nonlinearity = true);

// Smooth cutoff equal to 1 on (t+1)^{-2 p0} <= |xi| <= (t+1)^{p1} and
// vanishing outside [(t+1)^{-2 p0} / 2, (t+1)^{p1} + 1].
double frequency_window(double t, double xi, const BootstrapConstants& k);

// Phase-correction prefactors. A is the symmetrized-sum line, B the displayed
// closed form, C the prefactor recovered from the cubic stationary-phase
// computation in this code's Fourier normalization.
enum class ThetaVariant { A, B, C };
inline constexpr std::array<ThetaVariant, 3> kThetaVariants{ThetaVariant::A, ThetaVariant::B, ThetaVariant::C};
std::string to_string(ThetaVariant v);
double theta_coefficient(ThetaVariant v, double xi, double alpha2);

struct ProbeRecord {
  double t = 0.0;
  std::vector<cplx> h;                   // hhat at the probe frequencies
  std::array<std::vector<cplx>, 3> v;    // e^{i Theta} hhat per variant
};

struct ScatteringProbe {
  std::vector<long> modes;  // signed grid indices
  std::vector<double> xi;
  double alpha2 = 0.0;
  std::array<std::vector<double>, 3> theta;
  double t_last = 1.0;
  std::vector<double> q_last;  // |hhat|^2 at t_last
  std::vector<ProbeRecord> history;
};

// Snaps the target frequencies to grid modes and starts the integral at t = 1
// with Theta(1, xi) = 0. The profile must be taken at t = 1.
ScatteringProbe make_probe(const SpectralField& h_at_one, const std::vector<double>& xi_targets, double alpha2);

// Trapezoid in log tau for int_{t_prev}^{t_now} |hhat|^2 / tau. t_prev must be
// the probe's last time.
void theta_accumulate(ScatteringProbe& probe, const SpectralField& h_now, double t_prev, double t_now);

// Appends the current hhat and corrected profiles to the history.
void record(ScatteringProbe& probe, const SpectralField& h_now);

struct ScatteringEntry {
  double xi = 0.0;
  ThetaVariant variant = ThetaVariant::A;
  std::vector<double> cauchy_increments;
  bool increments_decrease = false;  // each step at most 1.2x the previous
  double drift_slope = 0.0;          // d arg hhat / d log t
  double predicted_slope = 0.0;      // -coefficient |hhat|^2
  bool slope_match = false;          // within 20%
};

struct ScatteringReport {
  std::vector<ScatteringEntry> entries;
  std::array<int, 3> matches{};        // per variant, frequencies with both checks passing
  std::vector<ThetaVariant> matching;  // variants matching at >= 3 frequencies
};

ScatteringReport scattering_monitor(const ScatteringProbe& probe);

struct DecayFit {
  double exponent = 0.0;
  double prefactor = 0.0;
  double stderr_exponent = 0.0;
  double residual_rms = 0.0;
  std::size_t samples = 0;
};

// Least-squares slope of log v against log t over samples with t in [t_lo, t_hi].
DecayFit decay_fit(const std::vector<std::pair<double, double>>& series, double t_lo, double t_hi);

// max_x of | |d_x|^beta e^{-t d_x^3} d_x^n h | divided by
// t^{-1/3-beta/3} (1 + |x| / t^{1/3})^{-1/4+beta/2} (||F[|d_x|^n h]||_inf + t^{-1/6} ||x |d_x|^n h||_2).
double dispersive_ratio(const SpectralField& h, double t, double beta, int n);

struct NormEquivalence {
  double ratio_sobolev = 0.0;  // (||phi|| + ||w_k phi^(k)||) / ||phi||_{H^k}
  double ratio_flat = 0.0;     // (||phi|| + ||w_k phi^(k)||) / (||phi|| + ||d_x^k phi||)
};

// Weighted derivative phi^(k) = (c1 d_x)^k phi with weight w_k = c1^{-(k-1)/3}.
// All norms are physical-side.
NormEquivalence weighted_norm_equivalence(const SpectralField& phi, const CoefficientSpec& c, int k);

}  // namespace qmkdv
