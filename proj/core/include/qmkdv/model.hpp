#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "qmkdv/coefficient.hpp"
#include "qmkdv/littlewood_paley.hpp"
#include "qmkdv/spectral_core.hpp"

namespace qmkdv {

// N(phi) = d_x(phi^3) + d_x(c(phi) d_x(c(phi) d_x phi)), evaluated on a grid
// refined by pad_factor. Pad 3 is exact for the quartic products of the
// linear family; non-polynomial c carries residual aliasing.
SpectralField nonlinearity_full(const SpectralField& phi, const CoefficientSpec& c, int pad_factor = 3);

struct NonlinearSplit {
  SpectralField n3;
  SpectralField n4;
  SpectralField n5plus;
};

// n3 = d_x(phi^3) + alpha2 d_x(phi^2 phi_xx + phi phi_x^2)
// n4 = alpha3 d_x(phi^2 d_x(phi phi_x) + phi d_x(phi^2 phi_x))
// n5plus = N - n3 - n4
NonlinearSplit nonlinearity_split(const SpectralField& phi, const CoefficientSpec& c, int pad_factor = 3);

// Symmetric cubic symbol (alpha2/3)(sum eta_i^2 + sum_{i<j} eta_i eta_j) - 1.
// Arguments are sorted first so the value is bitwise permutation invariant.
double symbol_T1(double eta1, double eta2, double eta3, double alpha2);
// Reduced form with eta3 = xi - eta1 - eta2 eliminated.
double symbol_T1_reduced(double eta1, double eta2, double xi, double alpha2);
// d/d eta1 of the symmetric form.
double symbol_dT1(double eta1, double eta2, double eta3, double alpha2);

double symbol_T2(double eta1, double eta2, double eta3, double eta4);

// Phi = 3 (eta1 + eta2)(xi - eta1)(xi - eta2).
double phase_Phi(double xi, double eta1, double eta2);
double phase_Phi_expanded(double xi, double eta1, double eta2);
std::array<double, 2> grad_Phi(double xi, double eta1, double eta2);
std::array<double, 3> hessian_Phi(double xi, double eta1, double eta2);  // (11, 12, 22)

struct ResonanceSet {
  double xi = 0.0;
  std::array<std::array<double, 2>, 4> points{};
};

// (xi, xi), (xi, -xi), (-xi, xi), (xi/3, xi/3). Throws ZeroFrequency at xi = 0.
ResonanceSet resonance_points(double xi);

// Quartic phase Psi = xi^3 - (xi - eta1 - eta2 - eta3)^3 - eta1^3 - eta2^3 - eta3^3.
double phase_Psi(double xi, double eta1, double eta2, double eta3);
std::array<double, 3> grad_Psi(double xi, double eta1, double eta2, double eta3);

struct QuarticSearchResult {
  double min_objective = 0.0;
  std::array<double, 4> argmin{};  // (xi, eta1, eta2, eta3)
  int starts = 0;
};

// Multistart minimization of Psi^2 + |grad Psi|^2 over |xi| in [xi_min, xi_max],
// eta in [-eta_box, eta_box]^3.
QuarticSearchResult quartic_resonance_search(std::uint64_t seed, int starts, double xi_min, double xi_max,
                                             double eta_box);

enum class DyadicSymbol { T1, dT1 };

struct DyadicResolution {
  int samples_per_axis = 128;
  int oversample = 1;
  // Frequency box per axis, as a multiple of the cutoff support width.
  double box_factor = 4.0;
};

// T1 (or d T1) times psi_{j1} x psi_{j2} x psi_{j3} as a sum of tensor products.
SeparableSymbol dyadic_symbol(int j1, int j2, int j3, double alpha2, DyadicSymbol which, int samples_per_axis,
                              double box_factor = 4.0);

struct DyadicBound {
  double ratio = 0.0;          // S-infinity / 2^{max(2 j1, 0)} or / 2^{j1}
  double s_infty = 0.0;
  double refined_s_infty = 0.0;
  double rel_change = 0.0;
};

DyadicBound dyadic_symbol_bound(int j1, int j2, int j3, double alpha2, DyadicSymbol which,
                                const DyadicResolution& res = {});

// S phi = x d_x phi + 3 t phi_t with phi_t = -phi_xxx - N(phi). The x factor is
// the centered sawtooth of the periodic box.
SpectralField scaling_field_direct(const SpectralField& phi, double t, const CoefficientSpec& c,
                                   bool include_nonlinearity = true);

// (c1(phi) d_x)^k phi.
SpectralField weighted_derivative(const SpectralField& phi, const CoefficientSpec& c, int k);

// ||phi^3||_{L2} / (||d_x^{-1} phi||_{L2} ||phi phi_x||_{L^inf}).
double phi3_ratio(const SpectralField& phi);

}  // namespace qmkdv
