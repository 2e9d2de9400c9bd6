#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "qmkdv/diagnostics.hpp"
#include "qmkdv/littlewood_paley.hpp"
#include "qmkdv/spectral_core.hpp"

namespace qmkdv {

struct OscillatoryResult {
  double parameter = 0.0;
  cplx value{};
  double reference = 0.0;
  double error = 0.0;
  std::size_t resolution = 0;   // FFT length of the tabulated transform
  double refined_change = 0.0;  // |value(du) - value(du / 2)|
};

// I(B) = iint e^{-i x1 x2} g(x1 / B) g(x2 / B) dx1 dx2 for an even cutoff g
// vanishing (to double precision) beyond |x| = support. The inner integral is
// B G(B x1) with G = int g(y) e^{-i u y} dy tabulated by one FFT on the
// u-grid of spacing du; the outer integral is the trapezoid sum on that grid.
OscillatoryResult cutoff_double_integral(const std::function<double(double)>& g, double support, double B,
                                         double reference, double du = 0.5);

// The bump version with reference 2 pi. Throws UnresolvedOscillation when
// halving du moves the value by 10% of the error or more (changes below a
// 1e-11 round-off floor are accepted).
OscillatoryResult two_pi_identity(double B, const BumpFunction& bump = standard_bump(), double du = 0.5);

// Gaussian cutoff e^{-x^2}, whose double integral is 2 pi (1 + 4 / B^4)^{-1/2}.
OscillatoryResult gaussian_self_test(double B, double du = 0.5);

// Phi(xi, xi + z1, xi + z2) - 6 xi z1 z2 - 3 (z1 + z2) z1 z2. Zero identically.
double local_phase_residual(double xi, double z1, double z2);

struct TrilinearSetup {
  double xi = 0.0;
  std::function<double(double)> f1, f2, f3;
  double lo1 = 0.0, hi1 = 0.0;  // support of f1 (eta1 axis)
  double lo2 = 0.0, hi2 = 0.0;  // support of f2 (eta2 axis)
};

// sum over an n x n midpoint grid of e^{i t Phi(xi, eta1, eta2)} f1(eta1) f2(eta2) f3(xi - eta1 - eta2).
cplx trilinear_integral(const TrilinearSetup& s, double t, int n);

enum class DecayRegion { Separated, ResonantOverlap };

// Separated: f1 on the positive part of band 0, f2 = f3 on the positive part
// of band -3, xi = 1.2, so |d_eta1 Phi| stays of size 2^{2 j1}.
// Overlap: bumps of width 1/2 centred at 1, 1, -1 with xi = 1, so the
// resonance (xi, xi) sits inside the support.
TrilinearSetup decay_region_setup(DecayRegion region);

struct DecayStudy {
  DecayRegion region = DecayRegion::Separated;
  std::vector<double> t;
  std::vector<cplx> values;
  std::vector<double> refined_change;  // relative change at doubled n
  DecayFit fit;
  int n = 0;
};

// Envelope decay of |I(t)| for the region. Each value is checked against the
// 2n evaluation (UnresolvedOscillation beyond 10% relative change).
DecayStudy nonresonant_decay_study(const std::vector<double>& t_list, DecayRegion region, int n = 128);

}  // namespace qmkdv
