#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>

#include "qmkdv/coefficient.hpp"
#include "qmkdv/error.hpp"
#include "qmkdv/model.hpp"
#include "qmkdv/random.hpp"

using namespace qmkdv;

namespace {

constexpr double kPi = std::numbers::pi;

// Sparse spectra keyed by signed index, multiplied by direct convolution:
// (fg)^_j = sum_a fhat_a ghat_{j-a} dxi in the sum-times-dxi normalization.
using Sparse = std::map<long, cplx>;

Sparse conv(const Sparse& f, const Sparse& g, double dxi) {
  Sparse out;
  for (const auto& [a, fa] : f) {
    for (const auto& [b, gb] : g) out[a + b] += fa * gb * dxi;
  }
  return out;
}

Sparse dx(const Sparse& f, double dxi) {
  Sparse out;
  for (const auto& [j, v] : f) out[j] = cplx(0.0, dxi * j) * v;
  return out;
}

Sparse add(Sparse a, const Sparse& b, double s = 1.0) {
  for (const auto& [j, v] : b) a[j] += s * v;
  return a;
}

}  // namespace

TEST_CASE("nonlinearity for linear c against a dense convolution oracle") {
  const GridSpec g(64, 2.0 * kPi);
  const double dxi = g.dxi();
  SplitMix64 rng(3);
  Sparse phi;
  SpectralField field(g);
  for (long j = 1; j <= 4; ++j) {
    const cplx v(rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3));
    phi[j] = v;
    phi[-j] = std::conj(v);
    field.at(j) = v;
    field.at(-j) = std::conj(v);
  }
  const double a = 0.7;
  const auto c = CoefficientSpec::linear(a);
  // N = (phi^3)_x + a^2 (phi (phi phi_x)_x)_x
  const Sparse cube = conv(conv(phi, phi, dxi), phi, dxi);
  const Sparse inner = dx(conv(phi, dx(phi, dxi), dxi), dxi);
  const Sparse quasi = conv(phi, inner, dxi);
  const Sparse expected = add(dx(cube, dxi), dx(quasi, dxi), a * a);

  const SpectralField n = nonlinearity_full(field, c);
  double scale = 0.0;
  for (const auto& [j, v] : expected) scale = std::max(scale, std::abs(v));
  for (const auto& [j, v] : expected) CHECK(std::abs(n.at(j) - v) < 1e-13 * scale);
  CHECK(std::abs(n.at(0)) < 1e-14 * scale);
  // Nothing outside the support of the exact product.
  for (long j = 21; j < 32; ++j) CHECK(std::abs(n.at(j)) < 1e-13 * scale);
}

TEST_CASE("split parts recompose the full nonlinearity") {
  const GridSpec g(256, 40.0);
  const auto phi = SpectralField::from_function(g, [](double x) { return 0.4 * x * std::exp(-x * x / 4.0); });
  for (const auto& c : {CoefficientSpec::linear(1.0), CoefficientSpec::sine(0.8),
                        CoefficientSpec::cubic_poly(0.5, 0.3, -0.2)}) {
    const auto full = nonlinearity_full(phi, c);
    const auto split = nonlinearity_split(phi, c);
    CHECK(spectral_l2(split.n3 + split.n4 + split.n5plus - full) <= 1e-14 * spectral_l2(full));
  }
  const auto lin = nonlinearity_split(phi, CoefficientSpec::linear(1.0));
  CHECK(spectral_l2(lin.n4) == 0.0);
}

TEST_CASE("coefficient families and their Taylor data") {
  const auto s = CoefficientSpec::sine(2.0);
  CHECK(s.c(0.0) == 0.0);
  CHECK(s.alpha2() == doctest::Approx(4.0));
  CHECK(s.alpha3() == doctest::Approx(0.0));
  const auto p = CoefficientSpec::cubic_poly(1.0, 0.5, 0.1);
  CHECK(p.alpha3() == doctest::Approx(0.5));  // c'' c' / 2 = (2 * 0.5) * 1 / 2
  CHECK(p.c1(0.3) == doctest::Approx(std::sqrt(1.0 + std::pow(0.3 + 0.5 * 0.09 + 0.1 * 0.027, 2))));
  CHECK(p.polynomial_degree() == 3);
  CHECK(s.polynomial_degree() == -1);
  CHECK_THROWS_AS(CoefficientSpec::from_name("quadratic", 1.0), Error);
}

TEST_CASE("bootstrap constants are validated") {
  BootstrapConstants k;
  CHECK_NOTHROW(k.validate());
  k.p0 = 2e-4;
  CHECK_THROWS_AS(k.validate(), Error);
}

TEST_CASE("T1 values on the resonant set") {
  for (double a2 : {0.0, 0.5, 1.0, 2.0}) {
    for (double xi : {0.3, 1.0, 2.5}) {
      CHECK(symbol_T1(xi, xi, -xi, a2) == doctest::Approx(2.0 * a2 / 3.0 * xi * xi - 1.0).epsilon(1e-14));
    }
  }
  CHECK(symbol_T1(1.0, 1.0, -1.0, 1.0) == doctest::Approx(-1.0 / 3.0));
}

TEST_CASE("phase gradient and Hessian against central differences") {
  SplitMix64 rng(8);
  for (int i = 0; i < 50; ++i) {
    const double xi = rng.uniform(-3.0, 3.0);
    const double e1 = rng.uniform(-3.0, 3.0);
    const double e2 = rng.uniform(-3.0, 3.0);
    const double h = 1e-5;
    const auto gr = grad_Phi(xi, e1, e2);
    const double g1 = (phase_Phi(xi, e1 + h, e2) - phase_Phi(xi, e1 - h, e2)) / (2.0 * h);
    const double g2 = (phase_Phi(xi, e1, e2 + h) - phase_Phi(xi, e1, e2 - h)) / (2.0 * h);
    CHECK(gr[0] == doctest::Approx(g1).epsilon(1e-7).scale(1.0));
    CHECK(gr[1] == doctest::Approx(g2).epsilon(1e-7).scale(1.0));
    const auto H = hessian_Phi(xi, e1, e2);
    const double h12 = (grad_Phi(xi, e1, e2 + h)[0] - grad_Phi(xi, e1, e2 - h)[0]) / (2.0 * h);
    CHECK(H[1] == doctest::Approx(h12).epsilon(1e-7).scale(1.0));
  }
}

TEST_CASE("space-time resonances") {
  const double xi = 1.3;
  const auto r = resonance_points(xi);
  for (int i = 0; i < 3; ++i) {
    CHECK(std::abs(phase_Phi(xi, r.points[i][0], r.points[i][1])) < 1e-14);
    const auto g = grad_Phi(xi, r.points[i][0], r.points[i][1]);
    CHECK(std::abs(g[0]) + std::abs(g[1]) < 1e-13);
  }
  // Space resonance only: Phi(xi/3, xi/3) = 8 xi^3 / 9.
  CHECK(phase_Phi(xi, xi / 3.0, xi / 3.0) == doctest::Approx(8.0 * xi * xi * xi / 9.0));
  CHECK_THROWS_AS(resonance_points(0.0), Error);
}

TEST_CASE("scaling field at t = 0 reduces to x d_x") {
  const GridSpec g(512, 60.0);
  auto phi = SpectralField::from_function(g, [](double x) { return x * std::exp(-x * x); });
  const auto s = scaling_field_direct(phi, 0.0, CoefficientSpec::linear(0.0), false).to_physical();
  for (std::size_t m = 0; m < g.n(); ++m) {
    const double x = g.x(m);
    CHECK(std::abs(s[m] - (x - 2.0 * x * x * x) * std::exp(-x * x)) < 1e-11);
  }
}
