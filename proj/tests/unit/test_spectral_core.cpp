#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qmkdv/error.hpp"
#include "qmkdv/random.hpp"
#include "qmkdv/spectral_core.hpp"

using namespace qmkdv;

namespace {

constexpr double kPi = std::numbers::pi;

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("grid index maps are inverse to each other") {
  const GridSpec g(64, 10.0);
  for (std::size_t i = 0; i < g.n(); ++i) CHECK(g.storage_index(g.signed_index(i)) == i);
  CHECK(g.signed_index(0) == 0);
  CHECK(g.signed_index(32) == -32);
  CHECK(g.dxi() == doctest::Approx(2.0 * kPi / 10.0).epsilon(1e-15));
}

TEST_CASE("physical round trip and single-mode coefficients") {
  const GridSpec g(32, 2.0 * kPi);
  const auto f = SpectralField::from_function(g, [](double x) { return std::cos(3.0 * x); });
  // f = sum fhat e^{i xi x} dxi with dxi = 1, so cos(3x) has fhat(+-3) = 1/2.
  CHECK(std::abs(f.at(3) - 0.5) < 1e-15);
  CHECK(std::abs(f.at(-3) - 0.5) < 1e-15);
  const auto back = f.to_physical();
  for (std::size_t m = 0; m < g.n(); ++m) CHECK(std::abs(back[m] - std::cos(3.0 * g.x(m))) < 1e-14);
}

TEST_CASE("spectral derivatives of a trigonometric polynomial") {
  const GridSpec g(64, 4.0 * kPi);
  auto f = SpectralField::from_function(g, [](double x) { return std::sin(1.5 * x) + 0.25 * std::cos(2.0 * x); });
  const auto d1 = derivative(f, 1).to_physical();
  const auto d3 = derivative(f, 3).to_physical();
  std::vector<double> e1(g.n()), e3(g.n());
  for (std::size_t m = 0; m < g.n(); ++m) {
    const double x = g.x(m);
    e1[m] = 1.5 * std::cos(1.5 * x) - 0.5 * std::sin(2.0 * x);
    e3[m] = -3.375 * std::cos(1.5 * x) + 2.0 * std::sin(2.0 * x);
  }
  CHECK(max_abs_diff(d1, e1) < 1e-13);
  CHECK(max_abs_diff(d3, e3) < 1e-11);
}

TEST_CASE("L2 norm and the xi-side H0 norm differ by sqrt(2 pi)") {
  const GridSpec g(256, 40.0);
  const auto f = SpectralField::from_function(g, [](double x) { return std::exp(-x * x) * (1.0 + 0.3 * x); });
  // Physical oracle: trapezoid sum, spectrally exact for a periodic smooth integrand.
  double sq = 0.0;
  for (double v : f.to_physical()) sq += v * v;
  const double l2 = std::sqrt(sq * g.dx());
  CHECK(norm(f, NormKind::L2) == doctest::Approx(l2).epsilon(1e-13));
  CHECK(norm(f, NormKind::L2) == doctest::Approx(std::sqrt(2.0 * kPi) * sobolev_norm(f, 0.0)).epsilon(1e-13));
}

TEST_CASE("free group acts on each mode by exp(i t xi^3)") {
  const GridSpec g(32, 2.0 * kPi);
  const auto f = SpectralField::from_function(g, [](double x) { return std::cos(2.0 * x); });
  const double t = 0.37;
  const auto u = free_evolve(f, t);
  CHECK(std::abs(u.at(2) - 0.5 * std::polar(1.0, 8.0 * t)) < 1e-15);
  CHECK(std::abs(u.at(-2) - 0.5 * std::polar(1.0, -8.0 * t)) < 1e-15);
  // u(t, x) = cos(2x + 8t) solves u_t + u_xxx = 0.
  const auto phys = u.to_physical();
  for (std::size_t m = 0; m < g.n(); ++m) CHECK(std::abs(phys[m] - std::cos(2.0 * g.x(m) + 8.0 * t)) < 1e-14);
  const auto h = profile_from_solution(u, t);
  CHECK(spectral_l2(h - f) < 1e-15);
}

TEST_CASE("padded products match the physical product of band-limited fields") {
  const GridSpec g(64, 2.0 * kPi);
  const auto f = SpectralField::from_function(g, [](double x) { return std::sin(x) + std::cos(5.0 * x); });
  const auto h = SpectralField::from_function(g, [](double x) { return std::cos(7.0 * x) - 0.5; });
  const auto p = pointwise_product(f, h, 3).to_physical();
  for (std::size_t m = 0; m < g.n(); ++m) {
    const double x = g.x(m);
    CHECK(std::abs(p[m] - (std::sin(x) + std::cos(5.0 * x)) * (std::cos(7.0 * x) - 0.5)) < 1e-13);
  }
}

TEST_CASE("antiderivative inverts d/dx and rejects a nonzero mean") {
  const GridSpec g(128, 20.0);
  auto f = SpectralField::from_function(g, [](double x) { return -2.0 * x * std::exp(-x * x); });
  remove_mean(f);
  const auto F = antiderivative(f);
  CHECK(spectral_l2(derivative(F, 1) - f) < 1e-14);
  const auto bump = SpectralField::from_function(g, [](double x) { return std::exp(-x * x); });
  CHECK_THROWS_AS(antiderivative(bump), Error);
}

TEST_CASE("fields on different grids cannot be combined") {
  SpectralField a(GridSpec(16, 1.0));
  const SpectralField b(GridSpec(32, 1.0));
  CHECK_THROWS_AS(a += b, Error);
}

TEST_CASE("multiplication by x on a localized field") {
  const GridSpec g(256, 40.0);
  const auto f = SpectralField::from_function(g, [](double x) { return std::exp(-x * x); });
  const auto xf = multiply_by_x(f).to_physical();
  for (std::size_t m = 0; m < g.n(); ++m) CHECK(std::abs(xf[m] - g.x(m) * std::exp(-g.x(m) * g.x(m))) < 1e-13);
}

TEST_CASE("property: real fields stay conjugate symmetric under the linear operations") {
  SplitMix64 rng(42);
  const GridSpec g(64, 30.0);
  for (int trial = 0; trial < 20; ++trial) {
    const double a = rng.uniform(-1.0, 1.0);
    const double w = rng.uniform(0.5, 3.0);
    const double k = rng.uniform(0.0, 2.0);
    auto f = SpectralField::from_function(g, [=](double x) { return a * std::exp(-x * x / (w * w)) * std::cos(k * x); });
    CHECK(conjugate_asymmetry(f) < 1e-15);
    CHECK(conjugate_asymmetry(derivative(f, 3)) < 1e-12);
    CHECK(conjugate_asymmetry(free_evolve(f, rng.uniform(0.0, 10.0))) < 1e-12);
    CHECK(conjugate_asymmetry(fractional_abs_derivative(f, 0.5)) < 1e-12);
  }
}
