#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qmkdv/diagnostics.hpp"
#include "qmkdv/error.hpp"
#include "qmkdv/model.hpp"
#include "qmkdv/random.hpp"

using namespace qmkdv;

namespace {

constexpr double kPi = std::numbers::pi;

SpectralField packet(const GridSpec& g, double amp, double w, double k0) {
  auto f = SpectralField::from_function(g, [=](double x) { return amp * std::exp(-x * x / (w * w)) * std::sin(k0 * x); });
  remove_mean(f);
  return f;
}

}  // namespace

TEST_CASE("phase-correction prefactors") {
  CHECK(theta_coefficient(ThetaVariant::A, 1.0, 1.0) == doctest::Approx(kPi / 18.0));
  CHECK(theta_coefficient(ThetaVariant::B, 1.0, 1.0) == doctest::Approx(-kPi / 6.0));
  CHECK(theta_coefficient(ThetaVariant::A, 2.0, 0.0) == doctest::Approx(kPi / 6.0));
  CHECK(theta_coefficient(ThetaVariant::B, 2.0, 0.0) == doctest::Approx(kPi / 6.0));
  // The derived prefactor is odd in xi.
  CHECK(theta_coefficient(ThetaVariant::C, -1.5, 1.0) == doctest::Approx(-theta_coefficient(ThetaVariant::C, 1.5, 1.0)));
}

TEST_CASE("phase integral with constant modulus is exact in log t") {
  const GridSpec g(1024, 200.0);
  SpectralField h = packet(g, 0.5, 4.0, 1.0);
  h.set_time(1.0);
  auto probe = make_probe(h, {0.9, 1.0, 1.1}, 1.0);
  for (const auto& th : probe.theta) {
    for (double v : th) CHECK(v == 0.0);
  }
  double t = 1.0;
  for (int i = 0; i < 7; ++i) {
    const double next = t * 1.7;
    theta_accumulate(probe, h, t, next);
    record(probe, h);
    t = next;
  }
  for (std::size_t i = 0; i < probe.xi.size(); ++i) {
    const double q = std::norm(h.at(probe.modes[i]));
    for (ThetaVariant v : kThetaVariants) {
      const double expected = theta_coefficient(v, probe.xi[i], 1.0) * q * std::log(t);
      CHECK(probe.theta[static_cast<int>(v)][i] == doctest::Approx(expected).epsilon(1e-12));
    }
  }
  // Moduli are untouched by the correction.
  for (const auto& rec : probe.history) {
    for (std::size_t i = 0; i < probe.xi.size(); ++i) {
      for (const auto& v : rec.v) CHECK(std::abs(v[i]) == doctest::Approx(std::abs(rec.h[i])).epsilon(1e-15));
    }
  }
}

TEST_CASE("phase integral rejects bad times") {
  const GridSpec g(256, 100.0);
  SpectralField h = packet(g, 0.5, 4.0, 1.0);
  h.set_time(2.0);
  CHECK_THROWS_AS(make_probe(h, {1.0}, 1.0), Error);
  h.set_time(1.0);
  auto probe = make_probe(h, {1.0}, 1.0);
  CHECK_THROWS_AS(theta_accumulate(probe, h, 1.0, 0.5), Error);
  CHECK_THROWS_AS(theta_accumulate(probe, h, 2.0, 3.0), Error);
}

TEST_CASE("a frozen profile drifts at the predicted rate only when it should") {
  // Build a synthetic history hhat(t) = a e^{-i s log t}; the monitor must
  // recover s for every variant.
  const GridSpec g(512, 200.0);
  SpectralField h = packet(g, 0.5, 4.0, 1.0);
  h.set_time(1.0);
  auto probe = make_probe(h, {1.0, 1.03, 1.06}, 1.0);
  record(probe, h);
  const double s = 0.05;
  double t = 1.0;
  for (int m = 1; m <= 6; ++m) {
    const double next = std::exp2(m);
    SpectralField hm = h;
    for (long j : probe.modes) {
      hm.at(j) *= std::polar(1.0, -s * std::log(next));
      hm.at(-j) = std::conj(hm.at(j));
    }
    theta_accumulate(probe, hm, t, next);
    record(probe, hm);
    t = next;
  }
  const auto rep = scattering_monitor(probe);
  for (const auto& e : rep.entries) CHECK(e.drift_slope == doctest::Approx(-s).epsilon(1e-9));
}

TEST_CASE("decay fit recovers an exact power law") {
  std::vector<std::pair<double, double>> series;
  for (int i = 0; i < 20; ++i) {
    const double t = 10.0 * std::pow(1.3, i);
    series.emplace_back(t, 3.0 * std::pow(t, -0.4));
  }
  const auto fit = decay_fit(series, 0.0, 1e9);
  CHECK(fit.exponent == doctest::Approx(-0.4).epsilon(1e-12));
  CHECK(fit.prefactor == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(fit.samples == 20);
  CHECK_THROWS_AS(decay_fit(series, 10.0, 30.0), Error);
}

TEST_CASE("frequency window is one inside and zero well outside") {
  const BootstrapConstants k;
  const double t = 100.0;
  CHECK(frequency_window(t, 1.0, k) == 1.0);
  CHECK(frequency_window(t, -1.0, k) == 1.0);
  CHECK(frequency_window(t, 3.0, k) == 0.0);
  CHECK(frequency_window(t, 0.1 * std::pow(t + 1.0, -2.0 * k.p0), k) == 0.0);
}

TEST_CASE("xi derivative of a Gaussian transform") {
  // exp(-x^2) has transform proportional to exp(-xi^2 / 4); d_xi of it is -(xi / 2) times it.
  const GridSpec g(512, 80.0);
  const auto f = SpectralField::from_function(g, [](double x) { return std::exp(-x * x); });
  const auto d = xi_derivative(f);
  for (long j = -40; j <= 40; ++j) {
    const double xi = g.dxi() * j;
    CHECK(std::abs(d.at(j) - (-0.5 * xi) * f.at(j)) < 1e-13);
  }
}

TEST_CASE("energy pieces are nonnegative and add up") {
  const GridSpec g(1024, 200.0);
  const auto phi = packet(g, 0.05, 3.0, 1.0);
  BootstrapConstants k;
  k.s = 4.0;
  const auto e = energy(phi, 0.0, CoefficientSpec::linear(1.0), k);
  const double sum = e.antiderivative_sq + e.sobolev_sq + e.antiderivative_scaling_sq + e.scaling_sq +
                     e.xi_dxi_profile_sq + e.dxi_profile_sq;
  CHECK(e.total == doctest::Approx(sum).epsilon(1e-14));
  CHECK(e.antiderivative_sq > 0.0);
  CHECK(e.sobolev_sq > 0.0);
  CHECK(e.z_norm > 0.0);
}

TEST_CASE("scaling field from the profile agrees with the direct form") {
  const GridSpec g(1024, 100.0);
  const auto phi = packet(g, 0.1, 3.0, 1.0);
  const auto c = CoefficientSpec::linear(1.0);
  for (double t : {0.0, 0.5}) {
    SpectralField p = free_evolve(phi, t);
    p.set_time(t);
    auto a = scaling_field_spectral(p, t, c);
    auto b = scaling_field_direct(p, t, c);
    remove_mean(a);
    remove_mean(b);
    CHECK(spectral_l2(a - b) < 1e-9 * spectral_l2(b));
  }
}

TEST_CASE("property: weighted norm equivalence ratios stay bounded") {
  SplitMix64 rng(21);
  const GridSpec g(512, 100.0);
  for (int trial = 0; trial < 10; ++trial) {
    const auto phi = packet(g, rng.uniform(0.01, 0.3), rng.uniform(1.0, 5.0), rng.uniform(0.0, 2.0));
    for (int k = 1; k <= 3; ++k) {
      const auto r = weighted_norm_equivalence(phi, CoefficientSpec::linear(1.0), k);
      CHECK(r.ratio_flat > 0.5);
      CHECK(r.ratio_flat < 2.0);
      CHECK(r.ratio_sobolev > 0.1);
      CHECK(r.ratio_sobolev < 10.0);
    }
  }
}
