#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qmkdv/littlewood_paley.hpp"
#include "qmkdv/random.hpp"

using namespace qmkdv;

namespace {

constexpr double kPi = std::numbers::pi;

// Midpoint rule on a fine grid: independent of the exact root-splitting kernel.
double brute_l1(const std::function<double(double)>& g, double period, int samples) {
  double acc = 0.0;
  const double h = period / samples;
  for (int i = 0; i < samples; ++i) acc += std::abs(g(-0.5 * period + (i + 0.5) * h));
  return acc * h;
}

}  // namespace

TEST_CASE("smooth step endpoints and symmetry") {
  CHECK(smooth_step(0.0) == 0.0);
  CHECK(smooth_step(1.0) == 1.0);
  CHECK(smooth_step(0.5) == doctest::Approx(0.5).epsilon(1e-15));
  SplitMix64 rng(5);
  for (int i = 0; i < 100; ++i) {
    const double u = rng.uniform();
    CHECK(smooth_step(u) + smooth_step(1.0 - u) == doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("property: dyadic pieces sum to one away from the origin") {
  SplitMix64 rng(11);
  for (int i = 0; i < 1000; ++i) {
    const double xi = std::exp2(rng.uniform(-12.0, 12.0)) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
    double sum = psi_le_k(xi, -20);
    for (int k = -19; k <= 20; ++k) sum += psi_k(xi, k);
    CHECK(std::abs(sum - 1.0) < 1e-12);
  }
}

TEST_CASE("dyadic pieces are dilates of one profile") {
  SplitMix64 rng(12);
  for (int i = 0; i < 200; ++i) {
    const double xi = rng.uniform(0.3, 3.0);
    const int k = static_cast<int>(rng.uniform(-6.0, 6.0));
    CHECK(psi_k(std::ldexp(xi, k), k) == psi_k(xi, 0));
  }
  CHECK(psi_k(0.0, 0) == 0.0);
  CHECK(psi_k(10.0, 0) == 0.0);
}

TEST_CASE("corrupted bump breaks the partition") {
  const auto bad = BumpFunction::corrupted(1e-3);
  double sum = psi_le_k(1.0, -10, bad);
  for (int k = -9; k <= 10; ++k) sum += psi_k(1.0, k, bad);
  CHECK(std::abs(sum - 1.0) > 1e-6);
}

TEST_CASE("line L1 of cos(x) over one period is 4") {
  const GridSpec g(16, 2.0 * kPi);
  std::vector<cplx> c(g.n(), 0.0);
  c[g.storage_index(1)] = 0.5;
  c[g.storage_index(-1)] = 0.5;
  for (int over : {1, 2, 4}) CHECK(line_l1(g, c, over) == doctest::Approx(4.0).epsilon(1e-13));
}

TEST_CASE("line L1 with off-grid roots against a fine midpoint sum") {
  const GridSpec g(32, 2.0 * kPi);
  std::vector<cplx> c(g.n(), 0.0);
  // g(x) = 0.3 + sin(x) + 0.4 cos(3x)
  c[g.storage_index(0)] = 0.3;
  c[g.storage_index(1)] = cplx(0.0, -0.5);
  c[g.storage_index(-1)] = cplx(0.0, 0.5);
  c[g.storage_index(3)] = 0.2;
  c[g.storage_index(-3)] = 0.2;
  const double ref =
      brute_l1([](double x) { return 0.3 + std::sin(x) + 0.4 * std::cos(3.0 * x); }, 2.0 * kPi, 4000000);
  CHECK(line_l1(g, c, 2) == doctest::Approx(ref).epsilon(1e-9));
}

TEST_CASE("S-infinity norm of a tensor product factorizes") {
  const GridSpec ax(64, 16.0);
  SeparableSymbol m({ax, ax});
  const auto a = m.add_factor(0, [](double xi) { return std::exp(-xi * xi); });
  const auto b = m.add_factor(1, [](double xi) { return std::exp(-2.0 * (xi - 0.5) * (xi - 0.5)); });
  m.add_term(1.0, {a, b});
  SymbolGrid la{{ax}, {}};
  SymbolGrid lb{{ax}, {}};
  for (long j = -32; j < 32; ++j) {
    la.values.push_back(std::exp(-std::pow(ax.dxi() * j, 2)));
    lb.values.push_back(std::exp(-2.0 * std::pow(ax.dxi() * j - 0.5, 2)));
  }
  const double expected = s_infty_norm(la) * s_infty_norm(lb);
  CHECK(s_infty_norm(m) == doctest::Approx(expected).epsilon(1e-10));
  CHECK(s_infty_norm(m.to_grid()) == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("S-infinity is invariant under dilation of the symbol") {
  // m(2 xi) has inverse transform g(x / 2) / 2, with the same L1 norm.
  const GridSpec ax(128, 60.0);
  SymbolGrid m{{ax}, {}};
  SymbolGrid m2{{ax}, {}};
  for (long j = -64; j < 64; ++j) {
    m.values.push_back(std::exp(-std::pow(ax.dxi() * j, 2)));
    m2.values.push_back(std::exp(-std::pow(2.0 * ax.dxi() * j, 2)));
  }
  CHECK(s_infty_norm(m2) == doctest::Approx(s_infty_norm(m)).epsilon(1e-9));
}

TEST_CASE("unresolved symbols are rejected") {
  const GridSpec ax(32, 4.0);
  SymbolGrid m{{ax}, std::vector<cplx>(32, 1.0)};
  CHECK_THROWS(check_boundary_decay(m));
}

TEST_CASE("property: interpolation ratio stays below 10 for wave packets") {
  SplitMix64 rng(99);
  const GridSpec g(2048, 400.0);
  for (int trial = 0; trial < 20; ++trial) {
    const double w = rng.uniform(1.0, 10.0);
    const double k0 = rng.uniform(1.0, 3.0);
    const double x0 = rng.uniform(-50.0, 50.0);
    auto f = SpectralField::from_function(
        g, [=](double x) { return std::exp(-(x - x0) * (x - x0) / (w * w)) * std::cos(k0 * x); });
    const int k = static_cast<int>(std::floor(std::log2(k0)));
    CHECK(interpolation_ratio(f, k) <= 10.0);
  }
}
