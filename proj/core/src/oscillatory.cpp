#include "qmkdv/oscillatory.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qmkdv/error.hpp"
#include "qmkdv/fft.hpp"
#include "qmkdv/model.hpp"

namespace qmkdv {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kRoundoffFloor = 1e-11;

std::size_t next_pow2(double v) {
  std::size_t n = 16;
  while (static_cast<double>(n) < v) n <<= 1;
  return n;
}

}  // namespace

OscillatoryResult cutoff_double_integral(const std::function<double(double)>& g, double support, double B,
                                         double reference, double du) {
  // Aliased copies of G sit N du apart; the floor keeps them far in its tail.
  const double reach = support * B * B;
  const std::size_t n = next_pow2((2.0 * reach + 8192.0) / du);
  const double dy = 2.0 * kPi / (static_cast<double>(n) * du);
  std::vector<cplx> table(n);
  const long half = static_cast<long>(n / 2);
  for (std::size_t m = 0; m < n; ++m) table[m] = g(dy * static_cast<double>(static_cast<long>(m) - half));
  fft::forward(table);
  // With y_m = (m - n/2) dy the transform picks up (-1)^j.
  double acc = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const long sj = static_cast<long>(j) < half ? static_cast<long>(j) : static_cast<long>(j) - static_cast<long>(n);
    const double u = du * static_cast<double>(sj);
    if (std::abs(u) > reach) continue;
    const double sign = (sj % 2 == 0) ? 1.0 : -1.0;
    acc += g(u / (B * B)) * sign * table[j].real() * dy;
  }
  OscillatoryResult r;
  r.parameter = B;
  r.value = cplx{acc * du, 0.0};
  r.reference = reference;
  r.error = std::abs(r.value - reference);
  r.resolution = n;
  return r;
}

namespace {

OscillatoryResult gated(const std::function<double(double)>& g, double support, double B, double reference,
                        double du) {
  if (!(B >= 4.0)) throw Error(ErrorKind::ConfigError, "oscillatory scale B must be at least 4");
  OscillatoryResult coarse = cutoff_double_integral(g, support, B, reference, du);
  const OscillatoryResult fine = cutoff_double_integral(g, support, B, reference, 0.5 * du);
  coarse.refined_change = std::abs(coarse.value - fine.value);
  if (coarse.refined_change > kRoundoffFloor && coarse.refined_change >= 0.1 * coarse.error) {
    throw Error(ErrorKind::UnresolvedOscillation,
                "halving the quadrature step moved the value by " + std::to_string(coarse.refined_change));
  }
  return coarse;
}

}  // namespace

OscillatoryResult two_pi_identity(double B, const BumpFunction& bump, double du) {
  return gated([&bump](double x) { return bump(x); }, bump.support(), B, 2.0 * kPi, du);
}

OscillatoryResult gaussian_self_test(double B, double du) {
  const double reference = 2.0 * kPi / std::sqrt(1.0 + 4.0 / (B * B * B * B));
  return gated([](double x) { return std::exp(-x * x); }, 6.5, B, reference, du);
}

double local_phase_residual(double xi, double z1, double z2) {
  return phase_Phi(xi, xi + z1, xi + z2) - 6.0 * xi * z1 * z2 - 3.0 * (z1 + z2) * z1 * z2;
}

cplx trilinear_integral(const TrilinearSetup& s, double t, int n) {
  const double d1 = (s.hi1 - s.lo1) / n;
  const double d2 = (s.hi2 - s.lo2) / n;
  std::vector<double> e1(n), e2(n), w1(n), w2(n);
  for (int i = 0; i < n; ++i) {
    e1[i] = s.lo1 + (i + 0.5) * d1;
    e2[i] = s.lo2 + (i + 0.5) * d2;
    w1[i] = s.f1(e1[i]);
    w2[i] = s.f2(e2[i]);
  }
  cplx acc{0.0, 0.0};
  for (int i = 0; i < n; ++i) {
    if (w1[i] == 0.0) continue;
    cplx row{0.0, 0.0};
    for (int k = 0; k < n; ++k) {
      if (w2[k] == 0.0) continue;
      const double amp = w2[k] * s.f3(s.xi - e1[i] - e2[k]);
      if (amp == 0.0) continue;
      row += amp * std::polar(1.0, t * phase_Phi(s.xi, e1[i], e2[k]));
    }
    acc += w1[i] * row;
  }
  return acc * d1 * d2;
}

TrilinearSetup decay_region_setup(DecayRegion region) {
  TrilinearSetup s;
  if (region == DecayRegion::Separated) {
    const auto band = [](int k) {
      return [k](double x) { return x > 0.0 ? psi_k(x, k) : 0.0; };
    };
    s.xi = 1.2;
    s.f1 = band(0);
    s.f2 = band(-3);
    s.f3 = band(-3);
    s.lo1 = 0.625;
    s.hi1 = 1.6;
    s.lo2 = 0.078125;
    s.hi2 = 0.2;
  } else {
    const auto bump = [](double centre) {
      return [centre](double x) { return standard_bump()((x - centre) / 0.5); };
    };
    s.xi = 1.0;
    s.f1 = bump(1.0);
    s.f2 = bump(1.0);
    s.f3 = bump(-1.0);
    s.lo1 = s.lo2 = 0.2;
    s.hi1 = s.hi2 = 1.8;
  }
  return s;
}

DecayStudy nonresonant_decay_study(const std::vector<double>& t_list, DecayRegion region, int n) {
  if (t_list.size() < 8) throw Error(ErrorKind::InsufficientData, "decay study needs at least 8 times");
  const TrilinearSetup setup = decay_region_setup(region);
  DecayStudy study;
  study.region = region;
  study.n = n;
  study.t = t_list;
  study.values.resize(t_list.size());
  study.refined_change.resize(t_list.size());
  std::vector<std::pair<double, double>> series;
  for (std::size_t i = 0; i < t_list.size(); ++i) {
    const cplx v = trilinear_integral(setup, t_list[i], n);
    const cplx fine = trilinear_integral(setup, t_list[i], 2 * n);
    const double change = std::abs(v - fine) / std::max(std::abs(fine), 1e-300);
    if (change >= 0.1) {
      throw Error(ErrorKind::UnresolvedOscillation,
                  "trilinear sum unresolved at t = " + std::to_string(t_list[i]));
    }
    study.values[i] = v;
    study.refined_change[i] = change;
    series.emplace_back(t_list[i], std::abs(v));
  }
  study.fit = decay_fit(series, t_list.front(), t_list.back());
  return study;
}

}  // namespace qmkdv
