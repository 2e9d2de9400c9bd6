#include "qmkdv/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qmkdv/error.hpp"
#include "qmkdv/integrator.hpp"
#include "qmkdv/littlewood_paley.hpp"
#include "qmkdv/model.hpp"

namespace qmkdv {

namespace {

constexpr double kPi = std::numbers::pi;

double sq(double v) { return v * v; }

std::size_t variant_slot(ThetaVariant v) { return static_cast<std::size_t>(v); }

}  // namespace

double z_norm(const SpectralField& phi, const BootstrapConstants& k) {
  const auto& g = phi.grid();
  double best = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    const double a = std::abs(g.xi(i));
    const double w = std::pow(a, k.gamma_l) + std::pow(a, k.gamma_h);
    best = std::max(best, w * std::abs(phi.coeffs()[i]));
  }
  return best;
}

SpectralField xi_derivative(const SpectralField& h) {
  SpectralField out = multiply_by_x(h);
  out *= cplx{0.0, -1.0};
  return out;
}

SpectralField scaling_field_spectral(const SpectralField& phi, double t, const CoefficientSpec& c,
                                     bool include_nonlinearity) {
  const auto& g = phi.grid();
  if (std::abs(phi.coeffs()[0]) > 1e-12 * std::max(1.0, spectral_l2(phi))) {
    throw Error(ErrorKind::NonZeroMean, "scaling field needs a zero-mean field");
  }
  const SpectralField h = profile_from_solution(phi, t);
  const SpectralField dh = xi_derivative(h);
  SpectralField out(g, phi.time());
  for (std::size_t i = 0; i < g.n(); ++i) {
    const double xi = g.xi(i);
    out.coeffs()[i] = -std::polar(1.0, t * xi * xi * xi) * xi * dh.coeffs()[i] - phi.coeffs()[i];
  }
  if (t != 0.0 && include_nonlinearity) out -= (3.0 * t) * nonlinearity_full(phi, c);
  return out;
}

EnergyBreakdown energy(const SpectralField& phi, double t, const CoefficientSpec& c, const BootstrapConstants& k) {
  EnergyBreakdown e;
  e.t = t;
  e.antiderivative_sq = sq(norm(antiderivative(phi, 1e-10), NormKind::L2));
  e.sobolev_sq = sq(sobolev_norm(phi, k.s));

  // The exact S phi has zero mean; the sawtooth leaves a mean of boundary size.
  SpectralField s = scaling_field_direct(phi, t, c);
  remove_mean(s);
  e.antiderivative_scaling_sq = sq(norm(antiderivative(s), NormKind::L2));
  e.scaling_sq = sq(norm(s, NormKind::L2));

  const SpectralField h = profile_from_solution(phi, t);
  const SpectralField dh = xi_derivative(h);
  const SpectralField xdh = apply_symbol(dh, [](double xi) { return cplx{xi, 0.0}; });
  e.xi_dxi_profile_sq = sq(spectral_l2(xdh));
  e.dxi_profile_sq = sq(spectral_l2(dh));

  e.total = e.antiderivative_sq + e.sobolev_sq + e.antiderivative_scaling_sq + e.scaling_sq +
            e.xi_dxi_profile_sq + e.dxi_profile_sq;
  e.z_norm = z_norm(phi, k);
  e.hamiltonian = hamiltonian(phi, c);
  return e;
}

double frequency_window(double t, double xi, const BootstrapConstants& k) {
  const double a = std::abs(xi);
  const double lo = std::pow(t + 1.0, -2.0 * k.p0);
  const double hi = std::pow(t + 1.0, k.p1);
  if (a <= 0.5 * lo || a >= hi + 1.0) return 0.0;
  if (a < lo) return smooth_step((a - 0.5 * lo) / (0.5 * lo));
  if (a > hi) return 1.0 - smooth_step(a - hi);
  return 1.0;
}

std::string to_string(ThetaVariant v) {
  switch (v) {
    case ThetaVariant::A: return "A";
    case ThetaVariant::B: return "B";
    case ThetaVariant::C: return "C";
  }
  return "?";
}

double theta_coefficient(ThetaVariant v, double xi, double alpha2) {
  const double x2 = xi * xi;
  switch (v) {
    case ThetaVariant::A: return -kPi * (2.0 * alpha2 * x2 - 3.0) / 18.0;
    case ThetaVariant::B: return -kPi * (2.0 * alpha2 * x2 - 1.0) / 6.0;
    case ThetaVariant::C: {
      const double sign = xi > 0.0 ? 1.0 : (xi < 0.0 ? -1.0 : 0.0);
      return -sign * kPi * (2.0 * alpha2 * x2 - 3.0) / 3.0;
    }
  }
  return 0.0;
}

ScatteringProbe make_probe(const SpectralField& h_at_one, const std::vector<double>& xi_targets, double alpha2) {
  if (std::abs(h_at_one.time() - 1.0) > 1e-12) {
    throw Error(ErrorKind::NonMonotoneTime, "the phase integral starts at t = 1");
  }
  const auto& g = h_at_one.grid();
  ScatteringProbe p;
  p.alpha2 = alpha2;
  const long half = static_cast<long>(g.n() / 2);
  for (double target : xi_targets) {
    const long j = std::clamp(static_cast<long>(std::lround(target / g.dxi())), -half + 1, half - 1);
    p.modes.push_back(j);
    p.xi.push_back(g.dxi() * static_cast<double>(j));
  }
  for (auto& th : p.theta) th.assign(p.modes.size(), 0.0);
  p.t_last = 1.0;
  p.q_last.resize(p.modes.size());
  for (std::size_t i = 0; i < p.modes.size(); ++i) p.q_last[i] = std::norm(h_at_one.at(p.modes[i]));
  return p;
}

void theta_accumulate(ScatteringProbe& probe, const SpectralField& h_now, double t_prev, double t_now) {
  if (t_prev < 1.0 || t_now < t_prev || std::abs(t_prev - probe.t_last) > 1e-12 * std::max(1.0, t_prev)) {
    throw Error(ErrorKind::NonMonotoneTime, "phase integral times must increase from the probe's last time");
  }
  if (t_now == t_prev) return;
  const double dlog = std::log(t_now) - std::log(t_prev);
  for (std::size_t i = 0; i < probe.modes.size(); ++i) {
    const double q = std::norm(h_now.at(probe.modes[i]));
    const double integral = 0.5 * dlog * (probe.q_last[i] + q);
    for (ThetaVariant v : kThetaVariants) {
      probe.theta[variant_slot(v)][i] += theta_coefficient(v, probe.xi[i], probe.alpha2) * integral;
    }
    probe.q_last[i] = q;
  }
  probe.t_last = t_now;
}

void record(ScatteringProbe& probe, const SpectralField& h_now) {
  ProbeRecord r;
  r.t = probe.t_last;
  for (std::size_t i = 0; i < probe.modes.size(); ++i) r.h.push_back(h_now.at(probe.modes[i]));
  for (ThetaVariant v : kThetaVariants) {
    const auto s = variant_slot(v);
    r.v[s].resize(r.h.size());
    for (std::size_t i = 0; i < r.h.size(); ++i) r.v[s][i] = std::polar(1.0, probe.theta[s][i]) * r.h[i];
  }
  probe.history.push_back(std::move(r));
}

namespace {

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  return sxy / sxx;
}

}  // namespace

ScatteringReport scattering_monitor(const ScatteringProbe& probe) {
  const auto& hist = probe.history;
  if (hist.size() < 3) throw Error(ErrorKind::InsufficientData, "scattering report needs three recorded times");
  ScatteringReport rep;
  std::vector<double> logt;
  for (const auto& r : hist) logt.push_back(std::log(r.t));

  for (std::size_t i = 0; i < probe.modes.size(); ++i) {
    std::vector<double> phase;
    double mean_q = 0.0;
    for (const auto& r : hist) {
      double a = std::arg(r.h[i]);
      if (!phase.empty()) {
        while (a - phase.back() > kPi) a -= 2.0 * kPi;
        while (a - phase.back() < -kPi) a += 2.0 * kPi;
      }
      phase.push_back(a);
      mean_q += std::norm(r.h[i]);
    }
    mean_q /= static_cast<double>(hist.size());
    const double drift = least_squares_slope(logt, phase);

    for (ThetaVariant v : kThetaVariants) {
      const auto s = variant_slot(v);
      ScatteringEntry e;
      e.xi = probe.xi[i];
      e.variant = v;
      for (std::size_t m = 1; m < hist.size(); ++m) {
        e.cauchy_increments.push_back(std::abs(hist[m].v[s][i] - hist[m - 1].v[s][i]));
      }
      e.increments_decrease = true;
      for (std::size_t m = 1; m < e.cauchy_increments.size(); ++m) {
        if (e.cauchy_increments[m] > 1.2 * e.cauchy_increments[m - 1]) e.increments_decrease = false;
      }
      e.drift_slope = drift;
      e.predicted_slope = -theta_coefficient(v, probe.xi[i], probe.alpha2) * mean_q;
      e.slope_match = std::abs(drift - e.predicted_slope) <= 0.2 * std::abs(e.predicted_slope);
      if (e.slope_match && e.increments_decrease) ++rep.matches[s];
      rep.entries.push_back(std::move(e));
    }
  }
  for (ThetaVariant v : kThetaVariants) {
    if (rep.matches[variant_slot(v)] >= 3) rep.matching.push_back(v);
  }
  return rep;
}

DecayFit decay_fit(const std::vector<std::pair<double, double>>& series, double t_lo, double t_hi) {
  std::vector<double> x;
  std::vector<double> y;
  for (const auto& [t, v] : series) {
    if (t < t_lo || t > t_hi) continue;
    if (!(t > 0.0) || !(v > 0.0)) throw Error(ErrorKind::InsufficientData, "decay fit needs positive samples");
    x.push_back(std::log(t));
    y.push_back(std::log(v));
  }
  if (x.size() < 8) throw Error(ErrorKind::InsufficientData, "decay fit needs at least 8 samples in the window");
  DecayFit fit;
  fit.samples = x.size();
  fit.exponent = least_squares_slope(x, y);
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  const double intercept = my - fit.exponent * mx;
  fit.prefactor = std::exp(intercept);
  double ss = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    ss += sq(y[i] - intercept - fit.exponent * x[i]);
    sxx += sq(x[i] - mx);
  }
  fit.residual_rms = std::sqrt(ss / static_cast<double>(x.size()));
  fit.stderr_exponent = x.size() > 2 ? std::sqrt(ss / static_cast<double>(x.size() - 2) / sxx) : 0.0;
  return fit;
}

double dispersive_ratio(const SpectralField& h, double t, double beta, int n) {
  const SpectralField dn = fractional_abs_derivative(h, static_cast<double>(n));
  double f_sup = 0.0;
  for (const cplx& v : dn.coeffs()) f_sup = std::max(f_sup, std::abs(v));
  const double x_l2 = norm(multiply_by_x(dn), NormKind::L2);

  const SpectralField lhs_field = fractional_abs_derivative(free_evolve(derivative(h, n), t), beta);
  const auto lhs = lhs_field.to_physical_complex();
  const double t13 = std::cbrt(t);
  const double amp = std::pow(t, -1.0 / 3.0 - beta / 3.0) * (f_sup + std::pow(t, -1.0 / 6.0) * x_l2);
  if (amp == 0.0) throw Error(ErrorKind::DegenerateInput, "dispersive ratio of a zero profile");
  double best = 0.0;
  const auto& g = h.grid();
  for (std::size_t m = 0; m < lhs.size(); ++m) {
    const double env = std::pow(1.0 + std::abs(g.x(m)) / t13, -0.25 + 0.5 * beta);
    best = std::max(best, std::abs(lhs[m]) / (amp * env));
  }
  return best;
}

NormEquivalence weighted_norm_equivalence(const SpectralField& phi, const CoefficientSpec& c, int k) {
  if (k < 0 || k > 4) throw Error(ErrorKind::ConfigError, "weighted norm order must lie in [0, 4]");
  const auto u = phi.to_physical();
  auto wk = weighted_derivative(phi, c, k).to_physical_complex();
  double acc = 0.0;
  for (std::size_t m = 0; m < u.size(); ++m) {
    const double w = std::pow(c.c1(u[m]), -static_cast<double>(k - 1) / 3.0);
    acc += std::norm(w * wk[m]);
  }
  const double weighted = std::sqrt(acc * phi.grid().dx());
  const double base = norm(phi, NormKind::L2);
  const double lhs = base + weighted;
  const double hk = std::sqrt(2.0 * kPi) * sobolev_norm(phi, static_cast<double>(k));
  const double flat = base + norm(derivative(phi, k), NormKind::L2);
  if (hk == 0.0) throw Error(ErrorKind::DegenerateInput, "norm equivalence of a zero field");
  return {lhs / hk, lhs / flat};
}

}  // namespace qmkdv
