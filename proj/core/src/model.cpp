#include "qmkdv/model.hpp"

#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "qmkdv/error.hpp"
#include "qmkdv/random.hpp"

namespace qmkdv {

namespace {

// phi, phi_x, phi_xx sampled on a grid refined by pad.
struct PaddedSamples {
  GridSpec fine;
  std::vector<double> u;
  std::vector<double> ux;
  std::vector<double> uxx;
};

std::vector<double> lift_real(const GridSpec& coarse, const GridSpec& fine, const SpectralField& f) {
  std::vector<cplx> c(fine.n(), cplx{0.0, 0.0});
  for (std::size_t i = 0; i < coarse.n(); ++i) c[fine.storage_index(coarse.signed_index(i))] = f.coeffs()[i];
  const auto z = inverse_transform(fine, std::move(c));
  std::vector<double> out(z.size());
  for (std::size_t m = 0; m < z.size(); ++m) out[m] = z[m].real();
  return out;
}

PaddedSamples lift(const SpectralField& phi, int pad) {
  const auto& g = phi.grid();
  GridSpec fine(g.n() * static_cast<std::size_t>(pad), g.length());
  return {fine, lift_real(g, fine, phi), lift_real(g, fine, derivative(phi, 1)), lift_real(g, fine, derivative(phi, 2))};
}

// Forward transform on the fine grid, truncate to the coarse band, apply d_x.
SpectralField flux_derivative(const GridSpec& coarse, const GridSpec& fine, const std::vector<double>& flux,
                              double t) {
  std::vector<cplx> z(flux.begin(), flux.end());
  const auto c = forward_transform(fine, std::move(z));
  SpectralField out(coarse, t);
  for (std::size_t i = 0; i < coarse.n(); ++i) out.coeffs()[i] = c[fine.storage_index(coarse.signed_index(i))];
  enforce_real(out);
  out = derivative(out, 1);
  out.coeffs()[0] = 0.0;
  return out;
}

}  // namespace

SpectralField nonlinearity_full(const SpectralField& phi, const CoefficientSpec& c, int pad_factor) {
  const auto s = lift(phi, pad_factor);
  std::vector<double> flux(s.u.size());
  for (std::size_t m = 0; m < flux.size(); ++m) {
    const double u = s.u[m];
    const double cu = c.c(u);
    // c d_x(c u_x) = c c' u_x^2 + c^2 u_xx
    flux[m] = u * u * u + cu * (c.dc(u) * s.ux[m] * s.ux[m] + cu * s.uxx[m]);
  }
  return flux_derivative(phi.grid(), s.fine, flux, phi.time());
}

NonlinearSplit nonlinearity_split(const SpectralField& phi, const CoefficientSpec& c, int pad_factor) {
  const auto s = lift(phi, pad_factor);
  const double a2 = c.alpha2();
  const double a3 = c.alpha3();
  std::vector<double> f3(s.u.size());
  std::vector<double> f4(s.u.size());
  for (std::size_t m = 0; m < f3.size(); ++m) {
    const double u = s.u[m];
    const double ux = s.ux[m];
    const double uxx = s.uxx[m];
    f3[m] = u * u * u + a2 * (u * u * uxx + u * ux * ux);
    // phi^2 d_x(phi phi_x) + phi d_x(phi^2 phi_x) = 3 phi^2 phi_x^2 + 2 phi^3 phi_xx
    f4[m] = a3 * (3.0 * u * u * ux * ux + 2.0 * u * u * u * uxx);
  }
  NonlinearSplit out{flux_derivative(phi.grid(), s.fine, f3, phi.time()),
                     flux_derivative(phi.grid(), s.fine, f4, phi.time()), SpectralField(phi.grid(), phi.time())};
  out.n5plus = nonlinearity_full(phi, c, pad_factor) - out.n3 - out.n4;
  return out;
}

double symbol_T1(double eta1, double eta2, double eta3, double alpha2) {
  std::array<double, 3> e{eta1, eta2, eta3};
  std::sort(e.begin(), e.end());
  const double quad = e[0] * e[0] + e[1] * e[1] + e[2] * e[2] + e[0] * e[1] + e[0] * e[2] + e[1] * e[2];
  return alpha2 / 3.0 * quad - 1.0;
}

double symbol_T1_reduced(double eta1, double eta2, double xi, double alpha2) {
  return alpha2 / 3.0 * (eta1 * eta1 + eta2 * eta2 + xi * xi + eta1 * eta2 - eta1 * xi - eta2 * xi) - 1.0;
}

double symbol_dT1(double eta1, double eta2, double eta3, double alpha2) {
  return alpha2 / 3.0 * (2.0 * eta1 + eta2 + eta3);
}

double symbol_T2(double eta1, double eta2, double eta3, double /*eta4*/) {
  return -2.0 * eta1 * eta1 - 2.0 * eta1 * eta2 - eta1 * eta3;
}

double phase_Phi(double xi, double eta1, double eta2) {
  return 3.0 * (eta1 + eta2) * (xi - eta1) * (xi - eta2);
}

double phase_Phi_expanded(double xi, double eta1, double eta2) {
  const double eta3 = xi - eta1 - eta2;
  return xi * xi * xi - eta3 * eta3 * eta3 - eta1 * eta1 * eta1 - eta2 * eta2 * eta2;
}

std::array<double, 2> grad_Phi(double xi, double eta1, double eta2) {
  return {3.0 * (xi - eta2) * (xi - 2.0 * eta1 - eta2), 3.0 * (xi - eta1) * (xi - 2.0 * eta2 - eta1)};
}

std::array<double, 3> hessian_Phi(double xi, double eta1, double eta2) {
  return {-6.0 * (xi - eta2), -6.0 * (xi - eta1) - 6.0 * (xi - eta2) + 6.0 * xi, -6.0 * (xi - eta1)};
}

ResonanceSet resonance_points(double xi) {
  if (xi == 0.0) throw Error(ErrorKind::ZeroFrequency, "resonance set is degenerate at xi = 0");
  ResonanceSet r;
  r.xi = xi;
  r.points = {{{xi, xi}, {xi, -xi}, {-xi, xi}, {xi / 3.0, xi / 3.0}}};
  return r;
}

double phase_Psi(double xi, double eta1, double eta2, double eta3) {
  const double eta4 = xi - eta1 - eta2 - eta3;
  return xi * xi * xi - eta4 * eta4 * eta4 - eta1 * eta1 * eta1 - eta2 * eta2 * eta2 - eta3 * eta3 * eta3;
}

std::array<double, 3> grad_Psi(double xi, double eta1, double eta2, double eta3) {
  const double eta4 = xi - eta1 - eta2 - eta3;
  const double q = 3.0 * eta4 * eta4;
  return {q - 3.0 * eta1 * eta1, q - 3.0 * eta2 * eta2, q - 3.0 * eta3 * eta3};
}

namespace {

struct QuarticBox {
  double sign;
  double xi_min;
  double xi_max;
  double eta_box;

  std::array<double, 4> map(const gsl_vector* v) const {
    const double xi = sign * (xi_min + (xi_max - xi_min) * 0.5 * (1.0 + std::sin(gsl_vector_get(v, 0))));
    return {xi, eta_box * std::sin(gsl_vector_get(v, 1)), eta_box * std::sin(gsl_vector_get(v, 2)),
            eta_box * std::sin(gsl_vector_get(v, 3))};
  }
};

double quartic_objective(const gsl_vector* v, void* params) {
  const auto* box = static_cast<const QuarticBox*>(params);
  const auto p = box->map(v);
  const double psi = phase_Psi(p[0], p[1], p[2], p[3]);
  const auto g = grad_Psi(p[0], p[1], p[2], p[3]);
  return psi * psi + g[0] * g[0] + g[1] * g[1] + g[2] * g[2];
}

}  // namespace

QuarticSearchResult quartic_resonance_search(std::uint64_t seed, int starts, double xi_min, double xi_max,
                                             double eta_box) {
  if (!(xi_min > 0.0 && xi_max >= xi_min && eta_box > 0.0 && starts > 0)) {
    throw Error(ErrorKind::ConfigError, "quartic search needs 0 < xi_min <= xi_max and a positive box");
  }
  SplitMix64 rng(seed);
  QuarticSearchResult best;
  best.min_objective = std::numeric_limits<double>::infinity();
  best.starts = starts;
  gsl_vector* x = gsl_vector_alloc(4);
  gsl_vector* step = gsl_vector_alloc(4);
  gsl_multimin_fminimizer* solver = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 4);
  for (int s = 0; s < starts; ++s) {
    QuarticBox box{(s % 2 == 0) ? 1.0 : -1.0, xi_min, xi_max, eta_box};
    for (std::size_t i = 0; i < 4; ++i) gsl_vector_set(x, i, rng.uniform(-3.14159, 3.14159));
    gsl_vector_set_all(step, 0.3);
    gsl_multimin_function fn{&quartic_objective, 4, &box};
    gsl_multimin_fminimizer_set(solver, &fn, x, step);
    for (int it = 0; it < 4000; ++it) {
      if (gsl_multimin_fminimizer_iterate(solver) != 0) break;
      if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(solver), 1e-12) == GSL_SUCCESS) break;
    }
    const double val = gsl_multimin_fminimizer_minimum(solver);
    if (val < best.min_objective) {
      best.min_objective = val;
      best.argmin = box.map(gsl_multimin_fminimizer_x(solver));
    }
  }
  gsl_multimin_fminimizer_free(solver);
  gsl_vector_free(step);
  gsl_vector_free(x);
  return best;
}

SeparableSymbol dyadic_symbol(int j1, int j2, int j3, double alpha2, DyadicSymbol which, int samples_per_axis,
                              double box_factor) {
  const std::array<int, 3> js{j1, j2, j3};
  std::vector<GridSpec> axes;
  for (int j : js) {
    const double width = box_factor * 2.0 * 1.6 * std::exp2(static_cast<double>(j));
    const double period = 2.0 * 3.14159265358979323846 * samples_per_axis / width;
    axes.emplace_back(static_cast<std::size_t>(samples_per_axis), period);
  }
  SeparableSymbol sym(axes);
  std::array<std::array<std::size_t, 3>, 3> id{};  // id[axis][power]
  for (std::size_t a = 0; a < 3; ++a) {
    const int j = js[a];
    for (int p = 0; p < 3; ++p) {
      id[a][p] = sym.add_factor(a, [j, p](double eta) { return cplx{std::pow(eta, p) * psi_k(eta, j), 0.0}; });
    }
  }
  const double w = alpha2 / 3.0;
  if (which == DyadicSymbol::T1) {
    sym.add_term(-1.0, {id[0][0], id[1][0], id[2][0]});
    sym.add_term(w, {id[0][2], id[1][0], id[2][0]});
    sym.add_term(w, {id[0][0], id[1][2], id[2][0]});
    sym.add_term(w, {id[0][0], id[1][0], id[2][2]});
    sym.add_term(w, {id[0][1], id[1][1], id[2][0]});
    sym.add_term(w, {id[0][1], id[1][0], id[2][1]});
    sym.add_term(w, {id[0][0], id[1][1], id[2][1]});
  } else {
    sym.add_term(2.0 * w, {id[0][1], id[1][0], id[2][0]});
    sym.add_term(w, {id[0][0], id[1][1], id[2][0]});
    sym.add_term(w, {id[0][0], id[1][0], id[2][1]});
  }
  return sym;
}

DyadicBound dyadic_symbol_bound(int j1, int j2, int j3, double alpha2, DyadicSymbol which,
                                const DyadicResolution& res) {
  if (!(j1 >= j2 && j2 >= j3)) throw Error(ErrorKind::ConfigError, "dyadic indices must satisfy j1 >= j2 >= j3");
  SInftyOptions opt;
  opt.oversample = res.oversample;
  const auto rec = s_infty_refinement(
      [&](int scale) {
        return dyadic_symbol(j1, j2, j3, alpha2, which, res.samples_per_axis * scale, res.box_factor);
      },
      opt);
  const double norm = which == DyadicSymbol::T1 ? std::exp2(std::max(2 * j1, 0)) : std::exp2(j1);
  return {rec.value / norm, rec.value, rec.refined_value, rec.rel_change};
}

SpectralField scaling_field_direct(const SpectralField& phi, double t, const CoefficientSpec& c,
                                   bool include_nonlinearity) {
  SpectralField out = multiply_by_x(derivative(phi, 1));
  if (t != 0.0) {
    SpectralField phit = derivative(phi, 3);
    if (include_nonlinearity) phit += nonlinearity_full(phi, c);
    out -= (3.0 * t) * phit;
  }
  out.set_time(phi.time());
  return out;
}

SpectralField weighted_derivative(const SpectralField& phi, const CoefficientSpec& c, int k) {
  const auto u = phi.to_physical();
  std::vector<double> weight(u.size());
  for (std::size_t m = 0; m < u.size(); ++m) weight[m] = c.c1(u[m]);
  SpectralField v = phi;
  for (int i = 0; i < k; ++i) {
    auto z = derivative(v, 1).to_physical_complex();
    for (std::size_t m = 0; m < z.size(); ++m) z[m] *= weight[m];
    v = SpectralField::from_physical(phi.grid(), z, phi.time());
  }
  return v;
}

double phi3_ratio(const SpectralField& phi) {
  const auto s = lift(phi, 3);
  double cube_sq = 0.0;
  double sup = 0.0;
  for (std::size_t m = 0; m < s.u.size(); ++m) {
    const double u3 = s.u[m] * s.u[m] * s.u[m];
    cube_sq += u3 * u3;
    sup = std::max(sup, std::abs(s.u[m] * s.ux[m]));
  }
  const double cube = std::sqrt(cube_sq * s.fine.dx());
  const double prim = norm(antiderivative(phi, 1e-10), NormKind::L2);
  if (prim == 0.0 || sup == 0.0) throw Error(ErrorKind::DegenerateInput, "phi3 ratio of a zero field");
  return cube / (prim * sup);
}

}  // namespace qmkdv
