#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>

#include "qmkdv/error.hpp"
#include "qmkdv/littlewood_paley.hpp"
#include "qmkdv/random.hpp"
#include "studies.hpp"

namespace qmkdv::studies {

Check make_check(std::string group, std::string name, double measured, double limit, bool upper) {
  Check c{std::move(group), std::move(name), measured, limit, upper, false};
  c.pass = std::isfinite(measured) && (upper ? measured <= limit : measured >= limit);
  return c;
}

namespace {

double rel_l2(const SpectralField& a, const SpectralField& b) {
  const double den = spectral_l2(b);
  return spectral_l2(a - b) / (den > 0.0 ? den : 1.0);
}

double cube(double v) { return v * v * v; }

void algebra_checks(SplitMix64& rng, int samples, std::vector<Check>& out) {
  const std::string g = "algebra";

  double phi_err = 0.0;
  double local_err = 0.0;
  double sym_err = 0.0;
  double reduced_err = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double xi = rng.uniform(-10.0, 10.0);
    const double e1 = rng.uniform(-10.0, 10.0);
    const double e2 = rng.uniform(-10.0, 10.0);
    const double scale = std::abs(cube(xi)) + std::abs(cube(xi - e1 - e2)) + std::abs(cube(e1)) + std::abs(cube(e2));
    phi_err = std::max(phi_err, std::abs(phase_Phi(xi, e1, e2) - phase_Phi_expanded(xi, e1, e2)) / std::max(1.0, scale));

    const double z1 = rng.uniform(-2.0, 2.0);
    const double z2 = rng.uniform(-2.0, 2.0);
    local_err = std::max(local_err, std::abs(local_phase_residual(xi, z1, z2)) / std::max(1.0, std::abs(cube(xi))));

    const double a2 = rng.uniform(0.0, 2.0);
    const std::array<double, 3> v{e1, e2, rng.uniform(-10.0, 10.0)};
    const double base = symbol_T1(v[0], v[1], v[2], a2);
    std::array<int, 3> p{0, 1, 2};
    do {
      sym_err = std::max(sym_err, std::abs(symbol_T1(v[p[0]], v[p[1]], v[p[2]], a2) - base));
    } while (std::next_permutation(p.begin(), p.end()));

    const double e3 = xi - e1 - e2;
    const double tscale = 1.0 + a2 / 3.0 *
                                    (e1 * e1 + e2 * e2 + xi * xi + std::abs(e1 * e2) + std::abs(e1 * xi) +
                                     std::abs(e2 * xi));
    reduced_err = std::max(reduced_err,
                           std::abs(symbol_T1(e1, e2, e3, a2) - symbol_T1_reduced(e1, e2, xi, a2)) / tscale);
  }
  out.push_back(make_check(g, "phase_factored_vs_expanded", phi_err, 1e-12));
  out.push_back(make_check(g, "local_phase_residual", local_err, 1e-12));
  out.push_back(make_check(g, "t1_permutation_symmetry", sym_err, 0.0));
  out.push_back(make_check(g, "t1_reduced_vs_symmetric", reduced_err, 1e-12));

  // Resonance geometry.
  double grad_err = 0.0;
  double phase_err = 0.0;
  double hess_err = 0.0;
  double min_grad = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples / 10; ++i) {
    double xi = rng.uniform(0.1, 10.0);
    if (rng.uniform() < 0.5) xi = -xi;
    const auto set = resonance_points(xi);
    const double gscale = std::max(1.0, xi * xi);
    for (std::size_t p = 0; p < 4; ++p) {
      const auto [a, b] = set.points[p];
      const auto gr = grad_Phi(xi, a, b);
      grad_err = std::max(grad_err, std::max(std::abs(gr[0]), std::abs(gr[1])) / gscale);
      const double expected = p < 3 ? 0.0 : 8.0 * cube(xi) / 9.0;
      phase_err = std::max(phase_err, std::abs(phase_Phi(xi, a, b) - expected) / std::max(1.0, std::abs(cube(xi))));
    }
    const auto h0 = hessian_Phi(xi, xi, xi);
    const auto h3 = hessian_Phi(xi, xi / 3.0, xi / 3.0);
    hess_err = std::max({hess_err, std::abs(h0[0]), std::abs(h0[2]), std::abs(h0[1] - 6.0 * xi),
                         std::abs(h3[0] + 4.0 * xi) / std::max(1.0, std::abs(xi))});

    // Away from the resonances the gradient cannot vanish.
    for (int tries = 0; tries < 10; ++tries) {
      const double a = rng.uniform(-2.0 * std::abs(xi), 2.0 * std::abs(xi));
      const double b = rng.uniform(-2.0 * std::abs(xi), 2.0 * std::abs(xi));
      double dist = std::numeric_limits<double>::infinity();
      for (const auto& q : set.points) dist = std::min(dist, std::hypot(a - q[0], b - q[1]));
      if (dist < 0.1 * std::abs(xi)) continue;
      const auto gr = grad_Phi(xi, a, b);
      min_grad = std::min(min_grad, std::hypot(gr[0], gr[1]) / (xi * xi));
    }
  }
  out.push_back(make_check(g, "resonance_gradient_zero", grad_err, 1e-12));
  out.push_back(make_check(g, "resonance_phase_values", phase_err, 1e-12));
  out.push_back(make_check(g, "resonance_hessian_values", hess_err, 1e-12));
  out.push_back(make_check(g, "nonresonant_gradient_nonzero", min_grad, 1e-6, false));

  // Spot values that are exact in floating point.
  double spot = 0.0;
  spot = std::max(spot, std::abs(symbol_T2(0.0, 0.7, -1.3, 2.1)));
  spot = std::max(spot, std::abs(symbol_T2(1.0, 0.0, 0.0, 0.0) + 2.0));
  spot = std::max(spot, std::abs(symbol_T2(1.0, 1.0, 1.0, 0.0) + 5.0));
  spot = std::max(spot, std::abs(symbol_T1(0.0, 0.0, 0.0, 1.0) + 1.0));
  spot = std::max(spot, std::abs(phase_Phi(4.0, 1.0, 2.0) - 54.0));
  spot = std::max(spot, std::abs(phase_Phi_expanded(4.0, 1.0, 2.0) - 54.0));
  spot = std::max(spot, std::abs(phase_Phi(3.0, 1.0, 1.0) - 24.0));
  out.push_back(make_check(g, "spot_values", spot, 0.0));
  out.push_back(make_check(g, "t1_at_xi_xi_minus_xi", std::abs(symbol_T1(1.0, 1.0, -1.0, 1.0) + 1.0 / 3.0), 1e-15));

  const auto q = quartic_resonance_search(rng.next(), 64, 0.5, 2.0, 3.0);
  out.push_back(make_check(g, "quartic_phase_no_nonzero_resonance", q.min_objective, 1e-3, false));
}

void commutator_checks(std::vector<Check>& out) {
  const std::string g = "commutator";
  const GridSpec grid(1024, 100.0);
  // Odd, so the mean vanishes exactly; concentrated far inside |x| <= L/4.
  const auto phi = SpectralField::from_function(
      grid, [](double x) { return x * std::exp(-x * x / 8.0) * (1.0 + 0.3 * std::cos(1.5 * x)); });
  const auto c = CoefficientSpec::linear(1.0);
  auto S = [&](const SpectralField& f) { return scaling_field_direct(f, 0.0, c); };

  const SpectralField dphi = derivative(phi, 1);
  const SpectralField d3phi = derivative(phi, 3);
  out.push_back(make_check(g, "scaling_vs_dx", rel_l2(S(dphi) - derivative(S(phi), 1), -1.0 * dphi), 1e-8));
  out.push_back(make_check(g, "scaling_vs_dxxx", rel_l2(S(d3phi) - derivative(S(phi), 3), -3.0 * d3phi), 1e-8));

  const SpectralField phi2 = pointwise_product(phi, phi, 3);
  const SpectralField phi3 = pointwise_product(phi2, phi, 3);
  const SpectralField lhs = 3.0 * derivative(pointwise_product(phi2, S(phi), 3), 1) - S(derivative(phi3, 1));
  const SpectralField rhs = 3.0 * pointwise_product(phi2, dphi, 3);
  out.push_back(make_check(g, "cubic_scaling_commutator", rel_l2(lhs, rhs), 1e-8));

  // The profile route to S phi agrees with x d_x phi at t = 0.
  out.push_back(make_check(g, "scaling_spectral_vs_direct_t0", rel_l2(scaling_field_spectral(phi, 0.0, c), S(phi)),
                           1e-10));
}

SpectralField packet(const GridSpec& grid, double centre, double width, double k0) {
  return SpectralField::from_function(grid, [=](double x) {
    const double y = (x - centre) / width;
    return std::exp(-y * y) * std::cos(k0 * (x - centre));
  });
}

void littlewood_paley_checks(SplitMix64& rng, int trials, bool corrupt, std::vector<Check>& out) {
  const std::string g = "littlewood_paley";
  const BumpFunction bump = corrupt ? BumpFunction::corrupted(1e-3) : standard_bump();

  double part_h = 0.0;
  double part_nh = 0.0;
  for (int i = 0; i < 4000; ++i) {
    double xi = std::pow(10.0, rng.uniform(-3.0, 3.0));
    if (rng.uniform() < 0.5) xi = -xi;
    double sum = psi_le_k(xi, -21, bump);
    for (int k = -20; k <= 20; ++k) sum += psi_k(xi, k, bump);
    part_h = std::max(part_h, std::abs(sum - 1.0));
    double sum_nh = psi_le_k(xi, 0, bump);
    for (int k = 1; k <= 20; ++k) sum_nh += psi_k(xi, k, bump);
    part_nh = std::max(part_nh, std::abs(sum_nh - 1.0));
  }
  out.push_back(make_check(g, "partition_of_unity_homogeneous", part_h, 1e-12));
  out.push_back(make_check(g, "partition_of_unity_inhomogeneous", part_nh, 1e-12));

  double plateau = 0.0;
  for (int k = -6; k <= 6; ++k) plateau = std::max(plateau, std::abs(psi_k(std::ldexp(1.2, k), k, bump) - 1.0));
  out.push_back(make_check(g, "band_plateau_value", plateau, 1e-15));

  const GridSpec grid(4096, 400.0);
  const SpectralField f = packet(grid, 10.0, 3.0, 2.0) + packet(grid, -20.0, 1.0, 6.0);
  double widen = 0.0;
  double disjoint = 0.0;
  SpectralField recon(grid);
  const auto [kmin, kmax] = active_bands(grid);
  for (int k = kmin; k <= kmax; ++k) {
    const SpectralField pk = project(f, Selector::Band, k, bump);
    widen = std::max(widen, spectral_l2(project(pk, Selector::Widened, k, bump) - pk) / spectral_l2(f));
    disjoint = std::max(disjoint, spectral_l2(project(pk, Selector::Band, k + 2, bump)) / spectral_l2(f));
    recon += pk;
  }
  SpectralField f0 = f;
  f0.coeffs()[0] = 0.0;
  out.push_back(make_check(g, "widened_projection_idempotent", widen, 1e-12));
  out.push_back(make_check(g, "separated_projections_vanish", disjoint, 1e-12));
  out.push_back(make_check(g, "band_sum_recovers_field", rel_l2(recon, f0), 1e-12));

  // ||psi_k||_{L2} 2^{-k/2}, midpoint rule on the support of the band.
  auto band_l2 = [&bump](int k) {
    const int m = 20000;
    const double lo = 0.625 * std::ldexp(1.0, k);
    const double hi = 1.6 * std::ldexp(1.0, k);
    const double h = (hi - lo) / m;
    double acc = 0.0;
    for (int i = 0; i < m; ++i) acc += std::pow(psi_k(lo + (i + 0.5) * h, k, bump), 2);
    return std::sqrt(2.0 * acc * h);
  };
  const double ref = band_l2(0);
  double scaling = 0.0;
  for (int k = -5; k <= 5; ++k) scaling = std::max(scaling, std::abs(band_l2(k) * std::exp2(-0.5 * k) / ref - 1.0));
  out.push_back(make_check(g, "band_l2_scaling", scaling, 1e-10));

  const double bn = b_norm(f, 1.5, 1.5);
  double direct = 0.0;
  for (int k = kmin; k <= kmax; ++k) {
    direct += 2.0 * std::exp2(1.5 * k) * norm(project(f, Selector::Band, k), NormKind::Linf);
  }
  out.push_back(make_check(g, "b_norm_equal_exponents", std::abs(bn - direct) / direct, 1e-12));

  double worst = 0.0;
  for (int i = 0; i < trials; ++i) {
    const double k0 = rng.uniform(0.0, 8.0);
    const SpectralField p =
        packet(grid, rng.uniform(-40.0, 40.0), rng.uniform(0.5, 4.0), k0);
    const int k = std::max(0, static_cast<int>(std::floor(std::log2(std::max(k0, 1.0)))));
    worst = std::max(worst, interpolation_ratio(p, k));
  }
  out.push_back(make_check(g, "interpolation_ratio_max", worst, 10.0));
}

void symbol_class_checks(SplitMix64& rng, std::vector<Check>& out) {
  const std::string g = "symbol_class";
  const int n = 512;
  const double width = 4.0 * 2.0 * 1.6;
  const GridSpec axis(n, 2.0 * 3.14159265358979323846 * n / width);
  auto sample = [&](const std::function<cplx(double)>& m) {
    SymbolGrid s{{axis}, {}};
    for (long j = -static_cast<long>(n / 2); j < static_cast<long>(n / 2); ++j) s.values.push_back(m(axis.dxi() * j));
    return s;
  };
  const double base = s_infty_norm(sample([](double xi) { return cplx{standard_bump()(xi), 0.0}; }));
  double modulation = 0.0;
  for (int i = 0; i < 5; ++i) {
    const double c = rng.uniform(-20.0, 20.0);
    const double v = s_infty_norm(sample([c](double xi) { return std::polar(standard_bump()(xi), c * xi); }));
    modulation = std::max(modulation, std::abs(v - base) / base);
  }
  out.push_back(make_check(g, "modulation_invariance", modulation, 1e-10));

  double product = 0.0;
  for (int i = 0; i < 5; ++i) {
    const double s1 = rng.uniform(0.5, 1.0);
    const double s2 = rng.uniform(0.5, 1.0);
    const double c1 = rng.uniform(-0.5, 0.5);
    const double c2 = rng.uniform(-0.5, 0.5);
    auto m1 = [=](double xi) { return cplx{standard_bump()((xi - c1) / s1), 0.0}; };
    auto m2 = [=](double xi) { return cplx{standard_bump()((xi - c2) / s2), 0.0}; };
    const double a = s_infty_norm(sample(m1));
    const double b = s_infty_norm(sample(m2));
    const double ab = s_infty_norm(sample([&](double xi) { return m1(xi) * m2(xi); }));
    product = std::max(product, ab / (a * b));
  }
  out.push_back(make_check(g, "product_rule", product, 1.0));

  const auto rec = s_infty_refinement(
      [](int scale) {
        const int m = 1024 * scale;
        SeparableSymbol sym({GridSpec(m, 2.0 * 3.14159265358979323846 * m / (4.0 * 2.0 * 1.6))});
        const auto id = sym.add_factor(0, [](double xi) { return cplx{standard_bump()(xi), 0.0}; });
        sym.add_term(1.0, {id});
        return sym;
      },
      {});
  out.push_back(make_check(g, "bump_refinement_stability", rec.rel_change, 0.02));
}

void nonlinearity_checks(SplitMix64& rng, std::vector<Check>& out) {
  const std::string g = "nonlinearity";
  const GridSpec grid(512, 60.0);
  const SpectralField phi =
      0.2 * (packet(grid, rng.uniform(-5.0, 5.0), 2.0, 1.0) - packet(grid, rng.uniform(-5.0, 5.0), 1.5, 0.0));
  SpectralField phi0 = phi;
  remove_mean(phi0);

  const auto lin = CoefficientSpec::linear(1.0);
  const auto full_lin = nonlinearity_full(phi0, lin);
  const auto split_lin = nonlinearity_split(phi0, lin);
  out.push_back(make_check(g, "zero_mode_of_nonlinearity", std::abs(full_lin.coeffs()[0]), 1e-14));
  out.push_back(make_check(g, "linear_family_quartic_part", spectral_l2(split_lin.n4), 0.0));
  out.push_back(make_check(g, "linear_family_quintic_remainder", rel_l2(split_lin.n5plus, SpectralField(grid)) /
                                                                     std::max(spectral_l2(full_lin), 1e-300),
                           1e-12));

  const auto cp = CoefficientSpec::cubic_poly(1.0, 1.0, 0.0);
  const auto full = nonlinearity_full(phi0, cp);
  const auto split = nonlinearity_split(phi0, cp);
  out.push_back(make_check(g, "recomposition_cubic_poly", rel_l2(split.n3 + split.n4 + split.n5plus, full), 1e-8));

  // The remainder is quintic: halving the amplitude divides it by 2^5.
  const auto half = nonlinearity_split(0.5 * phi0, cp);
  const double order = std::log2(spectral_l2(split.n5plus) / spectral_l2(half.n5plus));
  out.push_back(make_check(g, "remainder_homogeneity_error", std::abs(order - 5.0), 1e-6));
}

}  // namespace

std::vector<Check> identity_checks(const IdentityOptions& opt) {
  if (opt.samples < 10 || opt.lp_trials < 1) throw Error(ErrorKind::ConfigError, "identity suite sizes too small");
  SplitMix64 rng(opt.seed);
  std::vector<Check> out;
  algebra_checks(rng, opt.samples, out);
  commutator_checks(out);
  littlewood_paley_checks(rng, opt.lp_trials, opt.corrupt_bump, out);
  symbol_class_checks(rng, out);
  nonlinearity_checks(rng, out);
  return out;
}

}  // namespace qmkdv::studies
