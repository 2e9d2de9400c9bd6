#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

#include "qmkdv/spectral_core.hpp"

namespace qmkdv {

// Even bump equal to 1 on |xi| <= plateau and 0 on |xi| >= support, built from
// the smooth step s(u) = e^{-1/u} / (e^{-1/u} + e^{-1/(1-u)}).
class BumpFunction {
 public:
  BumpFunction() = default;
  BumpFunction(double plateau, double support);

  double operator()(double xi) const;
  double plateau() const noexcept { return plateau_; }
  double support() const noexcept { return support_; }

  // Test hook: a bump whose plateau value is scaled by (1 - defect). Any
  // defect > 0 breaks the partition of unity.
  static BumpFunction corrupted(double defect);

 private:
  double plateau_ = 1.25;
  double support_ = 1.6;
  double defect_ = 0.0;
};

double smooth_step(double u);

const BumpFunction& standard_bump();

// psi_k(xi) = psi(xi / 2^k) - psi(xi / 2^{k-1}).
double psi_k(double xi, int k, const BumpFunction& bump = standard_bump());
double psi_le_k(double xi, int k, const BumpFunction& bump = standard_bump());
double psi_ge_k(double xi, int k, const BumpFunction& bump = standard_bump());
double psi_tilde_k(double xi, int k, const BumpFunction& bump = standard_bump());

enum class Selector { Band, AtMost, AtLeast, Widened };

double cutoff(Selector sel, double xi, int k, const BumpFunction& bump = standard_bump());
SpectralField project(const SpectralField& f, Selector sel, int k, const BumpFunction& bump = standard_bump());

// Dyadic indices whose band meets the nonzero frequencies of the grid.
std::pair<int, int> active_bands(const GridSpec& grid);

// sum_j (2^{aj} + 2^{bj}) ||P_j f||_{L^inf}, dropping terms below 1e-14 of the
// running total.
double b_norm(const SpectralField& f, double a, double b);

// Symbol sampled on a tensor grid. Axis a uses GridSpec axes[a]: samples sit
// at xi_j = 2 pi j / L_a, j = -n_a/2 .. n_a/2-1, and the inverse transform lives
// on the x-period L_a. Values are row-major in signed order, last axis fastest.
struct SymbolGrid {
  std::vector<GridSpec> axes;
  std::vector<cplx> values;

  std::size_t dimension() const noexcept { return axes.size(); }
  static SymbolGrid sample(std::vector<GridSpec> axes, const std::function<cplx(const double*)>& symbol);
};

// Sum of tensor products: m(xi) = sum_t coeff_t prod_a factor_{a, id_{t,a}}(xi_a).
class SeparableSymbol {
 public:
  explicit SeparableSymbol(std::vector<GridSpec> axes);

  std::size_t add_factor(std::size_t axis, const std::function<cplx(double)>& factor);
  void add_term(cplx coeff, const std::vector<std::size_t>& factor_ids);

  const std::vector<GridSpec>& axes() const noexcept { return axes_; }
  std::size_t dimension() const noexcept { return axes_.size(); }

  // Dense samples, for the generic route and for tests.
  SymbolGrid to_grid() const;

  struct Term {
    cplx coeff;
    std::vector<std::size_t> ids;
  };
  const std::vector<std::vector<std::vector<cplx>>>& factors() const noexcept { return factors_; }
  const std::vector<Term>& terms() const noexcept { return terms_; }

 private:
  std::vector<GridSpec> axes_;
  std::vector<std::vector<std::vector<cplx>>> factors_;  // [axis][id][sample]
  std::vector<Term> terms_;
};

struct SInftyOptions {
  // x-side samples per axis = oversample * n_a.
  int oversample = 2;
};

// L1 norm of the inverse transform. Along the last axis the integral of |g| is
// evaluated exactly between zero crossings using the spectral antiderivative,
// so the result is free of the kink error a plain Riemann sum would carry.
double s_infty_norm(const SymbolGrid& m, const SInftyOptions& opt = {});
double s_infty_norm(const SeparableSymbol& m, const SInftyOptions& opt = {});

// Integral over one period of |g| for a line given by coefficients on `grid`
// (exposed for tests of the line kernel).
double line_l1(const GridSpec& grid, const std::vector<cplx>& coeffs, int oversample);

struct RefinementRecord {
  double value = 0.0;
  double refined_value = 0.0;
  double rel_change = 0.0;
};

// Builds the symbol at per-axis sample counts n and 2n over the same
// frequency box and reports both S-infinity values.
RefinementRecord s_infty_refinement(const std::function<SeparableSymbol(int scale)>& build,
                                    const SInftyOptions& opt = {});

// Throws UnresolvedSymbol unless every face of the sampled box is below
// 1e-14 of the peak.
void check_boundary_decay(const SymbolGrid& m);
void check_boundary_decay(const SeparableSymbol& m);

// ||P_k f||_{L^inf_xi}^2 / (2^{-k} ||fhat|| [2^k ||d_xi fhat|| + ||fhat||]).
double interpolation_ratio(const SpectralField& f, int k);

}  // namespace qmkdv
