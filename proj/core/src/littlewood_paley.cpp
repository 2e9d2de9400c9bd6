#include "qmkdv/littlewood_paley.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qmkdv/error.hpp"
#include "qmkdv/fft.hpp"
#include "qmkdv/parallel.hpp"

namespace qmkdv {

double smooth_step(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / u);
  const double b = std::exp(-1.0 / (1.0 - u));
  return a / (a + b);
}

BumpFunction::BumpFunction(double plateau, double support) : plateau_(plateau), support_(support) {
  if (!(plateau > 0.0 && support > plateau)) {
    throw Error(ErrorKind::ConfigError, "bump needs 0 < plateau < support");
  }
}

BumpFunction BumpFunction::corrupted(double defect) {
  BumpFunction b;
  b.defect_ = defect;
  return b;
}

double BumpFunction::operator()(double xi) const {
  const double u = (std::abs(xi) - plateau_) / (support_ - plateau_);
  return (1.0 - defect_) * (1.0 - smooth_step(u));
}

const BumpFunction& standard_bump() {
  static const BumpFunction bump;
  return bump;
}

double psi_k(double xi, int k, const BumpFunction& bump) {
  return bump(std::ldexp(xi, -k)) - bump(std::ldexp(xi, -(k - 1)));
}

double psi_le_k(double xi, int k, const BumpFunction& bump) { return bump(std::ldexp(xi, -k)); }

double psi_ge_k(double xi, int k, const BumpFunction& bump) { return 1.0 - bump(std::ldexp(xi, -(k - 1))); }

double psi_tilde_k(double xi, int k, const BumpFunction& bump) {
  return psi_k(xi, k - 1, bump) + psi_k(xi, k, bump) + psi_k(xi, k + 1, bump);
}

double cutoff(Selector sel, double xi, int k, const BumpFunction& bump) {
  switch (sel) {
    case Selector::Band: return psi_k(xi, k, bump);
    case Selector::AtMost: return psi_le_k(xi, k, bump);
    case Selector::AtLeast: return psi_ge_k(xi, k, bump);
    case Selector::Widened: return psi_tilde_k(xi, k, bump);
  }
  return 0.0;
}

SpectralField project(const SpectralField& f, Selector sel, int k, const BumpFunction& bump) {
  return apply_symbol(f, [&](double xi) { return cplx{cutoff(sel, xi, k, bump), 0.0}; });
}

std::pair<int, int> active_bands(const GridSpec& grid) {
  const double lo = grid.dxi();
  const double hi = grid.dxi() * static_cast<double>(grid.n() / 2);
  // psi_j lives on [5/8, 8/5] 2^j.
  const int j_lo = static_cast<int>(std::floor(std::log2(lo / 1.6))) - 1;
  const int j_hi = static_cast<int>(std::ceil(std::log2(hi / 0.625))) + 1;
  return {j_lo, j_hi};
}

double b_norm(const SpectralField& f, double a, double b) {
  if (a > b) throw Error(ErrorKind::ConfigError, "b_norm needs a <= b");
  const auto [j_lo, j_hi] = active_bands(f.grid());
  std::vector<double> terms;
  for (int j = j_lo; j <= j_hi; ++j) {
    const double sup = sup_norm(project(f, Selector::Band, j));
    terms.push_back((std::exp2(a * j) + std::exp2(b * j)) * sup);
  }
  double total = 0.0;
  for (double t : terms) {
    if (t > 1e-14 * total) total += t;
  }
  return total;
}

// ---------------------------------------------------------------------------
// Symbol grids

namespace {

std::size_t product_of_sizes(const std::vector<GridSpec>& axes, int oversample = 1) {
  std::size_t total = 1;
  for (const auto& g : axes) total *= g.n() * static_cast<std::size_t>(oversample);
  return total;
}

// Signed-order sample index i <-> frequency (i - n/2) dxi.
double signed_xi(const GridSpec& g, std::size_t i) {
  return g.dxi() * (static_cast<double>(i) - static_cast<double>(g.n() / 2));
}

// Integral of |g| over one cell [0, h] given g and its primitive G at both ends.
// If g changes sign, the crossing is located on the cubic Hermite interpolant
// of G, whose derivative is the quadratic interpolant of g.
double cell_integral(double g0, double g1, double G0, double G1, double h) {
  const double D = G1 - G0;
  if (!((g0 < 0.0 && g1 > 0.0) || (g0 > 0.0 && g1 < 0.0))) return std::abs(D);
  const double A = -6.0 * D + 3.0 * h * (g0 + g1);
  const double B = 6.0 * D - h * (4.0 * g0 + 2.0 * g1);
  const double C = h * g0;
  double s = g0 / (g0 - g1);
  const double disc = B * B - 4.0 * A * C;
  if (std::abs(A) > 1e-14 * (std::abs(B) + std::abs(C)) && disc >= 0.0) {
    const double q = -0.5 * (B + std::copysign(std::sqrt(disc), B));
    const double r1 = q / A;
    const double r2 = (q != 0.0) ? C / q : r1;
    if (r1 >= 0.0 && r1 <= 1.0) {
      s = r1;
    } else if (r2 >= 0.0 && r2 <= 1.0) {
      s = r2;
    }
  } else if (std::abs(B) > 0.0) {
    const double r = -C / B;
    if (r >= 0.0 && r <= 1.0) s = r;
  }
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double H = G0 * (2.0 * s3 - 3.0 * s2 + 1.0) + h * g0 * (s3 - 2.0 * s2 + s) +
                   G1 * (-2.0 * s3 + 3.0 * s2) + h * g1 * (s3 - s2);
  return std::abs(H - G0) + std::abs(G1 - H);
}

// One period of a line, split into real and imaginary parts so the
// accumulation loops vectorize. drift = G(x + period) - G(x).
struct LineView {
  const double* gr;
  const double* gi;
  const double* Gr;
  const double* Gi;
  std::size_t M;
  double h;
  cplx drift;
};

// Exact trigonometric polynomial for a 1D line:
//   g(x) = sum_j c_j dxi e^{i xi_j x},
//   G(x) = sum_{j != 0} c_j dxi e^{i xi_j x} / (i xi_j) + c_0 dxi (x - x_start).
class TrigLine {
 public:
  TrigLine(const GridSpec& axis, const std::vector<cplx>& signed_samples) : dxi_(axis.dxi()) {
    x_start_ = -0.5 * axis.length();
    const long half = static_cast<long>(axis.n() / 2);
    for (long j = -half; j < half; ++j) {
      const cplx c = signed_samples[static_cast<std::size_t>(j + half)];
      if (c == cplx{0.0, 0.0}) continue;
      if (j == 0) {
        zero_ = c * dxi_;
      } else {
        freq_.push_back(dxi_ * static_cast<double>(j));
        amp_.push_back(c * dxi_);
      }
    }
  }

  void eval(double x, cplx& g, cplx& dg, cplx& G) const {
    g = zero_;
    dg = 0.0;
    G = zero_ * (x - x_start_);
    for (std::size_t k = 0; k < freq_.size(); ++k) {
      const cplx e = amp_[k] * std::polar(1.0, freq_[k] * x);
      g += e;
      dg += cplx{0.0, freq_[k]} * e;
      G += e / cplx{0.0, freq_[k]};
    }
  }

 private:
  double dxi_;
  double x_start_ = 0.0;
  cplx zero_{0.0, 0.0};
  std::vector<double> freq_;
  std::vector<cplx> amp_;
};

// Root of the picked component of g inside [lo, hi], where g(lo) = glo has the
// opposite sign of g(hi). Newton steps are kept inside the shrinking bracket.
double refine_root(const TrigLine& line, int mode, double lo, double hi, double glo) {
  auto pick = [mode](cplx v) { return mode == 0 ? v.real() : v.imag(); };
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 80; ++it) {
    cplx g, dg, G;
    line.eval(x, g, dg, G);
    const double gv = pick(g);
    if (gv == 0.0) return x;
    if ((gv < 0.0) == (glo < 0.0)) {
      lo = x;
      glo = gv;
    } else {
      hi = x;
    }
    const double d = pick(dg);
    double next = (d != 0.0) ? x - gv / d : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double scale = 1e-15 * std::max(1.0, std::abs(x));
    if (std::abs(next - x) <= scale || hi - lo <= scale) return next;
    x = next;
  }
  return x;
}

// Quadratic interpolant of g on a cell, as coefficients of s in [0, 1],
// taken from the derivative of the cubic Hermite interpolant of G.
std::array<double, 3> cell_quadratic(double g0, double g1, double G0, double G1, double h) {
  const double D = G1 - G0;
  return {-6.0 * D + 3.0 * h * (g0 + g1), 6.0 * D - h * (4.0 * g0 + 2.0 * g1), h * g0};
}

// Exact cell integral when g changes sign an odd number of times (one root
// is resolved) or dips through zero twice between same-sign endpoints.
double exact_cell(const TrigLine& line, int mode, double a, double h, double g0, double g1, double G0,
                  double G1) {
  auto pick = [mode](cplx v) { return mode == 0 ? v.real() : v.imag(); };
  auto G_at = [&](double x) {
    cplx g, dg, G;
    line.eval(x, g, dg, G);
    return pick(G);
  };
  const bool crosses = (g0 < 0.0 && g1 > 0.0) || (g0 > 0.0 && g1 < 0.0);
  if (crosses) {
    const double z = refine_root(line, mode, a, a + h, g0);
    const double Gz = G_at(z);
    return std::abs(Gz - G0) + std::abs(G1 - Gz);
  }
  if (g0 == 0.0 || g1 == 0.0) return std::abs(G1 - G0);
  const auto q = cell_quadratic(g0, g1, G0, G1, h);
  if (q[0] == 0.0) return std::abs(G1 - G0);
  const double sv = -q[1] / (2.0 * q[0]);
  if (!(sv > 0.0 && sv < 1.0)) return std::abs(G1 - G0);
  const double qv = (q[0] * sv + q[1]) * sv + q[2];
  if ((qv < 0.0) == (g0 < 0.0)) return std::abs(G1 - G0);
  const double xm = a + sv * h;
  cplx gm, dgm, Gm;
  line.eval(xm, gm, dgm, Gm);
  if ((pick(gm) < 0.0) == (g0 < 0.0) || pick(gm) == 0.0) return std::abs(G1 - G0);
  const double z1 = refine_root(line, mode, a, xm, g0);
  const double z2 = refine_root(line, mode, xm, a + h, pick(gm));
  const double G1z = G_at(z1);
  const double G2z = G_at(z2);
  return std::abs(G1z - G0) + std::abs(G2z - G1z) + std::abs(G1 - G2z);
}

double line_kernel(const LineView& v, const TrigLine* exact = nullptr) {
  double max_re = 0.0;
  double max_im = 0.0;
  for (std::size_t i = 0; i < v.M; ++i) {
    max_re = std::max(max_re, std::abs(v.gr[i]));
    max_im = std::max(max_im, std::abs(v.gi[i]));
  }
  const double peak = std::max(max_re, max_im);
  if (peak == 0.0) return 0.0;
  constexpr double kRealTol = 1e-11;
  if (max_im > kRealTol * peak && max_re > kRealTol * peak) {
    // Genuinely complex: |g| has no kinks where g avoids zero, and the
    // periodic rectangle rule is spectrally accurate.
    double acc = 0.0;
    for (std::size_t i = 0; i < v.M; ++i) acc += std::hypot(v.gr[i], v.gi[i]);
    return acc * v.h;
  }
  const int mode = max_im <= kRealTol * peak ? 0 : 1;
  const double* g = mode == 0 ? v.gr : v.gi;
  const double* G = mode == 0 ? v.Gr : v.Gi;
  const double drift = mode == 0 ? v.drift.real() : v.drift.imag();
  double acc = 0.0;
  for (std::size_t i = 0; i < v.M; ++i) {
    const std::size_t k = (i + 1 == v.M) ? 0 : i + 1;
    const double g0 = g[i];
    const double g1 = g[k];
    const double G0 = G[i];
    const double G1 = (k == 0) ? G[0] + drift : G[k];
    if (exact != nullptr) {
      const double a = -0.5 * static_cast<double>(v.M) * v.h + static_cast<double>(i) * v.h;
      acc += exact_cell(*exact, mode, a, v.h, g0, g1, G0, G1);
    } else {
      acc += cell_integral(g0, g1, G0, G1, v.h);
    }
  }
  return acc;
}

struct SplitLine {
  std::vector<double> gr, gi, Gr, Gi;
  cplx drift{0.0, 0.0};
};

// samples are in signed order on `axis`; output lives on M = oversample * n points.
std::vector<cplx> axis_inverse(const GridSpec& axis, const std::vector<cplx>& samples, int oversample) {
  const GridSpec fine(axis.n() * static_cast<std::size_t>(oversample), axis.length());
  std::vector<cplx> c(fine.n(), cplx{0.0, 0.0});
  const long half = static_cast<long>(axis.n() / 2);
  for (long j = -half; j < half; ++j) c[fine.storage_index(j)] = samples[static_cast<std::size_t>(j + half)];
  return inverse_transform(fine, std::move(c));
}

SplitLine axis_line(const GridSpec& axis, const std::vector<cplx>& samples, int oversample) {
  const GridSpec fine(axis.n() * static_cast<std::size_t>(oversample), axis.length());
  const auto g = axis_inverse(axis, samples, oversample);
  std::vector<cplx> prim(samples.size());
  const long half = static_cast<long>(axis.n() / 2);
  cplx zero_mode{0.0, 0.0};
  for (long j = -half; j < half; ++j) {
    const auto i = static_cast<std::size_t>(j + half);
    if (j == 0) {
      zero_mode = samples[i];
      prim[i] = 0.0;
    } else {
      prim[i] = samples[i] / cplx{0.0, axis.dxi() * static_cast<double>(j)};
    }
  }
  auto G = axis_inverse(axis, prim, oversample);
  SplitLine out;
  const std::size_t M = g.size();
  out.gr.resize(M);
  out.gi.resize(M);
  out.Gr.resize(M);
  out.Gi.resize(M);
  for (std::size_t m = 0; m < M; ++m) {
    G[m] += zero_mode * axis.dxi() * (fine.x(m) + 0.5 * axis.length());
    out.gr[m] = g[m].real();
    out.gi[m] = g[m].imag();
    out.Gr[m] = G[m].real();
    out.Gi[m] = G[m].imag();
  }
  out.drift = zero_mode * axis.dxi() * axis.length();
  return out;
}

LineView view_of(const SplitLine& l, double h) {
  return {l.gr.data(), l.gi.data(), l.Gr.data(), l.Gi.data(), l.gr.size(), h, l.drift};
}

// +1 even, -1 odd, 0 neither, for samples in signed order.
int sample_parity(const std::vector<cplx>& f) {
  const std::size_t n = f.size();
  double peak = 0.0;
  for (const auto& v : f) peak = std::max(peak, std::abs(v));
  if (peak == 0.0) return 1;
  if (std::abs(f[0]) > 1e-14 * peak) return 0;
  bool even = true;
  bool odd = true;
  for (std::size_t i = 1; i < n && (even || odd); ++i) {
    if (std::abs(f[i] - f[n - i]) > 1e-14 * peak) even = false;
    if (std::abs(f[i] + f[n - i]) > 1e-14 * peak) odd = false;
  }
  return even ? 1 : (odd ? -1 : 0);
}

}  // namespace

double line_l1(const GridSpec& grid, const std::vector<cplx>& coeffs, int oversample) {
  std::vector<cplx> ordered(grid.n());
  const long half = static_cast<long>(grid.n() / 2);
  for (long j = -half; j < half; ++j) ordered[static_cast<std::size_t>(j + half)] = coeffs[grid.storage_index(j)];
  const auto line = axis_line(grid, ordered, oversample);
  const TrigLine exact(grid, ordered);
  const double h = grid.length() / static_cast<double>(line.gr.size());
  return line_kernel(view_of(line, h), &exact);
}

SymbolGrid SymbolGrid::sample(std::vector<GridSpec> axes, const std::function<cplx(const double*)>& symbol) {
  if (axes.empty() || axes.size() > 3) throw Error(ErrorKind::ConfigError, "symbol dimension must be 1, 2 or 3");
  SymbolGrid out;
  out.axes = std::move(axes);
  const std::size_t total = product_of_sizes(out.axes);
  out.values.resize(total);
  const std::size_t d = out.axes.size();
  std::vector<std::size_t> idx(d, 0);
  double xi[3] = {0.0, 0.0, 0.0};
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rem = flat;
    for (std::size_t a = d; a-- > 0;) {
      idx[a] = rem % out.axes[a].n();
      rem /= out.axes[a].n();
      xi[a] = signed_xi(out.axes[a], idx[a]);
    }
    out.values[flat] = symbol(xi);
  }
  return out;
}

SeparableSymbol::SeparableSymbol(std::vector<GridSpec> axes) : axes_(std::move(axes)), factors_(axes_.size()) {
  if (axes_.empty() || axes_.size() > 3) throw Error(ErrorKind::ConfigError, "symbol dimension must be 1, 2 or 3");
}

std::size_t SeparableSymbol::add_factor(std::size_t axis, const std::function<cplx(double)>& factor) {
  const auto& g = axes_.at(axis);
  std::vector<cplx> s(g.n());
  for (std::size_t i = 0; i < g.n(); ++i) s[i] = factor(signed_xi(g, i));
  factors_[axis].push_back(std::move(s));
  return factors_[axis].size() - 1;
}

void SeparableSymbol::add_term(cplx coeff, const std::vector<std::size_t>& factor_ids) {
  if (factor_ids.size() != axes_.size()) throw Error(ErrorKind::ConfigError, "term needs one factor per axis");
  for (std::size_t a = 0; a < axes_.size(); ++a) {
    if (factor_ids[a] >= factors_[a].size()) throw Error(ErrorKind::ConfigError, "unknown factor id");
  }
  terms_.push_back({coeff, factor_ids});
}

SymbolGrid SeparableSymbol::to_grid() const {
  SymbolGrid out;
  out.axes = axes_;
  const std::size_t d = axes_.size();
  const std::size_t total = product_of_sizes(axes_);
  out.values.assign(total, cplx{0.0, 0.0});
  std::vector<std::size_t> idx(d, 0);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rem = flat;
    for (std::size_t a = d; a-- > 0;) {
      idx[a] = rem % axes_[a].n();
      rem /= axes_[a].n();
    }
    cplx v{0.0, 0.0};
    for (const auto& t : terms_) {
      cplx p = t.coeff;
      for (std::size_t a = 0; a < d; ++a) p *= factors_[a][t.ids[a]][idx[a]];
      v += p;
    }
    out.values[flat] = v;
  }
  return out;
}

void check_boundary_decay(const SymbolGrid& m) {
  double peak = 0.0;
  for (const auto& v : m.values) peak = std::max(peak, std::abs(v));
  if (peak == 0.0) return;
  const std::size_t d = m.dimension();
  std::vector<std::size_t> idx(d, 0);
  double edge = 0.0;
  for (std::size_t flat = 0; flat < m.values.size(); ++flat) {
    std::size_t rem = flat;
    bool on_face = false;
    for (std::size_t a = d; a-- > 0;) {
      idx[a] = rem % m.axes[a].n();
      rem /= m.axes[a].n();
      on_face = on_face || idx[a] == 0 || idx[a] + 1 == m.axes[a].n();
    }
    if (on_face) edge = std::max(edge, std::abs(m.values[flat]));
  }
  if (edge > 1e-14 * peak) {
    throw Error(ErrorKind::UnresolvedSymbol, "symbol does not decay at the edge of the sampled box");
  }
}

void check_boundary_decay(const SeparableSymbol& m) {
  for (std::size_t a = 0; a < m.dimension(); ++a) {
    for (const auto& f : m.factors()[a]) {
      double peak = 0.0;
      for (const auto& v : f) peak = std::max(peak, std::abs(v));
      const double edge = std::max(std::abs(f.front()), std::abs(f.back()));
      if (peak > 0.0 && edge > 1e-14 * peak) {
        throw Error(ErrorKind::UnresolvedSymbol, "symbol factor does not decay at the edge of the sampled box");
      }
    }
  }
}

namespace {

// Generic route: dense inverse transforms of m and of m / (i xi_last).
double s_infty_dense(const SymbolGrid& m, int oversample) {
  const std::size_t d = m.dimension();
  if (d == 1) {
    const auto line = axis_line(m.axes[0], m.values, oversample);
    const TrigLine exact(m.axes[0], m.values);
    const double h = m.axes[0].length() / static_cast<double>(line.gr.size());
    return line_kernel(view_of(line, h), &exact);
  }
  std::array<std::size_t, 3> n{1, 1, 1};
  std::array<std::size_t, 3> M{1, 1, 1};
  std::array<const GridSpec*, 3> ax{nullptr, nullptr, nullptr};
  // Leading axes padded with singleton dimensions so everything is 3D.
  for (std::size_t a = 0; a < d; ++a) {
    const std::size_t slot = 3 - d + a;
    ax[slot] = &m.axes[a];
    n[slot] = m.axes[a].n();
    M[slot] = n[slot] * static_cast<std::size_t>(oversample);
  }
  const std::size_t total = M[0] * M[1] * M[2];
  std::vector<cplx> g(total, cplx{0.0, 0.0});
  std::vector<cplx> G(total, cplx{0.0, 0.0});
  std::vector<cplx> Z(total, cplx{0.0, 0.0});

  auto natural = [](long j, std::size_t size) {
    return static_cast<std::size_t>(j >= 0 ? j : j + static_cast<long>(size));
  };
  const GridSpec& last = *ax[2];
  for (std::size_t i0 = 0; i0 < n[0]; ++i0) {
    for (std::size_t i1 = 0; i1 < n[1]; ++i1) {
      for (std::size_t i2 = 0; i2 < n[2]; ++i2) {
        const long js[3] = {static_cast<long>(i0) - static_cast<long>(n[0] / 2),
                            static_cast<long>(i1) - static_cast<long>(n[1] / 2),
                            static_cast<long>(i2) - static_cast<long>(n[2] / 2)};
        const std::size_t src = (i0 * n[1] + i1) * n[2] + i2;
        double w = 1.0;
        long parity = 0;
        for (int a = 0; a < 3; ++a) {
          if (ax[a] != nullptr) {
            w *= ax[a]->dxi();
            parity += js[a];
          }
        }
        if (parity % 2 != 0) w = -w;
        const std::size_t dst = (natural(js[0], M[0]) * M[1] + natural(js[1], M[1])) * M[2] + natural(js[2], M[2]);
        const cplx v = m.values[src] * w;
        g[dst] = v;
        if (js[2] == 0) {
          Z[dst] = v;
        } else {
          G[dst] = v / cplx{0.0, last.dxi() * static_cast<double>(js[2])};
        }
      }
    }
  }
  fft::backward3(g, M[0], M[1], M[2]);
  fft::backward3(G, M[0], M[1], M[2]);
  fft::backward3(Z, M[0], M[1], M[2]);

  const double h2 = last.length() / static_cast<double>(M[2]);
  double outer_cell = 1.0;
  for (int a = 0; a < 2; ++a) {
    if (ax[a] != nullptr) outer_cell *= ax[a]->length() / static_cast<double>(M[a]);
  }
  std::vector<double> partial(M[0], 0.0);
  parallel_for(M[0], [&](std::size_t i0) {
    SplitLine line;
    line.gr.resize(M[2]);
    line.gi.resize(M[2]);
    line.Gr.resize(M[2]);
    line.Gi.resize(M[2]);
    double row = 0.0;
    for (std::size_t i1 = 0; i1 < M[1]; ++i1) {
      const std::size_t base = (i0 * M[1] + i1) * M[2];
      const cplx z = Z[base];
      for (std::size_t i2 = 0; i2 < M[2]; ++i2) {
        const cplx Gv = G[base + i2] + z * (h2 * static_cast<double>(i2));
        line.gr[i2] = g[base + i2].real();
        line.gi[i2] = g[base + i2].imag();
        line.Gr[i2] = Gv.real();
        line.Gi[i2] = Gv.imag();
      }
      line.drift = z * last.length();
      row += line_kernel(view_of(line, h2));
    }
    partial[i0] = row;
  });
  double acc = 0.0;
  for (double p : partial) acc += p;
  return acc * outer_cell;
}

double s_infty_separable(const SeparableSymbol& m, int oversample) {
  const std::size_t d = m.dimension();
  const std::size_t last = d - 1;
  if (d == 1) {
    // A single axis needs no tensor machinery: sum the terms and integrate exactly.
    std::vector<cplx> samples(m.axes()[0].n(), cplx{0.0, 0.0});
    for (const auto& t : m.terms()) {
      const auto& f = m.factors()[0][t.ids[0]];
      for (std::size_t i = 0; i < samples.size(); ++i) samples[i] += t.coeff * f[i];
    }
    return s_infty_dense(SymbolGrid{m.axes(), samples}, oversample);
  }
  // Inverse transforms of every factor on the oversampled x grid.
  std::vector<std::vector<std::vector<cplx>>> outer(last);
  for (std::size_t a = 0; a < last; ++a) {
    for (const auto& f : m.factors()[a]) outer[a].push_back(axis_inverse(m.axes()[a], f, oversample));
  }
  std::vector<SplitLine> lines;
  for (const auto& f : m.factors()[last]) lines.push_back(axis_line(m.axes()[last], f, oversample));

  // When every term has the same parity sigma, g(-x) = sigma g(x) and the
  // (x0, x1) plane can be folded in half.
  int sigma = 0;
  for (std::size_t ti = 0; ti < m.terms().size(); ++ti) {
    int p = 1;
    for (std::size_t a = 0; a < d; ++a) p *= sample_parity(m.factors()[a][m.terms()[ti].ids[a]]);
    if (p == 0 || (ti > 0 && p != sigma)) {
      sigma = 0;
      break;
    }
    sigma = p;
  }

  const std::size_t M2 = m.axes()[last].n() * static_cast<std::size_t>(oversample);
  const double h2 = m.axes()[last].length() / static_cast<double>(M2);
  const std::size_t M0 = m.axes()[0].n() * static_cast<std::size_t>(oversample);
  const std::size_t M1 = d >= 3 ? m.axes()[1].n() * static_cast<std::size_t>(oversample) : 1;
  double outer_cell = 1.0;
  for (std::size_t a = 0; a < last; ++a) {
    outer_cell *= m.axes()[a].length() / static_cast<double>(m.axes()[a].n() * static_cast<std::size_t>(oversample));
  }
  const std::size_t K = lines.size();
  const bool fold = sigma != 0;
  const std::size_t rows = fold ? M0 / 2 + 1 : M0;

  std::vector<double> partial(rows, 0.0);
  parallel_for(rows, [&](std::size_t i0) {
    std::vector<double> gr(M2), gi(M2), Gr(M2), Gi(M2);
    std::vector<cplx> w(K);
    double row = 0.0;
    for (std::size_t i1 = 0; i1 < M1; ++i1) {
      std::fill(w.begin(), w.end(), cplx{0.0, 0.0});
      for (const auto& t : m.terms()) {
        cplx c = t.coeff * outer[0][t.ids[0]][i0];
        if (d >= 3) c *= outer[1][t.ids[1]][i1];
        w[t.ids[last]] += c;
      }
      std::fill(gr.begin(), gr.end(), 0.0);
      std::fill(gi.begin(), gi.end(), 0.0);
      std::fill(Gr.begin(), Gr.end(), 0.0);
      std::fill(Gi.begin(), Gi.end(), 0.0);
      cplx drift{0.0, 0.0};
      for (std::size_t k = 0; k < K; ++k) {
        if (w[k] == cplx{0.0, 0.0}) continue;
        const double wr = w[k].real();
        const double wi = w[k].imag();
        const double* lgr = lines[k].gr.data();
        const double* lgi = lines[k].gi.data();
        const double* lGr = lines[k].Gr.data();
        const double* lGi = lines[k].Gi.data();
        for (std::size_t i2 = 0; i2 < M2; ++i2) {
          gr[i2] += wr * lgr[i2] - wi * lgi[i2];
          gi[i2] += wr * lgi[i2] + wi * lgr[i2];
          Gr[i2] += wr * lGr[i2] - wi * lGi[i2];
          Gi[i2] += wr * lGi[i2] + wi * lGr[i2];
        }
        drift += w[k] * lines[k].drift;
      }
      row += line_kernel({gr.data(), gi.data(), Gr.data(), Gi.data(), M2, h2, drift});
    }
    const bool self_paired = (i0 == 0) || (2 * i0 == M0);
    partial[i0] = (fold && !self_paired) ? 2.0 * row : row;
  });
  double acc = 0.0;
  for (double p : partial) acc += p;
  return acc * outer_cell;
}

}  // namespace

double s_infty_norm(const SymbolGrid& m, const SInftyOptions& opt) {
  if (m.values.size() != product_of_sizes(m.axes)) throw Error(ErrorKind::GridMismatch, "symbol sample count");
  check_boundary_decay(m);
  return s_infty_dense(m, std::max(1, opt.oversample));
}

double s_infty_norm(const SeparableSymbol& m, const SInftyOptions& opt) {
  check_boundary_decay(m);
  return s_infty_separable(m, std::max(1, opt.oversample));
}

RefinementRecord s_infty_refinement(const std::function<SeparableSymbol(int scale)>& build,
                                    const SInftyOptions& opt) {
  RefinementRecord r;
  r.value = s_infty_norm(build(1), opt);
  r.refined_value = s_infty_norm(build(2), opt);
  r.rel_change = r.value > 0.0 ? std::abs(r.refined_value - r.value) / r.value : 0.0;
  return r;
}

double interpolation_ratio(const SpectralField& f, int k) {
  if (k < 0) throw Error(ErrorKind::ConfigError, "interpolation_ratio needs k >= 0");
  const double f_l2 = spectral_l2(f);
  const double band = spectral_l2(project(f, Selector::Widened, k));
  if (f_l2 == 0.0 || band <= 1e-14 * f_l2) {
    throw Error(ErrorKind::DegenerateInput, "field has no mass in the widened band");
  }
  const auto pk = project(f, Selector::Band, k);
  double lhs = 0.0;
  for (const auto& c : pk.coeffs()) lhs = std::max(lhs, std::norm(c));
  // d_xi fhat is the transform of (-i x) f; only its L2 norm is needed.
  const double dfhat = spectral_l2(multiply_by_x(f));
  const double scale = std::exp2(static_cast<double>(k));
  const double rhs = (1.0 / scale) * f_l2 * (scale * dfhat + f_l2);
  return lhs / rhs;
}

}  // namespace qmkdv
