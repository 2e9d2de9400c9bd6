#include "qmkdv/spectral_core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qmkdv/error.hpp"
#include "qmkdv/fft.hpp"

namespace qmkdv {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_same_grid(const SpectralField& a, const SpectralField& b) {
  if (!(a.grid() == b.grid())) {
    throw Error(ErrorKind::GridMismatch, "fields live on different grids");
  }
}

}  // namespace

GridSpec::GridSpec(std::size_t n_points, double box_length) : n_(n_points), length_(box_length) {
  if (n_points < 16 || n_points % 2 != 0) {
    throw Error(ErrorKind::ConfigError, "grid point count must be even and at least 16");
  }
  if (!(box_length > 0.0) || !std::isfinite(box_length)) {
    throw Error(ErrorKind::ConfigError, "box length must be positive");
  }
}

double GridSpec::dxi() const noexcept { return kTwoPi / length_; }

long GridSpec::signed_index(std::size_t idx) const noexcept {
  const auto n = static_cast<long>(n_);
  const auto i = static_cast<long>(idx);
  return i < n / 2 ? i : i - n;
}

std::size_t GridSpec::storage_index(long j) const noexcept {
  const auto n = static_cast<long>(n_);
  return static_cast<std::size_t>(j >= 0 ? j : j + n);
}

SpectralField::SpectralField(GridSpec grid, double time)
    : grid_(grid), coeffs_(grid.n(), cplx{0.0, 0.0}), time_(time) {}

SpectralField::SpectralField(GridSpec grid, std::vector<cplx> coeffs, double time)
    : grid_(grid), coeffs_(std::move(coeffs)), time_(time) {
  if (coeffs_.size() != grid_.n()) {
    throw Error(ErrorKind::GridMismatch, "coefficient count does not match grid");
  }
}

// fhat_j = (dx / 2 pi) (-1)^j sum_m f_m e^{-2 pi i j m / n}; the sign factor
// accounts for the box starting at -L/2.
std::vector<cplx> forward_transform(const GridSpec& grid, std::vector<cplx> samples) {
  fft::forward(samples);
  const double scale = grid.dx() / kTwoPi;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double sign = (grid.signed_index(i) % 2 == 0) ? 1.0 : -1.0;
    samples[i] *= sign * scale;
  }
  return samples;
}

std::vector<cplx> inverse_transform(const GridSpec& grid, std::vector<cplx> coeffs) {
  const double scale = grid.dxi();
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    const double sign = (grid.signed_index(i) % 2 == 0) ? 1.0 : -1.0;
    coeffs[i] *= sign * scale;
  }
  fft::backward(coeffs);
  return coeffs;
}

SpectralField SpectralField::from_physical(GridSpec grid, const std::vector<double>& samples, double time) {
  std::vector<cplx> buf(samples.begin(), samples.end());
  if (buf.size() != grid.n()) throw Error(ErrorKind::GridMismatch, "sample count does not match grid");
  return SpectralField(grid, forward_transform(grid, std::move(buf)), time);
}

SpectralField SpectralField::from_physical(GridSpec grid, const std::vector<cplx>& samples, double time) {
  if (samples.size() != grid.n()) throw Error(ErrorKind::GridMismatch, "sample count does not match grid");
  return SpectralField(grid, forward_transform(grid, samples), time);
}

SpectralField SpectralField::from_function(GridSpec grid, const std::function<double(double)>& f, double time) {
  std::vector<double> samples(grid.n());
  for (std::size_t m = 0; m < grid.n(); ++m) samples[m] = f(grid.x(m));
  return from_physical(grid, samples, time);
}

std::vector<cplx> SpectralField::to_physical_complex() const { return inverse_transform(grid_, coeffs_); }

std::vector<double> SpectralField::to_physical() const {
  const auto z = to_physical_complex();
  std::vector<double> out(z.size());
  std::transform(z.begin(), z.end(), out.begin(), [](cplx v) { return v.real(); });
  return out;
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  require_same_grid(*this, other);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  require_same_grid(*this, other);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(cplx s) {
  for (auto& c : coeffs_) c *= s;
  return *this;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(cplx s, SpectralField a) { return a *= s; }

SpectralField apply_symbol(SpectralField f, const std::function<cplx(double)>& symbol) {
  const auto& g = f.grid();
  for (std::size_t i = 0; i < f.size(); ++i) f.coeffs()[i] *= symbol(g.xi(i));
  return f;
}

SpectralField derivative(const SpectralField& f, int order) {
  if (order < 0) throw Error(ErrorKind::ConfigError, "derivative order must be nonnegative");
  SpectralField out = f;
  const auto& g = f.grid();
  const std::size_t nyq = g.n() / 2;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (order % 2 == 1 && i == nyq) {
      // (i xi)^odd is not conjugate-symmetric at the unpaired Nyquist mode.
      out.coeffs()[i] = 0.0;
      continue;
    }
    out.coeffs()[i] *= std::pow(cplx{0.0, g.xi(i)}, order);
  }
  return out;
}

SpectralField fractional_abs_derivative(const SpectralField& f, double beta) {
  SpectralField out = f;
  const auto& g = f.grid();
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double a = std::abs(g.xi(i));
    out.coeffs()[i] *= (beta == 0.0) ? 1.0 : std::pow(a, beta);
  }
  return out;
}

SpectralField antiderivative(const SpectralField& f, double tol) {
  double peak = 0.0;
  for (const auto& c : f.coeffs()) peak = std::max(peak, std::abs(c));
  if (std::abs(f.coeffs()[0]) > tol * std::max(peak, 1e-300) && std::abs(f.coeffs()[0]) > 0.0) {
    throw Error(ErrorKind::NonZeroMean, "antiderivative needs a zero-mean field");
  }
  SpectralField out = f;
  const auto& g = f.grid();
  out.coeffs()[0] = 0.0;
  out.coeffs()[g.n() / 2] = 0.0;
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (i == g.n() / 2) continue;
    out.coeffs()[i] /= cplx{0.0, g.xi(i)};
  }
  return out;
}

SpectralField profile_from_solution(const SpectralField& phi, double t) {
  SpectralField h = apply_symbol(phi, [t](double xi) { return std::polar(1.0, -t * xi * xi * xi); });
  h.set_time(t);
  return h;
}

SpectralField free_evolve(const SpectralField& h, double t) {
  SpectralField phi = apply_symbol(h, [t](double xi) { return std::polar(1.0, t * xi * xi * xi); });
  phi.set_time(t);
  return phi;
}

double spectral_l2(const SpectralField& f) { return sobolev_norm(f, 0.0); }

double sobolev_norm(const SpectralField& f, double s) {
  const auto& g = f.grid();
  double acc = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double xi = g.xi(i);
    const double w = (s == 0.0) ? 1.0 : std::pow(1.0 + xi * xi, s);
    acc += w * std::norm(f.coeffs()[i]);
  }
  return std::sqrt(acc * g.dxi());
}

double sup_norm(const SpectralField& f) {
  double m = 0.0;
  for (const auto& v : f.to_physical_complex()) m = std::max(m, std::abs(v));
  return m;
}

double norm(const SpectralField& f, NormKind kind, double s) {
  if (kind == NormKind::Hs) return sobolev_norm(f, s);
  if (kind == NormKind::Linf) return sup_norm(f);
  const auto z = f.to_physical_complex();
  const double dx = f.grid().dx();
  double acc = 0.0;
  if (kind == NormKind::L2) {
    for (const auto& v : z) acc += std::norm(v);
    return std::sqrt(acc * dx);
  }
  for (const auto& v : z) acc += std::abs(v);
  return acc * dx;
}

SpectralField pointwise_product(const SpectralField& f, const SpectralField& g, int pad_factor) {
  require_same_grid(f, g);
  if (pad_factor < 1) throw Error(ErrorKind::ConfigError, "pad factor must be at least 1");
  const auto& grid = f.grid();
  const std::size_t n = grid.n();
  const GridSpec fine(n * static_cast<std::size_t>(pad_factor), grid.length());
  auto lift = [&](const SpectralField& a) {
    std::vector<cplx> c(fine.n(), cplx{0.0, 0.0});
    for (std::size_t i = 0; i < n; ++i) c[fine.storage_index(grid.signed_index(i))] = a.coeffs()[i];
    return inverse_transform(fine, std::move(c));
  };
  auto pf = lift(f);
  const auto pg = lift(g);
  for (std::size_t m = 0; m < pf.size(); ++m) pf[m] *= pg[m];
  const auto prod = forward_transform(fine, std::move(pf));
  SpectralField out(grid, f.time());
  for (std::size_t i = 0; i < n; ++i) out.coeffs()[i] = prod[fine.storage_index(grid.signed_index(i))];
  return out;
}

void enforce_real(SpectralField& f) {
  const auto& g = f.grid();
  const std::size_t n = g.n();
  auto& c = f.coeffs();
  c[0] = cplx{c[0].real(), 0.0};
  c[n / 2] = 0.0;
  for (std::size_t i = 1; i < n / 2; ++i) {
    const cplx avg = 0.5 * (c[i] + std::conj(c[n - i]));
    c[i] = avg;
    c[n - i] = std::conj(avg);
  }
}

void remove_mean(SpectralField& f) { f.coeffs()[0] = 0.0; }

double conjugate_asymmetry(const SpectralField& f) {
  const std::size_t n = f.grid().n();
  const auto& c = f.coeffs();
  double num = std::abs(c[0].imag());
  double peak = 0.0;
  for (const auto& v : c) peak = std::max(peak, std::abs(v));
  for (std::size_t i = 1; i < n / 2; ++i) num = std::max(num, std::abs(c[i] - std::conj(c[n - i])));
  return peak > 0.0 ? num / peak : 0.0;
}

SpectralField multiply_by_x(const SpectralField& f) {
  const auto& g = f.grid();
  auto z = f.to_physical_complex();
  for (std::size_t m = 0; m < z.size(); ++m) z[m] *= g.x(m);
  return SpectralField(g, forward_transform(g, std::move(z)), f.time());
}

double mass_fraction_inside(const SpectralField& f, double radius) {
  const auto& g = f.grid();
  const auto z = f.to_physical_complex();
  double inside = 0.0;
  double total = 0.0;
  for (std::size_t m = 0; m < z.size(); ++m) {
    const double w = std::norm(z[m]);
    total += w;
    if (std::abs(g.x(m)) <= radius) inside += w;
  }
  return total > 0.0 ? inside / total : 1.0;
}

std::vector<cplx> signed_order(const SpectralField& f) {
  const auto& g = f.grid();
  const long half = static_cast<long>(g.n() / 2);
  std::vector<cplx> out;
  out.reserve(g.n());
  for (long j = -half; j < half; ++j) out.push_back(f.at(j));
  return out;
}

SpectralField from_signed_order(GridSpec grid, const std::vector<cplx>& ordered, double time) {
  if (ordered.size() != grid.n()) throw Error(ErrorKind::GridMismatch, "coefficient count does not match grid");
  SpectralField f(grid, time);
  const long half = static_cast<long>(grid.n() / 2);
  for (long j = -half; j < half; ++j) f.at(j) = ordered[static_cast<std::size_t>(j + half)];
  return f;
}

}  // namespace qmkdv
