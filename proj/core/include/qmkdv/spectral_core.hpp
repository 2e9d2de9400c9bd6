#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

namespace qmkdv {

using cplx = std::complex<double>;

// Periodic box [-L/2, L/2) sampled at n points. Frequencies are
// xi_j = (2 pi / L) j for j in {-n/2, ..., n/2 - 1}.
class GridSpec {
 public:
  GridSpec(std::size_t n_points, double box_length);

  std::size_t n() const noexcept { return n_; }
  double length() const noexcept { return length_; }
  double dx() const noexcept { return length_ / static_cast<double>(n_); }
  double dxi() const noexcept;

  // Natural FFT storage index <-> signed frequency index.
  long signed_index(std::size_t idx) const noexcept;
  std::size_t storage_index(long j) const noexcept;

  double xi(std::size_t idx) const noexcept { return dxi() * static_cast<double>(signed_index(idx)); }
  double x(std::size_t m) const noexcept { return -0.5 * length_ + dx() * static_cast<double>(m); }

  bool operator==(const GridSpec& other) const noexcept {
    return n_ == other.n_ && length_ == other.length_;
  }

 private:
  std::size_t n_;
  double length_;
};

// Fourier coefficients normalized so that f(x) = sum_j fhat_j e^{i xi_j x} dxi.
// Storage follows FFT order: index 0 is xi = 0, index n/2 is the Nyquist mode.
class SpectralField {
 public:
  explicit SpectralField(GridSpec grid, double time = 0.0);
  SpectralField(GridSpec grid, std::vector<cplx> coeffs, double time = 0.0);

  static SpectralField from_physical(GridSpec grid, const std::vector<double>& samples, double time = 0.0);
  static SpectralField from_physical(GridSpec grid, const std::vector<cplx>& samples, double time = 0.0);
  static SpectralField from_function(GridSpec grid, const std::function<double(double)>& f, double time = 0.0);

  std::vector<double> to_physical() const;
  std::vector<cplx> to_physical_complex() const;

  const GridSpec& grid() const noexcept { return grid_; }
  double time() const noexcept { return time_; }
  void set_time(double t) noexcept { time_ = t; }

  std::vector<cplx>& coeffs() noexcept { return coeffs_; }
  const std::vector<cplx>& coeffs() const noexcept { return coeffs_; }
  std::size_t size() const noexcept { return coeffs_.size(); }

  cplx at(long j) const { return coeffs_[grid_.storage_index(j)]; }
  cplx& at(long j) { return coeffs_[grid_.storage_index(j)]; }

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(cplx s);

 private:
  GridSpec grid_;
  std::vector<cplx> coeffs_;
  double time_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(cplx s, SpectralField a);

// Low-level transforms between physical samples and normalized coefficients
// on an arbitrary grid. Physical samples are at x_m = -L/2 + m L/n.
std::vector<cplx> forward_transform(const GridSpec& grid, std::vector<cplx> samples);
std::vector<cplx> inverse_transform(const GridSpec& grid, std::vector<cplx> coeffs);

// Multiply each coefficient by symbol(xi).
SpectralField apply_symbol(SpectralField f, const std::function<cplx(double)>& symbol);

SpectralField derivative(const SpectralField& f, int order);
SpectralField fractional_abs_derivative(const SpectralField& f, double beta);
// Throws NonZeroMean when |fhat(0)| exceeds tol * max|fhat|.
SpectralField antiderivative(const SpectralField& f, double tol = 1e-12);

SpectralField profile_from_solution(const SpectralField& phi, double t);
SpectralField free_evolve(const SpectralField& h, double t);

enum class NormKind { L2, Linf, Hs, L1 };

// L2, Linf and L1 are physical-side norms with dx weights; Hs is the xi-side
// norm [sum (1+xi^2)^s |fhat|^2 dxi]^{1/2}. Under this normalization
// ||f||_{L2} = sqrt(2 pi) ||f||_{H^0}.
double norm(const SpectralField& f, NormKind kind, double s = 0.0);
double sobolev_norm(const SpectralField& f, double s);
double spectral_l2(const SpectralField& f);
double sup_norm(const SpectralField& f);

SpectralField pointwise_product(const SpectralField& f, const SpectralField& g, int pad_factor);

// Real-field hygiene: conjugate symmetry, zero Nyquist, zero mean.
void enforce_real(SpectralField& f);
void remove_mean(SpectralField& f);
double conjugate_asymmetry(const SpectralField& f);

// Multiplication by the centered sawtooth x in physical space.
SpectralField multiply_by_x(const SpectralField& f);
// Fraction of physical L2 mass inside |x| <= radius.
double mass_fraction_inside(const SpectralField& f, double radius);

// Coefficients in signed order j = -n/2 .. n/2-1, as written to snapshots.
std::vector<cplx> signed_order(const SpectralField& f);
SpectralField from_signed_order(GridSpec grid, const std::vector<cplx>& ordered, double time);

}  // namespace qmkdv
