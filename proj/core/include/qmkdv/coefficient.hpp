#pragma once

#include <string>

namespace qmkdv {

enum class CoeffFamily { Linear, Sine, CubicPoly };

// The quasilinear coefficient c with c(0) = 0:
//   linear      c(u) = a u
//   sine        c(u) = sin(a u)
//   cubic-poly  c(u) = a u + b u^2 + c u^3
class CoefficientSpec {
 public:
  static CoefficientSpec linear(double a);
  static CoefficientSpec sine(double a);
  static CoefficientSpec cubic_poly(double a, double b, double c);
  // Family name as used in config files: "linear", "sine", "cubic-poly".
  static CoefficientSpec from_name(const std::string& family, double a, double b = 0.0, double c = 0.0);

  double c(double u) const;
  double dc(double u) const;
  double d2c(double u) const;

  // c1 = sqrt(c^2 + 1) >= 1.
  double c1(double u) const;
  // Remainder after the quadratic Taylor polynomial at 0.
  double c3(double u) const;

  // alpha2 = c'(0)^2, alpha3 = c''(0) c'(0) / 2.
  double alpha2() const;
  double alpha3() const;

  CoeffFamily family() const noexcept { return family_; }
  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  double c_param() const noexcept { return c_; }
  // Degree when c is a polynomial, otherwise -1.
  int polynomial_degree() const noexcept;

  std::string identifier() const;

 private:
  CoefficientSpec(CoeffFamily f, double a, double b, double c) : family_(f), a_(a), b_(b), c_(c) {}
  CoeffFamily family_;
  double a_;
  double b_;
  double c_;
};

struct BootstrapConstants {
  double delta = 1e-3;
  double p0 = 1e-4;
  double p1 = 1e-3;
  double gamma_l = 0.0;
  double gamma_h = 2.5;
  double s = 12.0;
  double decay_exponent = 0.48;

  // Checks p0 = delta / 10 and p1 >= 2 p0 / (s + 1 - 2 gamma_h).
  void validate() const;
};

}  // namespace qmkdv
