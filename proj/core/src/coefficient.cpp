#include "qmkdv/coefficient.hpp"

#include <cmath>
#include <cstdio>

#include "qmkdv/error.hpp"

namespace qmkdv {

CoefficientSpec CoefficientSpec::linear(double a) { return {CoeffFamily::Linear, a, 0.0, 0.0}; }
CoefficientSpec CoefficientSpec::sine(double a) { return {CoeffFamily::Sine, a, 0.0, 0.0}; }
CoefficientSpec CoefficientSpec::cubic_poly(double a, double b, double c) { return {CoeffFamily::CubicPoly, a, b, c}; }

CoefficientSpec CoefficientSpec::from_name(const std::string& family, double a, double b, double c) {
  if (family == "linear") return linear(a);
  if (family == "sine") return sine(a);
  if (family == "cubic-poly") return cubic_poly(a, b, c);
  throw Error(ErrorKind::ConfigError, "unknown coefficient family '" + family + "'");
}

double CoefficientSpec::c(double u) const {
  switch (family_) {
    case CoeffFamily::Linear: return a_ * u;
    case CoeffFamily::Sine: return std::sin(a_ * u);
    case CoeffFamily::CubicPoly: return u * (a_ + u * (b_ + u * c_));
  }
  return 0.0;
}

double CoefficientSpec::dc(double u) const {
  switch (family_) {
    case CoeffFamily::Linear: return a_;
    case CoeffFamily::Sine: return a_ * std::cos(a_ * u);
    case CoeffFamily::CubicPoly: return a_ + u * (2.0 * b_ + 3.0 * c_ * u);
  }
  return 0.0;
}

double CoefficientSpec::d2c(double u) const {
  switch (family_) {
    case CoeffFamily::Linear: return 0.0;
    case CoeffFamily::Sine: return -a_ * a_ * std::sin(a_ * u);
    case CoeffFamily::CubicPoly: return 2.0 * b_ + 6.0 * c_ * u;
  }
  return 0.0;
}

double CoefficientSpec::c1(double u) const {
  const double v = c(u);
  return std::sqrt(v * v + 1.0);
}

double CoefficientSpec::c3(double u) const { return c(u) - dc(0.0) * u - 0.5 * d2c(0.0) * u * u; }

double CoefficientSpec::alpha2() const {
  const double d = dc(0.0);
  return d * d;
}

double CoefficientSpec::alpha3() const { return 0.5 * d2c(0.0) * dc(0.0); }

int CoefficientSpec::polynomial_degree() const noexcept {
  switch (family_) {
    case CoeffFamily::Linear: return a_ == 0.0 ? 0 : 1;
    case CoeffFamily::Sine: return a_ == 0.0 ? 0 : -1;
    case CoeffFamily::CubicPoly: return c_ != 0.0 ? 3 : (b_ != 0.0 ? 2 : (a_ != 0.0 ? 1 : 0));
  }
  return -1;
}

std::string CoefficientSpec::identifier() const {
  char buf[160];
  switch (family_) {
    case CoeffFamily::Linear: std::snprintf(buf, sizeof(buf), "linear(a=%.17g)", a_); break;
    case CoeffFamily::Sine: std::snprintf(buf, sizeof(buf), "sine(a=%.17g)", a_); break;
    case CoeffFamily::CubicPoly:
      std::snprintf(buf, sizeof(buf), "cubic-poly(a=%.17g,b=%.17g,c=%.17g)", a_, b_, c_);
      break;
  }
  return buf;
}

void BootstrapConstants::validate() const {
  if (std::abs(p0 - delta / 10.0) > 1e-15) throw Error(ErrorKind::ConfigError, "p0 must equal delta/10");
  const double denom = s + 1.0 - 2.0 * gamma_h;
  if (denom <= 0.0 || p1 < 2.0 * p0 / denom) {
    throw Error(ErrorKind::ConfigError, "p1 below 2 p0 / (s + 1 - 2 gamma_h)");
  }
}

}  // namespace qmkdv
