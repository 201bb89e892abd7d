#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "qlab/errors.hpp"

namespace qlab {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kEulerGamma = 0.57721566490153286061;

struct PrecisionPolicy {
  double targetRelErr = 1e-14;
  int maxSeriesTerms = 4'000'000;
  int emOrder = 30;  // highest Bernoulli index used in Euler-Maclaurin tails
  double besselTailCutoff = 1e-30;

  // Throws DomainError when an invariant is violated.
  void validate() const;
};

const PrecisionPolicy& defaultPrecision();

// Complex number stored as log|z| and arg z; products of factors of very
// different size never leave log space.
class LogScaledValue {
 public:
  LogScaledValue() = default;  // zero

  static LogScaledValue fromComplex(cplx z);
  static LogScaledValue fromReal(double x) { return fromComplex(cplx(x, 0.0)); }
  // z = exp(logz)
  static LogScaledValue fromLog(cplx logz);
  static LogScaledValue zero() { return {}; }

  bool isZero() const { return zero_; }
  double logModulus() const;
  double phase() const { return phase_; }

  cplx toComplex() const;
  // exp(logModulus - logScale) * e^{i phase}
  cplx scaled(double logScale) const;

  LogScaledValue conj() const;
  LogScaledValue inverse() const;
  LogScaledValue pow(double p) const;

  friend LogScaledValue operator*(const LogScaledValue& a, const LogScaledValue& b);
  friend LogScaledValue operator/(const LogScaledValue& a, const LogScaledValue& b);
  LogScaledValue& operator*=(const LogScaledValue& b) { return *this = *this * b; }
  LogScaledValue& operator/=(const LogScaledValue& b) { return *this = *this / b; }

  // Sum computed relative to the larger operand.
  friend LogScaledValue operator+(const LogScaledValue& a, const LogScaledValue& b);

 private:
  LogScaledValue(double lm, double ph) : zero_(false), logMod_(lm), phase_(ph) {}
  bool zero_ = true;
  double logMod_ = 0.0;
  double phase_ = 0.0;
};

// Principal branch of log Gamma.
cplx logGammaC(cplx s);
// Gamma'/Gamma.
cplx digammaC(cplx s);

cplx zetaC(cplx s, const PrecisionPolicy& pp = defaultPrecision());
cplx zetaDerivC(cplx s, const PrecisionPolicy& pp = defaultPrecision());
// sum_{n>=0} (n+a)^{-s}; a may be any positive real (the public contract is
// 0 < a <= 1, larger a is used internally for tails).
cplx hurwitzZetaC(cplx s, double a, const PrecisionPolicy& pp = defaultPrecision());

// Lambda(s) = pi^{-s/2} Gamma(s/2) zeta(s)
cplx completedZeta(cplx s);
LogScaledValue completedZetaLog(cplx s);

// theta(s) = pi^{-s} Gamma(s) zeta(2s)
LogScaledValue thetaFunc(cplx s);
// phi(1/2+iT) = theta(1/2-iT)/theta(1/2+iT)
cplx scatteringPhi(double T);

// e^{pi T/2} K_{iT}(y)
double besselKScaled(double T, double y, const PrecisionPolicy& pp = defaultPrecision());
// Contour-deformed integral representation evaluated on its own; density
// multiplies the node count (2 gives the reference evaluation).
double besselKScaledIntegral(double T, double y, int density = 1);
// Power series around y = 0.
double besselKScaledSeries(double T, double y);
// Point beyond which e^{pi T/2} K_{iT} is treated as negligible.
double besselNegligibleBeyond(double T);

// Piecewise Chebyshev interpolant of besselKScaled(T, .) on (0, xMax], for
// bulk evaluation at a fixed order. Read-only after construction.
class BesselScaledTable {
 public:
  BesselScaledTable(double T, double xMax, double absTol = 1e-13);
  double operator()(double x) const;
  double T() const { return T_; }
  double xMax() const { return xMax_; }
  std::size_t panelCount() const { return panels_.size(); }

 private:
  struct Panel {
    double a, b;
    std::vector<double> c;
  };
  void build(double a, double b, double scale, int depth);
  double T_, xMax_, xSeries_, absTol_;
  std::vector<Panel> panels_;
};

// Image of z in the standard fundamental domain of PSL2(Z).
cplx reduceToFundamentalDomain(cplx z);

// |eta(z)| for Im z > 0.
double dedekindEtaAbs(cplx z, const PrecisionPolicy& pp = defaultPrecision());
// log f(z) with f(z) = (Im z)^{1/2} |eta(z)|^2.
double logF(cplx z);

// gamma_{V_T}(1/2 + s)
LogScaledValue gammaVT(cplx s, double T);
// gamma_{V_T^2}(1 + s)
LogScaledValue gammaVTsq(cplx s, double T);

namespace detail {
// B_{2k}, k = 0..30
double bernoulli2k(int k);
}

}  // namespace qlab
