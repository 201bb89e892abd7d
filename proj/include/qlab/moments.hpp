#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include "qlab/errors.hpp"
#include "qlab/specfun.hpp"

namespace qlab::moments {

using i64 = std::int64_t;
using WeightFn = std::function<cplx(double)>;

struct ShiftTuple {
  cplx alpha, beta, gamma, delta;

  // (v + iT, v - iT, iT, -iT)
  static ShiftTuple eisenstein(cplx v, double T);
  cplx sum() const { return alpha + beta + gamma + delta; }
  // real parts in (-1/2, 1/2)
  void validate() const;
};

// cosh(pi T) 2^{-3} pi^{-(a+b+c+d)/2} Gamma((1/2+a+it)/2) Gamma((1/2+b+it)/2)
//   Gamma((1/2+c-it)/2) Gamma((1/2+d-it)/2), assembled in log space
cplx weightWShifts(double t, const ShiftTuple& s, double T);
cplx weightW(double t, cplx v, double T);

// (1/2 pi) int w dt: Gamma closed form and direct quadrature
cplx wIntegralClosedForm(const ShiftTuple& s, double T);
cplx wIntegralNumeric(const ShiftTuple& s, double T, double relTol = 1e-11);

double qFunction(double t, double T);
double qPrime(double t, double v, double T);

// Half-width of the t-range kept for M(v): |t| <= T + 40.
double momentCutoff(double T);

// (1/2 pi) int zeta(1/2+a+it) zeta(1/2+b+it) zeta(1/2+c-it) zeta(1/2+d-it) w(t) dt
// with w = weightWShifts over |t| <= T + 40 (widened when a shift has |Im| > T);
// relTol is relative to the integral of |integrand|.
cplx fourthMomentShifts(const ShiftTuple& s, double T, double relTol = 1e-8);
// Eisenstein shifts; Re v = 0, |Im v| <= 2, T <= 120.
cplx fourthMomentNumeric(cplx v, double T, double relTol = 1e-8);

// The six products of completed zeta values, each times (pi/4) cosh(pi T).
std::array<cplx, 6> mainTermLambdaTerms(cplx v, double T);
// Their sum; |v| < 1e-4 goes through +-eps averaging and Richardson
// extrapolation from eps = 1e-4, 2e-4.
cplx mainTermLambda(cplx v, double T);

// X_{a,c,t} = pi^{a+c} Gamma((1/2-a-it)/2)/Gamma((1/2+a+it)/2)
//             * Gamma((1/2-c+it)/2)/Gamma((1/2+c-it)/2)
cplx xPair(cplx a, cplx c, double t);
cplx xFull(const ShiftTuple& s, double t);

cplx arithmeticA(const ShiftTuple& s, cplx z);
// Euler factors over p | hk; gcd(h, k) = 1.
cplx arithmeticB(i64 h, i64 k, const ShiftTuple& s, cplx z);
cplx zFactor(i64 h, i64 k, const ShiftTuple& s, cplx z);

// Bracket of the six-term main term at height t (without w and (hk)^{-1/2}).
cplx twistedBracket(i64 h, i64 k, const ShiftTuple& s, double t);
// (hk)^{-1/2} int_{tMin}^{tMax} w(t) * bracket dt
cplx twistedMainTerm(i64 h, i64 k, const ShiftTuple& s, const WeightFn& w, double tMin, double tMax,
                     double relTol = 1e-11);
// int (h/k)^{-it} zeta zeta zeta zeta w(t) dt; support within |t| <= 60, hk <= 12
cplx twistedNumeric(i64 h, i64 k, const ShiftTuple& s, const WeightFn& w, double tMin, double tMax,
                    double relTol = 1e-9);

cplx gFactor(cplx z, const ShiftTuple& s, double t);
// (1/2 pi i) int_{(1)} e^{z^2} g(z, t) x^{-z} dz / z
cplx vWeight(double x, const ShiftTuple& s, double t, double tol = 1e-13);
// (prod |1/2 + shift +- it| / 16)^{1/2}: |g(z, t)| grows like scale^{Re z}
double vScale(const ShiftTuple& s, double t);

// Smooth weight on [Y, 2Y] with ramps of width Y/P at both ends.
struct WeightWindow {
  double Y = 1e4;
  double P = 4.0;
  i64 m = 1;

  double R(double T) const;
  double operator()(double x) const;
  void validate() const;
};

// sum_{n0 <= n <= n1} tau_{iT}(n) tau_{iT}(n+m) w(n), n + m >= 1; T = 0 uses
// integer divisor counts.
double shiftedDivisorSum(double T, i64 m, i64 n0, i64 n1, const std::function<double(double)>& w);
double shiftedDivisorBrute(double T, const WeightWindow& w);
// The four main-term pieces, in the order (first pair +, -, second pair +, -).
std::array<cplx, 4> shiftedDivisorMTTerms(double T, const WeightWindow& w, double relTol = 1e-12);
double shiftedDivisorMT(double T, const WeightWindow& w, double relTol = 1e-12);

struct DivisorSumReport {
  double T = 0.0;
  i64 m = 0;
  double Y = 0.0;
  double P = 0.0;
  double R = 0.0;
  double brute = 0.0;
  double mainTerm = 0.0;
  double deviation = 0.0;     // brute - mainTerm
  double relDeviation = 0.0;  // |deviation| / |mainTerm|
  double errorShape = 0.0;    // |m|^{7/64} T^{1/3} Y^{1/2} R^2 + T^{1/6} Y^{3/4} R^{1/2}
  double normalized = 0.0;    // |deviation| / errorShape
};
DivisorSumReport divisorReport(double T, i64 m, double Y, double P);
std::vector<DivisorSumReport> divisorScalingStudy(double T, i64 m, const std::vector<double>& Ys, double P);

struct MomentReport {
  double T = 0.0;
  cplx v;
  cplx numeric;
  cplx mainTerm;
  cplx deviation;             // numeric - mainTerm
  double relDeviation = 0.0;  // |deviation| / |mainTerm|
  double normalized = 0.0;    // |deviation| / T^{-1/33}
};
MomentReport momentReport(cplx v, double T, double relTol = 1e-8);

}  // namespace qlab::moments
