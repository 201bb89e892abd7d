#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "qlab/errors.hpp"
#include "qlab/specfun.hpp"

namespace qlab::arith {

using i64 = std::int64_t;

// Smallest-prime-factor sieve on [2, limit].
class FactorTable {
 public:
  explicit FactorTable(i64 limit);

  i64 limit() const { return limit_; }
  i64 smallestPrimeFactor(i64 n) const;
  std::vector<std::pair<i64, int>> factorize(i64 n) const;
  int mobius(i64 n) const;

  // tau_{iT}(n) for 0 <= n <= limit (entry 0 is 0), by multiplicativity.
  std::vector<double> tauITTable(double T) const;
  // d(n) for 0 <= n <= limit, integer arithmetic only.
  std::vector<std::int32_t> divisorCountTable() const;

 private:
  i64 limit_;
  std::vector<std::uint32_t> spf_;
};

std::vector<std::pair<i64, int>> factorize(i64 n);
std::vector<i64> divisors(i64 n);  // ascending
int mobius(i64 n);
i64 gcd(i64 a, i64 b);
// inverse of a modulo l, gcd(a, l) = 1
i64 modInverse(i64 a, i64 l);

// sum_{ab = n} (a/b)^{iT}
double tauIT(i64 n, double T);
// sum_{d | m} d^x
cplx sigmaX(i64 m, cplx x);
// sum_{ab = n} a^{-alpha} b^{-beta}
cplx sigmaAlphaBeta(i64 n, cplx alpha, cplx beta);

// S(m, 0; l) = sum_{d | (m, l)} d mu(l/d)
i64 ramanujanSum(i64 m, i64 l);
// S(m, n; c) = sum_{d mod c, (d,c)=1} e((m d + n dbar)/c)
double kloosterman(i64 m, i64 n, i64 c);

// D(s, xi, a/l) = sum_n sigma_xi(n) e(an/l) n^{-s}, continued through Hurwitz zeta:
// l^{xi-2s} sum_{b,c=1..l} e(abc/l) zeta_H(s-xi, b/l) zeta_H(s, c/l).
cplx estermannD(cplx s, cplx xi, i64 a, i64 l, const PrecisionPolicy& pp = defaultPrecision());

struct EstermannResidues {
  cplx atOne;        // l^{xi-1} zeta(1-xi)
  cplx atOnePlusXi;  // l^{-xi-1} zeta(1+xi)
};
EstermannResidues estermannResidues(cplx xi, i64 l);

// Right-hand side of the functional equation relating D(s, xi, a/l) to
// D(1-s, -xi, +-abar/l); D is supplied so the two sides can use different
// evaluators.
using EstermannEvaluator = std::function<cplx(cplx s, cplx xi, i64 a, i64 l)>;
cplx estermannReflected(cplx s, cplx xi, i64 a, i64 l, const EstermannEvaluator& D);

// f_lambda(x) = (1/2 pi i) int_{(3)} x^{-w} zeta(1 - lambda + w) e^{w^2} dw / w,
// tabulated in u = log x on [uMin, uMax] from a fixed rule on the line.
class DivisorAFEKernel {
 public:
  DivisorAFEKernel(cplx lambda, double uMin, double uMax);
  cplx operator()(double x) const;
  // Same integral by adaptive vertical-line quadrature.
  static cplx direct(cplx lambda, double x, double tol = 1e-13);
  // Upper bound for |f_lambda(x)|, x > 1, Re lambda = 0.
  static double bound(double x);

 private:
  struct Panel {
    std::vector<cplx> c;
  };
  double uMin_, width_;
  std::vector<Panel> panels_;
};

struct DivisorAFEResult {
  double value;        // real part of the reconstruction
  double imagPart;     // should vanish
  i64 terms;           // l-truncation
  double tailBound;
};

// tau_{iT}(m) from the two Ramanujan-sum series weighted by f_{+-2iT}(l / sqrt m).
DivisorAFEResult divisorAFEDetailed(i64 m, double T, double tol);
cplx divisorAFE(i64 m, double T, double tol);

struct VdcResult {
  double lhs;  // |G(t)|^2
  double rhs;  // J sum |b_m|^2
};
// G(x) = sum_{j} b_j e((first + j) x) over a window of J = coeffs.size() integers.
VdcResult vdcInequality(const std::vector<cplx>& coeffs, double t, i64 first = 0);

}  // namespace qlab::arith
