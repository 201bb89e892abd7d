#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "qlab/errors.hpp"
#include "qlab/psi.hpp"
#include "qlab/specfun.hpp"

namespace qlab::eisen {

using i64 = std::int64_t;

struct EisensteinParams {
  double T = 10.0;
  double truncationMargin = -1.0;  // negative: 10 T^{1/3} + 20
  PrecisionPolicy pp = defaultPrecision();

  double margin() const;
  // Fourier truncation ceil((T + margin) / (2 pi y)), at least 1.
  int truncation(double y) const;
  void validate() const;
};

// mu = theta(1/2+iT)/|theta(1/2+iT)|
cplx unitTheta(double T);
// mu y^{1/2+iT} + conj(mu) y^{1/2-iT}
double constantTermStar(double y, double T);

// E*(z, 1/2+iT) from its Fourier expansion. Tables (tau_{iT}(n), scaled
// K-Bessel) are sized for Im z >= yMin and are read-only afterwards.
class EisensteinStar {
 public:
  EisensteinStar(const EisensteinParams& params, double yMin);

  double operator()(cplx z) const { return evaluateComplex(z).real(); }
  // Same sum with e(nx) over n and -n kept separate and the complex mu;
  // the imaginary part is roundoff.
  cplx evaluateComplex(cplx z) const;
  // Non-constant part only.
  double fourierPart(cplx z) const;

  const EisensteinParams& params() const { return params_; }
  double yMin() const { return yMin_; }

 private:
  double besselScaled(double x) const;
  EisensteinParams params_;
  double yMin_;
  cplx mu_;
  double logRhoHat_;  // log(e^{-pi T/2} rho*(1))
  std::vector<double> tau_;
  std::shared_ptr<BesselScaledTable> table_;
};

double eisensteinStar(cplx z, const EisensteinParams& params);

// Representatives (c, d) of Gamma_inf \ Gamma with c <= maxC and
// Im(gamma z) = y / |cz + d|^2 >= minHeight; (0, 1) stands for the identity.
struct CosetEnumeration {
  i64 maxC = 0;
  std::vector<std::pair<i64, i64>> pairs;
};
CosetEnumeration enumerateCosets(cplx z, double minHeight, i64 maxC);

struct EisensteinValue {
  cplx value;
  double truncationBound;  // estimate of the dropped non-constant terms
};

// Coset sum over c <= maxC; the constant terms of all c > maxC are added in
// closed form. Re s > 1.
EisensteinValue eisensteinE(cplx z, cplx s, int maxC);

// E(z, s) at fixed z for all s off the poles, |s| <= sAbsMax, from the
// lattice sum sum_{(m,n) != 0} y^s |mz+n|^{-2s} / (2 zeta(2s)): rows m <= M
// are summed directly with a binomial/Hurwitz tail, rows m > M contribute
// their constant terms only.
class EisensteinLattice {
 public:
  EisensteinLattice(cplx z, double sAbsMax);
  cplx operator()(cplx s) const;
  cplx z() const { return z_; }

 private:
  struct Row {
    double Y;     // m y
    double a;     // frac(m x)
    int K;        // direct terms on each side
    std::vector<double> logq;
  };
  cplx rowSum(const Row& r, cplx s) const;
  cplx z_;
  double sAbsMax_;
  int M_;
  std::vector<Row> rows_;
};

cplx eisensteinContinued(cplx z, cplx s);

// E(z, h) = sum over cosets of h(Im gamma z), for h vanishing below
// supportLow. maxC < 0 enumerates every contributing coset.
double incompleteEisenstein(cplx z, const std::function<double(double)>& h, double supportLow, i64 maxC = -1);

struct HValues {
  double lhs;  // (1/2 pi i) int_(eps) psi~(-s)(E(z,1+s) + E(z,1-s)) ds
  double rhs;  // -(3/pi) psi~(0) + 2 E(z, y psi(y))
  double height;
};
// Odd components of psi are projected out first.
HValues hFunctionBothWays(cplx z, const TestFunctionPsi& psi, double eps = 0.3, double tol = 1e-7);

// zeta(s)^2 zeta(s-2iT) zeta(s+2iT) / zeta(2s)
cplx zEisenstein(cplx s, double T);

enum class UnfoldMode { contour, direct2D };

struct UnfoldOptions {
  double eps = 0.2;
  double tol = 1e-11;
  double tol2D = 1e-7;  // absolute, direct2D only
};

// <|E(., 1/2+iT)|^2, E(., h)> with h(y) = y psi(y) and measure dx dy/y^2.
// Complex so the (vanishing) imaginary part of the contour form is visible.
cplx unfoldInnerProductDetailed(double T, const TestFunctionPsi& psi, UnfoldMode mode,
                                const UnfoldOptions& opts = {});
double unfoldInnerProduct(double T, const TestFunctionPsi& psi, UnfoldMode mode, const UnfoldOptions& opts = {});

// a(z) in E(z, 1+alpha) = (3/pi)/alpha + a(z) + O(alpha).
double laurentConstantE(cplx z);

}  // namespace qlab::eisen
