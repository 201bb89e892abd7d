#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "qlab/errors.hpp"
#include "qlab/specfun.hpp"

namespace qlab {

class TestFunctionPsi;

namespace quad {

using RealFn = std::function<double(double)>;
using CplxFn = std::function<cplx(double)>;

struct Result {
  cplx value;
  double errorEstimate;
};

// Gauss-Kronrod (7,15) bisection. freqHint is an angular frequency used to
// pre-split [a,b] so every oscillation is covered by at least six nodes.
Result integrateAdaptiveEx(const CplxFn& f, double a, double b, double tol, double freqHint = 0.0,
                           int maxDepth = 40);
cplx integrateAdaptive(const CplxFn& f, double a, double b, double tol, double freqHint = 0.0);
double integrateAdaptiveReal(const RealFn& f, double a, double b, double tol, double freqHint = 0.0);

// Geometric panels [2^k a, 2^{k+1} a] until envelope(x) * panel length < tol.
cplx integrateToInfinity(const CplxFn& f, double a, double tol, const RealFn& envelope,
                         double freqHint = 0.0);

// Fixed composite Gauss-Legendre: n panels of order m on [a,b].
cplx gaussLegendre(const CplxFn& f, double a, double b, int panels, int order = 16);
const std::vector<std::pair<double, double>>& gaussLegendreRule(int order);

// Tanh-sinh rule on [a,b] with step h = 2^{-level}.
double tanhSinh(const RealFn& f, double a, double b, int level = 3);

struct ContourSpec {
  double sigma = 1.0;
  double heightCutoff = 50.0;
  double tol = 1e-10;
  double freqHint = 0.0;  // oscillation rate in t of F(sigma + it)
  // Bound for |F(sigma + it)|; when set, sampled values are checked against it.
  RealFn envelope;

  // Smallest cutoff H with int_H^inf envelope(t) dt below tol (both tails).
  static ContourSpec fromEnvelope(double sigma, RealFn envelope, double tol, double freqHint = 0.0);
};

// (1/2 pi i) int_{sigma - iH}^{sigma + iH} F(s) ds
cplx verticalLine(const std::function<cplx(cplx)>& F, const ContourSpec& spec);

// psi~(s) = int_0^inf psi(y) y^s dy/y
cplx mellin(const TestFunctionPsi& psi, cplx s);

// int int over {|x| <= 1/2, |z| >= 1, y <= yMax} of F dx dy / y^2, plus tail.
double fundamentalDomain2D(const std::function<double(cplx)>& F, double yMax, double tol,
                           double tailBeyond = 0.0, double freqHintX = 0.0, double freqHintY = 0.0);

}  // namespace quad
}  // namespace qlab
