#include "qlab/geodesic.hpp"

#include <cmath>

#include "qlab/errors.hpp"
#include "qlab/quad.hpp"

namespace qlab::geodesic {

namespace {

void checkT(double T) {
  if (!(T > 0.0) || !std::isfinite(T)) throw DomainError("spectral parameter T must be positive");
}

// rough size of I used to turn the relative tolerance into an absolute one
double scaleOf(double T, const TestFunctionPsi& psi) {
  const double absMass = quad::integrateAdaptiveReal(
      [&](double u) { return std::abs(psi.atLog(u)); }, -psi.logSupport(), psi.logSupport(), 1e-10);
  return (6.0 / kPi) * std::log(0.25 + T * T) * absMass + 4.0 * absMass;
}

}  // namespace

double integrateAgainst(const TestFunctionPsi& psi, const std::function<double(double)>& g, double tol) {
  const double L = psi.logSupport();
  return quad::integrateAdaptiveReal([&](double u) { return g(std::exp(u)) * psi.atLog(u); }, -L, L, tol);
}

double computeI(double T, const TestFunctionPsi& psi, const GeodesicOptions& opts) {
  checkT(T);
  if (T > 200.0) throw GateError("geodesic integral is gated to T <= 200");
  eisen::EisensteinParams params;
  params.T = T;
  params.truncationMargin = opts.truncationMargin;
  params.validate();
  const double L = psi.logSupport();
  const eisen::EisensteinStar es(params, std::exp(-L) * (1.0 - 1e-12));
  auto f = [&](double u) {
    const double p = psi.atLog(u);
    if (p == 0.0) return 0.0;
    const double e = es(cplx(0.0, std::exp(u)));
    return e * e * p;
  };
  const double tol = opts.relTol * scaleOf(T, psi);
  return quad::integrateAdaptiveReal(f, -L, L, tol, 2.0 * T);
}

double termA(const TestFunctionPsi& psi) {
  return -2.0 * integrateAgainst(psi, [](double y) { return y + 1.0 / y; });
}

double termB(double T, const TestFunctionPsi& psi) {
  checkT(T);
  const cplx mu = eisen::unitTheta(T);
  const double m2 = 2.0 * (mu * mu).real();
  return 2.0 * integrateAgainst(psi, [&](double y) { return y + 1.0 / y + m2; });
}

// 2 sum sigma_{-1}(n) e^{-2 pi n y} = -pi y/6 + (1/2) log y - log f(iy), so the
// log f coefficient is 1/Lambda(2) = 6/pi.
double termC(const TestFunctionPsi& psi) {
  return -4.0 * integrateAgainst(psi, [](double y) { return y + 1.0 / y + (6.0 / kPi) * logF(cplx(0.0, y)); });
}

GeodesicReport theorem2Residual(double T, const TestFunctionPsi& psi0, const GeodesicOptions& opts) {
  checkT(T);
  const TestFunctionPsi psi = psi0.isEven() ? psi0 : psi0.evenPart();
  GeodesicReport r;
  r.T = T;
  r.I = computeI(T, psi, opts);
  r.innerProduct = eisen::unfoldInnerProduct(T, psi, eisen::UnfoldMode::contour, opts.unfold);
  r.a = termA(psi);
  r.b = termB(T, psi);
  r.c = termC(psi);
  r.residual = r.I - (2.0 * r.innerProduct + r.a + r.b + r.c);
  r.ratioThm1 = theorem1RatioFromI(T, psi, r.I);
  return r;
}

double theorem1RatioFromI(double T, const TestFunctionPsi& psi, double I) {
  checkT(T);
  const double mass = integrateAgainst(psi, [](double) { return 1.0; });
  if (!(mass > 0.0)) throw DomainError("test function must have positive mass");
  return (kPi / (3.0 * std::log(0.25 + T * T))) * I / (2.0 * mass);
}

double theorem1Ratio(double T, const TestFunctionPsi& psi, const GeodesicOptions& opts) {
  return theorem1RatioFromI(T, psi, computeI(T, psi, opts));
}

ShrinkingMainTerm shrinkingMainTerm(double T) {
  checkT(T);
  cplx sum = 0.0;
  for (double sg : {1.0, -1.0}) {
    const cplx w(1.0, 2.0 * sg * T);
    sum += digammaC(cplx(0.5, sg * T)) + 2.0 * zetaDerivC(w) / zetaC(w) - std::log(kPi);
  }
  return {-sum, std::log(0.25 + T * T)};
}

}  // namespace qlab::geodesic
