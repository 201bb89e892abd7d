#pragma once

#include <complex>

#include "qlab/eisen.hpp"
#include "qlab/psi.hpp"
#include "qlab/specfun.hpp"

namespace qlab::geodesic {

struct GeodesicOptions {
  double relTol = 1e-10;          // for I(T; psi)
  double truncationMargin = -1.0; // forwarded to EisensteinParams
  eisen::UnfoldOptions unfold;
};

struct GeodesicReport {
  double T = 0.0;
  double I = 0.0;
  double innerProduct = 0.0;
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double residual = 0.0;
  double ratioThm1 = 0.0;
};

// int_0^inf E*(iy, 1/2+iT)^2 psi(y) dy/y
double computeI(double T, const TestFunctionPsi& psi, const GeodesicOptions& opts = {});

// int_0^inf g(y) psi(y) dy/y over the support of psi
double integrateAgainst(const TestFunctionPsi& psi, const std::function<double(double)>& g, double tol = 1e-13);

double termA(const TestFunctionPsi& psi);
double termB(double T, const TestFunctionPsi& psi);
double termC(const TestFunctionPsi& psi);

GeodesicReport theorem2Residual(double T, const TestFunctionPsi& psi, const GeodesicOptions& opts = {});

// (pi / (3 log(1/4+T^2))) I / (2 int psi dy/y), from a precomputed I.
double theorem1RatioFromI(double T, const TestFunctionPsi& psi, double I);
double theorem1Ratio(double T, const TestFunctionPsi& psi, const GeodesicOptions& opts = {});

struct ShrinkingMainTerm {
  cplx phiPrime0;
  double logTerm;  // log(1/4 + T^2)
};
ShrinkingMainTerm shrinkingMainTerm(double T);

}  // namespace qlab::geodesic
