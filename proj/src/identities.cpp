#include "qlab/identities.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <sstream>
#include <stdexcept>

#include "qlab/arith.hpp"
#include "qlab/eisen.hpp"
#include "qlab/moments.hpp"
#include "qlab/psi.hpp"
#include "qlab/quad.hpp"
#include "qlab/specfun.hpp"

namespace qlab::identities {

namespace {

double relErr(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// |a/b - 1| for log-scaled values of any size
double logRelErr(const LogScaledValue& a, const LogScaledValue& b) { return std::abs((a / b).toComplex() - 1.0); }

double lambdaFE() {
  double worst = 0.0;
  for (double sigma : {0.1, 0.3, 0.5, 0.7, 0.9})
    for (double t : {0.5, 2.0, 5.0, 9.5, 14.1, 21.0, 30.0, 42.0, 55.0, 70.0}) {
      const cplx s(sigma, t);
      worst = std::max(worst, logRelErr(completedZetaLog(s), completedZetaLog(1.0 - s)));
    }
  return worst;
}

// Lambda(1+2iT) taken from the reflected side pi^{iT} Gamma(-iT) zeta(-2iT)
double thetaLambda() {
  double worst = 0.0;
  for (double T : {5.0, 25.0, 100.0}) {
    const cplx w(0.0, -2.0 * T);
    const auto reflected =
        LogScaledValue::fromLog(-0.5 * w * std::log(kPi) + logGammaC(0.5 * w)) * LogScaledValue::fromComplex(zetaC(w));
    worst = std::max(worst, logRelErr(thetaFunc(cplx(0.5, T)), reflected));
  }
  return worst;
}

double phiUnimodular() {
  double worst = 0.0;
  for (double T : {0.5, 5.0, 25.0, 100.0, 200.0}) worst = std::max(worst, std::abs(std::abs(scatteringPhi(T)) - 1.0));
  return worst;
}

// closed form against int_0^inf V(2 pi y)^2 y^s dy/y and against the
// Mellin-convolution contour on Re v = 0, all scaled by e^{pi T}
double gammaV2() {
  double worst = 0.0;
  for (auto [T, s] : {std::pair<double, cplx>{5.0, 0.5}, {10.0, cplx(1.0, 2.0)}}) {
    const cplx closed = gammaVTsq(s, T).scaled(-kPi * T);
    auto direct = [T = T, s = s](double u) {
      const double x = std::exp(u);
      const double k = besselKScaled(T, x);
      return x * k * k * std::pow(cplx(x / (2.0 * kPi), 0.0), s);
    };
    const cplx num = quad::integrateAdaptive(direct, -40.0, std::log(besselNegligibleBeyond(T) + 20.0), 1e-12, T);
    quad::ContourSpec spec;
    spec.sigma = 0.0;
    spec.heightCutoff = T + 80.0;
    spec.tol = 1e-12;
    spec.freqHint = 2.0 * std::log(T + 2.0);
    const cplx contour = quad::verticalLine(
        [T = T, s = s](cplx v) { return (gammaVT(s + v, T) * gammaVT(-v, T)).scaled(-kPi * T); }, spec);
    worst = std::max({worst, relErr(num, closed), relErr(contour, closed)});
  }
  return worst;
}

double wIntegral() {
  double worst = 0.0;
  for (auto [T, v] : {std::pair<double, cplx>{5.0, 0.0}, {10.0, cplx(0.0, 0.1)}, {20.0, cplx(0.0, 0.3)}}) {
    const auto s = moments::ShiftTuple::eisenstein(v, T);
    worst = std::max(worst, relErr(moments::wIntegralNumeric(s, T), moments::wIntegralClosedForm(s, T)));
  }
  return worst;
}

double hFormula() {
  const auto psi = standardBump(2.0);
  double worst = 0.0;
  for (cplx z : {cplx(0.2, 1.1), cplx(-0.4, 2.3)}) {
    const auto h = eisen::hFunctionBothWays(z, psi);
    worst = std::max(worst, std::abs(h.lhs - h.rhs));
  }
  return worst;
}

double unfolding() {
  const auto psi = standardBump(2.0);
  const double c = eisen::unfoldInnerProduct(8.0, psi, eisen::UnfoldMode::contour);
  const double d = eisen::unfoldInnerProduct(8.0, psi, eisen::UnfoldMode::direct2D);
  return std::abs(c - d) / std::abs(c);
}

cplx estermann(cplx s, cplx xi, arith::i64 a, arith::i64 l) { return arith::estermannD(s, xi, a, l); }

double estermannFE() {
  const cplx s(-0.5, 1.0), xi(0.0, 0.4);
  return relErr(arith::estermannReflected(s, xi, 2, 5, estermann), estermann(s, xi, 2, 5));
}

double estermannModulusOne() {
  double worst = 0.0;
  const cplx xi(0.0, 0.4);
  for (cplx s : {cplx(2.5, 0.0), cplx(-0.5, 1.0), cplx(0.3, 7.0)})
    worst = std::max(worst, relErr(estermann(s, xi, 0, 1), zetaC(s) * zetaC(s - xi)));
  return worst;
}

// residue at s = 1 by the trapezoid rule on a small circle
double estermannResidue() {
  const cplx xi(0.3, 0.0);
  const int K = 64;
  const double r = 0.1;
  cplx acc = 0.0;
  for (int k = 0; k < K; ++k) {
    const cplx e = std::polar(r, 2.0 * kPi * (k + 0.5) / K);
    acc += estermann(1.0 + e, xi, 2, 5) * e;
  }
  acc /= double(K);
  return std::abs(acc - arith::estermannResidues(xi, 5).atOne);
}

double divisorAFE() {
  double worst = 0.0;
  for (double T : {0.0, 5.0})
    for (arith::i64 m = 1; m <= 50; ++m) worst = std::max(worst, std::abs(arith::divisorAFE(m, T, 1e-10) - arith::tauIT(m, T)));
  return worst;
}

// uniform on [0, 1) from the raw 64-bit stream, identical on every platform
double unit(std::mt19937_64& rng) { return double(rng() >> 11) * 0x1.0p-53; }

// worst relative excess of |G|^2 over J sum |b|^2 on 1000 random windows,
// and the equality gap for a single frequency
double vanDerCorput() {
  std::mt19937_64 rng(20240611);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int J = 1 + int(unit(rng) * 64.0);
    std::vector<cplx> b(J);
    for (auto& c : b) c = cplx(2.0 * unit(rng) - 1.0, 2.0 * unit(rng) - 1.0);
    const auto first = arith::i64(unit(rng) * 200.0) - 100;
    const auto r = arith::vdcInequality(b, unit(rng), first);
    worst = std::max(worst, (r.lhs - r.rhs) / r.rhs);
  }
  for (double t : {0.0, 0.123, 0.5}) {
    const auto one = arith::vdcInequality({cplx(0.3, -1.2)}, t, 7);
    worst = std::max(worst, std::abs(one.lhs - one.rhs) / one.rhs);
  }
  return worst;
}

struct RowSpec {
  const char* name;
  const char* what;
  double tolerance;
  std::function<double()> run;
};

const std::vector<RowSpec>& rowSpecs() {
  static const std::vector<RowSpec> rows{
      {"lambda-fe", "Lambda(s) = Lambda(1-s), 50 points in the strip (rel)", 1e-10, lambdaFE},
      {"theta-lambda", "theta(1/2+iT) = Lambda(1+2iT), T in {5,25,100} (rel)", 1e-10, thetaLambda},
      {"phi-unimodular", "|phi(1/2+iT)| = 1 (abs)", 1e-12, phiUnimodular},
      {"gamma-v2", "gamma_{V^2} closed form vs quadrature and contour (rel)", 1e-6, gammaV2},
      {"w-integral", "int w dt vs Gamma closed form (rel)", 1e-8, wIntegral},
      {"h-formula", "H(z,psi) contour vs incomplete Eisenstein form (abs)", 1e-6, hFormula},
      {"unfolding", "<|E|^2, E(.,h)> contour vs fundamental domain, T = 8 (rel)", 1e-4, unfolding},
      {"estermann-fe", "Estermann functional equation at (-1/2+i, 0.4i, 2/5) (rel)", 1e-8, estermannFE},
      {"estermann-l1", "D(s, xi, 0/1) = zeta(s) zeta(s-xi) (rel)", 1e-10, estermannModulusOne},
      {"estermann-residue", "Res_{s=1} D vs l^{xi-1} zeta(1-xi) (abs)", 1e-8, estermannResidue},
      {"divisor-afe", "tau_{iT}(m) from Ramanujan sums, m <= 50, T in {0,5} (abs)", 1e-8, divisorAFE},
      {"vdc", "|G(t)|^2 <= J sum |b|^2 on random windows, equality at J = 1 (rel)", 1e-12, vanDerCorput},
  };
  return rows;
}

std::vector<std::string> splitNames(const std::string& filter) {
  std::vector<std::string> out;
  std::stringstream ss(filter);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t"), e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

}  // namespace

const std::vector<std::string>& identityNames() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& r : rowSpecs()) n.emplace_back(r.name);
    return n;
  }();
  return names;
}

std::vector<IdentityRow> runIdentitySuite(const std::string& filter) {
  const auto wanted = splitNames(filter);
  for (const auto& w : wanted)
    if (std::find(identityNames().begin(), identityNames().end(), w) == identityNames().end())
      throw std::invalid_argument("unknown identity row '" + w + "'");

  std::vector<IdentityRow> out;
  for (const auto& spec : rowSpecs()) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), spec.name) == wanted.end()) continue;
    IdentityRow row{spec.name, spec.what, 0.0, spec.tolerance, false, "", 0.0};
    const auto t0 = std::chrono::steady_clock::now();
    try {
      row.measured = spec.run();
      row.pass = std::isfinite(row.measured) && row.measured <= row.tolerance;
    } catch (const std::exception& e) {
      row.measured = std::nan("");
      row.error = e.what();
    }
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace qlab::identities
