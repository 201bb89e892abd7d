#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "qlab/arith.hpp"
#include "qlab/eisen.hpp"
#include "qlab/quad.hpp"

using namespace qlab;
using namespace qlab::eisen;

namespace {

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// E(i, s) = 2 zeta(s) L(s, chi_{-4}) / zeta(2s), from sum' (m^2+n^2)^{-s} = 4 zeta(s) L(s, chi_{-4}).
cplx eisensteinAtI(cplx s) {
  const cplx L = std::exp(-s * std::log(4.0)) * (oracle::hurwitz(s, 0.25) - oracle::hurwitz(s, 0.75));
  return 2.0 * oracle::zeta(s) * L / oracle::zeta(2.0 * s);
}

cplx mobiusAct(cplx z, int a, int b, int c, int d) { return (double(a) * z + double(b)) / (double(c) * z + double(d)); }

// Sum of Res_{w=p} F(w) X^{w-s}/(w-s) over the listed poles, by the
// trapezoid rule on circles of radius r.
cplx perronPoleTerms(const std::function<cplx(cplx)>& F, cplx s, double X, const std::vector<cplx>& poles, double r) {
  cplx total = 0.0;
  const int n = 256;
  for (cplx p : poles) {
    cplx acc = 0.0;
    for (int k = 0; k < n; ++k) {
      const cplx e = std::polar(1.0, 2.0 * kPi * (k + 0.5) / n);
      const cplx w = p + r * e;
      acc += F(w) * std::exp((w - s) * std::log(X)) / (w - s) * r * e;
    }
    total += acc / double(n);
  }
  return total;
}

}  // namespace

TEST_CASE("unit theta factor and the constant term") {
  const double T = 10.0;
  const cplx mu = unitTheta(T);
  CHECK(std::abs(std::abs(mu) - 1.0) < 1e-12);
  CHECK(std::abs(constantTermStar(1.0, T) - 2.0 * mu.real()) < 1e-12);
  for (int k = 0; k < 10; ++k) {
    const double y = 0.2 + 0.37 * k;
    const double alt = 2.0 * std::sqrt(y) * std::cos(T * std::log(y) + std::arg(mu));
    CHECK(std::abs(constantTermStar(y, T) - alt) < 1e-12);
  }
  CHECK_THROWS_AS(constantTermStar(0.0, T), DomainError);
}

TEST_CASE("E* is real and automorphic") {
  EisensteinParams p;
  p.T = 30.0;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ux(-0.5, 0.5), uy(0.4, 3.0);
  for (int k = 0; k < 20; ++k) {
    const cplx z(ux(rng), uy(rng));
    const cplx v = EisensteinStar(p, z.imag()).evaluateComplex(z);
    CHECK(std::abs(v.imag()) <= 1e-9 * (1.0 + std::abs(v)));
  }
  const cplx z(0.23, 1.1);
  const double e0 = eisensteinStar(z, p);
  CHECK(std::abs(eisensteinStar(z + 1.0, p) - e0) <= 1e-8);
  CHECK(std::abs(eisensteinStar(-1.0 / z, p) - e0) <= 1e-8);
  CHECK_THROWS_AS(eisensteinStar(cplx(0.1, -1.0), p), DomainError);
}

TEST_CASE("E* automorphy, y -> 1/y symmetry and truncation robustness across T") {
  for (double T : {10.0, 30.0, 100.0}) {
    EisensteinParams p;
    p.T = T;
    const cplx z(0.23, 1.1);
    const double e0 = eisensteinStar(z, p);
    const double scale = std::max(1.0, std::abs(e0));
    CHECK(std::abs(eisensteinStar(-1.0 / z, p) - e0) <= 1e-8 * scale);
    CHECK(std::abs(eisensteinStar(mobiusAct(z, 2, 1, 1, 1), p) - e0) <= 1e-8 * scale);
    for (double y : {0.7, 1.3, 2.0}) {
      const double a = eisensteinStar(cplx(0, y), p), b = eisensteinStar(cplx(0, 1.0 / y), p);
      CHECK(std::abs(a - b) <= 1e-8 * std::max(1.0, std::abs(a)));
    }
    EisensteinParams p2 = p;
    p2.truncationMargin = 2.0 * p.margin();
    for (double y : {0.6, 1.0, 1.7}) {
      const double a = eisensteinStar(cplx(0.1, y), p), b = eisensteinStar(cplx(0.1, y), p2);
      CHECK(std::abs(a - b) <= 1e-10 * std::max(1.0, std::abs(a)));
    }
  }
}

TEST_CASE("E* far up the cusp is its constant term") {
  EisensteinParams p;
  p.T = 20.0;
  const double y = 3.0 * p.T;
  CHECK(std::abs(eisensteinStar(cplx(0.3, y), p) - constantTermStar(y, p.T)) <= 1e-15);
}

TEST_CASE("E* Fourier expansion against the continued lattice sum") {
  // E* = mu E(z, 1/2 + iT), two unrelated evaluation routes
  for (double T : {10.0, 25.0}) {
    EisensteinParams p;
    p.T = T;
    for (cplx z : {cplx(0.23, 1.1), cplx(-0.41, 0.8), cplx(0.05, 2.5)}) {
      const cplx lat = unitTheta(T) * eisensteinContinued(z, cplx(0.5, T));
      CHECK(std::abs(lat.imag()) < 1e-9);
      CHECK(std::abs(eisensteinStar(z, p) - lat.real()) < 1e-9);
    }
  }
}

TEST_CASE("coset sum of E(z, s)") {
  const cplx i(0.0, 1.0);
  const auto a = eisensteinE(i, 2.0, 10), b = eisensteinE(i, 2.0, 100);
  CHECK(std::abs(a.value - b.value) < 1e-8);
  CHECK(a.truncationBound < 1e-8);
  CHECK(rel(a.value, eisensteinAtI(2.0)) < 1e-12);
  CHECK(rel(eisensteinE(i, cplx(1.5, 3.0), 20).value, eisensteinAtI(cplx(1.5, 3.0))) < 1e-12);

  const cplx z(0.23, 1.1);
  for (cplx s : {cplx(2.0, 0.0), cplx(1.3, 7.0)}) {
    const cplx e0 = eisensteinE(z, s, 12).value;
    CHECK(std::abs(eisensteinE(z + 1.0, s, 12).value - e0) < 1e-13 * std::abs(e0));
  }
  // residue 3/pi at s = 1
  CHECK(std::abs(1e-3 * eisensteinE(i, 1.0 + 1e-3, 10).value.real() - 3.0 / kPi) < 2e-3);
  CHECK_THROWS_AS(eisensteinE(i, 1.0, 10), DomainError);
  CHECK_THROWS_AS(eisensteinE(i, cplx(0.8, 4.0), 10), DomainError);
}

TEST_CASE("continued E(z, s) from the lattice sum") {
  const cplx i(0.0, 1.0);
  for (cplx s : {cplx(2.0, 0.0), cplx(1.3, 5.0), cplx(0.7, -40.0), cplx(0.25, 3.0), cplx(0.5, 14.0), cplx(1.1, 60.0)}) {
    CHECK(rel(eisensteinContinued(i, s), eisensteinAtI(s)) < 1e-11);
  }
  // Re s < 0: the direct row sums grow like |a+d|^{-2 Re s} and cancel
  CHECK(rel(eisensteinContinued(i, cplx(-0.6, 2.0)), eisensteinAtI(cplx(-0.6, 2.0))) < 1e-9);
  // functional equation E(z, s) = phi(s) E(z, 1-s) and automorphy
  const cplx z(0.23, 1.1);
  for (cplx s : {cplx(0.7, 20.0), cplx(0.3, 3.0), cplx(1.4, -9.0)}) {
    const cplx phi = (thetaFunc(1.0 - s) / thetaFunc(s)).toComplex();
    const cplx e = eisensteinContinued(z, s);
    CHECK(rel(e, phi * eisensteinContinued(z, 1.0 - s)) < 1e-11);
    CHECK(rel(eisensteinContinued(-1.0 / z, s), e) < 1e-11);
    CHECK(rel(eisensteinContinued(mobiusAct(z, 1, 0, 3, 1), s), e) < 1e-11);
  }
  // agrees with the coset sum where both apply
  CHECK(rel(eisensteinContinued(z, cplx(2.0, 100.0)), eisensteinE(z, cplx(2.0, 100.0), 5).value) < 1e-11);
  CHECK_THROWS_AS(eisensteinContinued(z, 1.0), PoleError);
}

TEST_CASE("coset enumeration") {
  const cplx z(0.3, 0.4);
  const auto cos = enumerateCosets(z, 0.05, 1000);
  std::size_t count = 0;
  for (const auto& [c, d] : cos.pairs) {
    CHECK(arith::gcd(c, d) == 1);
    CHECK(c >= 0);
    CHECK(z.imag() / std::norm(double(c) * z + double(d)) >= 0.05);
    if (c == 0) CHECK(d == 1);
    ++count;
  }
  // brute force over a box that certainly contains every contributing pair
  std::size_t brute = 0;
  for (i64 c = 0; c <= 20; ++c)
    for (i64 d = -40; d <= 40; ++d) {
      if (arith::gcd(c, d) != 1 || (c == 0 && d != 1)) continue;
      if (z.imag() / std::norm(double(c) * z + double(d)) >= 0.05) ++brute;
    }
  CHECK(count == brute);
}

TEST_CASE("incomplete Eisenstein series") {
  const cplx z(0.3, 1.4);
  // support above every coset height
  CHECK(incompleteEisenstein(z, [](double y) { return (y > 3.0 && y < 5.0) ? 1.0 : 0.0; }, 3.0) == 0.0);

  // Mellin inversion against E(z, s) on Re s = 2, h(y) = y psi(y)
  const auto psi = standardBump(2.0);
  auto h = [&](double y) { return y * psi(y); };
  const double direct = incompleteEisenstein(z, h, 0.5);
  const EisensteinLattice lat(z, 530.0);
  const double viaContour =
      quad::integrateAdaptiveReal(
          [&](double t) {
            const cplx s(2.0, t);
            return (psi.mellin(1.0 - s) * lat(s)).real();
          },
          0.0, 520.0, 1e-9, 3.0) /
      kPi;
  CHECK(std::abs(direct - viaContour) < 1e-6);

  // <E(., h), 1> over the fundamental domain = int h(y) dy / y^2 = int psi dy/y
  const double unfolded = quad::fundamentalDomain2D([&](cplx w) { return incompleteEisenstein(w, h, 0.5); }, 2.0, 1e-10);
  CHECK(std::abs(unfolded - psi.mellin(0.0).real()) < 1e-8);
}

TEST_CASE("H(z, psi) computed both ways") {
  const auto psi = standardBump(2.0);
  const auto hv = hFunctionBothWays(cplx(0.2, 1.1), psi);
  CHECK(std::abs(hv.lhs - hv.rhs) <= 1e-6);

  // odd test functions are projected away
  const auto odd = hFunctionBothWays(cplx(0.2, 1.1), oddBump(2.0));
  CHECK(std::abs(odd.lhs) <= 1e-6);
  CHECK(std::abs(odd.rhs) <= 1e-12);

  // high in the cusp E(z, y psi) vanishes
  const auto hi = hFunctionBothWays(cplx(0.1, 5.0), psi);
  CHECK(std::abs(hi.rhs + 3.0 / kPi * psi.mellin(0.0).real()) < 1e-13);
  CHECK(std::abs(hi.lhs - hi.rhs) <= 1e-6);
}

TEST_CASE("Rankin-Selberg zeta of the Eisenstein series") {
  // T = 0: zeta^4(s)/zeta(2s) vs sum d(n)^2 n^{-s}
  {
    const cplx s = 3.0;
    const int N = 10000;
    const auto d = arith::FactorTable(N).divisorCountTable();
    cplx S = 0.0;
    for (int n = 1; n <= N; ++n) S += double(d[n]) * double(d[n]) * std::exp(-s * std::log(double(n)));
    const auto Z = [](cplx w) { return zEisenstein(w, 0.0); };
    const cplx corrected = S - perronPoleTerms(Z, s, N + 0.5, {cplx(1.0, 0.0)}, 0.25);
    const cplx z4 = std::pow(zetaC(s), 4.0) / zetaC(2.0 * s);
    CHECK(rel(zEisenstein(s, 0.0), z4) < 1e-14);
    CHECK(std::abs(corrected - zEisenstein(s, 0.0)) < 1e-6);
  }
  // T = 1 at s = 2
  {
    const double T = 1.0;
    const cplx s = 2.0;
    const int N = 1000000;
    const auto tau = arith::FactorTable(N).tauITTable(T);
    double S = 0.0;
    for (int n = 1; n <= N; ++n) S += tau[n] * tau[n] / (double(n) * double(n));
    const auto Z = [T](cplx w) { return zEisenstein(w, T); };
    const cplx poles = perronPoleTerms(Z, s, N + 0.5, {cplx(1.0, 0.0), cplx(1.0, 2.0 * T), cplx(1.0, -2.0 * T)}, 0.25);
    CHECK(std::abs(S - poles - zEisenstein(s, T)) < 1e-6);
  }
  const cplx s(1.7, 3.2);
  CHECK(std::abs(zEisenstein(std::conj(s), 4.0) - std::conj(zEisenstein(s, 4.0))) < 1e-13);
  CHECK_THROWS_AS(zEisenstein(cplx(1.0, 8.0), 4.0), PoleError);
}

TEST_CASE("inner product of |E|^2 with an incomplete Eisenstein series") {
  const auto psi = standardBump(2.0);
  const cplx c = unfoldInnerProductDetailed(8.0, psi, UnfoldMode::contour);
  CHECK(std::abs(c.imag()) <= 1e-9 * std::abs(c.real()));
  const double d = unfoldInnerProduct(8.0, psi, UnfoldMode::direct2D);
  CHECK(std::abs(d - c.real()) <= 1e-4 * std::abs(c.real()));

  for (double T : {8.0, 40.0}) {
    UnfoldOptions a, b;
    a.eps = 0.1;
    b.eps = 0.3;
    const double va = unfoldInnerProduct(T, psi, UnfoldMode::contour, a);
    const double vb = unfoldInnerProduct(T, psi, UnfoldMode::contour, b);
    CHECK(std::abs(va - vb) <= 1e-8 * std::abs(va));
  }

  const TestFunctionPsi zero(2.0, true, [](double) { return 0.0; }, [](double, int) { return 0.0; });
  CHECK(unfoldInnerProduct(8.0, zero, UnfoldMode::contour) == 0.0);
  CHECK(unfoldInnerProduct(8.0, zero, UnfoldMode::direct2D) == 0.0);
  CHECK_THROWS_AS(unfoldInnerProduct(30.0, psi, UnfoldMode::direct2D), GateError);
}

TEST_CASE("Laurent constant of E(z, s) at s = 1") {
  const cplx z(0.23, 1.1);
  const double a = laurentConstantE(z);
  CHECK(std::abs(laurentConstantE(z + 1.0) - a) < 1e-6);
  CHECK(std::abs(laurentConstantE(-1.0 / z) - a) < 1e-6);

  // Kronecker limit formula for sum' y^s |mz+n|^{-2s}, divided by 2 zeta(2s):
  // a(z) = (6/pi)(gamma - log 2 - log f(z)) - (36/pi^3) zeta'(2)
  const double zetaPrime2 = -0.93754825431584375370;
  std::vector<double> shifted;
  for (cplx w : {cplx(0.0, 1.0), cplx(0.23, 1.1), cplx(-0.4, 2.3), cplx(0.1, 0.9), cplx(0.5, 3.0)}) {
    const double aw = laurentConstantE(w);
    const double closed =
        6.0 / kPi * (kEulerGamma - std::log(2.0) - logF(w)) - 36.0 / (kPi * kPi * kPi) * zetaPrime2;
    CHECK(std::abs(aw - closed) < 1e-8);
    shifted.push_back(aw + 6.0 / kPi * logF(w));
  }
  for (double v : shifted) CHECK(std::abs(v - shifted[0]) < 1e-5);
}
