#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "qlab/arith.hpp"

using namespace qlab;
using namespace qlab::arith;

namespace {

double relErr(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

double ramanujanBrute(i64 m, i64 l) {
  double s = 0.0;
  for (i64 a = 1; a <= l; ++a)
    if (gcd(a, l) == 1) s += std::cos(2 * kPi * double(((a * m) % l + l) % l) / double(l));
  return s;
}

double kloostermanBrute(i64 m, i64 n, i64 c) {
  double s = 0.0;
  for (i64 d = 0; d < c; ++d) {
    if (gcd(d, c) != 1) continue;
    i64 db = 0;
    while ((d * db) % c != 1 % c) ++db;
    s += std::cos(2 * kPi * double(((m * d + n * db) % c + c) % c) / double(c));
  }
  return s;
}

// f_lambda(x) = sum_n n^{lambda-1} erfc(log(nx)/2)/2, from shifting the
// w-integral term by term.
cplx afeKernelErfc(cplx lambda, double x) {
  cplx s = 0.0;
  for (int n = 1;; ++n) {
    const double u = std::log(n * x);
    const double e = 0.5 * std::erfc(0.5 * u);
    s += std::exp((lambda - 1.0) * std::log(double(n))) * e;
    if (e < 1e-22) break;
  }
  return s;
}

}  // namespace

TEST_CASE("factor table") {
  const FactorTable ft(10000);
  for (i64 n = 2; n <= 10000; ++n) {
    const i64 p = ft.smallestPrimeFactor(n);
    REQUIRE(n % p == 0);
    for (i64 q = 2; q < p; ++q) REQUIRE(n % q != 0);
  }
  CHECK(ft.mobius(30) == -1);
  CHECK(ft.mobius(12) == 0);
  const auto d = ft.divisorCountTable();
  CHECK(d[1] == 1);
  CHECK(d[360] == 24);
  const auto t = ft.tauITTable(2.5);
  for (i64 n : {1, 2, 12, 97, 360, 1024, 9999}) CHECK(std::abs(t[n] - tauIT(n, 2.5)) < 1e-12);
}

TEST_CASE("tau_{iT}") {
  CHECK(std::abs(tauIT(1, 7.0) - 1.0) < 1e-15);
  CHECK(std::abs(tauIT(13, 7.0) - 2 * std::cos(7.0 * std::log(13.0))) < 1e-14);
  CHECK(std::abs(tauIT(6, 0.0) - 4.0) < 1e-14);
  for (i64 n : {12, 30, 64, 210}) CHECK(std::abs(tauIT(n, 3.3) - oracle::tauBrute(n, 3.3)) < 1e-12);
  CHECK(std::abs(oracle::tauBrute(210, 3.3).imag()) < 1e-12);

  std::mt19937_64 rng(7);
  std::uniform_int_distribution<i64> dist(1, 5000);
  int checked = 0;
  while (checked < 50) {
    const i64 m = dist(rng), n = dist(rng);
    if (gcd(m, n) != 1) continue;
    CHECK(std::abs(tauIT(m * n, 4.2) - tauIT(m, 4.2) * tauIT(n, 4.2)) < 1e-12);
    ++checked;
  }
}

TEST_CASE("divisor power sums") {
  CHECK(std::abs(sigmaX(6, -1.0) - 2.0) < 1e-15);
  CHECK(std::abs(sigmaX(1, cplx(0.3, 9)) - 1.0) < 1e-15);
  const cplx x(-1, 4);
  cplx brute = 0.0;
  for (i64 d = 1; d <= 12; ++d)
    if (12 % d == 0) brute += std::pow(cplx(double(d)), x);
  CHECK(relErr(sigmaX(12, x), brute) < 1e-13);

  CHECK(std::abs(sigmaAlphaBeta(1, cplx(0.2, 1), cplx(-0.1, 3)) - 1.0) < 1e-15);
  const double v = 0.1, T = 3;
  CHECK(std::abs(sigmaAlphaBeta(10, cplx(v, T), cplx(v, -T)) - std::pow(10.0, -v) * tauIT(10, T)) < 1e-12);
  const cplx a(0.21, 1.7), b(-0.13, -0.4);
  cplx e = 0.0;
  for (i64 d = 1; d <= 12; ++d)
    if (12 % d == 0) e += std::pow(cplx(double(d)), -a) * std::pow(cplx(double(12 / d)), -b);
  CHECK(relErr(sigmaAlphaBeta(12, a, b), e) < 1e-13);
}

TEST_CASE("Dirichlet series of sigma_{2iT} against zeta products") {
  // partial sums to N plus the two residue terms of the cut-off at N + 1/2
  const int N = 10000;
  for (double sgn : {1.0, -1.0}) {
    const double T = 3.0;
    const cplx xi(0, sgn * 2 * T), s(2.0, 1.0);
    cplx S = 0.0;
    for (i64 n = 1; n <= N; ++n) S += sigmaX(n, xi) * std::exp(-s * std::log(double(n)));
    const double X = N + 0.5;
    const cplx corr = zetaC(1.0 - xi) * std::exp((1.0 - s) * std::log(X)) / (1.0 - s) +
                      zetaC(1.0 + xi) * std::exp((1.0 + xi - s) * std::log(X)) / (1.0 + xi - s);
    CHECK(relErr(S - corr, zetaC(s) * zetaC(s - xi)) <= 1e-6);
  }
}

TEST_CASE("Ramanujan sums") {
  CHECK(ramanujanSum(17, 1) == 1);
  CHECK(ramanujanSum(1, 4) == 0);
  CHECK(ramanujanSum(6, 6) == 2);
  CHECK(ramanujanSum(0, 12) == 4);  // phi(12)
  for (i64 l = 1; l <= 200; ++l)
    for (i64 m = 1; m <= 50; ++m) REQUIRE(std::abs(double(ramanujanSum(m, l)) - ramanujanBrute(m, l)) < 1e-9);
}

TEST_CASE("Kloosterman sums") {
  CHECK(kloosterman(5, -3, 1) == 1.0);
  CHECK(std::abs(kloosterman(1, 1, 2) - 1.0) < 1e-14);
  CHECK(std::abs(kloosterman(1, 1, 3) + 1.0) < 1e-14);
  for (i64 c : {5, 12, 17, 30})
    for (i64 m : {-2, 1, 3}) CHECK(std::abs(kloosterman(m, 7, c) - kloostermanBrute(m, 7, c)) < 1e-12);
  // symmetry S(m,n;c) = S(n,m;c)
  CHECK(std::abs(kloosterman(2, 9, 31) - kloosterman(9, 2, 31)) < 1e-12);
  // Weil-size sanity at a prime modulus
  CHECK(std::abs(kloosterman(1, 1, 101)) <= 2 * std::sqrt(101.0));
}

TEST_CASE("Estermann function") {
  const cplx xi(0, 0.4);
  SUBCASE("modulus one splits into zeta values") {
    const cplx s(2.5, 0);
    CHECK(relErr(estermannD(s, xi, 0, 1), zetaC(s) * zetaC(s - xi)) < 1e-10);
  }
  SUBCASE("agrees with the absolutely convergent series") {
    const cplx s(3.0, 0.5);
    cplx direct = 0.0;
    for (i64 n = 1; n <= 20000; ++n) {
      const double ph = 2 * kPi * double((2 * n) % 5) / 5;
      direct += sigmaX(n, xi) * cplx(std::cos(ph), std::sin(ph)) * std::exp(-s * std::log(double(n)));
    }
    CHECK(relErr(estermannD(s, xi, 2, 5), direct) < 1e-7);
  }
  SUBCASE("residue at s = 1") {
    const cplx xr(0.3, 0);
    const int K = 64;
    const double r = 0.1;
    cplx acc = 0.0;
    for (int k = 0; k < K; ++k) {
      const cplx e = std::polar(r, 2 * kPi * (k + 0.5) / K);
      acc += estermannD(1.0 + e, xr, 2, 5) * e;  // ds = i e dphi
    }
    acc /= double(K);
    CHECK(std::abs(acc - estermannResidues(xr, 5).atOne) <= 1e-8);
  }
  SUBCASE("functional equation against the independent Hurwitz oracle") {
    const cplx s(-0.5, 1.0);
    const cplx lhs = estermannD(s, xi, 2, 5);
    const cplx rhs = estermannReflected(s, xi, 2, 5, oracle::estermann);
    CHECK(relErr(lhs, rhs) <= 1e-8);
    // the oracle itself matches the library on the left side
    CHECK(relErr(oracle::estermann(s, xi, 2, 5), lhs) <= 1e-10);
  }
  SUBCASE("double application returns the starting value") {
    const cplx s(1.7, 2.0);
    auto once = [](cplx s1, cplx x1, i64 a1, i64 l1) {
      return estermannReflected(s1, x1, a1, l1, [](cplx s2, cplx x2, i64 a2, i64 l2) {
        return estermannD(s2, x2, a2, l2);
      });
    };
    CHECK(relErr(estermannReflected(s, xi, 3, 7, once), estermannD(s, xi, 3, 7)) <= 1e-8);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(estermannD(1.0, xi, 2, 5), PoleError);
    CHECK_THROWS_AS(estermannD(1.0 + xi, xi, 2, 5), PoleError);
    CHECK_THROWS_AS(estermannD(2.0, xi, 5, 10), DomainError);
  }
}

TEST_CASE("divisor AFE kernel") {
  for (double T : {0.0, 5.0}) {
    const cplx lam(0, 2 * T);
    const DivisorAFEKernel f(lam, -3.0, 12.0);
    for (double x : {0.1, 0.7, 1.0, 3.0, 40.0, 2000.0}) {
      const cplx ref = afeKernelErfc(lam, x);
      // the line Re w = 3 carries magnitudes e^9 x^{-3}; cancellation grows below x = 1
      CHECK(std::abs(f(x) - ref) < 1e-12 * std::max(1.0, std::pow(x, -3.0)));
      if (x >= 1.0) CHECK(std::abs(DivisorAFEKernel::direct(lam, x) - ref) < 1e-11);
      if (x > 1.0) CHECK(std::abs(ref) <= DivisorAFEKernel::bound(x));
    }
  }
}

TEST_CASE("divisor approximate functional equation") {
  CHECK(std::abs(divisorAFE(1, 3.0, 1e-10) - 1.0) < 1e-10);
  CHECK(std::abs(divisorAFE(36, 5.0, 1e-10) - oracle::tauBrute(36, 5.0)) < 1e-8);
  CHECK(std::abs(divisorAFE(50, 0.0, 1e-10) - 6.0) < 1e-8);
  const auto r = divisorAFEDetailed(12, 5.0, 1e-10);
  CHECK(r.tailBound <= 1e-10);
  CHECK(std::abs(r.imagPart) < 1e-9);
}

TEST_CASE("van der Corput variant") {
  auto one = vdcInequality({cplx(0.3, -1.2)}, 0.377, 5);
  CHECK(std::abs(one.lhs - one.rhs) < 1e-14);
  auto two = vdcInequality({1.0, 1.0}, 0.0);
  CHECK(std::abs(two.lhs - 4.0) < 1e-14);
  CHECK(std::abs(two.rhs - 4.0) < 1e-14);

  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0, 1);
  std::uniform_int_distribution<int> J(1, 16);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<cplx> b(J(rng));
    for (auto& c : b) c = cplx(g(rng), g(rng));
    const i64 first = static_cast<i64>(trial) - 50;
    const auto r = vdcInequality(b, u(rng), first);
    CHECK(r.lhs <= r.rhs * (1 + 1e-12));
    // Parseval oracle: J * int_0^1 |G|^2 dx on a grid exact for these degrees
    const int M = 4 * int(b.size()) + 8;
    double mean = 0.0;
    for (int k = 0; k < M; ++k) mean += vdcInequality(b, double(k) / M, first).lhs;
    CHECK(std::abs(double(b.size()) * mean / M - r.rhs) < 1e-10 * r.rhs);
  }
}
