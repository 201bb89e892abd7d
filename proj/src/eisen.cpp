#include "qlab/eisen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qlab/arith.hpp"
#include "qlab/quad.hpp"

namespace qlab::eisen {

namespace {

constexpr double kTwoPi = 2.0 * kPi;

// b^w zeta_H(w, b) by Euler-Maclaurin at the base point b; b must be large
// compared with |w|.
cplx hurwitzNormalized(cplx w, double b) {
  cplx sum = b / (w - 1.0) + 0.5;
  cplx r = w / (2.0 * b);
  for (int k = 1; k <= 15; ++k) {
    const cplx term = detail::bernoulli2k(k) * r;
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    r *= (w + double(2 * k - 1)) * (w + double(2 * k)) / (double(2 * k + 1) * double(2 * k + 2) * b * b);
  }
  return sum;
}

// Sum over d in Z of ((a+d)^2 + Y^2)^{-s} for |a+d| beyond the direct window:
// right tail starts at a + K, left tail at K + 1 - a.
cplx rowTail(double Y, double a, int K, cplx s) {
  const double b1 = a + K, b2 = K + 1.0 - a;
  const cplx p1 = std::exp(-2.0 * s * std::log(b1));
  const cplx p2 = std::exp(-2.0 * s * std::log(b2));
  const double r1 = (Y * Y) / (b1 * b1), r2 = (Y * Y) / (b2 * b2);
  cplx coef = 1.0;  // binom(-s, j)
  double q1 = 1.0, q2 = 1.0;
  cplx acc = 0.0;
  for (int j = 0; j < 400; ++j) {
    const cplx w = 2.0 * s + double(2 * j);
    const cplx term = coef * (q1 * p1 * hurwitzNormalized(w, b1) + q2 * p2 * hurwitzNormalized(w, b2));
    acc += term;
    if (j > 2 && std::abs(term) < 1e-18 * std::abs(acc)) return acc;
    coef *= -(s + double(j)) / double(j + 1);
    q1 *= r1;
    q2 *= r2;
  }
  throw ConvergenceError("lattice row tail did not converge");
}

int rowWindow(double Y, double sAbs) {
  return int(std::ceil(std::max({1.5 * Y * std::sqrt(sAbs + 1.0), 2.0 * Y, sAbs + 65.0})));
}

// S_m(s) = sum_d ((m x + d)^2 + (m y)^2)^{-s}, evaluated directly.
cplx latticeRow(double Y, double a, cplx s) {
  const int K = rowWindow(Y, std::abs(s));
  cplx acc = 0.0;
  for (int d = 0; d < K; ++d) acc += std::exp(-s * std::log((a + d) * (a + d) + Y * Y));
  for (int d = 1; d <= K; ++d) acc += std::exp(-s * std::log((a - d) * (a - d) + Y * Y));
  return acc + rowTail(Y, a, K, s);
}

// sqrt(pi) Gamma(s - 1/2) / Gamma(s): constant term of S_m is A(s) (m y)^{1-2s}.
cplx constantTermFactor(cplx s) {
  return std::sqrt(kPi) * std::exp(logGammaC(s - 0.5) - logGammaC(s));
}

// Rows m with 2 pi m y below |Im s| + 45 keep their Fourier modes.
int rowCount(double tAbs, double y) { return std::max(1, int(std::ceil((tAbs + 45.0) / (kTwoPi * y)))); }

double fracPart(double v) { return v - std::floor(v); }

void checkUpper(cplx z) {
  if (!(z.imag() > 0.0)) throw DomainError("point must lie in the upper half plane");
}

}  // namespace

// --- E* -------------------------------------------------------------------

double EisensteinParams::margin() const {
  return truncationMargin < 0.0 ? 10.0 * std::cbrt(T) + 20.0 : truncationMargin;
}

int EisensteinParams::truncation(double y) const {
  return std::max(1, int(std::ceil((T + margin()) / (kTwoPi * y))));
}

void EisensteinParams::validate() const {
  if (!(T > 0.0)) throw DomainError("spectral parameter T must be positive");
  pp.validate();
}

cplx unitTheta(double T) { return std::polar(1.0, thetaFunc(cplx(0.5, T)).phase()); }

double constantTermStar(double y, double T) {
  if (!(y > 0.0)) throw DomainError("constant term needs y > 0");
  const cplx mu = unitTheta(T);
  return 2.0 * std::sqrt(y) * (mu * std::polar(1.0, T * std::log(y))).real();
}

EisensteinStar::EisensteinStar(const EisensteinParams& params, double yMin) : params_(params), yMin_(yMin) {
  params_.validate();
  if (!(yMin > 0.0)) throw DomainError("yMin must be positive");
  const double T = params_.T;
  const int N = params_.truncation(yMin);
  tau_ = arith::FactorTable(std::max(N, 2)).tauITTable(T);
  const LogScaledValue th = thetaFunc(cplx(0.5, T));
  mu_ = std::polar(1.0, th.phase());
  logRhoHat_ = 0.5 * std::log(2.0 / kPi) - th.logModulus() - 0.5 * kPi * T;
  table_ = std::make_shared<BesselScaledTable>(T, T + params_.margin() + 10.0);
}

double EisensteinStar::besselScaled(double x) const {
  if (x <= table_->xMax()) return (*table_)(x);
  return besselKScaled(params_.T, x, params_.pp);
}

double EisensteinStar::fourierPart(cplx z) const {
  checkUpper(z);
  const double y = z.imag();
  if (y < yMin_ * (1.0 - 1e-12)) throw DomainError("point below the tabulated height");
  const int N = params_.truncation(y);
  const double pref = 2.0 * std::exp(logRhoHat_) * std::sqrt(kTwoPi * y);
  double acc = 0.0;
  for (int n = 1; n <= N; ++n) {
    const double k = besselScaled(kTwoPi * n * y);
    if (k == 0.0) break;
    acc += tau_[n] * std::cos(kTwoPi * n * z.real()) * k;
  }
  return pref * acc;
}

cplx EisensteinStar::evaluateComplex(cplx z) const {
  checkUpper(z);
  const double y = z.imag();
  if (y < yMin_ * (1.0 - 1e-12)) throw DomainError("point below the tabulated height");
  const double T = params_.T;
  const cplx yt = std::polar(std::sqrt(y), T * std::log(y));
  cplx acc = mu_ * yt + std::conj(mu_) * std::conj(yt);
  const int N = params_.truncation(y);
  const double pref = std::exp(logRhoHat_) * std::sqrt(kTwoPi * y);
  for (int n = 1; n <= N; ++n) {
    const double k = besselScaled(kTwoPi * n * y);
    if (k == 0.0) break;
    const cplx e = std::polar(1.0, kTwoPi * n * z.real());
    acc += pref * tau_[n] * k * (e + std::conj(e));
  }
  return acc;
}

double eisensteinStar(cplx z, const EisensteinParams& params) {
  checkUpper(z);
  return EisensteinStar(params, z.imag())(z);
}

// --- cosets ---------------------------------------------------------------

CosetEnumeration enumerateCosets(cplx z, double minHeight, i64 maxC) {
  checkUpper(z);
  if (!(minHeight > 0.0)) throw DomainError("minimum height must be positive");
  const double x = z.real(), y = z.imag();
  CosetEnumeration out;
  out.maxC = maxC;
  if (y >= minHeight) out.pairs.emplace_back(0, 1);
  const i64 cTop = std::min<i64>(maxC, i64(std::floor(1.0 / std::sqrt(y * minHeight))));
  for (i64 c = 1; c <= cTop; ++c) {
    const double room = y / minHeight - double(c) * double(c) * y * y;
    if (room < 0.0) continue;
    const double r = std::sqrt(room);
    const i64 d0 = i64(std::ceil(-c * x - r)), d1 = i64(std::floor(-c * x + r));
    for (i64 d = d0; d <= d1; ++d) {
      if (arith::gcd(c, d) != 1) continue;
      if (y / std::norm(double(c) * z + double(d)) >= minHeight) out.pairs.emplace_back(c, d);
    }
  }
  return out;
}

double incompleteEisenstein(cplx z, const std::function<double(double)>& h, double supportLow, i64 maxC) {
  const auto cos = enumerateCosets(z, supportLow, maxC < 0 ? std::numeric_limits<i64>::max() : maxC);
  double acc = 0.0;
  for (const auto& [c, d] : cos.pairs) acc += h(z.imag() / std::norm(double(c) * z + double(d)));
  return acc;
}

// --- E(z, s) ----------------------------------------------------------------

EisensteinValue eisensteinE(cplx z, cplx s, int maxC) {
  checkUpper(z);
  if (!(s.real() > 1.0)) throw DomainError("coset sum needs Re s > 1");
  if (maxC < 1) throw DomainError("maxC must be at least 1");
  const double x = z.real(), y = z.imag();
  // rows whose Fourier modes are not yet negligible
  const int M0 = rowCount(std::abs(s.imag()), y);
  const int rows = std::max(maxC, M0);
  std::vector<cplx> S(rows + 1);
  for (int m = 1; m <= rows; ++m) S[m] = latticeRow(m * y, fracPart(m * x), s);
  std::vector<cplx> muPartial(maxC + 1);  // sum_{e <= k} mu(e) e^{-2s}
  for (int e = 1; e <= maxC; ++e)
    muPartial[e] = muPartial[e - 1] + double(arith::mobius(e)) * std::exp(-2.0 * s * std::log(double(e)));

  cplx body = 0.0, phiPartial = 0.0;
  for (int c = 1; c <= maxC; ++c) {
    i64 phi = 1;
    for (const auto& [p, k] : arith::factorize(c)) {
      phi *= p - 1;
      for (int j = 1; j < k; ++j) phi *= p;
    }
    phiPartial += double(phi) * std::exp(-2.0 * s * std::log(double(c)));
    for (i64 e : arith::divisors(c)) {
      const int mu = arith::mobius(e);
      if (mu != 0) body += double(mu) * std::exp(-2.0 * s * std::log(double(e))) * S[c / e];
    }
  }
  const cplx A = constantTermFactor(s);
  const cplx zeta2s = zetaC(2.0 * s);
  // c > maxC: constant terms summed in closed form; the Fourier modes of row
  // m enter with weight sum_{e > maxC/m} mu(e) e^{-2s}.
  cplx tail = A * std::exp((1.0 - 2.0 * s) * std::log(y)) * (zetaC(2.0 * s - 1.0) / zeta2s - phiPartial);
  for (int m = 1; m <= M0; ++m) {
    const cplx modes = S[m] - A * std::exp((1.0 - 2.0 * s) * std::log(m * y));
    tail += modes * (1.0 / zeta2s - muPartial[std::min(maxC / m, maxC)]);
  }
  const cplx ys = std::exp(s * std::log(y));
  // Rows beyond M0: first Bessel term of each, times sum |mu(e)| e^{-2 sigma}.
  const double sigma = s.real();
  const double gam = std::abs(std::exp(s * std::log(kPi) - logGammaC(s)));
  double bound = 0.0;
  for (int m = M0 + 1; m <= M0 + 200; ++m) {
    const double Y = m * y;
    const double k = std::sqrt(kPi / (4.0 * Y)) * std::exp(-kTwoPi * Y + 0.5 * kPi * std::abs(s.imag()));
    bound += 4.0 * gam * std::pow(Y, 0.5 - sigma) * k;
  }
  bound *= zetaC(2.0 * sigma).real();
  return {ys + ys * (body + tail), std::abs(ys) * bound};
}

EisensteinLattice::EisensteinLattice(cplx z, double sAbsMax) : z_(z), sAbsMax_(sAbsMax) {
  checkUpper(z);
  const double x = z.real(), y = z.imag();
  M_ = rowCount(sAbsMax, y);
  rows_.reserve(M_);
  for (int m = 1; m <= M_; ++m) {
    Row r;
    r.Y = m * y;
    r.a = fracPart(m * x);
    r.K = rowWindow(r.Y, sAbsMax);
    r.logq.reserve(2 * r.K);
    for (int d = 0; d < r.K; ++d) r.logq.push_back(std::log((r.a + d) * (r.a + d) + r.Y * r.Y));
    for (int d = 1; d <= r.K; ++d) r.logq.push_back(std::log((r.a - d) * (r.a - d) + r.Y * r.Y));
    rows_.push_back(std::move(r));
  }
}

cplx EisensteinLattice::rowSum(const Row& r, cplx s) const {
  const int K = std::min(r.K, rowWindow(r.Y, std::abs(s)));
  double re = 0.0, im = 0.0;
  auto add = [&](const double* l, int n) {
    for (int i = 0; i < n; ++i) {
      const double mag = std::exp(-s.real() * l[i]);
      const double ph = -s.imag() * l[i];
      re += mag * std::cos(ph);
      im += mag * std::sin(ph);
    }
  };
  add(r.logq.data(), K);          // a + d, d = 0..K-1
  add(r.logq.data() + r.K, K);    // a - d, d = 1..K
  return cplx(re, im) + rowTail(r.Y, r.a, K, s);
}

cplx EisensteinLattice::operator()(cplx s) const {
  if (std::abs(s) > sAbsMax_ * (1.0 + 1e-12)) throw DomainError("s beyond the lattice table range");
  if (std::abs(s - 1.0) < 1e-12) throw PoleError("E(z, s) has a pole at s = 1");
  if (std::abs(s - 0.5) < 1e-12) throw PoleError("lattice form is singular at s = 1/2");
  const double y = z_.imag();
  const int M = std::min(M_, rowCount(std::abs(s.imag()), y));
  cplx acc = 0.0;
  for (int m = 0; m < M; ++m) acc += rowSum(rows_[m], s);
  acc += constantTermFactor(s) * std::exp((1.0 - 2.0 * s) * std::log(y)) * hurwitzZetaC(2.0 * s - 1.0, M + 1.0);
  const cplx ys = std::exp(s * std::log(y));
  return ys + ys * acc / zetaC(2.0 * s);
}

cplx eisensteinContinued(cplx z, cplx s) { return EisensteinLattice(z, std::abs(s))(s); }

// --- identities ---------------------------------------------------------------

HValues hFunctionBothWays(cplx z, const TestFunctionPsi& psiIn, double eps, double tol) {
  checkUpper(z);
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("abscissa must lie in (0, 1)");
  const TestFunctionPsi psi = psiIn.evenPart();
  const double L = psi.logSupport();

  // Height where the remaining tail (about 80 |psi~| for |E| of order a
  // few) drops below tol, checked over a window since psi~ oscillates.
  double H = 20.0;
  for (int quiet = 0; quiet < 6 && H < 5000.0; H += 5.0) {
    const double g = 80.0 * std::abs(psi.mellin(cplx(-eps, -H)));
    quiet = g < tol ? quiet + 1 : 0;
  }
  const EisensteinLattice lat(z, std::abs(cplx(1.0 + eps, H)) + 1.0);
  auto f = [&](double t) {
    const cplx s(eps, t);
    return (psi.mellin(-s) * (lat(1.0 + s) + lat(1.0 - s))).real();
  };
  // integrand at -t is the conjugate
  const double lhs =
      quad::integrateAdaptiveReal(f, 0.0, H, kPi * tol, 2.0 + L + 2.0 * std::abs(std::log(z.imag()))) / kPi;

  const double Y0 = psi.Y0();
  const double E = incompleteEisenstein(z, [&](double v) { return v * psi(v); }, 1.0 / Y0);
  const double rhs = -3.0 / kPi * psi.mellin(0.0).real() + 2.0 * E;
  return {lhs, rhs, H};
}

cplx zEisenstein(cplx s, double T) {
  const cplx i(0.0, 1.0);
  for (cplx p : {cplx(1.0, 0.0), 1.0 + 2.0 * i * T, 1.0 - 2.0 * i * T})
    if (std::abs(s - p) < 1e-13) throw PoleError("Z(s, E_T) has a pole here");
  const cplx z = zetaC(s);
  return z * z * zetaC(s - 2.0 * i * T) * zetaC(s + 2.0 * i * T) / zetaC(2.0 * s);
}

cplx unfoldInnerProductDetailed(double T, const TestFunctionPsi& psi, UnfoldMode mode, const UnfoldOptions& opts) {
  if (!(T > 0.0)) throw DomainError("spectral parameter T must be positive");
  if (mode == UnfoldMode::direct2D) {
    if (T > 20.0) throw GateError("direct2D inner product is gated to T <= 20");
    EisensteinParams params;
    params.T = T;
    const double yLow = 0.5 * std::sqrt(3.0);
    const EisensteinStar es(params, yLow * (1.0 - 1e-9));
    const double Y0 = psi.Y0();
    auto F = [&](cplx w) {
      const double h = incompleteEisenstein(w, [&](double v) { return v * psi(v); }, 1.0 / Y0);
      if (h == 0.0) return 0.0;
      const double e = es(w);
      return e * e * h;
    };
    const double fx = kTwoPi * params.truncation(yLow);
    return quad::fundamentalDomain2D(F, Y0, opts.tol2D, 0.0, fx, 2.0 * T + 10.0);
  }
  const cplx phi = scatteringPhi(T);
  const cplx constant = 2.0 * psi.mellin(1.0) + 2.0 * (phi * psi.mellin(cplx(1.0, -2.0 * T))).real();
  const LogScaledValue pref =
      LogScaledValue::fromLog(std::log(2.0 / kPi) - 2.0 * thetaFunc(cplx(0.5, T)).logModulus());
  auto F = [&](cplx s) {
    const cplx bracket = (pref * gammaVTsq(s, T)).toComplex() * zEisenstein(1.0 + s, T);
    return psi.mellin(-s) * bracket;
  };
  quad::ContourSpec spec;
  spec.sigma = opts.eps;
  spec.heightCutoff = 2.0 * T + 60.0;
  spec.tol = opts.tol;
  spec.freqHint = std::log(2.0 * T + 2.0) + psi.logSupport() + 1.0;
  return constant + 2.0 * quad::verticalLine(F, spec);
}

double unfoldInnerProduct(double T, const TestFunctionPsi& psi, UnfoldMode mode, const UnfoldOptions& opts) {
  return unfoldInnerProductDetailed(T, psi, mode, opts).real();
}

double laurentConstantE(cplx z) {
  checkUpper(z);
  const EisensteinLattice lat(z, 1.1);
  auto g = [&](double a) {
    const double pole = 3.0 / (kPi * a);
    return 0.5 * ((lat(1.0 + a) - pole) + (lat(1.0 - a) + pole)).real();
  };
  const double g1 = g(1e-2), g2 = g(5e-3), g3 = g(2.5e-3);
  const double r1 = (4.0 * g2 - g1) / 3.0, r2 = (4.0 * g3 - g2) / 3.0;
  if (std::abs(r2 - r1) > std::abs(g2 - g1) + 1e-12 * std::abs(g1))
    throw ConvergenceError("Laurent constant extrapolation is unstable");
  return (16.0 * r2 - r1) / 15.0;
}

}  // namespace qlab::eisen
