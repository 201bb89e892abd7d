#include "qlab/specfun.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "qlab/quad.hpp"

namespace qlab {

namespace {

constexpr double kTwoPi = 2.0 * kPi;
constexpr double kLogPi = 1.14472988584940017414;
constexpr double kLog2Pi = 1.83787706640934548356;

double wrapPhase(double ph) {
  double r = std::remainder(ph, kTwoPi);
  if (r <= -kPi) r += kTwoPi;
  return r;
}

// log n for small n, filled once.
const std::vector<double>& logTable() {
  static const std::vector<double> table = [] {
    std::vector<double> t(200001);
    t[0] = -std::numeric_limits<double>::infinity();
    for (std::size_t n = 1; n < t.size(); ++n) t[n] = std::log(static_cast<double>(n));
    return t;
  }();
  return table;
}

bool isNonPositiveInteger(cplx s) {
  return s.imag() == 0.0 && s.real() <= 0.0 && s.real() == std::floor(s.real());
}

struct EMResult {
  cplx value;
  cplx deriv;
  double lastTerm;
  double scale;
};

// Euler-Maclaurin for sum_{n>=0} (n+a)^{-s}, N direct terms.
EMResult emHurwitz(cplx s, double a, long N, int order, bool withDeriv) {
  const auto& lt = logTable();
  const bool integerGrid = (a == 1.0) && (N + 1 < static_cast<long>(lt.size()));
  cplx sum = 0.0, dsum = 0.0;
  for (long n = N - 1; n >= 0; --n) {
    double la = integerGrid ? lt[n + 1] : std::log(n + a);
    cplx t = std::exp(-s * la);
    sum += t;
    if (withDeriv) dsum -= la * t;
  }
  const double A = N + a;
  const double lA = std::log(A);
  const cplx Ams = std::exp(-s * lA);
  const cplx sm1 = s - 1.0;
  cplx tail = Ams * A / sm1 + 0.5 * Ams;
  cplx dtail = 0.0;
  if (withDeriv) dtail = -lA * Ams * A / sm1 - Ams * A / (sm1 * sm1) - 0.5 * lA * Ams;
  const double scale = std::abs(Ams * A / sm1) + std::abs(0.5 * Ams);

  cplx P = s, dP = 1.0;  // rising product s(s+1)...(s+2k-2) and its derivative
  cplx Apow = Ams / A;   // A^{-s-2k+1}
  double fact = 2.0;     // (2k)!
  double last = 0.0;
  for (int k = 1; 2 * k <= order; ++k) {
    const double c = detail::bernoulli2k(k) / fact;
    cplx t = c * P * Apow;
    tail += t;
    if (withDeriv) dtail += c * Apow * (dP - lA * P);
    last = std::abs(t);
    for (int j = 2 * k - 1; j <= 2 * k; ++j) {
      dP = dP * (s + double(j)) + P;
      P *= (s + double(j));
    }
    Apow /= (A * A);
    fact *= double(2 * k + 1) * double(2 * k + 2);
  }
  return {sum + tail, dsum + dtail, last, scale};
}

EMResult emAdaptive(cplx s, double a, const PrecisionPolicy& pp, bool withDeriv) {
  const double target = std::max(std::ceil(std::abs(s.imag()) / 2.0) + 10.0, 30.0);
  long N = std::max(0L, static_cast<long>(std::ceil(target - a)));
  for (;;) {
    EMResult r = emHurwitz(s, a, N, pp.emOrder, withDeriv);
    const double ref = std::max(std::abs(r.value), r.scale);
    if (r.lastTerm <= pp.targetRelErr * ref) return r;
    if (N >= pp.maxSeriesTerms) {
      throw PrecisionError("Euler-Maclaurin tail above tolerance at s = (" + std::to_string(s.real()) + ", " +
                           std::to_string(s.imag()) + ")");
    }
    N = std::min<long>(pp.maxSeriesTerms, std::max(2 * N, 64L));
  }
}

}  // namespace

// ---------------------------------------------------------------------------

void PrecisionPolicy::validate() const {
  if (!(targetRelErr > 0.0 && targetRelErr <= 1e-4)) throw DomainError("targetRelErr must lie in (0, 1e-4]");
  if (maxSeriesTerms < 16) throw DomainError("maxSeriesTerms must be at least 16");
  if (emOrder % 2 != 0 || emOrder < 2 || emOrder > 30) throw DomainError("emOrder must be even and in [2, 30]");
  if (!(besselTailCutoff > 0.0)) throw DomainError("besselTailCutoff must be positive");
}

const PrecisionPolicy& defaultPrecision() {
  static const PrecisionPolicy pp{};
  return pp;
}

namespace detail {
double bernoulli2k(int k) {
  static const std::array<double, 31> table = [] {
    std::array<double, 31> b{};
    const double exact[] = {1.0,
                            1.0 / 6.0,
                            -1.0 / 30.0,
                            1.0 / 42.0,
                            -1.0 / 30.0,
                            5.0 / 66.0,
                            -691.0 / 2730.0,
                            7.0 / 6.0,
                            -3617.0 / 510.0,
                            43867.0 / 798.0,
                            -174611.0 / 330.0,
                            854513.0 / 138.0,
                            -236364091.0 / 2730.0,
                            8553103.0 / 6.0,
                            -23749461029.0 / 870.0,
                            8615841276005.0 / 14322.0};
    for (int i = 0; i <= 15; ++i) b[i] = exact[i];
    // B_{2k} = (-1)^{k+1} 2 (2k)! zeta(2k) / (2 pi)^{2k}
    for (int i = 16; i <= 30; ++i) {
      double z = 0.0;
      for (int n = 30; n >= 1; --n) z += std::pow(double(n), -2.0 * i);
      double lf = std::lgamma(2.0 * i + 1.0) - 2.0 * i * std::log(kTwoPi);
      b[i] = ((i % 2 == 1) ? 2.0 : -2.0) * std::exp(lf) * z;
    }
    return b;
  }();
  if (k < 0 || k > 30) throw DomainError("Bernoulli index out of range");
  return table[k];
}
}  // namespace detail

// --- LogScaledValue ---------------------------------------------------------

LogScaledValue LogScaledValue::fromComplex(cplx z) {
  if (z == cplx(0.0, 0.0)) return {};
  return {std::log(std::abs(z)), std::arg(z)};
}

LogScaledValue LogScaledValue::fromLog(cplx logz) {
  if (std::isinf(logz.real()) && logz.real() < 0) return {};
  return {logz.real(), wrapPhase(logz.imag())};
}

double LogScaledValue::logModulus() const {
  return zero_ ? -std::numeric_limits<double>::infinity() : logMod_;
}

cplx LogScaledValue::toComplex() const {
  if (zero_) return 0.0;
  return std::polar(std::exp(logMod_), phase_);
}

cplx LogScaledValue::scaled(double logScale) const {
  if (zero_) return 0.0;
  return std::polar(std::exp(logMod_ - logScale), phase_);
}

LogScaledValue LogScaledValue::conj() const {
  if (zero_) return {};
  return {logMod_, wrapPhase(-phase_)};
}

LogScaledValue LogScaledValue::inverse() const {
  if (zero_) throw PoleError("inverse of a zero log-scaled value");
  return {-logMod_, wrapPhase(-phase_)};
}

LogScaledValue LogScaledValue::pow(double p) const {
  if (zero_) return {};
  return {p * logMod_, wrapPhase(p * phase_)};
}

LogScaledValue operator*(const LogScaledValue& a, const LogScaledValue& b) {
  if (a.zero_ || b.zero_) return {};
  return {a.logMod_ + b.logMod_, wrapPhase(a.phase_ + b.phase_)};
}

LogScaledValue operator/(const LogScaledValue& a, const LogScaledValue& b) { return a * b.inverse(); }

LogScaledValue operator+(const LogScaledValue& a, const LogScaledValue& b) {
  if (a.zero_) return b;
  if (b.zero_) return a;
  const double m = std::max(a.logMod_, b.logMod_);
  const cplx z = std::polar(std::exp(a.logMod_ - m), a.phase_) + std::polar(std::exp(b.logMod_ - m), b.phase_);
  if (z == cplx(0.0, 0.0)) return {};
  return {m + std::log(std::abs(z)), std::arg(z)};
}

// --- Gamma ------------------------------------------------------------------

cplx logGammaC(cplx s) {
  if (isNonPositiveInteger(s)) throw PoleError("log Gamma pole at non-positive integer");
  cplx shift = 0.0;
  while (s.real() < 10.0) {
    shift += std::log(s);
    s += 1.0;
  }
  const cplx inv = 1.0 / s;
  const cplx inv2 = inv * inv;
  cplx series = 0.0;
  cplx p = inv;
  for (int k = 1; k <= 12; ++k) {
    series += detail::bernoulli2k(k) / (2.0 * k * (2.0 * k - 1.0)) * p;
    p *= inv2;
  }
  return (s - 0.5) * std::log(s) - s + 0.5 * kLog2Pi + series - shift;
}

cplx digammaC(cplx s) {
  if (isNonPositiveInteger(s)) throw PoleError("digamma pole at non-positive integer");
  cplx shift = 0.0;
  while (s.real() < 10.0) {
    shift += 1.0 / s;
    s += 1.0;
  }
  const cplx inv2 = 1.0 / (s * s);
  cplx series = 0.0;
  cplx p = inv2;
  for (int k = 1; k <= 12; ++k) {
    series += detail::bernoulli2k(k) / (2.0 * k) * p;
    p *= inv2;
  }
  return std::log(s) - 0.5 / s - series - shift;
}

// --- zeta -------------------------------------------------------------------

cplx zetaC(cplx s, const PrecisionPolicy& pp) {
  if (s == cplx(1.0, 0.0)) throw PoleError("zeta pole at s = 1");
  return emAdaptive(s, 1.0, pp, false).value;
}

cplx zetaDerivC(cplx s, const PrecisionPolicy& pp) {
  if (s == cplx(1.0, 0.0)) throw PoleError("zeta pole at s = 1");
  return emAdaptive(s, 1.0, pp, true).deriv;
}

cplx hurwitzZetaC(cplx s, double a, const PrecisionPolicy& pp) {
  if (s == cplx(1.0, 0.0)) throw PoleError("Hurwitz zeta pole at s = 1");
  if (!(a > 0.0)) throw DomainError("Hurwitz parameter must be positive");
  return emAdaptive(s, a, pp, false).value;
}

LogScaledValue completedZetaLog(cplx s) {
  if (s == cplx(0.0, 0.0) || s == cplx(1.0, 0.0)) throw PoleError("Lambda pole at s = 0 or 1");
  if (s.real() < 0.0) return completedZetaLog(1.0 - s);
  return LogScaledValue::fromLog(-0.5 * s * kLogPi + logGammaC(0.5 * s)) * LogScaledValue::fromComplex(zetaC(s));
}

cplx completedZeta(cplx s) { return completedZetaLog(s).toComplex(); }

LogScaledValue thetaFunc(cplx s) {
  if (s == cplx(0.0, 0.0) || s == cplx(0.5, 0.0)) throw PoleError("theta pole at s = 0 or 1/2");
  return LogScaledValue::fromLog(-s * kLogPi + logGammaC(s)) * LogScaledValue::fromComplex(zetaC(2.0 * s));
}

cplx scatteringPhi(double T) { return (thetaFunc(cplx(0.5, -T)) / thetaFunc(cplx(0.5, T))).toComplex(); }

// --- K-Bessel of imaginary order -------------------------------------------

double besselNegligibleBeyond(double T) { return T + 10.0 * std::cbrt(T) + 20.0; }

double besselKScaledSeries(double T, double y) {
  if (!(y > 0.0)) throw DomainError("Bessel argument must be positive");
  T = std::abs(T);
  const double h = 0.5 * y;
  const double q = h * h;
  if (T < 1e-8) {
    // K_0(y) = -(log(y/2) + gamma) I_0(y) + sum q^k/(k!)^2 H_k
    double term = 1.0, I0 = 1.0, S = 0.0, H = 0.0;
    for (int k = 1; k < 500; ++k) {
      term *= q / (double(k) * double(k));
      H += 1.0 / k;
      I0 += term;
      S += term * H;
      if (term < 1e-18 * I0) break;
    }
    return -(std::log(h) + kEulerGamma) * I0 + S;
  }
  const cplx lg0 = logGammaC(cplx(1.0, T));
  const cplx pref = std::exp(cplx(-lg0.real() - 0.5 * kPi * T, T * std::log(h) - lg0.imag()));
  cplx r = 1.0, S = 1.0;
  double peak = 1.0;
  for (int k = 1; k < 100000; ++k) {
    r *= q / (double(k) * cplx(double(k), T));
    S += r;
    const double ar = std::abs(r);
    peak = std::max(peak, ar);
    if (ar < 1e-18 * peak && q < double(k) * std::abs(cplx(double(k), T))) break;
  }
  return 2.0 * kPi / (-std::expm1(-2.0 * kPi * T)) * (-(pref * S).imag());
}

namespace {

// 1 - u/sinh(u), accurate near 0.
double oneMinusUOverSinh(double u) {
  u = std::abs(u);
  if (u < 0.1) {
    const double u2 = u * u;
    return u2 / 6.0 - 7.0 * u2 * u2 / 360.0 + 31.0 * u2 * u2 * u2 / 15120.0;
  }
  return 1.0 - u / std::sinh(u);
}

// Root a > 0 of sinh(a) = r a for r > 1.
double flatEnd(double r) {
  double lo = 0.0, hi = 1.0;
  while (std::sinh(hi) < r * hi) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
    double mid = 0.5 * (lo + hi);
    if (std::sinh(mid) < r * mid) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double besselKScaledIntegral(double T, double y, int density) {
  if (!(y > 0.0)) throw DomainError("Bessel argument must be positive");
  if (density < 1) density = 1;
  T = std::abs(T);
  const int level = density >= 2 ? 4 : 3;
  const double r = T / y;

  // Exponent along the descent path t = u + i theta(u), sin theta = r u / sinh u.
  auto exponent = [&](double u) {
    double omx;  // 1 - x
    if (y >= T) omx = (y - T) / y + r * oneMinusUOverSinh(u);
    else omx = 1.0 - r * (u / std::sinh(u));
    if (omx < 0.0) omx = 0.0;
    const double x = 1.0 - omx;
    const double acosx = 2.0 * std::asin(std::sqrt(0.5 * omx));
    const double c = std::sqrt(omx * (1.0 + x));
    return T * acosx - y * std::cosh(u) * c;
  };

  double aStar = 0.0;
  double flat = 0.0;
  if (y < T) {
    aStar = flatEnd(r);
    const double fmax = std::max(T - y, y * std::cosh(aStar) - T);
    const int panels = density * (1 + static_cast<int>(std::ceil(aStar * fmax / kTwoPi)));
    const double w = aStar / panels;
    for (int p = 0; p < panels; ++p) {
      flat += quad::tanhSinh([&](double u) { return std::cos(T * u - y * std::sinh(u)); }, p * w, (p + 1) * w,
                             level);
    }
  }

  const double e0 = exponent(aStar);
  const double floorE = e0 - 45.0;
  double hi = aStar + 1.0 / std::sqrt(y + 1.0);
  while (exponent(hi) > floorE) hi = aStar + 2.0 * (hi - aStar);
  double lo = aStar;
  for (int it = 0; it < 60; ++it) {
    double mid = 0.5 * (lo + hi);
    if (exponent(mid) > floorE) lo = mid;
    else hi = mid;
  }
  const double uMax = hi;
  const int panels = 4 * density;
  const double w = (uMax - aStar) / panels;
  double descent = 0.0;
  for (int p = 0; p < panels; ++p) {
    descent += quad::tanhSinh([&](double u) { return std::exp(exponent(u)); }, aStar + p * w, aStar + (p + 1) * w,
                              level);
  }
  return flat + descent;
}

double besselKScaled(double T, double y, const PrecisionPolicy& pp) {
  (void)pp;
  if (!(y > 0.0)) throw DomainError("Bessel argument must be positive");
  T = std::abs(T);
  if (y <= std::max(2.0, T / 4.0)) return besselKScaledSeries(T, y);
  return besselKScaledIntegral(T, y, 1);
}

// --- Chebyshev table --------------------------------------------------------

namespace {
constexpr int kChebDeg = 24;

std::vector<double> chebCoefficients(const std::function<double(double)>& f, double a, double b) {
  const int n = kChebDeg + 1;
  std::vector<double> fx(n), c(n);
  for (int j = 0; j < n; ++j) {
    const double th = kPi * (j + 0.5) / n;
    fx[j] = f(0.5 * (a + b) + 0.5 * (b - a) * std::cos(th));
  }
  for (int k = 0; k < n; ++k) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += fx[j] * std::cos(kPi * k * (j + 0.5) / n);
    c[k] = 2.0 * s / n;
  }
  c[0] *= 0.5;
  return c;
}
}  // namespace

BesselScaledTable::BesselScaledTable(double T, double xMax, double absTol)
    : T_(std::abs(T)), xMax_(xMax), xSeries_(std::max(2.0, std::abs(T) / 4.0)), absTol_(absTol) {
  if (xMax_ > xSeries_) {
    // Seed panels about one local half-wavelength wide, then refine.
    double a = xSeries_;
    while (a < xMax_) {
      double k = (a < T_) ? std::sqrt(T_ * T_ - a * a) / a : 1.0;
      double w = std::max(kPi / std::max(k, 1e-3), 0.05);
      w = std::min(w, 8.0);
      double b = std::min(xMax_, a + w);
      build(a, b, 1.0, 0);
      a = b;
    }
  }
}

void BesselScaledTable::build(double a, double b, double scale, int depth) {
  auto f = [this](double x) { return besselKScaledIntegral(T_, x, 1); };
  std::vector<double> c = chebCoefficients(f, a, b);
  const double tailMag = std::abs(c[kChebDeg]) + std::abs(c[kChebDeg - 1]) + std::abs(c[kChebDeg - 2]);
  if (tailMag > absTol_ * scale && depth < 30) {
    const double m = 0.5 * (a + b);
    build(a, m, scale, depth + 1);
    build(m, b, scale, depth + 1);
    return;
  }
  panels_.push_back({a, b, std::move(c)});
}

double BesselScaledTable::operator()(double x) const {
  if (x <= xSeries_) return besselKScaledSeries(T_, x);
  if (x > xMax_ || panels_.empty()) return besselKScaled(T_, x);
  auto it = std::upper_bound(panels_.begin(), panels_.end(), x, [](double v, const Panel& p) { return v < p.a; });
  const Panel& p = *(it == panels_.begin() ? it : std::prev(it));
  const double t = (2.0 * x - p.a - p.b) / (p.b - p.a);
  double b1 = 0.0, b2 = 0.0;
  for (int k = kChebDeg; k >= 1; --k) {
    double b0 = 2.0 * t * b1 - b2 + p.c[k];
    b2 = b1;
    b1 = b0;
  }
  return t * b1 - b2 + p.c[0];
}

// --- eta --------------------------------------------------------------------

cplx reduceToFundamentalDomain(cplx z) {
  if (!(z.imag() > 0.0)) throw DomainError("point must lie in the upper half plane");
  for (int it = 0; it < 10000; ++it) {
    z -= std::round(z.real());
    if (std::norm(z) < 1.0 - 1e-15) z = -1.0 / z;
    else break;
  }
  return z;
}

namespace {
double logEtaAbsRaw(cplx z) {
  // log|eta| = -pi y / 12 + sum log|1 - q^n|, q = e^{2 pi i z}
  const double y = z.imag();
  const cplx q = std::exp(cplx(0.0, kTwoPi) * z);
  double s = -kPi * y / 12.0;
  cplx qn = q;
  for (int n = 1; n < 100000; ++n) {
    s += std::log(std::abs(1.0 - qn));
    if (std::abs(qn) < 1e-18) break;
    qn *= q;
  }
  return s;
}
}  // namespace

double logF(cplx z) {
  const cplx w = reduceToFundamentalDomain(z);
  return 0.5 * std::log(w.imag()) + 2.0 * logEtaAbsRaw(w);
}

double dedekindEtaAbs(cplx z, const PrecisionPolicy& pp) {
  (void)pp;
  if (!(z.imag() > 0.0)) throw DomainError("eta requires Im z > 0");
  return std::exp(0.5 * (logF(z) - 0.5 * std::log(z.imag())));
}

// --- gamma kernels ----------------------------------------------------------

LogScaledValue gammaVT(cplx s, double T) {
  const cplx i(0.0, 1.0);
  cplx l = -1.5 * std::log(2.0) - s * kLogPi + logGammaC((0.5 + s + i * T) / 2.0) + logGammaC((0.5 + s - i * T) / 2.0);
  return LogScaledValue::fromLog(l);
}

LogScaledValue gammaVTsq(cplx s, double T) {
  const cplx i(0.0, 1.0);
  cplx l = -2.0 * std::log(2.0) - s * kLogPi + logGammaC((1.0 + s + 2.0 * i * T) / 2.0) +
           2.0 * logGammaC((1.0 + s) / 2.0) + logGammaC((1.0 + s - 2.0 * i * T) / 2.0) - logGammaC(1.0 + s);
  return LogScaledValue::fromLog(l);
}

}  // namespace qlab
