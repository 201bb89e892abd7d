#include "qlab/moments.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "qlab/arith.hpp"
#include "qlab/quad.hpp"

namespace qlab::moments {

namespace {

const double kLogPi = std::log(kPi);

double logCoshPi(double T) {
  const double a = kPi * std::abs(T);
  return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
}

void checkT(double T) {
  if (!(T > 0.0) || !std::isfinite(T)) throw DomainError("spectral parameter T must be positive");
}

// int over [pts.front(), pts.back()] split at the interior points; the
// absolute tolerance is relTol times a fixed-rule estimate of int |f|.
cplx integratePiecewise(const quad::CplxFn& f, std::vector<double> pts, double relTol, double freq) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  double mass = 0.0;
  for (size_t i = 0; i + 1 < pts.size(); ++i) {
    const int panels = std::max(4, int(std::ceil((pts[i + 1] - pts[i]) * (1.0 + freq) / 4.0)));
    mass += quad::gaussLegendre([&](double t) { return cplx(std::abs(f(t)), 0.0); }, pts[i], pts[i + 1], panels)
                .real();
  }
  const double tol = relTol * std::max(mass, 1e-300) / double(pts.size() - 1);
  cplx total = 0.0;
  for (size_t i = 0; i + 1 < pts.size(); ++i) total += quad::integrateAdaptive(f, pts[i], pts[i + 1], tol, freq);
  return total;
}

std::vector<double> breakpoints(const ShiftTuple& s, double lo, double hi) {
  std::vector<double> pts{lo, hi};
  for (double p : {-s.alpha.imag(), -s.beta.imag(), s.gamma.imag(), s.delta.imag(), 0.0})
    if (p > lo && p < hi) pts.push_back(p);
  return pts;
}

// zeta on vertical lines, shared between conjugate arguments
class ZetaCache {
 public:
  cplx operator()(cplx s) {
    const bool flip = s.imag() < 0.0;
    const std::pair<double, double> key{s.real(), std::abs(s.imag())};
    auto it = values_.find(key);
    cplx z;
    if (it != values_.end()) {
      z = it->second;
    } else {
      z = zetaC(cplx(key.first, key.second));
      values_.emplace(key, z);
    }
    return flip ? std::conj(z) : z;
  }

 private:
  std::map<std::pair<double, double>, cplx> values_;
};

cplx sigmaAB(i64 p, int j, cplx a, cplx b) {
  const double lp = std::log(double(p));
  cplx s = 0.0;
  for (int i = 0; i <= j; ++i) s += std::exp(-(double(i) * a + double(j - i) * b) * lp);
  return s;
}

// sum_j sigma_{a,b}(p^{j+ea}) sigma_{c,d}(p^{j+ec}) p^{-j(z+1)}
cplx eulerSeries(i64 p, int ea, int ec, const ShiftTuple& s, cplx z) {
  const cplx r = std::exp(-(z + 1.0) * std::log(double(p)));
  cplx sum = 0.0, pw = 1.0;
  for (int j = 0; j < 400; ++j) {
    const cplx term = sigmaAB(p, j + ea, s.alpha, s.beta) * sigmaAB(p, j + ec, s.gamma, s.delta) * pw;
    sum += term;
    if (j >= 2 && std::abs(term) < 1e-17 * std::abs(sum)) return sum;
    pw *= r;
  }
  throw ConvergenceError("Euler factor series did not converge");
}

struct SixZ {
  std::array<cplx, 6> z;
};

SixZ sixZ(i64 h, i64 k, const ShiftTuple& s) {
  const cplx a = s.alpha, b = s.beta, c = s.gamma, d = s.delta;
  const std::array<ShiftTuple, 6> perms{ShiftTuple{a, b, c, d},   ShiftTuple{-c, -d, -a, -b},
                                        ShiftTuple{-c, b, -a, d}, ShiftTuple{-d, b, c, -a},
                                        ShiftTuple{a, -c, -b, d}, ShiftTuple{a, -d, c, -b}};
  SixZ out;
  for (int i = 0; i < 6; ++i) out.z[i] = zFactor(h, k, perms[i], 0.0);
  return out;
}

cplx bracketAt(const SixZ& Z, const ShiftTuple& s, double t) {
  const cplx xag = xPair(s.alpha, s.gamma, t), xbd = xPair(s.beta, s.delta, t);
  const cplx xad = xPair(s.alpha, s.delta, t), xbg = xPair(s.beta, s.gamma, t);
  return Z.z[0] + xag * xbd * Z.z[1] + xag * Z.z[2] + xad * Z.z[3] + xbg * Z.z[4] + xbd * Z.z[5];
}

double smoothStep(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / u), b = std::exp(-1.0 / (1.0 - u));
  return a / (a + b);
}

}  // namespace

ShiftTuple ShiftTuple::eisenstein(cplx v, double T) {
  return {v + cplx(0.0, T), v - cplx(0.0, T), cplx(0.0, T), cplx(0.0, -T)};
}

void ShiftTuple::validate() const {
  for (cplx z : {alpha, beta, gamma, delta})
    if (!(std::abs(z.real()) < 0.5)) throw DomainError("shift real parts must lie in (-1/2, 1/2)");
}

cplx weightWShifts(double t, const ShiftTuple& s, double T) {
  s.validate();
  const cplx it(0.0, t);
  const cplx lg = logGammaC(0.5 * (0.5 + s.alpha + it)) + logGammaC(0.5 * (0.5 + s.beta + it)) +
                  logGammaC(0.5 * (0.5 + s.gamma - it)) + logGammaC(0.5 * (0.5 + s.delta - it));
  return std::exp(logCoshPi(T) - 3.0 * std::log(2.0) - 0.5 * s.sum() * kLogPi + lg);
}

cplx weightW(double t, cplx v, double T) { return weightWShifts(t, ShiftTuple::eisenstein(v, T), T); }

cplx wIntegralClosedForm(const ShiftTuple& s, double T) {
  s.validate();
  const cplx lg = logGammaC(0.5 * (1.0 + s.alpha + s.gamma)) + logGammaC(0.5 * (1.0 + s.alpha + s.delta)) +
                  logGammaC(0.5 * (1.0 + s.beta + s.gamma)) + logGammaC(0.5 * (1.0 + s.beta + s.delta)) -
                  logGammaC(0.5 * (2.0 + s.sum()));
  return std::exp(logCoshPi(T) - 2.0 * std::log(2.0) - 0.5 * s.sum() * kLogPi + lg);
}

cplx wIntegralNumeric(const ShiftTuple& s, double T, double relTol) {
  s.validate();
  double A = 0.0;
  for (cplx z : {s.alpha, s.beta, s.gamma, s.delta}) A = std::max(A, std::abs(z.imag()));
  const double L = A + 40.0;
  auto f = [&](double t) { return weightWShifts(t, s, T); };
  return integratePiecewise(f, breakpoints(s, -L, L), relTol, 2.0) / (2.0 * kPi);
}

double qFunction(double t, double T) { return 4.0 * T - std::abs(t + 2.0 * T) - std::abs(t - 2.0 * T); }

double qPrime(double t, double v, double T) {
  return 4.0 * T - std::abs(v + t + T) - std::abs(v + t - T) - std::abs(t - T) - std::abs(t + T);
}

double momentCutoff(double T) { return T + 40.0; }

cplx fourthMomentShifts(const ShiftTuple& s, double T, double relTol) {
  checkT(T);
  s.validate();
  ZetaCache zeta;
  auto f = [&](double t) {
    const cplx it(0.0, t);
    return zeta(0.5 + s.alpha + it) * zeta(0.5 + s.beta + it) * zeta(0.5 + s.gamma - it) *
           zeta(0.5 + s.delta - it) * weightWShifts(t, s, T);
  };
  double excess = 0.0;
  for (cplx z : {s.alpha, s.beta, s.gamma, s.delta}) excess = std::max(excess, std::abs(z.imag()) - T);
  const double L = momentCutoff(T) + excess;
  const double freq = 4.0 * std::log(2.0 * L + 2.0);
  return integratePiecewise(f, breakpoints(s, -L, L), relTol, freq) / (2.0 * kPi);
}

cplx fourthMomentNumeric(cplx v, double T, double relTol) {
  checkT(T);
  if (T > 120.0) throw GateError("fourth moment is gated to T <= 120");
  if (std::abs(v.real()) > 1e-14 || std::abs(v.imag()) > 2.0)
    throw DomainError("fourth moment needs Re v = 0 and |Im v| <= 2");
  return fourthMomentShifts(ShiftTuple::eisenstein(v, T), T, relTol);
}

namespace {

// log Lambda(s + h) - log Lambda(s) without forming the two large logs when h
// is small; the Gamma part goes through a second-order Taylor step.
cplx logLambdaStep(cplx s, cplx h) {
  cplx g;
  if (std::abs(h) < 1e-2) {
    const cplx a = 0.5 * s, k = 0.5 * h;
    const double d = 1e-3;
    const cplx tri = (digammaC(a + d) - digammaC(a - d)) / (2.0 * d);
    g = k * digammaC(a) + 0.5 * k * k * tri;
  } else {
    g = logGammaC(0.5 * (s + h)) - logGammaC(0.5 * s);
  }
  return -0.5 * h * kLogPi + g + std::log(zetaC(s + h) / zetaC(s));
}

// Lambda(s) in plain complex arithmetic, for s of moderate height
cplx lambdaDirect(cplx s) { return std::exp(-0.5 * s * kLogPi + logGammaC(0.5 * s)) * zetaC(s); }

}  // namespace

std::array<cplx, 6> mainTermLambdaTerms(cplx v, double T) {
  checkT(T);
  auto L = [](cplx z) { return completedZetaLog(z); };
  const cplx i2T(0.0, 2.0 * T), i4T(0.0, 4.0 * T);
  const LogScaledValue scale = LogScaledValue::fromLog(logCoshPi(T) + std::log(kPi / 4.0));
  std::array<cplx, 6> out;
  out[1] = (scale * L(1.0 - v - i2T) * L(1.0 - i2T) * L(1.0 - i2T) * L(1.0 + v - i2T) / L(2.0 - i4T)).toComplex();
  out[4] = (scale * L(1.0 + v + i2T) * L(1.0 + i2T) * L(1.0 + i2T) * L(1.0 - v + i2T) / L(2.0 + i4T)).toComplex();

  // Terms 0, 2, 3, 5 carry Lambda(1 +- v) poles that cancel at v = 0; pull the
  // common large factor out so the cancellation happens between O(1/v^2) values
  // with relative rounding only.
  const cplx C = (scale * L(1.0 + i2T) * L(1.0 - i2T)).toComplex();
  const cplx sp(1.0, 2.0 * T), sm(1.0, -2.0 * T);
  const cplx lp = lambdaDirect(1.0 + v), lm = lambdaDirect(1.0 - v);
  out[0] = C * std::exp(logLambdaStep(sp, v) + logLambdaStep(sm, v)) * lp * lp / lambdaDirect(2.0 + 2.0 * v);
  out[5] = C * std::exp(logLambdaStep(sp, -v) + logLambdaStep(sm, -v)) * lm * lm / lambdaDirect(2.0 - 2.0 * v);
  out[2] = out[3] = C * lp * lm / lambdaDirect(2.0);
  return out;
}

cplx mainTermLambda(cplx v, double T) {
  auto sum = [&](cplx u) {
    const auto t = mainTermLambdaTerms(u, T);
    cplx s = 0.0;
    for (cplx x : t) s += x;
    return s;
  };
  if (std::abs(v) >= 1e-4) return sum(v);
  // even in v: average the pair, then remove the eps^2 term
  auto f = [&](double eps) { return 0.5 * (sum(cplx(0.0, eps)) + sum(cplx(0.0, -eps))); };
  return (4.0 * f(1e-4) - f(2e-4)) / 3.0;
}

cplx xPair(cplx a, cplx c, double t) {
  const cplx it(0.0, t);
  return std::exp((a + c) * kLogPi + logGammaC(0.5 * (0.5 - a - it)) - logGammaC(0.5 * (0.5 + a + it)) +
                  logGammaC(0.5 * (0.5 - c + it)) - logGammaC(0.5 * (0.5 + c - it)));
}

cplx xFull(const ShiftTuple& s, double t) { return xPair(s.alpha, s.gamma, t) * xPair(s.beta, s.delta, t); }

cplx arithmeticA(const ShiftTuple& s, cplx z) {
  return zetaC(1.0 + z + s.alpha + s.gamma) * zetaC(1.0 + z + s.alpha + s.delta) *
         zetaC(1.0 + z + s.beta + s.gamma) * zetaC(1.0 + z + s.beta + s.delta) /
         zetaC(2.0 + 2.0 * z + s.sum());
}

cplx arithmeticB(i64 h, i64 k, const ShiftTuple& s, cplx z) {
  if (h < 1 || k < 1) throw DomainError("twists must be positive");
  if (arith::gcd(h, k) != 1) throw DomainError("twists must be coprime");
  cplx B = 1.0;
  for (auto [p, e] : arith::factorize(h)) B *= eulerSeries(p, 0, e, s, z) / eulerSeries(p, 0, 0, s, z);
  for (auto [p, e] : arith::factorize(k)) B *= eulerSeries(p, e, 0, s, z) / eulerSeries(p, 0, 0, s, z);
  return B;
}

cplx zFactor(i64 h, i64 k, const ShiftTuple& s, cplx z) { return arithmeticA(s, z) * arithmeticB(h, k, s, z); }

cplx twistedBracket(i64 h, i64 k, const ShiftTuple& s, double t) { return bracketAt(sixZ(h, k, s), s, t); }

cplx twistedMainTerm(i64 h, i64 k, const ShiftTuple& s, const WeightFn& w, double tMin, double tMax,
                     double relTol) {
  s.validate();
  if (!(tMax > tMin)) throw DomainError("empty weight support");
  const SixZ Z = sixZ(h, k, s);
  auto f = [&](double t) {
    const cplx wt = w(t);
    return wt == 0.0 ? cplx(0.0) : wt * bracketAt(Z, s, t);
  };
  const double freq = 2.0 * std::log(2.0 + std::max(std::abs(tMin), std::abs(tMax)));
  return integratePiecewise(f, breakpoints(s, tMin, tMax), relTol, freq) / std::sqrt(double(h) * double(k));
}

cplx twistedNumeric(i64 h, i64 k, const ShiftTuple& s, const WeightFn& w, double tMin, double tMax,
                    double relTol) {
  s.validate();
  if (h < 1 || k < 1) throw DomainError("twists must be positive");
  if (arith::gcd(h, k) != 1) throw DomainError("twists must be coprime");
  if (h * k > 12) throw GateError("twisted moment is gated to hk <= 12");
  if (tMin < -60.0 || tMax > 60.0) throw GateError("twisted moment weight is gated to |t| <= 60");
  if (!(tMax > tMin)) throw DomainError("empty weight support");
  const double lhk = std::log(double(h) / double(k));
  auto f = [&](double t) {
    const cplx wt = w(t);
    if (wt == 0.0) return cplx(0.0);
    const cplx it(0.0, t);
    return std::exp(-it * lhk) * zetaC(0.5 + s.alpha + it) * zetaC(0.5 + s.beta + it) *
           zetaC(0.5 + s.gamma - it) * zetaC(0.5 + s.delta - it) * wt;
  };
  double A = 0.0;
  for (cplx z : {s.alpha, s.beta, s.gamma, s.delta}) A = std::max(A, std::abs(z.imag()));
  const double freq = 4.0 * std::log(2.0 + A + std::max(std::abs(tMin), std::abs(tMax))) + std::abs(lhk);
  return integratePiecewise(f, breakpoints(s, tMin, tMax), relTol, freq);
}

cplx gFactor(cplx z, const ShiftTuple& s, double t) {
  const cplx it(0.0, t);
  const std::array<cplx, 4> base{0.5 + s.alpha + it, 0.5 + s.beta + it, 0.5 + s.gamma - it, 0.5 + s.delta - it};
  cplx lg = 0.0;
  for (cplx b : base) lg += logGammaC(0.5 * (b + z)) - logGammaC(0.5 * b);
  return std::exp(lg);
}

double vScale(const ShiftTuple& s, double t) {
  const cplx it(0.0, t);
  double lp = 0.0;
  for (cplx b : {0.5 + s.alpha + it, 0.5 + s.beta + it, 0.5 + s.gamma - it, 0.5 + s.delta - it})
    lp += std::log(std::abs(b));
  return std::exp(0.5 * lp) / 4.0;
}

cplx vWeight(double x, const ShiftTuple& s, double t, double tol) {
  if (!(x > 0.0)) throw DomainError("V needs x > 0");
  s.validate();
  const double lx = std::log(x);
  auto F = [&](cplx z) { return std::exp(z * z - z * lx) * gFactor(z, s, t) / z; };
  quad::ContourSpec spec;
  spec.sigma = 1.0;
  spec.heightCutoff = 10.0;
  spec.tol = tol;
  spec.freqHint = std::abs(lx) + std::abs(std::log(vScale(s, t))) + 2.0;
  return quad::verticalLine(F, spec);
}

double WeightWindow::R(double T) const { return P + T * std::abs(double(m)) / Y; }

double WeightWindow::operator()(double x) const {
  if (!(x > Y && x < 2.0 * Y)) return 0.0;
  const double r = P / Y;
  return smoothStep((x - Y) * r) * smoothStep((2.0 * Y - x) * r);
}

void WeightWindow::validate() const {
  if (m == 0) throw DomainError("shift m must be nonzero");
  if (!(P >= 1.0) || !(P <= Y)) throw DomainError("flatness P must satisfy 1 <= P <= Y");
  if (!(Y > std::abs(double(m)))) throw DomainError("window scale Y must exceed |m|");
}

double shiftedDivisorSum(double T, i64 m, i64 n0, i64 n1, const std::function<double(double)>& w) {
  if (T < 0.0) throw DomainError("T must be nonnegative");
  if (n0 + m < 1 || n0 < 1) throw DomainError("summation range must keep n and n + m positive");
  if (double(n1) > 2.1e7) throw GateError("shifted divisor sum is gated to Y <= 1e7");
  if (n1 < n0) return 0.0;
  const arith::FactorTable ft(std::max(n1, n1 + m) + 1);
  double sum = 0.0;
  if (T == 0.0) {
    const auto d = ft.divisorCountTable();
    for (i64 n = n0; n <= n1; ++n) sum += w(double(n)) * double(i64(d[n]) * i64(d[n + m]));
    return sum;
  }
  const auto tau = ft.tauITTable(T);
  for (i64 n = n0; n <= n1; ++n) sum += w(double(n)) * tau[n] * tau[n + m];
  return sum;
}

double shiftedDivisorBrute(double T, const WeightWindow& w) {
  w.validate();
  if (w.Y > 1e7) throw GateError("shifted divisor sum is gated to Y <= 1e7");
  return shiftedDivisorSum(T, w.m, i64(std::ceil(w.Y)), i64(std::floor(2.0 * w.Y)),
                           [&](double x) { return w(x); });
}

std::array<cplx, 4> shiftedDivisorMTTerms(double T, const WeightWindow& w, double relTol) {
  checkT(T);
  w.validate();
  const double m = double(w.m);
  const i64 am = std::abs(w.m);
  const cplx z1 = zetaC(cplx(1.0, 2.0 * T));
  const double zeta2 = kPi * kPi / 6.0;
  const double c1 = std::norm(z1) / zeta2 * arith::sigmaX(am, -1.0).real();
  const cplx c2p = std::pow(std::conj(z1), 2) / zetaC(cplx(2.0, -4.0 * T)) * arith::sigmaX(am, cplx(-1.0, 4.0 * T));
  const cplx c2m = std::pow(z1, 2) / zetaC(cplx(2.0, 4.0 * T)) * arith::sigmaX(am, cplx(-1.0, -4.0 * T));

  const double a = std::log(w.Y), b = std::log(2.0 * w.Y);
  const double tol = relTol * w.Y;
  auto J = [&](double sa, double sb, double freq) {
    // int (x+m)^{sa iT} x^{sb iT} w(x) dx in u = log x
    return quad::integrateAdaptive(
        [&](double u) {
          const double x = std::exp(u);
          const double wx = w(x);
          if (wx == 0.0) return cplx(0.0);
          return std::exp(cplx(0.0, T * (sa * std::log(x + m) + sb * u))) * wx * x;
        },
        a, b, tol, freq);
  };
  const double f1 = T * std::abs(m) / w.Y + w.P;
  const double f2 = 2.0 * T + w.P;
  return {c1 * J(-1.0, 1.0, f1), c1 * J(1.0, -1.0, f1), c2p * J(-1.0, -1.0, f2), c2m * J(1.0, 1.0, f2)};
}

double shiftedDivisorMT(double T, const WeightWindow& w, double relTol) {
  const auto t = shiftedDivisorMTTerms(T, w, relTol);
  return (t[0] + t[1] + t[2] + t[3]).real();
}

DivisorSumReport divisorReport(double T, i64 m, double Y, double P) {
  WeightWindow w{Y, P, m};
  w.validate();
  DivisorSumReport r;
  r.T = T;
  r.m = m;
  r.Y = Y;
  r.P = P;
  r.R = w.R(T);
  r.brute = shiftedDivisorBrute(T, w);
  r.mainTerm = shiftedDivisorMT(T, w);
  r.deviation = r.brute - r.mainTerm;
  r.relDeviation = std::abs(r.deviation) / std::abs(r.mainTerm);
  r.errorShape = std::pow(std::abs(double(m)), 7.0 / 64.0) * std::cbrt(T) * std::sqrt(Y) * r.R * r.R +
                 std::pow(T, 1.0 / 6.0) * std::pow(Y, 0.75) * std::sqrt(r.R);
  r.normalized = std::abs(r.deviation) / r.errorShape;
  return r;
}

std::vector<DivisorSumReport> divisorScalingStudy(double T, i64 m, const std::vector<double>& Ys, double P) {
  std::vector<DivisorSumReport> out;
  out.reserve(Ys.size());
  for (double Y : Ys) out.push_back(divisorReport(T, m, Y, P));
  return out;
}

MomentReport momentReport(cplx v, double T, double relTol) {
  MomentReport r;
  r.T = T;
  r.v = v;
  r.numeric = fourthMomentNumeric(v, T, relTol);
  r.mainTerm = mainTermLambda(v, T);
  r.deviation = r.numeric - r.mainTerm;
  r.relDeviation = std::abs(r.deviation) / std::abs(r.mainTerm);
  r.normalized = std::abs(r.deviation) / std::pow(T, -1.0 / 33.0);
  return r;
}

}  // namespace qlab::moments
