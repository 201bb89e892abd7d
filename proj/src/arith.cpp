#include "qlab/arith.hpp"

#include <algorithm>
#include <cmath>

#include "qlab/quad.hpp"

namespace qlab::arith {

namespace {

constexpr double kTwoPi = 2.0 * kPi;

// cos(2 pi k / l) with k reduced exactly first
double cosFrac(i64 k, i64 l) {
  k %= l;
  if (k < 0) k += l;
  return std::cos(kTwoPi * static_cast<double>(k) / static_cast<double>(l));
}

cplx expFrac(i64 k, i64 l) {
  k %= l;
  if (k < 0) k += l;
  const double a = kTwoPi * static_cast<double>(k) / static_cast<double>(l);
  return {std::cos(a), std::sin(a)};
}

// sum_{j=0}^{e} cos((2j - e) theta)
double tauPrimePower(double theta, int e) {
  double s = 0.0;
  for (int j = 0; j <= e; ++j) s += std::cos((2 * j - e) * theta);
  return s;
}

}  // namespace

// --- factorization ----------------------------------------------------------

FactorTable::FactorTable(i64 limit) : limit_(std::max<i64>(limit, 1)), spf_(limit_ + 1, 0) {
  if (limit_ > 0xFFFFFFFFLL) throw DomainError("factor table limit too large");
  std::vector<std::uint32_t> primes;
  for (i64 n = 2; n <= limit_; ++n) {
    if (spf_[n] == 0) {
      spf_[n] = static_cast<std::uint32_t>(n);
      primes.push_back(static_cast<std::uint32_t>(n));
    }
    for (std::uint32_t p : primes) {
      const i64 q = p * n;
      if (p > spf_[n] || q > limit_) break;
      spf_[q] = p;
    }
  }
}

i64 FactorTable::smallestPrimeFactor(i64 n) const {
  if (n < 2 || n > limit_) throw DomainError("argument outside factor table range");
  return spf_[n];
}

std::vector<std::pair<i64, int>> FactorTable::factorize(i64 n) const {
  if (n < 1 || n > limit_) throw DomainError("argument outside factor table range");
  std::vector<std::pair<i64, int>> f;
  while (n > 1) {
    const i64 p = spf_[n];
    int e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    f.push_back({p, e});
  }
  return f;
}

int FactorTable::mobius(i64 n) const {
  int mu = 1;
  for (const auto& [p, e] : factorize(n)) {
    if (e > 1) return 0;
    mu = -mu;
  }
  return mu;
}

std::vector<double> FactorTable::tauITTable(double T) const {
  std::vector<double> t(limit_ + 1, 0.0);
  if (limit_ >= 1) t[1] = 1.0;
  for (i64 n = 2; n <= limit_; ++n) {
    const i64 p = spf_[n];
    i64 r = n;
    int e = 0;
    while (r % p == 0) {
      r /= p;
      ++e;
    }
    t[n] = tauPrimePower(T * std::log(static_cast<double>(p)), e) * t[r];
  }
  return t;
}

std::vector<std::int32_t> FactorTable::divisorCountTable() const {
  std::vector<std::int32_t> d(limit_ + 1, 0);
  if (limit_ >= 1) d[1] = 1;
  for (i64 n = 2; n <= limit_; ++n) {
    const i64 p = spf_[n];
    i64 r = n;
    int e = 0;
    while (r % p == 0) {
      r /= p;
      ++e;
    }
    d[n] = (e + 1) * d[r];
  }
  return d;
}

std::vector<std::pair<i64, int>> factorize(i64 n) {
  if (n < 1) throw DomainError("factorize needs n >= 1");
  std::vector<std::pair<i64, int>> f;
  for (i64 p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    int e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    f.push_back({p, e});
  }
  if (n > 1) f.push_back({n, 1});
  return f;
}

std::vector<i64> divisors(i64 n) {
  if (n < 1) throw DomainError("divisors needs n >= 1");
  std::vector<i64> lo, hi;
  for (i64 d = 1; d * d <= n; ++d) {
    if (n % d) continue;
    lo.push_back(d);
    if (d != n / d) hi.push_back(n / d);
  }
  lo.insert(lo.end(), hi.rbegin(), hi.rend());
  return lo;
}

int mobius(i64 n) {
  int mu = 1;
  for (const auto& [p, e] : factorize(n)) {
    if (e > 1) return 0;
    mu = -mu;
  }
  return mu;
}

i64 gcd(i64 a, i64 b) {
  a = a < 0 ? -a : a;
  b = b < 0 ? -b : b;
  while (b) {
    const i64 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

i64 modInverse(i64 a, i64 l) {
  if (l < 1) throw DomainError("modulus must be positive");
  if (l == 1) return 0;
  i64 r0 = ((a % l) + l) % l, r1 = l, s0 = 1, s1 = 0;
  while (r1) {
    const i64 q = r0 / r1;
    std::tie(r0, r1) = std::make_pair(r1, r0 - q * r1);
    std::tie(s0, s1) = std::make_pair(s1, s0 - q * s1);
  }
  if (r0 != 1) throw DomainError("residue is not invertible");
  return ((s0 % l) + l) % l;
}

// --- divisor functions ------------------------------------------------------

double tauIT(i64 n, double T) {
  const double ln = std::log(static_cast<double>(n));
  double s = 0.0;
  for (i64 a : divisors(n)) s += std::cos(T * (2.0 * std::log(static_cast<double>(a)) - ln));
  return s;
}

cplx sigmaX(i64 m, cplx x) {
  cplx s = 0.0;
  for (i64 d : divisors(m)) s += std::exp(x * std::log(static_cast<double>(d)));
  return s;
}

cplx sigmaAlphaBeta(i64 n, cplx alpha, cplx beta) {
  cplx s = 0.0;
  for (i64 a : divisors(n)) {
    const double la = std::log(static_cast<double>(a)), lb = std::log(static_cast<double>(n / a));
    s += std::exp(-alpha * la - beta * lb);
  }
  return s;
}

// --- exponential sums -------------------------------------------------------

i64 ramanujanSum(i64 m, i64 l) {
  if (l < 1) throw DomainError("Ramanujan sum needs l >= 1");
  const i64 g = gcd(m, l);  // gcd(0, l) = l
  i64 s = 0;
  for (i64 d : divisors(g)) s += d * mobius(l / d);
  return s;
}

double kloosterman(i64 m, i64 n, i64 c) {
  if (c < 1) throw DomainError("Kloosterman modulus must be >= 1");
  if (c == 1) return 1.0;
  const i64 mr = ((m % c) + c) % c, nr = ((n % c) + c) % c;
  double s = 0.0;
  for (i64 d = 1; d < c; ++d) {
    if (gcd(d, c) != 1) continue;
    const i64 db = modInverse(d, c);
    const i64 k = static_cast<i64>((static_cast<__int128>(mr) * d + static_cast<__int128>(nr) * db) % c);
    s += cosFrac(k, c);
  }
  return s;
}

// --- Estermann function -----------------------------------------------------

cplx estermannD(cplx s, cplx xi, i64 a, i64 l, const PrecisionPolicy& pp) {
  if (l < 1) throw DomainError("Estermann modulus must be >= 1");
  if (gcd(a, l) != 1) throw DomainError("Estermann numerator must be coprime to the modulus");
  if (std::abs(s - 1.0) < 1e-13 || std::abs(s - 1.0 - xi) < 1e-13) throw PoleError("Estermann function pole");
  const i64 ar = ((a % l) + l) % l;
  std::vector<cplx> hb(l + 1), hc(l + 1);
  for (i64 b = 1; b <= l; ++b) {
    const double frac = static_cast<double>(b) / static_cast<double>(l);
    hb[b] = hurwitzZetaC(s - xi, frac, pp);
    hc[b] = hurwitzZetaC(s, frac, pp);
  }
  cplx total = 0.0;
  for (i64 b = 1; b <= l; ++b) {
    cplx inner = 0.0;
    for (i64 c = 1; c <= l; ++c) inner += expFrac((ar * b % l) * c, l) * hc[c];
    total += hb[b] * inner;
  }
  return std::exp((xi - 2.0 * s) * std::log(static_cast<double>(l))) * total;
}

EstermannResidues estermannResidues(cplx xi, i64 l) {
  const double ll = std::log(static_cast<double>(l));
  return {std::exp((xi - 1.0) * ll) * zetaC(1.0 - xi), std::exp((-xi - 1.0) * ll) * zetaC(1.0 + xi)};
}

cplx estermannReflected(cplx s, cplx xi, i64 a, i64 l, const EstermannEvaluator& D) {
  const i64 ab = modInverse(a, l);
  const double ll = std::log(static_cast<double>(l));
  const cplx pre = 2.0 * std::exp((2.0 * s - xi - 2.0) * std::log(2.0 * kPi) + (xi - 2.0 * s + 1.0) * ll +
                                  logGammaC(1.0 - s) + logGammaC(1.0 + xi - s));
  const cplx bracket = D(1.0 - s, -xi, ab, l) * std::cos(kPi * xi / 2.0) -
                       D(1.0 - s, -xi, l == 1 ? 0 : l - ab, l) * std::cos(kPi * (s - xi / 2.0));
  return pre * bracket;
}

// --- divisor approximate functional equation ------------------------------

namespace {

constexpr double kAFEAbscissa = 3.0;
constexpr double kAFEHeight = 8.5;  // e^{9 - t^2} < 1e-27 beyond
constexpr int kAFEDeg = 20;
constexpr double kAFEMaxTerms = 1e8;

struct LineRule {
  std::vector<cplx> w;       // nodes 3 + it
  std::vector<cplx> weight;  // (1/2 pi) zeta(1 - lambda + w) e^{w^2} / w dt
};

LineRule afeRule(cplx lambda) {
  LineRule r;
  const auto& gl = quad::gaussLegendreRule(32);
  const int panels = 16;
  const double h = 2.0 * kAFEHeight / panels;
  for (int p = 0; p < panels; ++p) {
    const double c = -kAFEHeight + (p + 0.5) * h;
    for (const auto& [x, wt] : gl) {
      const cplx w(kAFEAbscissa, c + 0.5 * h * x);
      r.w.push_back(w);
      r.weight.push_back(0.5 * h * wt / kTwoPi * zetaC(1.0 - lambda + w) * std::exp(w * w) / w);
    }
  }
  return r;
}

}  // namespace

DivisorAFEKernel::DivisorAFEKernel(cplx lambda, double uMin, double uMax) : uMin_(uMin) {
  if (!(uMax > uMin)) throw DomainError("kernel range must be nonempty");
  width_ = std::min(0.25, 2.5 / (std::abs(lambda.imag()) + 10.0));
  const int np = static_cast<int>(std::ceil((uMax - uMin) / width_));
  const LineRule rule = afeRule(lambda);
  const int n = kAFEDeg + 1;
  std::vector<double> xs(n);
  for (int k = 0; k < n; ++k) xs[k] = std::cos(kPi * (k + 0.5) / n);
  panels_.resize(np);
  std::vector<cplx> f(n);
  for (int p = 0; p < np; ++p) {
    const double a = uMin + p * width_;
    for (int k = 0; k < n; ++k) {
      const double u = a + 0.5 * width_ * (xs[k] + 1.0);
      cplx s = 0.0;
      for (std::size_t j = 0; j < rule.w.size(); ++j) s += rule.weight[j] * std::exp(-rule.w[j] * u);
      f[k] = s;
    }
    auto& c = panels_[p].c;
    c.assign(n, 0.0);
    for (int j = 0; j < n; ++j) {
      cplx acc = 0.0;
      for (int k = 0; k < n; ++k) acc += f[k] * std::cos(kPi * j * (k + 0.5) / n);
      c[j] = acc * (2.0 / n);
    }
    c[0] *= 0.5;
  }
}

cplx DivisorAFEKernel::operator()(double x) const {
  const double u = std::log(x);
  int p = static_cast<int>(std::floor((u - uMin_) / width_));
  if (p < 0 || p >= static_cast<int>(panels_.size())) {
    // tolerate rounding at the two ends
    if (p == -1 && u > uMin_ - 1e-12) p = 0;
    else if (p == static_cast<int>(panels_.size()) && u < uMin_ + p * width_ + 1e-12) --p;
    else throw DomainError("kernel argument outside its tabulated range");
  }
  const double t = 2.0 * (u - (uMin_ + p * width_)) / width_ - 1.0;
  const auto& c = panels_[p].c;
  cplx b1 = 0.0, b2 = 0.0;
  for (int k = kAFEDeg; k >= 1; --k) {
    const cplx b0 = 2.0 * t * b1 - b2 + c[k];
    b2 = b1;
    b1 = b0;
  }
  return t * b1 - b2 + c[0];
}

cplx DivisorAFEKernel::direct(cplx lambda, double x, double tol) {
  quad::ContourSpec spec;
  spec.sigma = kAFEAbscissa;
  spec.heightCutoff = kAFEHeight;
  spec.tol = tol;
  spec.freqHint = std::abs(std::log(x)) + 2.0 * kAFEAbscissa + std::abs(lambda.imag());
  const double lx = std::log(x);
  return quad::verticalLine([&](cplx w) { return std::exp(-w * lx + w * w) * zetaC(1.0 - lambda + w) / w; }, spec);
}

double DivisorAFEKernel::bound(double x) {
  // shift to Re w = log(x)/2
  const double u = std::log(x);
  if (!(u > 0.0)) throw DomainError("kernel bound needs x > 1");
  return std::exp(-0.25 * u * u) * zetaC(1.0 + 0.5 * u).real() / (u * std::sqrt(kPi));
}

DivisorAFEResult divisorAFEDetailed(i64 m, double T, double tol) {
  if (m < 1) throw DomainError("divisor AFE needs m >= 1");
  if (T < 0.0) throw DomainError("divisor AFE needs T >= 0");
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
  const std::vector<i64> dm = divisors(m);
  double sigma1 = 0.0;
  for (i64 d : dm) sigma1 += static_cast<double>(d);
  // tail of both l-sums beyond l = sqrt(m) e^{u}
  auto tail = [&](double u) {
    return 2.0 * sigma1 * zetaC(1.0 + 0.5 * u).real() * std::exp(-0.25 * u * u) * 2.0 / (u * u * std::sqrt(kPi));
  };
  double u0 = 0.5;
  while (tail(u0) > 0.5 * tol) {
    u0 += 0.01;
    if (u0 > 40.0) throw PrecisionError("divisor AFE tolerance unreachable");
  }
  const double sm = std::sqrt(static_cast<double>(m));
  const double Lreal = std::ceil(sm * std::exp(u0));
  if (Lreal > kAFEMaxTerms)
    throw PrecisionError("divisor AFE truncation exceeds the series-term budget");
  const i64 L = static_cast<i64>(Lreal);
  const double uMin = -std::log(sm) - 1e-9, uMax = std::log(static_cast<double>(L) / sm) + 1e-9;
  const DivisorAFEKernel fPlus(cplx(0, 2 * T), uMin, uMax), fMinus(cplx(0, -2 * T), uMin, uMax);
  const FactorTable ft(L);
  cplx s1 = 0.0, s2 = 0.0;
  for (i64 l = 1; l <= L; ++l) {
    i64 c = 0;
    for (i64 d : dm) {
      if (l % d == 0) c += d * (l == d ? 1 : ft.mobius(l / d));
    }
    if (c == 0) continue;
    const double ll = std::log(static_cast<double>(l));
    const double x = static_cast<double>(l) / sm;
    const cplx ph(std::cos(2 * T * ll), std::sin(2 * T * ll));
    s1 += static_cast<double>(c) / static_cast<double>(l) * ph * fPlus(x);
    s2 += static_cast<double>(c) / static_cast<double>(l) * std::conj(ph) * fMinus(x);
  }
  const double lm = std::log(static_cast<double>(m));
  const cplx mp(std::cos(T * lm), -std::sin(T * lm));  // m^{-iT}
  const cplx v = mp * s1 + std::conj(mp) * s2;
  return {v.real(), v.imag(), L, tail(u0)};
}

cplx divisorAFE(i64 m, double T, double tol) {
  const auto r = divisorAFEDetailed(m, T, tol);
  return {r.value, r.imagPart};
}

// --- van der Corput variant -------------------------------------------------

VdcResult vdcInequality(const std::vector<cplx>& coeffs, double t, i64 first) {
  if (coeffs.empty()) throw DomainError("coefficient window must be nonempty");
  cplx g = 0.0;
  double mass = 0.0;
  for (std::size_t j = 0; j < coeffs.size(); ++j) {
    const double ph = kTwoPi * static_cast<double>(first + static_cast<i64>(j)) * t;
    g += coeffs[j] * cplx(std::cos(ph), std::sin(ph));
    mass += std::norm(coeffs[j]);
  }
  return {std::norm(g), static_cast<double>(coeffs.size()) * mass};
}

}  // namespace qlab::arith
