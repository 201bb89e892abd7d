#include "qlab/quad.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>

#include "qlab/psi.hpp"

namespace qlab::quad {

namespace {

constexpr double kTwoPi = 2.0 * kPi;

// Gauss-Kronrod 7/15 on [-1,1].
constexpr std::array<double, 8> kXk = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                       0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                       0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                       0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWk = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                       0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                       0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                       0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                       0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  cplx value;
  double err;
  double absInt;
};

Panel gk15(const CplxFn& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const cplx fc = f(c);
  cplx k = fc * kWk[7];
  cplx g = fc * kWg[3];
  double ab = std::abs(fc) * kWk[7];
  for (int j = 0; j < 7; ++j) {
    const cplx f1 = f(c - h * kXk[j]);
    const cplx f2 = f(c + h * kXk[j]);
    k += (f1 + f2) * kWk[j];
    ab += (std::abs(f1) + std::abs(f2)) * kWk[j];
    if (j % 2 == 1) g += (f1 + f2) * kWg[j / 2];
  }
  return {k * h, std::abs((k - g) * h), ab * std::abs(h)};
}

// roundoff floor of the 15-point sum
double floorErr(const Panel& p) { return 64.0 * std::numeric_limits<double>::epsilon() * p.absInt; }

struct Piece {
  double a, b;
  int depth;
  Panel p;
};

std::vector<std::pair<double, double>> buildGaussLegendre(int n) {
  std::vector<std::pair<double, double>> rule(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    rule[i] = {x, 2.0 / ((1.0 - x * x) * dp * dp)};
  }
  return rule;
}

struct TanhSinhRule {
  // (1 - x_k, w_k) for k >= 0; symmetric.
  std::vector<std::pair<double, double>> nodes;
  double h;
};

TanhSinhRule buildTanhSinh(int level) {
  TanhSinhRule r;
  r.h = std::ldexp(1.0, -level);
  for (int k = 0;; ++k) {
    const double t = k * r.h;
    const double v = 0.5 * kPi * std::sinh(t);
    const double omx = 2.0 / (std::exp(2.0 * v) + 1.0);
    const double ch = std::cosh(v);
    const double w = 0.5 * kPi * std::cosh(t) / (ch * ch);
    if (w < 1e-20 || omx < 1e-300) break;
    r.nodes.push_back({omx, w});
  }
  return r;
}

const TanhSinhRule& tanhSinhRule(int level) {
  static const std::array<TanhSinhRule, 9> rules = [] {
    std::array<TanhSinhRule, 9> a;
    for (int l = 0; l < 9; ++l) a[l] = buildTanhSinh(l);
    return a;
  }();
  return rules[std::clamp(level, 0, 8)];
}

}  // namespace

const std::vector<std::pair<double, double>>& gaussLegendreRule(int order) {
  static const std::array<std::vector<std::pair<double, double>>, 129> rules = [] {
    std::array<std::vector<std::pair<double, double>>, 129> a;
    for (int n = 1; n <= 128; ++n) a[n] = buildGaussLegendre(n);
    return a;
  }();
  if (order < 1 || order > 128) throw DomainError("Gauss-Legendre order must be in [1, 128]");
  return rules[order];
}

// Global error control: the panel with the largest error is bisected until
// the summed error of unsettled panels is within tol.
Result integrateAdaptiveEx(const CplxFn& f, double a, double b, double tol, double freqHint, int maxDepth) {
  if (!(a < b)) throw DomainError("integration interval must satisfy a < b");
  int n0 = 1;
  if (freqHint > 0.0) n0 = std::max(1, static_cast<int>(std::ceil((b - a) * freqHint / kTwoPi / 2.5)));
  n0 = std::min(n0, 1 << 20);
  auto worse = [](const Piece& x, const Piece& y) { return x.p.err < y.p.err; };
  // settled: at the roundoff floor, or within its proportional share of tol
  auto settled = [&](const Piece& pc) {
    return pc.p.err <= floorErr(pc.p) || pc.p.err <= tol * (pc.b - pc.a) / (b - a);
  };
  std::vector<Piece> open, done;
  double openErr = 0.0;
  const double w = (b - a) / n0;
  for (int i = 0; i < n0; ++i) {
    const double lo = a + i * w;
    const double hi = (i + 1 == n0) ? b : a + (i + 1) * w;
    Piece pc{lo, hi, 0, gk15(f, lo, hi)};
    if (settled(pc)) {
      done.push_back(pc);
    } else {
      openErr += pc.p.err;
      open.push_back(pc);
    }
  }
  std::make_heap(open.begin(), open.end(), worse);
  while (!open.empty() && openErr > tol) {
    std::pop_heap(open.begin(), open.end(), worse);
    const Piece pc = open.back();
    open.pop_back();
    openErr -= pc.p.err;
    if (pc.depth >= maxDepth) throw ConvergenceError("adaptive quadrature exceeded its subdivision cap");
    const double m = 0.5 * (pc.a + pc.b);
    for (const Piece& child : {Piece{pc.a, m, pc.depth + 1, gk15(f, pc.a, m)},
                               Piece{m, pc.b, pc.depth + 1, gk15(f, m, pc.b)}}) {
      if (settled(child)) {
        done.push_back(child);
      } else {
        openErr += child.p.err;
        open.push_back(child);
        std::push_heap(open.begin(), open.end(), worse);
      }
    }
    // keep the running sum from drifting below the true total
    if (openErr < 0.0) {
      openErr = 0.0;
      for (const Piece& q : open) openErr += q.p.err;
    }
  }
  done.insert(done.end(), open.begin(), open.end());
  std::sort(done.begin(), done.end(), [](const Piece& x, const Piece& y) { return x.a < y.a; });
  Result acc{0.0, 0.0};
  for (const Piece& q : done) {
    acc.value += q.p.value;
    acc.errorEstimate += q.p.err;
  }
  return acc;
}

cplx integrateAdaptive(const CplxFn& f, double a, double b, double tol, double freqHint) {
  return integrateAdaptiveEx(f, a, b, tol, freqHint).value;
}

double integrateAdaptiveReal(const RealFn& f, double a, double b, double tol, double freqHint) {
  return integrateAdaptiveEx([&](double x) { return cplx(f(x), 0.0); }, a, b, tol, freqHint).value.real();
}

cplx integrateToInfinity(const CplxFn& f, double a, double tol, const RealFn& envelope, double freqHint) {
  double lo = a;
  double width = std::max(std::abs(a), 1.0);
  cplx total = 0.0;
  for (int k = 0; k < 400; ++k) {
    const double hi = lo + width;
    total += integrateAdaptive(f, lo, hi, 0.25 * tol * std::ldexp(1.0, -std::min(k, 40)), freqHint);
    lo = hi;
    width *= 2.0;
    if (envelope(lo) * width < 0.1 * tol) return total;
  }
  throw ConvergenceError("semi-infinite integral did not reach its envelope cutoff");
}

cplx gaussLegendre(const CplxFn& f, double a, double b, int panels, int order) {
  const auto& rule = gaussLegendreRule(order);
  const double w = (b - a) / panels;
  cplx total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double c = a + (p + 0.5) * w, h = 0.5 * w;
    cplx s = 0.0;
    for (const auto& [x, wt] : rule) s += wt * f(c + h * x);
    total += s * h;
  }
  return total;
}

double tanhSinh(const RealFn& f, double a, double b, int level) {
  const TanhSinhRule& r = tanhSinhRule(level);
  const double h = 0.5 * (b - a);
  double s = r.nodes[0].second * f(0.5 * (a + b));
  for (std::size_t k = 1; k < r.nodes.size(); ++k) {
    const auto& [omx, w] = r.nodes[k];
    const double d = h * omx;
    s += w * (f(a + d) + f(b - d));
  }
  return s * h * r.h;
}

ContourSpec ContourSpec::fromEnvelope(double sigma, RealFn envelope, double tol, double freqHint) {
  auto tail = [&](double H) {
    return 2.0 * integrateToInfinity([&](double t) { return cplx(envelope(t), 0.0); }, H, 1e-3 * tol, envelope)
                     .real();
  };
  double H = 1.0;
  while (tail(H) > 0.5 * tol && H < 1e7) H *= 1.25;
  ContourSpec spec;
  spec.sigma = sigma;
  spec.heightCutoff = H;
  spec.tol = tol;
  spec.freqHint = freqHint;
  spec.envelope = std::move(envelope);
  return spec;
}

cplx verticalLine(const std::function<cplx(cplx)>& F, const ContourSpec& spec) {
  if (!(spec.heightCutoff > 0.0)) throw DomainError("contour height cutoff must be positive");
  auto g = [&](double t) {
    const cplx v = F(cplx(spec.sigma, t));
    if (spec.envelope) {
      const double bound = spec.envelope(std::abs(t));
      if (std::abs(v) > bound * (1.0 + 1e-9) + 1e-300) throw EnvelopeError("integrand exceeded its declared envelope");
    }
    return v;
  };
  const cplx I = integrateAdaptive(g, -spec.heightCutoff, spec.heightCutoff, spec.tol * kTwoPi, spec.freqHint);
  return I / kTwoPi;
}

cplx mellin(const TestFunctionPsi& psi, cplx s) {
  const double L = psi.logSupport();
  const double scale = std::exp(std::abs(s.real()) * L);
  return integrateAdaptive([&](double u) { return psi.atLog(u) * std::exp(s * u); }, -L, L, 1e-15 * scale,
                           std::abs(s.imag()));
}

double fundamentalDomain2D(const std::function<double(cplx)>& F, double yMax, double tol, double tailBeyond,
                           double freqHintX, double freqHintY) {
  const double yTop = std::max(yMax, 1.0);
  const double innerTol = 1e-2 * tol;
  // Part below y = 1: x outer, y inner from the unit circle.
  auto lowerSlice = [&](double x) {
    const double y0 = std::sqrt(1.0 - x * x);
    const double y1 = std::min(1.0, yMax);
    if (y1 <= y0) return 0.0;
    return integrateAdaptiveReal([&](double y) { return F(cplx(x, y)) / (y * y); }, y0, y1, innerTol, freqHintY);
  };
  double total = integrateAdaptiveReal(lowerSlice, -0.5, 0.5, 0.5 * tol, freqHintX);
  if (yMax > 1.0) {
    auto upperSlice = [&](double y) {
      return integrateAdaptiveReal([&](double x) { return F(cplx(x, y)); }, -0.5, 0.5, innerTol, freqHintX) / (y * y);
    };
    total += integrateAdaptiveReal(upperSlice, 1.0, yTop, 0.5 * tol, freqHintY);
  }
  return total + tailBeyond;
}

}  // namespace qlab::quad
