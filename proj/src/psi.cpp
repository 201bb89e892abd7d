#include "qlab/psi.hpp"

#include <array>
#include <cmath>

#include "qlab/quad.hpp"

namespace qlab {

TestFunctionPsi::TestFunctionPsi(double Y0, bool even, LogEval logEval, Derivative deriv)
    : Y0_(Y0), L_(std::log(Y0)), even_(even), logEval_(std::move(logEval)), deriv_(std::move(deriv)),
      cache_(std::make_shared<Cache>()) {
  if (!(Y0 > 1.0)) throw DomainError("support parameter Y0 must exceed 1");
}

double TestFunctionPsi::atLog(double u) const {
  if (std::abs(u) >= L_) return 0.0;
  return logEval_(u);
}

double TestFunctionPsi::operator()(double y) const {
  if (!(y > 0.0)) return 0.0;
  return atLog(std::log(y));
}

double TestFunctionPsi::derivative(double y, int j) const {
  if (j == 0) return (*this)(y);
  if (!deriv_) throw DomainError("test function has no derivative evaluator");
  if (!(y > 0.0) || std::abs(std::log(y)) >= L_) return 0.0;
  return deriv_(y, j);
}

cplx TestFunctionPsi::mellin(cplx s) const {
  const std::pair<double, double> key{s.real(), s.imag()};
  {
    std::lock_guard<std::mutex> lock(cache_->m);
    auto it = cache_->values.find(key);
    if (it != cache_->values.end()) return it->second;
  }
  const cplx v = quad::mellin(*this, s);
  std::lock_guard<std::mutex> lock(cache_->m);
  cache_->values.emplace(key, v);
  return v;
}

TestFunctionPsi TestFunctionPsi::scaled(double lambda) const {
  LogEval le = logEval_;
  Derivative d = deriv_;
  return TestFunctionPsi(
      Y0_, even_, [le, lambda](double u) { return lambda * le(u); },
      d ? Derivative([d, lambda](double y, int j) { return lambda * d(y, j); }) : Derivative{});
}

TestFunctionPsi TestFunctionPsi::evenPart() const {
  if (even_) return *this;
  LogEval le = logEval_;
  const double L = L_;
  auto at = [le, L](double u) { return std::abs(u) >= L ? 0.0 : le(u); };
  Derivative d = deriv_;
  Derivative dd;
  if (d) {
    dd = [d, L](double y, int j) {
      auto dj = [&](double x, int k) { return std::abs(std::log(x)) >= L ? 0.0 : d(x, k); };
      const double w = 1.0 / y;
      double reflected = 0.0;
      switch (j) {
        case 1: reflected = -dj(w, 1) * w * w; break;
        case 2: reflected = dj(w, 2) * std::pow(w, 4) + 2.0 * dj(w, 1) * std::pow(w, 3); break;
        case 3:
          reflected = -dj(w, 3) * std::pow(w, 6) - 6.0 * dj(w, 2) * std::pow(w, 5) - 6.0 * dj(w, 1) * std::pow(w, 4);
          break;
        default: throw DomainError("derivative order must be in [0, 3]");
      }
      return 0.5 * (dj(y, j) + reflected);
    };
  }
  return TestFunctionPsi(
      Y0_, true, [at](double u) { return 0.5 * (at(u) + at(-u)); }, dd);
}

namespace {

// Derivatives in v of exp(-1/(1-v^2)), orders 0..3.
std::array<double, 4> bumpProfile(double v) {
  const double r = 1.0 - v * v;
  const double b = std::exp(-1.0 / r);
  const double q1 = -2.0 * v / (r * r);
  const double q2 = -2.0 / (r * r) - 8.0 * v * v / (r * r * r);
  const double q3 = -24.0 * v / (r * r * r) - 48.0 * v * v * v / (r * r * r * r);
  return {b, q1 * b, (q2 + q1 * q1) * b, (q3 + 3.0 * q1 * q2 + q1 * q1 * q1) * b};
}

double bumpMass() {
  static const double m = quad::tanhSinh(
      [](double v) { return std::abs(v) < 1.0 ? std::exp(-1.0 / (1.0 - v * v)) : 0.0; }, -1.0, 1.0, 6);
  return m;
}

// y-derivatives of C*phi(log y / L) from v-derivatives of phi.
double chainY(const std::array<double, 4>& p, double L, double y, int j) {
  switch (j) {
    case 1: return p[1] / (L * y);
    case 2: return (p[2] / (L * L) - p[1] / L) / (y * y);
    case 3: return (p[3] / (L * L * L) - 3.0 * p[2] / (L * L) + 2.0 * p[1] / L) / (y * y * y);
    default: throw DomainError("derivative order must be in [0, 3]");
  }
}

}  // namespace

TestFunctionPsi standardBump(double Y0) {
  if (!(Y0 > 1.0)) throw DomainError("support parameter Y0 must exceed 1");
  const double L = std::log(Y0);
  const double C = 1.0 / (L * bumpMass());
  return TestFunctionPsi(
      Y0, true, [=](double u) { return C * bumpProfile(u / L)[0]; },
      [=](double y, int j) { return C * chainY(bumpProfile(std::log(y) / L), L, y, j); });
}

TestFunctionPsi oddBump(double Y0) {
  if (!(Y0 > 1.0)) throw DomainError("support parameter Y0 must exceed 1");
  const double L = std::log(Y0);
  const double C = 1.0 / (L * bumpMass());
  auto profile = [](double v) {
    const auto b = bumpProfile(v);
    return std::array<double, 4>{v * b[0], b[0] + v * b[1], 2.0 * b[1] + v * b[2], 3.0 * b[2] + v * b[3]};
  };
  return TestFunctionPsi(
      Y0, false, [=](double u) { return C * profile(u / L)[0]; },
      [=](double y, int j) { return C * chainY(profile(std::log(y) / L), L, y, j); });
}

}  // namespace qlab
