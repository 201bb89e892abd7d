#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>

#include "qlab/specfun.hpp"

namespace qlab {

// Smooth test function on (0, inf) supported in [1/Y0, Y0], described in the
// logarithmic coordinate u = log y.
class TestFunctionPsi {
 public:
  using LogEval = std::function<double(double)>;           // u -> psi(e^u)
  using Derivative = std::function<double(double, int)>;   // (y, j) -> psi^{(j)}(y)

  TestFunctionPsi(double Y0, bool even, LogEval logEval, Derivative deriv);

  double Y0() const { return Y0_; }
  double logSupport() const { return L_; }
  bool isEven() const { return even_; }

  double operator()(double y) const;
  double atLog(double u) const;
  // j-th derivative in y, j <= 3
  double derivative(double y, int j) const;

  // psi~(s), memoised; safe for concurrent callers.
  cplx mellin(cplx s) const;

  TestFunctionPsi scaled(double lambda) const;
  // (psi(y) + psi(1/y)) / 2
  TestFunctionPsi evenPart() const;

 private:
  double Y0_, L_;
  bool even_;
  LogEval logEval_;
  Derivative deriv_;
  struct Cache {
    std::mutex m;
    std::map<std::pair<double, double>, cplx> values;
  };
  std::shared_ptr<Cache> cache_;
};

// Even bump C exp(-1/(1-v^2)), v = log y / log Y0, with int psi dy/y = 1.
TestFunctionPsi standardBump(double Y0);
// v times the same profile: psi(1/y) = -psi(y).
TestFunctionPsi oddBump(double Y0);

}  // namespace qlab
