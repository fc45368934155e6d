#include "uavmec/lambert_w.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace uavmec {

namespace {

double initial_guess(double x) {
  if (x < 0.5) return x * (1.0 - x + 1.5 * x * x);
  if (x < 3.0) return std::log1p(x) * (1.0 - std::log1p(std::log1p(x)) / (2.0 + std::log1p(x)));
  const double l1 = std::log(x);
  const double l2 = std::log(l1);
  return l1 - l2 + l2 / l1;
}

}  // namespace

LambertResult lambert_w0(double x) {
  if (!(x >= 0.0) || !std::isfinite(x)) throw std::domain_error("lambert_w0: argument must be finite and >= 0");
  if (x == 0.0) return {0.0, 0.0};

  constexpr double eps = std::numeric_limits<double>::epsilon();
  double w = initial_guess(x);
  for (int it = 0; it < 50; ++it) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    const double wp1 = w + 1.0;
    const double step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
    w -= step;
    if (std::abs(step) <= 2.0 * eps * std::max(1.0, std::abs(w))) {
      // one more Newton polish from the converged point
      const double e2 = std::exp(w);
      w -= (w * e2 - x) / (e2 * (w + 1.0));
      return {w, std::abs(w * std::exp(w) - x) / x};
    }
  }
  throw std::runtime_error("lambert_w0: no convergence within 50 iterations");
}

}  // namespace uavmec
