#pragma once

namespace uavmec {

struct LambertResult {
  double w = 0.0;
  double residual = 0.0;  // |w e^w - x| / x, 0 at x = 0
};

/// Principal branch W0 on [0, inf). Negative or non-finite arguments throw
/// std::domain_error; failure to converge in 50 Halley steps throws
/// std::runtime_error.
LambertResult lambert_w0(double x);

}  // namespace uavmec
