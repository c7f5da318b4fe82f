#pragma once

// Reproducible replacements for the libm functions used in scoring and
// sampling. System exp/log are only accurate to within a platform-dependent
// ulp, which is enough to change 17-digit model files and sampled predictions
// between machines. These use fixed-order polynomial evaluation only, so the
// same inputs give bit-identical outputs everywhere (compile with
// -ffp-contract=off, see the top-level CMakeLists).

#include <cmath>
#include <cstdint>
#include <limits>

namespace wordorder {

inline constexpr double kLn2 = 0.6931471805599453094172321214581766;
inline constexpr double kLog2E = 1.4426950408889634073599246810018921;

// Natural log for finite x > 0.
inline double det_log(double x) {
  if (x <= 0.0 || !std::isfinite(x)) {
    if (x == 0.0) return -std::numeric_limits<double>::infinity();
    return std::numeric_limits<double>::quiet_NaN();
  }
  int e = 0;
  double m = std::frexp(x, &e);  // m in [0.5, 1)
  if (m < 0.70710678118654752440) {
    m *= 2.0;
    e -= 1;
  }
  // log(m) = 2*atanh(r) with r = (m-1)/(m+1), |r| <= 0.1716
  const double r = (m - 1.0) / (m + 1.0);
  const double r2 = r * r;
  double s = 1.0 / 21.0;
  s = s * r2 + 1.0 / 19.0;
  s = s * r2 + 1.0 / 17.0;
  s = s * r2 + 1.0 / 15.0;
  s = s * r2 + 1.0 / 13.0;
  s = s * r2 + 1.0 / 11.0;
  s = s * r2 + 1.0 / 9.0;
  s = s * r2 + 1.0 / 7.0;
  s = s * r2 + 1.0 / 5.0;
  s = s * r2 + 1.0 / 3.0;
  s = s * r2 + 1.0;
  return static_cast<double>(e) * kLn2 + 2.0 * r * s;
}

inline double det_log2(double x) { return det_log(x) * kLog2E; }

// exp for |x| within the double range; overflow saturates to +inf.
inline double det_exp(double x) {
  if (std::isnan(x)) return x;
  if (x > 709.782712893384) return std::numeric_limits<double>::infinity();
  if (x < -745.2) return 0.0;
  // Split off k*ln2 with a hi/lo constant pair so r stays accurate.
  const double kLn2Hi = 6.93147180369123816490e-01;
  const double kLn2Lo = 1.90821492927058770002e-10;
  const double kf = std::floor(x * kLog2E + 0.5);
  const int k = static_cast<int>(kf);
  const double r = (x - kf * kLn2Hi) - kf * kLn2Lo;  // |r| <= 0.3466
  double p = 1.0 / 6227020800.0;  // 1/13!
  p = p * r + 1.0 / 479001600.0;
  p = p * r + 1.0 / 39916800.0;
  p = p * r + 1.0 / 3628800.0;
  p = p * r + 1.0 / 362880.0;
  p = p * r + 1.0 / 40320.0;
  p = p * r + 1.0 / 5040.0;
  p = p * r + 1.0 / 720.0;
  p = p * r + 1.0 / 120.0;
  p = p * r + 1.0 / 24.0;
  p = p * r + 1.0 / 6.0;
  p = p * r + 1.0 / 2.0;
  p = p * r + 1.0;
  p = p * r + 1.0;
  return std::ldexp(p, k);
}

}  // namespace wordorder
