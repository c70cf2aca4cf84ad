#pragma once

#include <cmath>
#include <limits>

#include <boost/math/special_functions/erf.hpp>

#include "hdtest/error.hpp"

namespace hdtest::stats {

inline constexpr double kSqrt2 = 1.41421356237309504880;

/// Phi(x)
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

/// P(N(0,1) > x)
inline double normal_upper(double x) { return 0.5 * std::erfc(x / kSqrt2); }

/// z_c with P(N(0,1) > z_c) = c.
inline double normal_upper_quantile(double c) {
    require(c > 0.0 && c < 1.0, ErrorCode::BadArgument, "tail probability must lie in (0, 1)");
    return kSqrt2 * boost::math::erfc_inv(2.0 * c);
}

/// P(chi^2_1 > x)
inline double chi2_1_upper(double x) {
    if (!(x > 0.0)) return 1.0;
    return std::erfc(std::sqrt(0.5 * x));
}

/// (1 - c) quantile of chi^2_1.
inline double chi2_1_upper_quantile(double c) {
    const double z = normal_upper_quantile(0.5 * c);
    return z * z;
}

}  // namespace hdtest::stats
