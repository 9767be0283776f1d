#pragma once

namespace poth {

/// Standard normal CDF, computed as erfc(-z / sqrt(2)) / 2.
///
/// Going through erfc rather than 1 + erf keeps full relative precision in the
/// lower tail; libm's erfc is accurate to a few ulp, well inside 1e-12.
double normal_cdf(double z) noexcept;

/// Two-sided p-value of a z statistic, erfc(|z| / sqrt(2)).
double two_sided_p(double z) noexcept;

}  // namespace poth
