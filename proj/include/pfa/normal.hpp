#pragma once

namespace pfa {

/// Standard normal density.
double normal_pdf(double x);

/// Standard normal CDF. Relative accuracy better than 1e-13 for |x| <= 8;
/// below roughly 1e-300 the tail underflows to 0 rather than producing
/// denormal noise.
double normal_cdf(double x);

/// Inverse standard normal CDF for q in (0,1). Satisfies
/// normal_cdf(normal_quantile(q)) == q to well under 1e-10.
/// Throws DomainError outside (0,1).
double normal_quantile(double q);

}  // namespace pfa
