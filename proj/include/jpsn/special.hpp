#ifndef JPSN_SPECIAL_HPP
#define JPSN_SPECIAL_HPP

#include <cstddef>
#include <functional>

namespace jpsn {

/// Standard normal pdf.
double norm_pdf(double x);

/// Standard normal CDF, full double range.
double norm_cdf(double x);

/// log of the standard normal CDF; stays finite far into the left tail.
double log_norm_cdf(double x);

/// Inverse standard normal CDF (Wichura's AS 241, double precision).
double norm_quantile(double p);

/// log I0(x), the modified Bessel function of order zero, without overflow.
double log_bessel_i0(double x);

/// Integrate f over [a, b] with composite 20-point Gauss-Legendre panels.
double gauss_legendre(const std::function<double(double)>& f, double a,
                      double b, int panels = 16);

}  // namespace jpsn

#endif  // JPSN_SPECIAL_HPP
