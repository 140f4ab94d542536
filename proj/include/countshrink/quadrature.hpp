#pragma once

#include <cstddef>
#include <functional>

namespace countshrink {

struct QuadOptions {
  double rel_tol = 1e-10;
  // Maximum bisection depth for each adaptive Gauss-Kronrod piece.
  unsigned max_depth = 15;
  // Range scanned for the maximum of the log integrand.
  double scan_lo = -60.0;
  double scan_hi = 60.0;
  double scan_step = 0.05;
  // Pieces laid out on each side of the mode before giving up.
  std::size_t max_pieces = 400;
};

struct QuadResult {
  double value = 0.0;
  double abs_error = 0.0;
  std::size_t evaluations = 0;
};

// Adaptive Gauss-Kronrod on a finite interval. Throws NumericalError when the
// error estimate misses rel_tol.
QuadResult integrate_interval(const std::function<double(double)>& f, double lo, double hi,
                              const QuadOptions& opts = {});

struct LogQuadResult {
  // log of the integral.
  double log_value = 0.0;
  double rel_error = 0.0;
  // Location and height of the integrand's maximum.
  double mode = 0.0;
  double log_peak = 0.0;
  std::size_t evaluations = 0;
};

// log of the integral over the real line of exp(log_f(s)). The integrand must
// be unimodal-ish and integrable; it is evaluated as exp(log_f - log_peak) so
// extreme magnitudes do not overflow. Pieces grow geometrically outward from the
// mode until their contribution is negligible.
LogQuadResult integrate_log_real_line(const std::function<double(double)>& log_f,
                                      const QuadOptions& opts = {});

}  // namespace countshrink
