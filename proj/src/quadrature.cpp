#include "countshrink/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>

#include "countshrink/errors.hpp"

namespace countshrink {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

using Kronrod = boost::math::quadrature::gauss_kronrod<double, 31>;

struct Piece {
  double value = 0.0;
  double error = 0.0;
};

// Bisects until the Kronrod error estimate is below max(rel_tol * |piece|, floor).
// Unlike the library's own recursion, the absolute floor lets negligible tail
// pieces stop early.
template <class F>
Piece adaptive_piece(const F& f, double lo, double hi, double rel_tol, double floor,
                     unsigned depth) {
  Piece p;
  p.value = Kronrod::integrate(f, lo, hi, 0, 0.0, &p.error);
  if (depth == 0 || p.error <= std::max(rel_tol * std::abs(p.value), floor)) return p;
  const double mid = 0.5 * (lo + hi);
  const Piece left = adaptive_piece(f, lo, mid, rel_tol, 0.5 * floor, depth - 1);
  const Piece right = adaptive_piece(f, mid, hi, rel_tol, 0.5 * floor, depth - 1);
  return {left.value + right.value, left.error + right.error};
}

}  // namespace

QuadResult integrate_interval(const std::function<double(double)>& f, double lo, double hi,
                              const QuadOptions& opts) {
  QuadResult out;
  auto counted = [&](double x) {
    ++out.evaluations;
    return f(x);
  };
  double l1 = 0.0;
  out.value = Kronrod::integrate(counted, lo, hi, opts.max_depth, opts.rel_tol, &out.abs_error, &l1);
  if (!std::isfinite(out.value)) throw NumericalError("non-finite integral", out.abs_error);
  if (out.abs_error > opts.rel_tol * std::max(l1, std::numeric_limits<double>::min()) &&
      out.abs_error > 1e3 * std::numeric_limits<double>::epsilon() * l1) {
    throw NumericalError("Gauss-Kronrod did not converge", out.abs_error / std::max(l1, 1e-300));
  }
  return out;
}

LogQuadResult integrate_log_real_line(const std::function<double(double)>& log_f,
                                      const QuadOptions& opts) {
  LogQuadResult out;

  // Coarse scan for the maximum, then Brent refinement.
  double best_s = opts.scan_lo;
  double best = kNegInf;
  for (double s = opts.scan_lo; s <= opts.scan_hi; s += opts.scan_step) {
    const double v = log_f(s);
    ++out.evaluations;
    if (v > best) {
      best = v;
      best_s = s;
    }
  }
  if (!(best > kNegInf) || std::isnan(best)) {
    throw NumericalError("log integrand is -inf across the scan range", 1.0);
  }
  const auto refined = boost::math::tools::brent_find_minima(
      [&](double s) {
        ++out.evaluations;
        const double v = log_f(s);
        return std::isnan(v) ? std::numeric_limits<double>::infinity() : -v;
      },
      best_s - opts.scan_step, best_s + opts.scan_step, 52);
  if (-refined.second > best) {
    best = -refined.second;
    best_s = refined.first;
  }
  out.mode = best_s;
  out.log_peak = best;

  // Curvature-based width for the first piece.
  const double h = 1e-3;
  const double curv = (log_f(best_s + h) - 2.0 * best + log_f(best_s - h)) / (h * h);
  out.evaluations += 2;
  double width = (curv < 0.0 && std::isfinite(curv)) ? 1.0 / std::sqrt(-curv) : 1.0;
  width = std::clamp(width, 1e-6, 1.0);

  auto scaled = [&](double s) {
    ++out.evaluations;
    const double v = log_f(s);
    return std::isfinite(v) ? std::exp(v - best) : 0.0;
  };

  QuadOptions piece_opts = opts;
  piece_opts.rel_tol = opts.rel_tol * 0.1;

  double total = 0.0;
  double err = 0.0;
  for (int direction : {+1, -1}) {
    double edge = best_s;
    double w = width;
    std::size_t quiet = 0;
    std::size_t pieces = 0;
    for (;;) {
      const double next = edge + direction * w;
      const double lo = std::min(edge, next);
      const double hi = std::max(edge, next);
      // Absolute floor from the mass found so far; the scaled peak is 1, so the
      // first piece width stands in for it before anything has accumulated.
      const double floor = piece_opts.rel_tol * 0.1 * std::max(total, width);
      const auto p = adaptive_piece(scaled, lo, hi, piece_opts.rel_tol, floor, opts.max_depth);
      const double piece = p.value;
      total += piece;
      err += p.error;
      edge = next;
      ++pieces;
      if (piece <= opts.rel_tol * 1e-3 * total) {
        if (++quiet >= 3) break;
      } else {
        quiet = 0;
      }
      if (pieces >= opts.max_pieces) {
        throw NumericalError("integrand tail did not decay within the piece limit",
                             piece / std::max(total, 1e-300));
      }
      // Geometric growth once the mode neighbourhood is covered.
      if (pieces >= 8) w *= 2.0;
    }
  }
  if (!(total > 0.0) || !std::isfinite(total)) throw NumericalError("degenerate integral", 1.0);
  out.rel_error = err / total;
  if (out.rel_error > opts.rel_tol) {
    throw NumericalError("log-scale quadrature missed its tolerance", out.rel_error);
  }
  out.log_value = best + std::log(total);
  return out;
}

}  // namespace countshrink
