#pragma once

namespace pesinlab {

// One monotone expanding piece of a circle map. Domain [x_lo, x_hi] in circle
// coordinates; image [y_lo, y_hi] in lift coordinates (may leave [-1,1]).
//
// The derivative in the normalized coordinate t = (x - x_lo)/(x_hi - x_lo) is
//     p(t) = d_lo + (d_hi - d_lo) t + e t(1-t),
// with e = 6(rho - (d_lo + d_hi)/2) chosen so that the average slope equals
// rho = (y_hi - y_lo)/(x_hi - x_lo). Endpoint derivatives are exact and the
// map value is a closed-form cubic.
struct MonotonePiece {
  double x_lo = 0, x_hi = 0;
  double y_lo = 0, y_hi = 0;
  double d_lo = 0, d_hi = 0;
  double e_coeff = 0;

  double ratio() const { return (y_hi - y_lo) / (x_hi - x_lo); }
};

// Throws DegenerateInterval / RatioInfeasible (derivative would not stay > 1).
MonotonePiece make_piece(double x_lo, double x_hi, double y_lo, double y_hi,
                         double d_lo, double d_hi);

double piece_eval(const MonotonePiece& pc, double x);   // lift coordinate
double piece_deriv(const MonotonePiece& pc, double x);  // dy/dx

// Exact extrema of the quadratic derivative profile (vertex formula, no
// sampling). The *_on forms restrict to [a, b] intersected with the domain.
double piece_min_deriv(const MonotonePiece& pc);
double piece_max_deriv(const MonotonePiece& pc);
double piece_min_deriv_on(const MonotonePiece& pc, double a, double b);
double piece_max_deriv_on(const MonotonePiece& pc, double a, double b);

}  // namespace pesinlab
