#include "pesinlab/piece.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pesinlab/errors.hpp"
#include "pesinlab/textio.hpp"

namespace pesinlab {

namespace {

double profile(const MonotonePiece& pc, double t) {
  return pc.d_lo + (pc.d_hi - pc.d_lo) * t + pc.e_coeff * t * (1.0 - t);
}

// extrema of p over [t0, t1] subset of [0, 1]
void profile_extrema_on(const MonotonePiece& pc, double t0, double t1,
                        double& mn, double& mx) {
  const double p0 = profile(pc, t0);
  const double p1 = profile(pc, t1);
  mn = std::min(p0, p1);
  mx = std::max(p0, p1);
  const double e = pc.e_coeff;
  if (e != 0.0) {
    // p(t) = -e t^2 + (dd + e) t + d_lo, vertex at t* = (dd + e) / (2e)
    const double ts = (pc.d_hi - pc.d_lo + e) / (2.0 * e);
    if (ts > t0 && ts < t1) {
      const double ps = profile(pc, ts);
      mn = std::min(mn, ps);
      mx = std::max(mx, ps);
    }
  }
}

}  // namespace

MonotonePiece make_piece(double x_lo, double x_hi, double y_lo, double y_hi,
                         double d_lo, double d_hi) {
  if (!(x_lo < x_hi) || !(y_lo < y_hi))
    fail(Err::degenerate_interval,
         "piece needs x_lo < x_hi and y_lo < y_hi, got x=[" + fmt_double(x_lo) + "," +
             fmt_double(x_hi) + "] y=[" + fmt_double(y_lo) + "," + fmt_double(y_hi) + "]");
  if (!(d_lo > 1.0) || !(d_hi > 1.0))
    fail(Err::ratio_infeasible, "endpoint derivatives must exceed 1, got d_lo=" +
                                    fmt_double(d_lo) + " d_hi=" + fmt_double(d_hi));
  MonotonePiece pc;
  pc.x_lo = x_lo;
  pc.x_hi = x_hi;
  pc.y_lo = y_lo;
  pc.y_hi = y_hi;
  pc.d_lo = d_lo;
  pc.d_hi = d_hi;
  const double rho = pc.ratio();
  pc.e_coeff = 6.0 * (rho - 0.5 * (d_lo + d_hi));
  const double mn = piece_min_deriv(pc);
  if (!(mn > 1.0))
    fail(Err::ratio_infeasible, "derivative profile dips to " + fmt_double(mn) +
                                    " <= 1 (average slope " + fmt_double(rho) + ")");
  return pc;
}

double piece_eval(const MonotonePiece& pc, double x) {
  if (x < pc.x_lo || x > pc.x_hi)
    fail(Err::out_of_domain, "x=" + fmt_double(x) + " outside [" + fmt_double(pc.x_lo) +
                                 "," + fmt_double(pc.x_hi) + "]");
  if (x == pc.x_lo) return pc.y_lo;
  if (x == pc.x_hi) return pc.y_hi;
  const double len = pc.x_hi - pc.x_lo;
  const double t = (x - pc.x_lo) / len;
  const double dd = pc.d_hi - pc.d_lo;
  const double e = pc.e_coeff;
  // T(t) = integral of p: d_lo t + (dd + e) t^2/2 - e t^3/3
  const double T = t * (pc.d_lo + t * (0.5 * (dd + e) - e * t / 3.0));
  return pc.y_lo + len * T;
}

double piece_deriv(const MonotonePiece& pc, double x) {
  if (x < pc.x_lo || x > pc.x_hi)
    fail(Err::out_of_domain, "x=" + fmt_double(x) + " outside [" + fmt_double(pc.x_lo) +
                                 "," + fmt_double(pc.x_hi) + "]");
  if (x == pc.x_lo) return pc.d_lo;
  if (x == pc.x_hi) return pc.d_hi;
  const double t = (x - pc.x_lo) / (pc.x_hi - pc.x_lo);
  return profile(pc, t);
}

double piece_min_deriv(const MonotonePiece& pc) {
  double mn, mx;
  profile_extrema_on(pc, 0.0, 1.0, mn, mx);
  return mn;
}

double piece_max_deriv(const MonotonePiece& pc) {
  double mn, mx;
  profile_extrema_on(pc, 0.0, 1.0, mn, mx);
  return mx;
}

double piece_min_deriv_on(const MonotonePiece& pc, double a, double b) {
  const double len = pc.x_hi - pc.x_lo;
  const double t0 = std::clamp((a - pc.x_lo) / len, 0.0, 1.0);
  const double t1 = std::clamp((b - pc.x_lo) / len, 0.0, 1.0);
  if (!(t0 < t1)) return profile(pc, t0);
  double mn, mx;
  profile_extrema_on(pc, t0, t1, mn, mx);
  return mn;
}

double piece_max_deriv_on(const MonotonePiece& pc, double a, double b) {
  const double len = pc.x_hi - pc.x_lo;
  const double t0 = std::clamp((a - pc.x_lo) / len, 0.0, 1.0);
  const double t1 = std::clamp((b - pc.x_lo) / len, 0.0, 1.0);
  if (!(t0 < t1)) return profile(pc, t0);
  double mn, mx;
  profile_extrema_on(pc, t0, t1, mn, mx);
  return mx;
}

}  // namespace pesinlab
