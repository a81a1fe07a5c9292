#include "pesinlab/circle_map.hpp"

#include <algorithm>
#include <cmath>

#include "pesinlab/errors.hpp"
#include "pesinlab/textio.hpp"

namespace pesinlab {

double reduce_circle(double y) {
  if (y >= -1.0 && y < 1.0) return y;
  double r = y - 2.0 * std::floor((y + 1.0) * 0.5);
  // guard against r == 1 from rounding at the seam
  if (r >= 1.0) r -= 2.0;
  if (r < -1.0) r += 2.0;
  return r;
}

double circle_distance(double a, double b) {
  double d = std::abs(reduce_circle(a) - reduce_circle(b));
  return std::min(d, 2.0 - d);
}

CircleMap assemble_circle_map(std::vector<MonotonePiece> pieces,
                              std::vector<SymbolCell> symbols, double tol) {
  if (pieces.empty()) fail(Err::not_c0, "no pieces");
  std::sort(pieces.begin(), pieces.end(),
            [](const MonotonePiece& a, const MonotonePiece& b) { return a.x_lo < b.x_lo; });
  if (std::abs(pieces.front().x_lo - (-1.0)) > tol || std::abs(pieces.back().x_hi - 1.0) > tol)
    fail(Err::not_c0, "pieces do not span [-1,1]");
  for (std::size_t i = 0; i + 1 < pieces.size(); ++i)
    if (std::abs(pieces[i].x_hi - pieces[i + 1].x_lo) > tol)
      fail(Err::not_c0, "pieces do not tile at x=" + fmt_double(pieces[i].x_hi));

  CircleMap map;
  map.pieces = std::move(pieces);
  map.symbols = std::move(symbols);

  double rise = 0.0, lambda = map.pieces.front().d_lo;
  for (const auto& pc : map.pieces) {
    rise += pc.y_hi - pc.y_lo;
    lambda = std::min(lambda, piece_min_deriv(pc));
  }
  const double deg = rise / 2.0;
  map.degree = static_cast<int>(std::lround(deg));
  if (std::abs(deg - map.degree) > tol)
    fail(Err::not_c0, "total winding " + fmt_double(deg) + " is not an integer");
  map.lambda = lambda;
  return map;
}

ValidationReport validate_circle_map(const CircleMap& map, double tol) {
  ValidationReport rep;
  const auto& ps = map.pieces;
  double rise = 0.0;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    rise += ps[i].y_hi - ps[i].y_lo;
    const auto& next = ps[(i + 1) % ps.size()];
    rep.c0_max = std::max(rep.c0_max, circle_distance(ps[i].y_hi, next.y_lo));
    rep.c1_max = std::max(rep.c1_max, std::abs(ps[i].d_hi - next.d_lo));
  }
  rep.lambda = map.lambda;
  rep.degree = map.degree;
  rep.degree_residual = std::abs(rise / 2.0 - map.degree);
  if (rep.c0_max > tol)
    fail(Err::not_c0, "value mismatch " + fmt_double(rep.c0_max) + " > tol");
  if (rep.c1_max > tol)
    fail(Err::not_c1, "derivative mismatch " + fmt_double(rep.c1_max) + " > tol");
  if (!(rep.lambda > 1.0))
    fail(Err::not_expanding, "lambda = " + fmt_double(rep.lambda));
  return rep;
}

int piece_index(const CircleMap& map, double x) {
  if (x < -1.0 || x > 1.0)
    fail(Err::out_of_domain, "x=" + fmt_double(x) + " outside [-1,1]");
  const auto& ps = map.pieces;
  // first piece whose x_lo exceeds x, minus one: ties go right, x=1 -> last
  std::size_t lo = 0, hi = ps.size();
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (ps[mid].x_lo <= x)
      lo = mid + 1;
    else
      hi = mid;
  }
  return static_cast<int>(lo == 0 ? 0 : lo - 1);
}

int symbol_index(const CircleMap& map, double x) {
  const double xr = x == 1.0 ? 1.0 : reduce_circle(x);
  for (std::size_t i = 0; i < map.symbols.size(); ++i)
    if (map.symbols[i].iv.contains_half(xr)) return static_cast<int>(i);
  // x == 1 (or the seam): the cell owning the right edge
  for (std::size_t i = 0; i < map.symbols.size(); ++i)
    if (map.symbols[i].iv.hi == 1.0) return static_cast<int>(i);
  fail(Err::domain_mismatch, "no symbol cell contains x=" + fmt_double(x));
}

namespace {
double eval_in_piece(const MonotonePiece& pc, double x) {
  // clamp: tiling tolerance can leave x one ulp outside the chosen piece
  if (x <= pc.x_lo) return pc.y_lo;
  if (x >= pc.x_hi) return pc.y_hi;
  return piece_eval(pc, x);
}
}  // namespace

double map_eval(const CircleMap& map, double x) {
  const auto& pc = map.pieces[static_cast<std::size_t>(piece_index(map, x))];
  return reduce_circle(eval_in_piece(pc, x));
}

double map_deriv(const CircleMap& map, double x) {
  const auto& pc = map.pieces[static_cast<std::size_t>(piece_index(map, x))];
  if (x <= pc.x_lo) return pc.d_lo;
  if (x >= pc.x_hi) return pc.d_hi;
  return piece_deriv(pc, x);
}

std::vector<double> orbit(const CircleMap& map, double x0, int n) {
  if (n < 1) fail(Err::out_of_domain, "orbit length must be >= 1");
  std::vector<double> xs(static_cast<std::size_t>(n));
  double x = reduce_circle(x0);
  for (int i = 0; i < n; ++i) {
    xs[static_cast<std::size_t>(i)] = x;
    if (i + 1 < n) x = map_eval(map, x);
  }
  return xs;
}

std::vector<int> itinerary(const CircleMap& map, double x0, int n) {
  if (n < 1) fail(Err::out_of_domain, "itinerary length must be >= 1");
  std::vector<int> ws(static_cast<std::size_t>(n));
  double x = reduce_circle(x0);
  for (int i = 0; i < n; ++i) {
    ws[static_cast<std::size_t>(i)] = symbol_index(map, x);
    if (i + 1 < n) x = map_eval(map, x);
  }
  return ws;
}

double pseudo_step(const CircleMap& map, double x, RngStream& rng) {
  double y = map_eval(map, x) + (rng.u01() - 0.5) * kOrbitDither;
  if (y < -1.0) y += 2.0;
  if (y >= 1.0) y -= 2.0;
  return y;
}

std::vector<double> pseudo_orbit(const CircleMap& map, double x0, int n, RngStream& rng) {
  if (n < 1) fail(Err::out_of_domain, "orbit length must be >= 1");
  std::vector<double> xs(static_cast<std::size_t>(n));
  double x = reduce_circle(x0);
  for (int i = 0; i < n; ++i) {
    xs[static_cast<std::size_t>(i)] = x;
    if (i + 1 < n) x = pseudo_step(map, x, rng);
  }
  return xs;
}

std::pair<double, double> torus_eval(const TorusMap& tm, std::pair<double, double> xy) {
  return {map_eval(*tm.f1, xy.first), map_eval(*tm.f2, xy.second)};
}

double torus_log_det(const TorusMap& tm, std::pair<double, double> xy) {
  return std::log(map_deriv(*tm.f1, xy.first)) + std::log(map_deriv(*tm.f2, xy.second));
}

}  // namespace pesinlab
