#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "pesinlab/interval.hpp"
#include "pesinlab/piece.hpp"
#include "pesinlab/rng.hpp"

namespace pesinlab {

// The circle is [-1, 1] with -1 ~ 1 (circumference 2); all reductions are
// mod 2. Breakpoint ties resolve to the right-hand piece, x = 1 to the last.
double reduce_circle(double y);               // lift -> [-1, 1)
double circle_distance(double a, double b);   // wrap-aware |a - b|

// Coarse itinerary cells (half-open) labelling the map's dynamical branches;
// symbol index = position in the list. Builders order them so Cantor branches
// get symbols 0 and 1.
struct SymbolCell {
  Interval iv;
  std::string label;
};

struct CircleMap {
  std::vector<MonotonePiece> pieces;  // x-sorted, tiling [-1, 1]
  std::vector<SymbolCell> symbols;
  int degree = 0;
  double lambda = 0;  // exact min derivative over the circle
};

// Checks the tiling, computes lambda (closed-form per-piece minima) and the
// degree. Throws NotC0 if the tiling/degree bookkeeping is broken.
CircleMap assemble_circle_map(std::vector<MonotonePiece> pieces,
                              std::vector<SymbolCell> symbols, double tol = 1e-9);

struct ValidationReport {
  double c0_max = 0;   // worst circle-value mismatch at a breakpoint (incl. wrap)
  double c1_max = 0;   // worst one-sided derivative mismatch
  double lambda = 0;
  int degree = 0;
  double degree_residual = 0;
};

// Throws NotC0 / NotC1 / NotExpanding when the respective residual fails tol.
ValidationReport validate_circle_map(const CircleMap& map, double tol = 1e-9);

int piece_index(const CircleMap& map, double x);   // x in [-1, 1]
int symbol_index(const CircleMap& map, double x);

double map_eval(const CircleMap& map, double x);   // circle coordinate
double map_deriv(const CircleMap& map, double x);

// Pure iteration of map_eval; n points starting at x0. Floating orbits of
// expanding maps are pseudo-orbits of the true dynamics.
std::vector<double> orbit(const CircleMap& map, double x0, int n);
std::vector<int> itinerary(const CircleMap& map, double x0, int n);

// Dithered iteration for Monte Carlo statistics: after each step the point is
// shifted by a seeded perturbation of size ~2^-48. Exact dyadic slopes would
// otherwise collapse float orbits onto fixed points within ~50 steps.
constexpr double kOrbitDither = 0x1.0p-48;
double pseudo_step(const CircleMap& map, double x, RngStream& rng);
std::vector<double> pseudo_orbit(const CircleMap& map, double x0, int n, RngStream& rng);

struct TorusMap {
  std::shared_ptr<const CircleMap> f1, f2;
  double gamma() const { return f1->lambda < f2->lambda ? f1->lambda : f2->lambda; }
};

std::pair<double, double> torus_eval(const TorusMap& tm, std::pair<double, double> xy);
double torus_log_det(const TorusMap& tm, std::pair<double, double> xy);

}  // namespace pesinlab
