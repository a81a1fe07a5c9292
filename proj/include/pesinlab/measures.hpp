#pragma once

#include <memory>
#include <string>
#include <vector>

#include "pesinlab/bowen.hpp"
#include "pesinlab/observables.hpp"
#include "pesinlab/systems.hpp"

namespace pesinlab {

// Tagged measure representation. Empirical and Dirac measures live on the
// circle or the torus (py used only on the torus); CantorBernoulli is the
// symbolic mu_K at a finite cylinder depth; Product pairs two circle measures.
class Measure {
 public:
  enum class Kind { empirical, cantor_bernoulli, dirac, lebesgue, product };

  Kind kind = Kind::lebesgue;
  Space space = Space::circle;
  std::string name;

  std::vector<double> px, py, w;  // empirical / dirac support
  std::shared_ptr<const BowenSkeleton> skel;
  int depth = 0;
  Interval seg{-1.0, 1.0};  // lebesgue support
  std::shared_ptr<const Measure> left, right;
};

Measure empirical_from_points(std::vector<double> xs, std::vector<double> ws);
Measure empirical_from_points2(std::vector<double> xs, std::vector<double> ys,
                               std::vector<double> ws);
// sigma_n(x0): equal weights 1/n on the first n orbit points (pure iteration).
Measure empirical_from_orbit(const CircleMap& map, double x0, int n);
Measure dirac(double x);
Measure dirac2(double x, double y);
Measure lebesgue(Interval seg = {-1.0, 1.0});
Measure cantor_bernoulli(std::shared_ptr<const BowenSkeleton> sk, int depth);
Measure product_measure(Measure a, Measure b);

// Convex mixture on empirical/dirac variants by weight concatenation. Support
// lists are kept verbatim up to 10^7 points; larger mixtures are thinned by a
// deterministic stride with per-side weight rescaling.
Measure mix(const Measure& a, const Measure& b, double lambda_a);

struct IntegralResult {
  double value = 0;
  double error_bound = 0;
};

// Exact weighted sums on empirical support; composite Gauss-Legendre with a
// 64->128 node Richardson error estimate on Lebesgue; left-endpoint cylinder
// quadrature with a Lipschitz error bound on CantorBernoulli (exact when the
// observable is K-constant). cb_depth_cap < 0 means "use the measure's depth".
IntegralResult integrate(const Measure& mu, const Observable& obs, int cb_depth_cap = -1);
IntegralResult integrate2(const Measure& mu, const Observable2& obs, int cb_depth_cap = -1);

// Integral vector against the family, CantorBernoulli capped at fam.cb_depth.
std::vector<double> family_integrals(const Measure& mu, const ObservableFamily& fam);

struct DistResult {
  double value = 0;
  double tail_bound = 0;
};

DistResult weak_star_dist(const Measure& mu, const Measure& nu, const ObservableFamily& fam);

// Forward image under the system's map. Empirical/Dirac move their support;
// CantorBernoulli shifts cylinders symbolically (depth-1 representation);
// Lebesgue is excluded by design.
Measure pushforward(const BuiltSystem& sys, const Measure& mu);

// Mass the measure assigns to a circle interval, by each variant's own rule
// (CantorBernoulli uses the same left-endpoint convention as integrate).
double mass_of_interval(const Measure& mu, const Interval& iv, int cb_depth_cap = -1);

}  // namespace pesinlab
