#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "pesinlab/systems.hpp"

namespace pesinlab {

enum class Space { circle, torus };

// Continuous observable on the circle. `lip` is a Lipschitz bound used for the
// Cantor-quadrature error estimate; `k_constant` marks observables that take a
// single exact value at every realized skeleton K-point (the example maps have
// derivative exactly 2 there), letting those integrals bypass quadrature.
struct Observable {
  std::function<double(double)> f;
  double lip = 0.0;
  std::optional<double> k_constant;
  std::vector<double> breakpoints;  // quadrature split points

  double operator()(double x) const { return f(x); }
};

// Torus observable, kept structured so product measures can factorize.
struct Observable2 {
  enum class Kind { separable, marginal_sum };
  Kind kind = Kind::separable;
  Observable a, b;

  double operator()(double x, double y) const {
    return kind == Kind::separable ? a(x) * b(y) : a(x) + b(y);
  }
};

// phi_{2m-1}(x) = (1 + cos(pi m x))/2, phi_{2m}(x) = (1 + sin(pi m x))/2;
// ranges inside [0,1], dense span on C0 of the circle.
Observable harmonic(int i);  // i >= 1

Observable psi_observable(const BuiltSystem& sys);        // -log f'
Observable log_deriv_observable(const BuiltSystem& sys);  // +log f'
Observable2 psi_observable2(const BuiltSystem& torus_sys);
Observable2 log_det_observable2(const BuiltSystem& torus_sys);

// The weak* metric of the bound system:
//   dist*(mu, nu) = sum_i 2^{-i} |int phi_i dmu - int phi_i dnu|,
// phi_0 = psi, truncated at n_terms with tail bound 2^{-(n_terms-1)}.
// cb_depth fixes the quadrature depth used for CantorBernoulli measures inside
// the metric so that all representations of mu_K share one integral vector
// (this keeps the metric axioms exact on representations).
struct ObservableFamily {
  Space space = Space::circle;
  int n_terms = 33;
  int cb_depth = 16;
  std::vector<Observable> phi;    // circle families
  std::vector<Observable2> phi2;  // torus families

  double tail_bound() const;
  int size() const { return n_terms; }
};

ObservableFamily make_family(const BuiltSystem& sys, int n_terms = 33, int cb_depth = 16);

}  // namespace pesinlab
