#include "pesinlab/observables.hpp"

#include <cmath>

#include "pesinlab/errors.hpp"
#include "pesinlab/textio.hpp"

namespace pesinlab {

namespace {
constexpr double kPi = 3.14159265358979323846;

std::vector<double> piece_breakpoints(const CircleMap& map) {
  std::vector<double> bs;
  bs.reserve(map.pieces.size() + 1);
  for (const auto& pc : map.pieces) bs.push_back(pc.x_lo);
  bs.push_back(1.0);
  return bs;
}
}  // namespace

Observable harmonic(int i) {
  if (i < 1) fail(Err::out_of_domain, "harmonic index must be >= 1");
  const int m = (i + 1) / 2;
  const double w = kPi * m;
  Observable obs;
  if (i % 2 == 1)
    obs.f = [w](double x) { return 0.5 * (1.0 + std::cos(w * x)); };
  else
    obs.f = [w](double x) { return 0.5 * (1.0 + std::sin(w * x)); };
  obs.lip = 0.5 * w;
  return obs;
}

Observable psi_observable(const BuiltSystem& sys) {
  if (sys.is_torus()) fail(Err::domain_mismatch, "psi_observable needs a circle system");
  auto map = sys.map;
  Observable obs;
  obs.f = [map](double x) { return -std::log(map_deriv(*map, x)); };
  obs.k_constant = -sys.log_deriv_on_K;
  obs.breakpoints = piece_breakpoints(*map);
  return obs;
}

Observable log_deriv_observable(const BuiltSystem& sys) {
  if (sys.is_torus()) fail(Err::domain_mismatch, "log_deriv_observable needs a circle system");
  auto map = sys.map;
  Observable obs;
  obs.f = [map](double x) { return std::log(map_deriv(*map, x)); };
  obs.k_constant = sys.log_deriv_on_K;
  obs.breakpoints = piece_breakpoints(*map);
  return obs;
}

Observable2 psi_observable2(const BuiltSystem& sys) {
  if (!sys.is_torus()) fail(Err::domain_mismatch, "psi_observable2 needs a torus system");
  Observable2 obs;
  obs.kind = Observable2::Kind::marginal_sum;
  obs.a = psi_observable(*sys.left);
  obs.b = psi_observable(*sys.right);
  return obs;
}

Observable2 log_det_observable2(const BuiltSystem& sys) {
  if (!sys.is_torus()) fail(Err::domain_mismatch, "log_det_observable2 needs a torus system");
  Observable2 obs;
  obs.kind = Observable2::Kind::marginal_sum;
  obs.a = log_deriv_observable(*sys.left);
  obs.b = log_deriv_observable(*sys.right);
  return obs;
}

double ObservableFamily::tail_bound() const { return std::ldexp(1.0, -(n_terms - 1)); }

ObservableFamily make_family(const BuiltSystem& sys, int n_terms, int cb_depth) {
  if (n_terms < 2) fail(Err::config, "family needs at least psi and one harmonic");
  ObservableFamily fam;
  fam.n_terms = n_terms;
  fam.cb_depth = cb_depth;
  if (!sys.is_torus()) {
    fam.space = Space::circle;
    fam.phi.reserve(static_cast<std::size_t>(n_terms));
    fam.phi.push_back(psi_observable(sys));
    for (int i = 1; i < n_terms; ++i) fam.phi.push_back(harmonic(i));
  } else {
    fam.space = Space::torus;
    fam.phi2.reserve(static_cast<std::size_t>(n_terms));
    fam.phi2.push_back(psi_observable2(sys));
    // diagonal enumeration of products of circle harmonics
    int emitted = 1;
    for (int s = 2; emitted < n_terms; ++s) {
      for (int a = 1; a < s && emitted < n_terms; ++a) {
        Observable2 obs;
        obs.kind = Observable2::Kind::separable;
        obs.a = harmonic(a);
        obs.b = harmonic(s - a);
        fam.phi2.push_back(std::move(obs));
        ++emitted;
      }
    }
  }
  return fam;
}

}  // namespace pesinlab
