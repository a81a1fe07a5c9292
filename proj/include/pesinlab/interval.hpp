#pragma once

namespace pesinlab {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double len() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
  bool contains(double x) const { return x >= lo && x <= hi; }
  bool contains_open(double x) const { return x > lo && x < hi; }
  // half-open membership, the tie-to-the-right convention
  bool contains_half(double x) const { return x >= lo && x < hi; }
};

}  // namespace pesinlab
