#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace pesinlab {

// Neumaier compensated accumulator. Used wherever the artifact promises
// order-stable sums (empirical weights, Birkhoff means, entropy sums).
struct NeumaierSum {
  double s = 0.0;
  double c = 0.0;

  void add(double x) {
    const double t = s + x;
    if (std::abs(s) >= std::abs(x))
      c += (s - t) + x;
    else
      c += (x - t) + s;
    s = t;
  }
  double value() const { return s + c; }
};

inline double ksum(std::span<const double> xs) {
  NeumaierSum acc;
  for (double x : xs) acc.add(x);
  return acc.value();
}

}  // namespace pesinlab
