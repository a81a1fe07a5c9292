#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pesinlab/interval.hpp"
#include "pesinlab/rng.hpp"

namespace pesinlab {

// Itinerary word over {0, 1}, chars '0'/'1'.
using Word = std::string;
bool word_valid(const Word& w);

// Gap-length schedule alpha_n: closed form 1/(k n^2) or an explicit list.
// Lengths are in absolute (ambient) units.
struct AlphaSchedule {
  bool closed_form = true;
  double k = 4.0;
  std::vector<double> values;  // explicit, values[0] = alpha_1

  static AlphaSchedule inverse_square(double k) { return {true, k, {}}; }
  static AlphaSchedule explicit_list(std::vector<double> v) { return {false, 0.0, std::move(v)}; }

  double alpha(int n) const;  // n >= 1
};

struct BowenParams {
  double lo = -1.0, hi = 1.0;  // ambient interval
  double b0 = 0.25;            // half-width of the generation-0 gap around the centre
  AlphaSchedule schedule = AlphaSchedule::inverse_square(4.0);
  int max_generation = 24;     // N
};

enum class LocateKind { in_atom, in_gap, central_gap, outside };
struct LocateResult {
  LocateKind kind = LocateKind::outside;
  Word word;           // atom word (in_atom) or the gap's atom word (in_gap)
  int generation = 0;  // |word| for in_gap
};

// The per-generation atom/gap geometry of a Bowen Cantor set. Atoms are never
// materialized: only the length table L_n lives in memory, every per-word
// query walks the word in O(|word|).
//
// Recursion: L_1 = (|ambient| - 2 b0)/2, L_{n+1} = (L_n - alpha_n / 2^n) / 2,
// each gap centered in its atom with length alpha_n / 2^n. Intervals descend
// by endpoint inheritance: the 0-child keeps the parent's left endpoint, the
// 1-child the right one, so nesting and tiling are exact in double arithmetic.
class BowenSkeleton {
 public:
  explicit BowenSkeleton(BowenParams p);  // validates the schedule constraints

  const BowenParams& params() const { return params_; }
  int max_generation() const { return params_.max_generation; }
  Interval ambient() const { return {params_.lo, params_.hi}; }
  Interval central_gap() const { return {cg_lo_, cg_hi_}; }

  double alpha(int n) const { return params_.schedule.alpha(n); }
  double atom_len(int n) const;          // L_n, 1 <= n <= N
  double atom_mass(int n) const;         // m(A_n) = 2^n L_n
  double gap_len(int n) const;           // alpha_n / 2^n

  Interval atom_interval(const Word& w) const;  // 1 <= |w| <= N
  Interval gap_interval(const Word& w) const;   // 1 <= |w| <= N-1
  double atom_left(const Word& w) const;        // left endpoints lie in K

  // Bit-addressed left endpoint (MSB-first word of `depth` bits); the O(depth)
  // workhorse behind cylinder enumeration.
  double left_of_bits(std::uint64_t bits, int depth) const;

  LocateResult locate(double x) const;

  // Lebesgue measure of the full Cantor set: closed-form schedules use
  // zeta(2)/k exactly, explicit lists their finite sum; tail bound 0 either way.
  double total_measure() const;
  double total_measure_tail() const { return 0.0; }

  // Bernoulli(1/2,1/2) sampling: `depth` uniform bits address an atom, the
  // atom's LEFT endpoint is returned (atom centers sit in gaps, left endpoints
  // are genuine K-points where the example maps have derivative exactly 2).
  double sample_mu_K(RngStream& rng, int depth) const;

  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  void root_of(char bit, double& a, double& b) const;

  BowenParams params_;
  double cg_lo_ = 0, cg_hi_ = 0;
  std::vector<double> len_;  // len_[n] = L_n, n = 1..N
  std::vector<std::string> warnings_;
};

// mu_K of the cylinder over `w`: exactly 2^{-|w|}.
double mu_K_cylinder(const Word& w);

}  // namespace pesinlab
