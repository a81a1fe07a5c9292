#include "pesinlab/bowen.hpp"

#include <cmath>

#include "pesinlab/errors.hpp"
#include "pesinlab/ksum.hpp"
#include "pesinlab/textio.hpp"

namespace pesinlab {

namespace {
constexpr double kZeta2 = 1.6449340668482264;  // pi^2 / 6
}

bool word_valid(const Word& w) {
  if (w.empty()) return false;
  for (char c : w)
    if (c != '0' && c != '1') return false;
  return true;
}

double AlphaSchedule::alpha(int n) const {
  if (n < 1) fail(Err::out_of_domain, "alpha index must be >= 1");
  if (closed_form) return 1.0 / (k * static_cast<double>(n) * static_cast<double>(n));
  if (static_cast<std::size_t>(n) > values.size())
    fail(Err::out_of_domain, "explicit schedule has no alpha_" + fmt_int(n));
  return values[static_cast<std::size_t>(n - 1)];
}

BowenSkeleton::BowenSkeleton(BowenParams p) : params_(std::move(p)) {
  const double len = params_.hi - params_.lo;
  const int N = params_.max_generation;
  if (!(len > 0.0)) fail(Err::params_infeasible, "ambient interval is degenerate");
  if (!(params_.b0 > 0.0) || !(2.0 * params_.b0 < len))
    fail(Err::params_infeasible, "generation-0 gap must satisfy 0 < 2 b0 < |ambient|");
  if (N < 1) fail(Err::params_infeasible, "max_generation must be >= 1");

  const auto& sched = params_.schedule;
  if (sched.closed_form) {
    if (!(sched.k > 0.0)) fail(Err::params_infeasible, "schedule constant k must be > 0");
  } else {
    if (static_cast<std::size_t>(N) > sched.values.size() + 1)
      fail(Err::params_infeasible,
           "explicit schedule too short: need alpha_1..alpha_" + fmt_int(N - 1));
    for (double a : sched.values)
      if (!(a > 0.0)) fail(Err::params_infeasible, "alpha values must be positive");
  }

  // the (5.200)-style constraints, scaled to the ambient interval
  const double mass1 = len - 2.0 * params_.b0;  // 2 * L_1
  double total;
  if (sched.closed_form) {
    total = kZeta2 / sched.k;
  } else {
    NeumaierSum s;
    for (double a : sched.values) s.add(a);
    total = s.value();
  }
  if (!(total < mass1))
    fail(Err::params_infeasible, "sum(alpha_n) = " + fmt_double(total) +
                                     " must stay below the generation-1 mass " +
                                     fmt_double(mass1));
  if (!sched.closed_form) {
    for (std::size_t i = 0; i + 1 < sched.values.size(); ++i)
      if (!(sched.values[i + 1] < sched.values[i]))
        fail(Err::params_infeasible,
             "alpha must be strictly decreasing, violated at alpha_" + fmt_int((long long)i + 2));
    // ratio -> 1 is only heuristically checkable on a finite list
    const std::size_t m = sched.values.size();
    std::size_t bad = 0;
    for (std::size_t i = m > 10 ? m - 10 : 1; i < m; ++i)
      if (sched.values[i] / sched.values[i - 1] <= 0.9) ++bad;
    if (bad > 0)
      warnings_.push_back("explicit schedule: " + fmt_int((long long)bad) +
                          " of the last ratios alpha_{n+1}/alpha_n fall below 0.9; "
                          "the ratio->1 condition cannot be certified from a finite list");
  }
  if (!(sched.alpha(1) < 2.0 * params_.b0))
    fail(Err::params_infeasible, "alpha_1 = " + fmt_double(sched.alpha(1)) +
                                     " must be smaller than the generation-0 gap " +
                                     fmt_double(2.0 * params_.b0));

  const double c = 0.5 * (params_.lo + params_.hi);
  cg_lo_ = c - params_.b0;
  cg_hi_ = c + params_.b0;

  len_.assign(static_cast<std::size_t>(N) + 1, 0.0);
  len_[1] = 0.5 * mass1;
  for (int n = 1; n < N; ++n) {
    const double g = sched.alpha(n) / std::ldexp(1.0, n);
    const double next = 0.5 * (len_[static_cast<std::size_t>(n)] - g);
    if (!(next > 0.0))
      fail(Err::gap_overflow, "gap of generation " + fmt_int(n) + " (length " + fmt_double(g) +
                                  ") does not fit in its atom (length " +
                                  fmt_double(len_[static_cast<std::size_t>(n)]) + ")");
    len_[static_cast<std::size_t>(n) + 1] = next;
  }
}

void BowenSkeleton::root_of(char bit, double& a, double& b) const {
  if (bit == '0') {
    a = params_.lo;
    b = cg_lo_;
  } else {
    a = cg_hi_;
    b = params_.hi;
  }
}

double BowenSkeleton::atom_len(int n) const {
  if (n < 1 || n > params_.max_generation)
    fail(Err::word_too_long, "generation " + fmt_int(n) + " outside 1.." +
                                 fmt_int(params_.max_generation));
  return len_[static_cast<std::size_t>(n)];
}

double BowenSkeleton::atom_mass(int n) const {
  return std::ldexp(atom_len(n), n);
}

double BowenSkeleton::gap_len(int n) const {
  if (n < 1 || n >= params_.max_generation)
    fail(Err::word_too_long, "gap generation " + fmt_int(n) + " outside 1.." +
                                 fmt_int(params_.max_generation - 1));
  return params_.schedule.alpha(n) / std::ldexp(1.0, n);
}

Interval BowenSkeleton::atom_interval(const Word& w) const {
  if (!word_valid(w)) fail(Err::out_of_domain, "word must be a nonempty 0/1 string");
  if (static_cast<int>(w.size()) > params_.max_generation)
    fail(Err::word_too_long, "word length " + fmt_int((long long)w.size()) +
                                 " exceeds max generation " + fmt_int(params_.max_generation));
  double a, b;
  root_of(w[0], a, b);
  for (std::size_t j = 1; j < w.size(); ++j) {
    const double child = len_[j + 1];
    if (w[j] == '0')
      b = a + child;
    else
      a = b - child;
  }
  return {a, b};
}

double BowenSkeleton::atom_left(const Word& w) const { return atom_interval(w).lo; }

double BowenSkeleton::left_of_bits(std::uint64_t bits, int depth) const {
  if (depth < 1 || depth > params_.max_generation)
    fail(Err::word_too_long, "bit word depth " + fmt_int(depth));
  double a, b;
  root_of(((bits >> (depth - 1)) & 1ull) ? '1' : '0', a, b);
  for (int j = 1; j < depth; ++j) {
    const double child = len_[static_cast<std::size_t>(j) + 1];
    if ((bits >> (depth - 1 - j)) & 1ull)
      a = b - child;
    else
      b = a + child;
  }
  return a;
}

Interval BowenSkeleton::gap_interval(const Word& w) const {
  if (!word_valid(w)) fail(Err::out_of_domain, "word must be a nonempty 0/1 string");
  if (static_cast<int>(w.size()) >= params_.max_generation)
    fail(Err::word_too_long, "gap words go up to length " +
                                 fmt_int(params_.max_generation - 1));
  const Interval atom = atom_interval(w);
  const double child = len_[w.size() + 1];
  return {atom.lo + child, atom.hi - child};
}

LocateResult BowenSkeleton::locate(double x) const {
  if (x < params_.lo || x > params_.hi) return {LocateKind::outside, "", 0};
  if (x > cg_lo_ && x < cg_hi_) return {LocateKind::central_gap, "", 0};
  Word w(1, x <= cg_lo_ ? '0' : '1');
  double a, b;
  root_of(w[0], a, b);
  const int N = params_.max_generation;
  for (int n = 1; n < N; ++n) {
    const double child = len_[static_cast<std::size_t>(n) + 1];
    // closed children win over the open gap at shared endpoints
    if (x <= a + child) {
      b = a + child;
      w.push_back('0');
    } else if (x >= b - child) {
      a = b - child;
      w.push_back('1');
    } else {
      return {LocateKind::in_gap, w, n};
    }
  }
  return {LocateKind::in_atom, w, N};
}

double BowenSkeleton::total_measure() const {
  const double mass1 = (params_.hi - params_.lo) - 2.0 * params_.b0;
  if (params_.schedule.closed_form) return mass1 - kZeta2 / params_.schedule.k;
  NeumaierSum s;
  for (double a : params_.schedule.values) s.add(a);
  return mass1 - s.value();
}

double BowenSkeleton::sample_mu_K(RngStream& rng, int depth) const {
  if (depth < 1 || depth > params_.max_generation)
    fail(Err::depth_exceeded, "sampling depth " + fmt_int(depth) + " outside 1.." +
                                  fmt_int(params_.max_generation));
  double a, b;
  root_of(rng.bit() ? '1' : '0', a, b);
  for (int j = 1; j < depth; ++j) {
    const double child = len_[static_cast<std::size_t>(j) + 1];
    if (rng.bit())
      a = b - child;
    else
      b = a + child;
  }
  return a;
}

double mu_K_cylinder(const Word& w) {
  if (!word_valid(w)) fail(Err::out_of_domain, "word must be a nonempty 0/1 string");
  return std::ldexp(1.0, -static_cast<int>(w.size()));
}

}  // namespace pesinlab
