#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "pesinlab/bowen.hpp"
#include "pesinlab/errors.hpp"
#include "pesinlab/ksum.hpp"

using namespace pesinlab;

namespace {

// Independent oracle: materialize atoms and gaps top-down by the centered-gap
// rule (center +- half gap length), no shared length tables.
struct OracleSkeleton {
  std::map<std::string, std::pair<double, double>> atoms, gaps;
  std::pair<double, double> central;

  OracleSkeleton(double lo, double hi, double g, std::function<double(int)> alpha, int gens) {
    const double c = 0.5 * (lo + hi);
    central = {c - g, c + g};
    atoms["0"] = {lo, c - g};
    atoms["1"] = {c + g, hi};
    std::function<void(const std::string&)> split = [&](const std::string& w) {
      const int n = static_cast<int>(w.size());
      if (n >= gens) return;
      const auto [a, b] = atoms[w];
      const double cc = 0.5 * (a + b);
      const double half = 0.5 * alpha(n) / std::ldexp(1.0, n);
      gaps[w] = {cc - half, cc + half};
      atoms[w + "0"] = {a, cc - half};
      atoms[w + "1"] = {cc + half, b};
      split(w + "0");
      split(w + "1");
    };
    split("0");
    split("1");
  }
};

BowenParams default_params(int N = 24) {
  BowenParams p;
  p.b0 = 0.25;
  p.schedule = AlphaSchedule::inverse_square(4.0);
  p.max_generation = N;
  return p;
}

constexpr double kZeta2 = 1.6449340668482264;

}  // namespace

TEST_CASE("length recursion matches the hand computation") {
  const BowenSkeleton sk(default_params(3));
  CHECK(sk.atom_len(1) == 0.75);
  CHECK(sk.atom_len(2) == 0.3125);
  CHECK(sk.atom_len(3) == 0.1484375);
}

TEST_CASE("atoms and gaps match the subdivision oracle") {
  const BowenSkeleton sk(default_params(12));
  const OracleSkeleton oracle(-1.0, 1.0, 0.25, [](int n) { return 1.0 / (4.0 * n * n); }, 10);
  for (const auto& [w, iv] : oracle.atoms) {
    const Interval got = sk.atom_interval(w);
    CHECK(got.lo == doctest::Approx(iv.first).epsilon(1e-14));
    CHECK(got.hi == doctest::Approx(iv.second).epsilon(1e-14));
  }
  for (const auto& [w, iv] : oracle.gaps) {
    const Interval got = sk.gap_interval(w);
    CHECK(got.lo == doctest::Approx(iv.first).epsilon(1e-14));
    CHECK(got.hi == doctest::Approx(iv.second).epsilon(1e-14));
  }
}

TEST_CASE("named interval examples") {
  const BowenSkeleton sk(default_params());
  const Interval i0 = sk.atom_interval("0");
  CHECK(i0.lo == -1.0);
  CHECK(i0.hi == -0.25);
  const Interval i01 = sk.atom_interval("01");
  CHECK(i01.lo == doctest::Approx(-0.5625).epsilon(1e-15));
  CHECK(i01.hi == -0.25);
  const Interval g0 = sk.gap_interval("0");
  CHECK(g0.lo == doctest::Approx(-0.6875).epsilon(1e-15));
  CHECK(g0.hi == doctest::Approx(-0.5625).epsilon(1e-15));
  CHECK_THROWS_AS(sk.atom_interval("2"), LabError);
  CHECK_THROWS_AS(sk.atom_interval(std::string(25, '0')), LabError);
  CHECK_THROWS_AS(sk.gap_interval(std::string(24, '0')), LabError);
}

TEST_CASE("infeasible parameter sets are rejected by name") {
  // k = 1: sum alpha = zeta(2) ~ 1.645 > 2(1 - b0) = 1.5
  BowenParams p = default_params();
  p.schedule = AlphaSchedule::inverse_square(1.0);
  CHECK_THROWS_AS(BowenSkeleton{p}, LabError);

  // explicit list not decreasing
  BowenParams q = default_params(3);
  q.schedule = AlphaSchedule::explicit_list({0.3, 0.4});
  CHECK_THROWS_AS(BowenSkeleton{q}, LabError);

  // alpha_1 >= generation-0 gap
  BowenParams r = default_params(3);
  r.b0 = 0.1;
  r.schedule = AlphaSchedule::explicit_list({0.25, 0.05});
  CHECK_THROWS_AS(BowenSkeleton{r}, LabError);

  // list shorter than the requested generations
  BowenParams s = default_params(10);
  s.schedule = AlphaSchedule::explicit_list({0.2, 0.1});
  CHECK_THROWS_AS(BowenSkeleton{s}, LabError);
}

TEST_CASE("geometric explicit list gets a ratio warning, inverse-square does not") {
  BowenParams p = default_params(8);
  std::vector<double> alphas;
  for (int n = 1; n < 8; ++n) alphas.push_back(std::pow(2.0 / 3.0, n + 1));
  p.b0 = 1.0 / 3.0;
  p.schedule = AlphaSchedule::explicit_list(alphas);
  const BowenSkeleton sk(p);
  CHECK_FALSE(sk.warnings().empty());
  CHECK(BowenSkeleton(default_params(8)).warnings().empty());
}

TEST_CASE("total measure: analytic value sits in the partial-sum bracket") {
  const BowenSkeleton sk(default_params());
  const double got = sk.total_measure();
  // oracle: partial sum to 10^7 plus an integral-test tail bracket
  NeumaierSum partial;
  const long M = 10000000;
  for (long n = M; n >= 1; --n)
    partial.add(1.0 / (4.0 * static_cast<double>(n) * static_cast<double>(n)));
  const double lo_sum = partial.value() + 1.0 / (4.0 * (static_cast<double>(M) + 1.0));
  const double hi_sum = partial.value() + 1.0 / (4.0 * static_cast<double>(M));
  CHECK(1.5 - got >= lo_sum - 1e-12);
  CHECK(1.5 - got <= hi_sum + 1e-12);
  CHECK(got == doctest::Approx(1.5 - kZeta2 / 4.0).epsilon(1e-15));
  CHECK(sk.total_measure_tail() == 0.0);
}

TEST_CASE("atom mass identity m(A_n) = 2(1-b0) - sum_{j<n} alpha_j") {
  BowenParams p = default_params(40);
  const BowenSkeleton sk(p);
  NeumaierSum partial;
  for (int n = 1; n <= 40; ++n) {
    const double identity = 1.5 - partial.value();
    CHECK(std::abs(sk.atom_mass(n) - identity) <= 1e-12);
    partial.add(1.0 / (4.0 * n * n));
  }
  CHECK(sk.atom_mass(2) == doctest::Approx(1.25).epsilon(1e-15));
  // masses decrease and stay above the limit measure
  for (int n = 2; n <= 40; ++n) {
    CHECK(sk.atom_mass(n) < sk.atom_mass(n - 1));
    CHECK(sk.atom_mass(n) > sk.total_measure());
  }
}

TEST_CASE("huge k leaves only the generation-0 gap") {
  BowenParams p = default_params(4);
  p.schedule = AlphaSchedule::inverse_square(1e12);
  const BowenSkeleton sk(p);
  CHECK(sk.total_measure() == doctest::Approx(1.5).epsilon(1e-11));
}

TEST_CASE("locate: named cases") {
  const BowenSkeleton sk(default_params());
  CHECK(sk.locate(0.0).kind == LocateKind::central_gap);
  CHECK(sk.locate(1.5).kind == LocateKind::outside);
  const auto at = sk.locate(-1.0);
  CHECK(at.kind == LocateKind::in_atom);
  CHECK(at.word == std::string(24, '0'));
  const auto gp = sk.locate(-0.6);
  CHECK(gp.kind == LocateKind::in_gap);
  CHECK(gp.word == "0");
  CHECK(gp.generation == 1);
  // closed atoms win over open gaps at shared endpoints
  const auto edge = sk.locate(sk.gap_interval("0").lo);
  CHECK(edge.kind == LocateKind::in_atom);
}

TEST_CASE("sample/locate round trip and sampling statistics") {
  const BowenSkeleton sk(default_params());
  RngStream rng(991);
  for (int i = 0; i < 2000; ++i) {
    const double x = sk.sample_mu_K(rng, 24);
    const auto loc = sk.locate(x);
    CHECK(loc.kind == LocateKind::in_atom);
    CHECK(sk.atom_interval(loc.word).lo == x);  // left endpoints are K-points
  }
  // first-bit frequency ~ Bernoulli(1/2): binomial 3 sigma band on 10^6 draws
  RngStream rng2(992);
  long right = 0;
  const long N = 1000000;
  for (long i = 0; i < N; ++i) {
    const double x = sk.sample_mu_K(rng2, 24);
    CHECK(x >= -1.0);
    CHECK(x <= 1.0);
    if (x > 0) ++right;
  }
  const double sigma = std::sqrt(0.25 * static_cast<double>(N));
  CHECK(std::abs(static_cast<double>(right) - 0.5 * N) <= 3.0 * sigma);
  // addressed endpoints: all-zero bits give lo, leading one gives b0
  CHECK(sk.atom_left(std::string(24, '0')) == -1.0);
  CHECK(sk.atom_left("1" + std::string(23, '0')) == 0.25);
}

TEST_CASE("gaps and generation-12 atoms tile the ambient interval") {
  const BowenSkeleton sk(default_params(12));
  std::vector<Interval> parts;
  parts.push_back(sk.central_gap());
  std::function<void(const Word&)> walk = [&](const Word& w) {
    if (static_cast<int>(w.size()) == 12) {
      parts.push_back(sk.atom_interval(w));
      return;
    }
    walk(w + '0');
    parts.push_back(sk.gap_interval(w));
    walk(w + '1');
  };
  walk("0");
  walk("1");
  std::sort(parts.begin(), parts.end(), [](auto a, auto b) { return a.lo < b.lo; });
  CHECK(parts.front().lo == -1.0);
  CHECK(parts.back().hi == 1.0);
  NeumaierSum len;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    len.add(parts[i].len());
    if (i + 1 < parts.size())
      CHECK(std::abs(parts[i].hi - parts[i + 1].lo) <= 1e-14);  // disjoint, no holes
  }
  CHECK(len.value() == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("nesting: children stay inside their parent") {
  const BowenSkeleton sk(default_params());
  RngStream rng(993);
  for (int i = 0; i < 500; ++i) {
    Word w(1, rng.bit() ? '1' : '0');
    for (int n = 1; n < 20; ++n) {
      const Interval parent = sk.atom_interval(w);
      w.push_back(rng.bit() ? '1' : '0');
      const Interval child = sk.atom_interval(w);
      CHECK(child.lo >= parent.lo);
      CHECK(child.hi <= parent.hi);
    }
  }
}

TEST_CASE("cylinder masses are exact dyadics") {
  CHECK(mu_K_cylinder("0") == 0.5);
  CHECK(mu_K_cylinder("0110") == 0.0625);
  RngStream rng(994);
  for (int i = 0; i < 200; ++i) {
    Word w;
    const int n = 1 + static_cast<int>(rng.u01() * 19);
    for (int j = 0; j < n; ++j) w.push_back(rng.bit() ? '1' : '0');
    CHECK(mu_K_cylinder(w) == std::ldexp(1.0, -n));
    CHECK(mu_K_cylinder(w + "0") + mu_K_cylinder(w + "1") == mu_K_cylinder(w));
  }
}
