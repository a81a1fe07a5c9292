#include "pesinlab/measures.hpp"

#include <algorithm>
#include <cmath>

#include "pesinlab/errors.hpp"
#include "pesinlab/ksum.hpp"
#include "pesinlab/textio.hpp"

namespace pesinlab {

namespace {

constexpr std::size_t kMaxSupport = 10'000'000;

void validate_weights(const std::vector<double>& w) {
  NeumaierSum s;
  for (double x : w) {
    if (!(x >= 0.0)) fail(Err::domain_mismatch, "negative weight");
    s.add(x);
  }
  if (std::abs(s.value() - 1.0) > 1e-12)
    fail(Err::domain_mismatch, "weights sum to " + fmt_double(s.value()) + ", expected 1");
}

// Gauss-Legendre nodes/weights on [-1,1], Newton on the Legendre recurrence.
std::vector<std::pair<double, double>> gl_compute(int n) {
  std::vector<std::pair<double, double>> rule(static_cast<std::size_t>(n));
  const double pi = 3.14159265358979323846;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) {
        p0 = 1.0;
        p1 = x;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        break;
      }
    }
    const double wgt = 2.0 / ((1.0 - x * x) * dp * dp);
    rule[static_cast<std::size_t>(i)] = {-x, wgt};
    rule[static_cast<std::size_t>(n - 1 - i)] = {x, wgt};
  }
  return rule;
}

const std::vector<std::pair<double, double>>& gl_rule(int n) {
  static const std::vector<std::pair<double, double>> r64 = gl_compute(64);
  static const std::vector<std::pair<double, double>> r128 = gl_compute(128);
  return n == 64 ? r64 : r128;
}

double gl_segment(const Observable& obs, double a, double b, int n) {
  const auto& rule = gl_rule(n);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  NeumaierSum s;
  for (const auto& [x, wgt] : rule) s.add(wgt * obs.f(mid + half * x));
  return half * s.value();
}

IntegralResult integrate_lebesgue(const Measure& mu, const Observable& obs) {
  // split at the observable's breakpoints: piecewise-smooth integrands
  std::vector<double> cuts;
  cuts.push_back(mu.seg.lo);
  for (double b : obs.breakpoints)
    if (b > mu.seg.lo && b < mu.seg.hi) cuts.push_back(b);
  cuts.push_back(mu.seg.hi);
  std::sort(cuts.begin(), cuts.end());
  NeumaierSum v64, v128;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (!(cuts[i + 1] > cuts[i])) continue;
    v64.add(gl_segment(obs, cuts[i], cuts[i + 1], 64));
    v128.add(gl_segment(obs, cuts[i], cuts[i + 1], 128));
  }
  const double len = mu.seg.len();
  const double value = v128.value() / len;
  return {value, std::abs(v128.value() - v64.value()) / len};
}

IntegralResult integrate_cantor(const Measure& mu, const Observable& obs, int cb_depth_cap) {
  if (obs.k_constant) return {*obs.k_constant, 0.0};
  int d = mu.depth;
  if (cb_depth_cap >= 1 && cb_depth_cap < d) d = cb_depth_cap;
  if (d < 1 || d > mu.skel->max_generation())
    fail(Err::depth_exceeded, "cylinder depth " + fmt_int(d));
  if (d > 24) fail(Err::depth_exceeded, "cylinder enumeration beyond depth 24");
  const std::uint64_t M = 1ull << d;
  const double mass = std::ldexp(1.0, -d);
  NeumaierSum s;
  for (std::uint64_t bits = 0; bits < M; ++bits)
    s.add(obs.f(mu.skel->left_of_bits(bits, d)));
  return {mass * s.value(), obs.lip * mu.skel->atom_len(d)};
}

Measure to_empirical(const Measure& m) {
  if (m.kind == Measure::Kind::empirical) return m;
  if (m.kind == Measure::Kind::dirac) {
    Measure out = m;
    out.kind = Measure::Kind::empirical;
    out.w = {1.0};
    return out;
  }
  fail(Err::unsupported_variant, "mixtures need empirical or dirac components");
}

}  // namespace

Measure empirical_from_points(std::vector<double> xs, std::vector<double> ws) {
  if (xs.size() != ws.size() || xs.empty())
    fail(Err::domain_mismatch, "points/weights size mismatch");
  validate_weights(ws);
  Measure m;
  m.kind = Measure::Kind::empirical;
  m.space = Space::circle;
  m.px = std::move(xs);
  m.w = std::move(ws);
  return m;
}

Measure empirical_from_points2(std::vector<double> xs, std::vector<double> ys,
                               std::vector<double> ws) {
  if (xs.size() != ws.size() || xs.size() != ys.size() || xs.empty())
    fail(Err::domain_mismatch, "points/weights size mismatch");
  validate_weights(ws);
  Measure m;
  m.kind = Measure::Kind::empirical;
  m.space = Space::torus;
  m.px = std::move(xs);
  m.py = std::move(ys);
  m.w = std::move(ws);
  return m;
}

Measure empirical_from_orbit(const CircleMap& map, double x0, int n) {
  Measure m;
  m.kind = Measure::Kind::empirical;
  m.space = Space::circle;
  m.px = orbit(map, x0, n);
  m.w.assign(m.px.size(), 1.0 / static_cast<double>(n));
  validate_weights(m.w);
  return m;
}

Measure dirac(double x) {
  Measure m;
  m.kind = Measure::Kind::dirac;
  m.space = Space::circle;
  m.px = {x};
  m.w = {1.0};
  return m;
}

Measure dirac2(double x, double y) {
  Measure m = dirac(x);
  m.space = Space::torus;
  m.py = {y};
  return m;
}

Measure lebesgue(Interval seg) {
  if (!(seg.hi > seg.lo)) fail(Err::domain_mismatch, "degenerate Lebesgue support");
  Measure m;
  m.kind = Measure::Kind::lebesgue;
  m.space = Space::circle;
  m.seg = seg;
  return m;
}

Measure cantor_bernoulli(std::shared_ptr<const BowenSkeleton> sk, int depth) {
  if (!sk) fail(Err::domain_mismatch, "null skeleton");
  if (depth < 1 || depth > sk->max_generation())
    fail(Err::depth_exceeded, "CantorBernoulli depth " + fmt_int(depth) + " outside 1.." +
                                  fmt_int(sk->max_generation()));
  Measure m;
  m.kind = Measure::Kind::cantor_bernoulli;
  m.space = Space::circle;
  m.skel = std::move(sk);
  m.depth = depth;
  return m;
}

Measure product_measure(Measure a, Measure b) {
  if (a.space != Space::circle || b.space != Space::circle)
    fail(Err::domain_mismatch, "product factors must be circle measures");
  Measure m;
  m.kind = Measure::Kind::product;
  m.space = Space::torus;
  m.left = std::make_shared<Measure>(std::move(a));
  m.right = std::make_shared<Measure>(std::move(b));
  return m;
}

Measure mix(const Measure& a, const Measure& b, double lambda_a) {
  if (!(lambda_a >= 0.0 && lambda_a <= 1.0)) fail(Err::domain_mismatch, "lambda outside [0,1]");
  if (a.space != b.space) fail(Err::domain_mismatch, "mixing measures on different spaces");
  Measure ea = to_empirical(a), eb = to_empirical(b);
  auto take = [](const Measure& src, double scale, std::size_t stride, Measure& dst) {
    NeumaierSum kept;
    for (std::size_t i = 0; i < src.px.size(); i += stride) kept.add(src.w[i]);
    const double norm = kept.value() > 0.0 ? scale / kept.value() : 0.0;
    for (std::size_t i = 0; i < src.px.size(); i += stride) {
      dst.px.push_back(src.px[i]);
      if (src.space == Space::torus) dst.py.push_back(src.py[i]);
      dst.w.push_back(src.w[i] * norm);
    }
  };
  const std::size_t total = ea.px.size() + eb.px.size();
  const std::size_t stride = total > kMaxSupport ? (total + kMaxSupport - 1) / kMaxSupport : 1;
  Measure m;
  m.kind = Measure::Kind::empirical;
  m.space = a.space;
  if (lambda_a > 0.0) take(ea, lambda_a, stride, m);
  if (lambda_a < 1.0) take(eb, 1.0 - lambda_a, stride, m);
  return m;
}

IntegralResult integrate(const Measure& mu, const Observable& obs, int cb_depth_cap) {
  if (mu.space != Space::circle)
    fail(Err::domain_mismatch, "circle observable against a torus measure");
  switch (mu.kind) {
    case Measure::Kind::empirical:
    case Measure::Kind::dirac: {
      NeumaierSum s;
      for (std::size_t i = 0; i < mu.px.size(); ++i) s.add(mu.w[i] * obs.f(mu.px[i]));
      return {s.value(), 0.0};
    }
    case Measure::Kind::lebesgue:
      return integrate_lebesgue(mu, obs);
    case Measure::Kind::cantor_bernoulli:
      return integrate_cantor(mu, obs, cb_depth_cap);
    case Measure::Kind::product:
      fail(Err::domain_mismatch, "product measure needs a torus observable");
  }
  fail(Err::domain_mismatch, "unknown measure kind");
}

IntegralResult integrate2(const Measure& mu, const Observable2& obs, int cb_depth_cap) {
  if (mu.space != Space::torus)
    fail(Err::domain_mismatch, "torus observable against a circle measure");
  if (mu.kind == Measure::Kind::product) {
    const IntegralResult ia = integrate(*mu.left, obs.a, cb_depth_cap);
    const IntegralResult ib = integrate(*mu.right, obs.b, cb_depth_cap);
    if (obs.kind == Observable2::Kind::marginal_sum)
      return {ia.value + ib.value, ia.error_bound + ib.error_bound};
    return {ia.value * ib.value, std::abs(ia.value) * ib.error_bound +
                                     std::abs(ib.value) * ia.error_bound +
                                     ia.error_bound * ib.error_bound};
  }
  if (mu.kind == Measure::Kind::empirical || mu.kind == Measure::Kind::dirac) {
    NeumaierSum s;
    for (std::size_t i = 0; i < mu.px.size(); ++i)
      s.add(mu.w[i] * obs(mu.px[i], mu.py[i]));
    return {s.value(), 0.0};
  }
  fail(Err::unsupported_variant, "torus integration supports product/empirical/dirac");
}

std::vector<double> family_integrals(const Measure& mu, const ObservableFamily& fam) {
  std::vector<double> out(static_cast<std::size_t>(fam.n_terms));
  if (fam.space == Space::circle) {
    if (mu.space != Space::circle) fail(Err::domain_mismatch, "family/measure space mismatch");
    for (int i = 0; i < fam.n_terms; ++i)
      out[static_cast<std::size_t>(i)] =
          integrate(mu, fam.phi[static_cast<std::size_t>(i)], fam.cb_depth).value;
  } else {
    if (mu.space != Space::torus) fail(Err::domain_mismatch, "family/measure space mismatch");
    for (int i = 0; i < fam.n_terms; ++i)
      out[static_cast<std::size_t>(i)] =
          integrate2(mu, fam.phi2[static_cast<std::size_t>(i)], fam.cb_depth).value;
  }
  return out;
}

DistResult weak_star_dist(const Measure& mu, const Measure& nu, const ObservableFamily& fam) {
  const std::vector<double> a = family_integrals(mu, fam);
  const std::vector<double> b = family_integrals(nu, fam);
  NeumaierSum s;
  for (int i = 0; i < fam.n_terms; ++i)
    s.add(std::ldexp(std::abs(a[static_cast<std::size_t>(i)] - b[static_cast<std::size_t>(i)]),
                     -i));
  return {s.value(), fam.tail_bound()};
}

Measure pushforward(const BuiltSystem& sys, const Measure& mu) {
  switch (mu.kind) {
    case Measure::Kind::empirical:
    case Measure::Kind::dirac: {
      Measure out = mu;
      if (sys.is_torus()) {
        if (mu.space != Space::torus) fail(Err::domain_mismatch, "torus system, circle measure");
        for (std::size_t i = 0; i < out.px.size(); ++i) {
          out.px[i] = map_eval(*sys.tmap->f1, out.px[i]);
          out.py[i] = map_eval(*sys.tmap->f2, out.py[i]);
        }
      } else {
        if (mu.space != Space::circle) fail(Err::domain_mismatch, "circle system, torus measure");
        for (auto& x : out.px) x = map_eval(*sys.map, x);
      }
      return out;
    }
    case Measure::Kind::cantor_bernoulli: {
      if (mu.depth < 2)
        fail(Err::depth_exceeded, "pushforward needs cylinder depth >= 2");
      Measure out = mu;
      out.depth = mu.depth - 1;  // shifted cylinders keep masses 2^{-(d-1)}
      return out;
    }
    case Measure::Kind::product: {
      if (!sys.is_torus()) fail(Err::domain_mismatch, "product measure on a circle system");
      return product_measure(pushforward(*sys.left, *mu.left),
                             pushforward(*sys.right, *mu.right));
    }
    case Measure::Kind::lebesgue:
      fail(Err::unsupported_variant,
           "Lebesgue pushforward excluded by design (no transfer-operator machinery)");
  }
  fail(Err::unsupported_variant, "unknown measure kind");
}

double mass_of_interval(const Measure& mu, const Interval& iv, int cb_depth_cap) {
  if (mu.space != Space::circle) fail(Err::domain_mismatch, "interval mass is circle-side");
  switch (mu.kind) {
    case Measure::Kind::empirical:
    case Measure::Kind::dirac: {
      NeumaierSum s;
      for (std::size_t i = 0; i < mu.px.size(); ++i)
        if (iv.contains_half(mu.px[i])) s.add(mu.w[i]);
      return s.value();
    }
    case Measure::Kind::lebesgue: {
      const double lo = std::max(iv.lo, mu.seg.lo), hi = std::min(iv.hi, mu.seg.hi);
      return hi > lo ? (hi - lo) / mu.seg.len() : 0.0;
    }
    case Measure::Kind::cantor_bernoulli: {
      int d = mu.depth;
      if (cb_depth_cap >= 1 && cb_depth_cap < d) d = cb_depth_cap;
      const std::uint64_t M = 1ull << d;
      const double mass = std::ldexp(1.0, -d);
      NeumaierSum s;
      for (std::uint64_t bits = 0; bits < M; ++bits)
        if (iv.contains_half(mu.skel->left_of_bits(bits, d))) s.add(mass);
      return s.value();
    }
    case Measure::Kind::product:
      fail(Err::domain_mismatch, "interval mass is circle-side");
  }
  fail(Err::domain_mismatch, "unknown measure kind");
}

}  // namespace pesinlab
