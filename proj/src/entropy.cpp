#include "pesinlab/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "pesinlab/errors.hpp"
#include "pesinlab/ksum.hpp"
#include "pesinlab/textio.hpp"

namespace pesinlab {

double partition_entropy(std::span<const double> masses) {
  NeumaierSum s;
  for (double p : masses) {
    if (p < -1e-12) fail(Err::domain_mismatch, "negative mass " + fmt_double(p));
    if (p > 0.0) s.add(-p * std::log(p));
  }
  return s.value();
}

double CylinderTable::entropy() const {
  NeumaierSum s;
  for (const auto& [word, p] : cells)
    if (p > 0.0) s.add(-p * std::log(p));
  return s.value();
}

CylinderTable cylinder_table_symbolic(const Measure& mu, int n) {
  if (n < 1) fail(Err::out_of_domain, "cylinder length must be >= 1");
  CylinderTable tab;
  tab.n = n;
  if (mu.kind == Measure::Kind::cantor_bernoulli) {
    if (n > mu.depth) fail(Err::depth_exceeded, "cylinder length exceeds measure depth");
    tab.alphabet = 2;
    const std::uint64_t M = 1ull << n;
    const double mass = std::ldexp(1.0, -n);
    tab.cells.reserve(M);
    for (std::uint64_t w = 0; w < M; ++w) tab.cells.push_back({w, mass});
    tab.total = 1.0;
    return tab;
  }
  if (mu.kind == Measure::Kind::product &&
      mu.left->kind == Measure::Kind::cantor_bernoulli &&
      mu.right->kind == Measure::Kind::cantor_bernoulli) {
    if (n > std::min(mu.left->depth, mu.right->depth))
      fail(Err::depth_exceeded, "cylinder length exceeds factor depth");
    if (n > 13) fail(Err::depth_exceeded, "4-symbol enumeration beyond n=13");
    tab.alphabet = 4;
    const std::uint64_t M = 1ull << (2 * n);
    const double mass = std::ldexp(1.0, -2 * n);
    tab.cells.reserve(M);
    for (std::uint64_t w = 0; w < M; ++w) tab.cells.push_back({w, mass});
    tab.total = 1.0;
    return tab;
  }
  fail(Err::unsupported_variant,
       "symbolic tables need a CantorBernoulli measure or a product of two");
}

CylinderTable cylinder_table_empirical(std::span<const int> symbols, int alphabet, int n) {
  if (n < 1) fail(Err::out_of_domain, "cylinder length must be >= 1");
  if (alphabet < 1) fail(Err::out_of_domain, "alphabet must be >= 1");
  if (static_cast<long>(symbols.size()) < n)
    fail(Err::out_of_domain, "itinerary shorter than the word length");
  if (n * std::log2(static_cast<double>(alphabet)) > 62.0)
    fail(Err::out_of_domain, "word space does not fit 64-bit encoding");

  CylinderTable tab;
  tab.n = n;
  tab.alphabet = alphabet;
  const std::size_t windows = symbols.size() - static_cast<std::size_t>(n) + 1;

  std::uint64_t pow_top = 1;
  for (int i = 0; i + 1 < n; ++i) pow_top *= static_cast<std::uint64_t>(alphabet);

  std::unordered_map<std::uint64_t, std::uint64_t> counts;
  counts.reserve(windows / 4 + 16);
  std::uint64_t code = 0;
  for (int i = 0; i < n; ++i)
    code = code * static_cast<std::uint64_t>(alphabet) + static_cast<std::uint64_t>(symbols[i]);
  ++counts[code];
  for (std::size_t i = static_cast<std::size_t>(n); i < symbols.size(); ++i) {
    code = (code % pow_top) * static_cast<std::uint64_t>(alphabet) +
           static_cast<std::uint64_t>(symbols[i]);
    ++counts[code];
  }

  tab.cells.reserve(counts.size());
  const double inv = 1.0 / static_cast<double>(windows);
  for (const auto& [word, c] : counts)
    tab.cells.push_back({word, static_cast<double>(c) * inv});
  std::sort(tab.cells.begin(), tab.cells.end());
  NeumaierSum tot;
  for (const auto& [word, p] : tab.cells) tot.add(p);
  tab.total = tot.value();

  if (tab.cells.size() * 10 > windows)
    tab.warnings.push_back("UndersampledWarning: " + fmt_int((long long)tab.cells.size()) +
                           " distinct words over " + fmt_int((long long)windows) + " windows");
  if (std::pow(static_cast<double>(alphabet), n) > static_cast<double>(windows))
    tab.warnings.push_back("word space " + fmt_int((long long)alphabet) + "^" + fmt_int(n) +
                           " exceeds the window count");
  return tab;
}

EntropyRate entropy_rate(const std::vector<CylinderTable>& tables) {
  if (tables.empty()) fail(Err::out_of_domain, "no tables");
  EntropyRate er;
  std::vector<double> H;
  H.reserve(tables.size());
  for (std::size_t i = 0; i < tables.size(); ++i) {
    if (tables[i].n != static_cast<int>(i) + 1)
      fail(Err::out_of_domain, "tables must cover n = 1..n_max in order");
    H.push_back(tables[i].entropy());
    er.h_over_n.push_back(H.back() / static_cast<double>(i + 1));
    for (const auto& wmsg : tables[i].warnings) er.warnings.push_back(wmsg);
  }
  er.h_plugin = *std::min_element(er.h_over_n.begin(), er.h_over_n.end());
  for (std::size_t i = 0; i + 1 < H.size(); ++i) er.increments.push_back(H[i + 1] - H[i]);
  er.h_increment = er.increments.empty() ? er.h_plugin : er.increments.back();
  er.h_final = std::min(er.h_plugin, er.h_increment);
  return er;
}

IntegralResult lyapunov_integral(const BuiltSystem& sys, const Measure& mu) {
  if (sys.is_torus()) return integrate2(mu, log_det_observable2(sys));
  return integrate(mu, log_deriv_observable(sys));
}

double birkhoff_lyapunov(const BuiltSystem& sys, double x0, double y0, long n,
                         RngStream* rng) {
  if (n < 1) fail(Err::out_of_domain, "n must be >= 1");
  auto mean_log_deriv = [&](const CircleMap& map, double start) {
    NeumaierSum s;
    double x = reduce_circle(start);
    for (long i = 0; i < n; ++i) {
      s.add(std::log(map_deriv(map, x)));
      if (i + 1 < n) x = rng ? pseudo_step(map, x, *rng) : map_eval(map, x);
    }
    return s.value() / static_cast<double>(n);
  };
  if (sys.is_torus())
    return mean_log_deriv(*sys.tmap->f1, x0) + mean_log_deriv(*sys.tmap->f2, y0);
  return mean_log_deriv(*sys.map, x0);
}

int system_alphabet(const BuiltSystem& sys) {
  if (sys.is_torus())
    return static_cast<int>(sys.tmap->f1->symbols.size() * sys.tmap->f2->symbols.size());
  return static_cast<int>(sys.map->symbols.size());
}

std::vector<int> system_itinerary(const BuiltSystem& sys, double x0, double y0, long n,
                                  RngStream* rng) {
  std::vector<int> out(static_cast<std::size_t>(n));
  if (sys.is_torus()) {
    const auto& f1 = *sys.tmap->f1;
    const auto& f2 = *sys.tmap->f2;
    const int a2 = static_cast<int>(f2.symbols.size());
    double x = reduce_circle(x0), y = reduce_circle(y0);
    for (long i = 0; i < n; ++i) {
      out[static_cast<std::size_t>(i)] = symbol_index(f1, x) * a2 + symbol_index(f2, y);
      if (i + 1 < n) {
        x = rng ? pseudo_step(f1, x, *rng) : map_eval(f1, x);
        y = rng ? pseudo_step(f2, y, *rng) : map_eval(f2, y);
      }
    }
  } else {
    const auto& f = *sys.map;
    double x = reduce_circle(x0);
    for (long i = 0; i < n; ++i) {
      out[static_cast<std::size_t>(i)] = symbol_index(f, x);
      if (i + 1 < n) x = rng ? pseudo_step(f, x, *rng) : map_eval(f, x);
    }
  }
  return out;
}

namespace {

bool is_symbolic(const Measure& mu) {
  if (mu.kind == Measure::Kind::cantor_bernoulli) return true;
  return mu.kind == Measure::Kind::product &&
         mu.left->kind == Measure::Kind::cantor_bernoulli &&
         mu.right->kind == Measure::Kind::cantor_bernoulli;
}

std::vector<CylinderTable> tables_from_symbols(const std::vector<int>& symbols, int alphabet,
                                               int n_max) {
  std::vector<CylinderTable> tabs;
  tabs.reserve(static_cast<std::size_t>(n_max));
  for (int n = 1; n <= n_max; ++n)
    tabs.push_back(cylinder_table_empirical(symbols, alphabet, n));
  return tabs;
}

}  // namespace

PesinReport pesin_defect(const BuiltSystem& sys, const Measure& mu,
                         const ObservableFamily& fam, const PesinOptions& opts) {
  PesinReport rep;
  rep.system = sys.kind;
  rep.measure = mu.name.empty() ? "measure" : mu.name;
  rep.seed = opts.seed;
  rep.orbit_len_used = opts.orbit_len;
  const bool torus = sys.is_torus();

  EntropyRate er;
  bool symbolic_path = false;

  if (is_symbolic(mu)) {
    symbolic_path = true;
    rep.method = "symbolic-cylinders";
    int n_max = torus ? opts.torus_n_max : opts.n_max;
    const int depth = mu.kind == Measure::Kind::product
                          ? std::min(mu.left->depth, mu.right->depth)
                          : mu.depth;
    n_max = std::min(n_max, depth);
    rep.n_max_used = n_max;
    std::vector<CylinderTable> tabs;
    for (int n = 1; n <= n_max; ++n) tabs.push_back(cylinder_table_symbolic(mu, n));
    er = entropy_rate(tabs);
  } else if (mu.kind == Measure::Kind::dirac) {
    rep.method = "dirac-orbit";
    const int n_max = torus ? opts.torus_n_max : opts.n_max;
    rep.n_max_used = n_max;
    const long len = std::max<long>(4096, 4L * n_max);
    const auto symbols =
        system_itinerary(sys, mu.px[0], mu.py.empty() ? 0.0 : mu.py[0], len, nullptr);
    er = entropy_rate(tables_from_symbols(symbols, system_alphabet(sys), n_max));
  } else if (mu.kind == Measure::Kind::empirical) {
    rep.method = "empirical-support";
    const int n_max = torus ? opts.torus_n_max : opts.n_max;
    rep.n_max_used = n_max;
    std::vector<int> symbols(mu.px.size());
    if (torus) {
      const int a2 = static_cast<int>(sys.tmap->f2->symbols.size());
      for (std::size_t i = 0; i < mu.px.size(); ++i)
        symbols[i] =
            symbol_index(*sys.tmap->f1, mu.px[i]) * a2 + symbol_index(*sys.tmap->f2, mu.py[i]);
    } else {
      for (std::size_t i = 0; i < mu.px.size(); ++i)
        symbols[i] = symbol_index(*sys.map, mu.px[i]);
    }
    er = entropy_rate(tables_from_symbols(symbols, system_alphabet(sys), n_max));
  } else if (mu.kind == Measure::Kind::lebesgue ||
             (mu.kind == Measure::Kind::product &&
              mu.left->kind == Measure::Kind::lebesgue &&
              mu.right->kind == Measure::Kind::lebesgue)) {
    // Lebesgue-type start: a seeded dithered orbit stands in for the
    // time-average measure.
    rep.method = "lebesgue-orbit";
    rep.warnings.push_back("entropy estimated from a dithered pseudo-orbit (seeded)");
    const int n_max = torus ? opts.torus_n_max : opts.n_max;
    rep.n_max_used = n_max;
    RngStream rng = derive_stream(opts.seed, 0xB1FF);
    double x0, y0 = 0.0;
    if (mu.kind == Measure::Kind::lebesgue) {
      x0 = rng.uniform(mu.seg.lo, mu.seg.hi);
    } else {  // product of Lebesgue factors
      x0 = rng.uniform(mu.left->seg.lo, mu.left->seg.hi);
      y0 = rng.uniform(mu.right->seg.lo, mu.right->seg.hi);
    }
    const auto symbols = system_itinerary(sys, x0, y0, opts.orbit_len, &rng);
    er = entropy_rate(tables_from_symbols(symbols, system_alphabet(sys), n_max));
    RngStream brng = derive_stream(opts.seed, 0xB1FF);
    double bx = 0, by = 0;
    if (mu.kind == Measure::Kind::lebesgue) {
      bx = brng.uniform(mu.seg.lo, mu.seg.hi);
    } else {
      bx = brng.uniform(mu.left->seg.lo, mu.left->seg.hi);
      by = brng.uniform(mu.right->seg.lo, mu.right->seg.hi);
    }
    rep.birkhoff = birkhoff_lyapunov(sys, bx, by, opts.orbit_len, &brng);
  } else {
    fail(Err::unsupported_variant, "pesin_defect: unsupported measure combination");
  }

  rep.h_sequence = er.h_over_n;
  rep.increments = er.increments;
  rep.h_final = er.h_final;
  for (const auto& wmsg : er.warnings) rep.warnings.push_back(wmsg);

  const IntegralResult lyap = lyapunov_integral(sys, mu);
  rep.lyap = lyap.value;
  rep.lyap_error = lyap.error_bound;
  rep.defect = rep.lyap - rep.h_final;
  rep.pressure = -rep.defect;

  try {
    const Measure pushed = pushforward(sys, mu);
    rep.invariance_residual = weak_star_dist(pushed, mu, fam).value;
  } catch (const LabError&) {
    rep.warnings.push_back("invariance residual unavailable (pushforward unsupported)");
  }

  rep.ruelle_tol = symbolic_path ? 1e-9 : 0.02;
  rep.ruelle_ok = rep.defect >= -rep.ruelle_tol;
  if (!rep.ruelle_ok)
    rep.warnings.push_back("Margulis-Ruelle violation: defect " + fmt_double(rep.defect));
  return rep;
}

std::vector<double> atom_mass_decay(const BuiltSystem& sys, int n_max, int skeleton_index) {
  if (sys.is_torus()) fail(Err::domain_mismatch, "atom masses are circle-side");
  if (skeleton_index < 0 || static_cast<std::size_t>(skeleton_index) >= sys.skeletons.size())
    fail(Err::out_of_domain, "no skeleton " + fmt_int(skeleton_index));
  const auto& sk = *sys.skeletons[static_cast<std::size_t>(skeleton_index)].skel;
  if (n_max < 1 || n_max > sk.max_generation())
    fail(Err::word_too_long, "n_max outside 1.." + fmt_int(sk.max_generation()));
  std::vector<double> out(static_cast<std::size_t>(n_max));
  if (sys.kind == "affine3") {
    for (int n = 1; n <= n_max; ++n)
      out[static_cast<std::size_t>(n - 1)] = 2.0 * std::pow(2.0 / 3.0, n);
  } else {
    for (int n = 1; n <= n_max; ++n) out[static_cast<std::size_t>(n - 1)] = sk.atom_mass(n);
  }
  return out;
}

DistortionRow distortion_ratio(const BuiltSystem& sys, const Word& w, int skeleton_index) {
  if (sys.is_torus()) fail(Err::domain_mismatch, "distortion is circle-side");
  if (skeleton_index < 0 || static_cast<std::size_t>(skeleton_index) >= sys.skeletons.size())
    fail(Err::out_of_domain, "no skeleton " + fmt_int(skeleton_index));
  const auto& sk = *sys.skeletons[static_cast<std::size_t>(skeleton_index)].skel;
  if (!word_valid(w)) fail(Err::out_of_domain, "invalid word");
  if (static_cast<int>(w.size()) > sk.max_generation())
    fail(Err::word_too_long, "word exceeds skeleton resolution");

  const auto& pieces = sys.map->pieces;
  // overlaps below this are tiling roundoff, not real intersections (actual
  // atom/gap structure never drops below ~1e-9 at the supported depths)
  constexpr double kSliver = 1e-13;
  auto extremes_on = [&](const Interval& iv, double& mn, double& mx) {
    std::size_t lo = 0, hi = pieces.size();
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (pieces[mid].x_hi <= iv.lo)
        lo = mid + 1;
      else
        hi = mid;
    }
    mn = 0;
    mx = 0;
    bool first = true;
    for (std::size_t i = lo; i < pieces.size() && pieces[i].x_lo < iv.hi; ++i) {
      const double overlap = std::min(pieces[i].x_hi, iv.hi) - std::max(pieces[i].x_lo, iv.lo);
      if (overlap <= kSliver) continue;
      const double pmn = piece_min_deriv_on(pieces[i], iv.lo, iv.hi);
      const double pmx = piece_max_deriv_on(pieces[i], iv.lo, iv.hi);
      mn = first ? pmn : std::min(mn, pmn);
      mx = first ? pmx : std::max(mx, pmx);
      first = false;
    }
    if (first) {
      // interval thinner than the sliver guard: take the derivative at its
      // midpoint piece
      const double d = map_deriv(*sys.map, iv.mid());
      mn = d;
      mx = d;
    }
  };

  DistortionRow row{1.0, 1.0, 1.0};
  Word shifted = w;
  for (std::size_t j = 0; j < w.size(); ++j) {
    double mn, mx;
    extremes_on(sk.atom_interval(shifted), mn, mx);
    row.inf_deriv *= mn;
    row.sup_deriv *= mx;
    shifted.erase(0, 1);
  }
  row.ratio = row.sup_deriv / row.inf_deriv;
  return row;
}

}  // namespace pesinlab
