#include "pesinlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "pesinlab/errors.hpp"
#include "pesinlab/ksum.hpp"
#include "pesinlab/parallel.hpp"

namespace pesinlab {

namespace {

constexpr const char* kVersion = "pesinlab 0.1.0";
constexpr double kPi = 3.14159265358979323846;

using nlohmann::ordered_json;

ordered_json meta_block(const LabConfig& cfg, const std::string& experiment) {
  ordered_json m;
  // no worker count and no wall time in here: files must be byte-identical
  // across reruns and worker counts
  m["experiment"] = experiment;
  m["version"] = kVersion;
  m["map_kind"] = cfg.map.kind;
  m["seed"] = cfg.seed;
  return m;
}

// Fast evaluator of the family's observables at a point; cos/sin recurrences
// instead of 33 trig calls. Matches the family's definition term by term.
class FamilyEval {
 public:
  FamilyEval(const BuiltSystem& sys, const ObservableFamily& fam)
      : n_(fam.n_terms), torus_(sys.is_torus()) {
    if (torus_) {
      f1_ = sys.tmap->f1.get();
      f2_ = sys.tmap->f2.get();
      int emitted = 1;
      for (int s = 2; emitted < n_; ++s)
        for (int a = 1; a < s && emitted < n_; ++a) {
          pairs_.push_back({a, s - a});
          ++emitted;
        }
      max_idx_ = 0;
      for (auto [a, b] : pairs_) max_idx_ = std::max({max_idx_, a, b});
      if (max_idx_ >= 16)
        fail(Err::config, "torus family truncation too long for the evaluator");
    } else {
      f1_ = sys.map.get();
      max_idx_ = n_ - 1;
    }
  }

  int n_terms() const { return n_; }

  // circle harmonic values h[i], i = 1..max (phi_i at x)
  static void harmonics_at(double x, int max_i, double* h) {
    const double c1 = std::cos(kPi * x), s1 = std::sin(kPi * x);
    double c = c1, s = s1;
    int i = 1;
    for (int m = 1; i <= max_i; ++m) {
      if (m > 1) {
        const double c2 = c * c1 - s * s1;
        const double s2 = s * c1 + c * s1;
        c = c2;
        s = s2;
      }
      h[i++] = 0.5 * (1.0 + c);
      if (i <= max_i) h[i++] = 0.5 * (1.0 + s);
    }
  }

  void values(double x, double y, double* out) const {
    if (!torus_) {
      out[0] = -std::log(map_deriv(*f1_, x));
      harmonics_at(x, n_ - 1, out);  // out[1..n-1]
      return;
    }
    double ha[16], hb[16];
    harmonics_at(x, max_idx_, ha);
    harmonics_at(y, max_idx_, hb);
    out[0] = -std::log(map_deriv(*f1_, x)) - std::log(map_deriv(*f2_, y));
    for (std::size_t i = 0; i < pairs_.size(); ++i)
      out[i + 1] = ha[pairs_[i].first] * hb[pairs_[i].second];
  }

 private:
  int n_;
  bool torus_;
  const CircleMap* f1_ = nullptr;
  const CircleMap* f2_ = nullptr;
  std::vector<std::pair<int, int>> pairs_;
  int max_idx_ = 0;
};

// Per-point engine shared by the basin and decay scans: runs one dithered
// orbit, accumulating family means, and reports dist*(sigma_n, candidate) at
// each scheduled time against each candidate integral vector.
std::vector<double> scan_point(const BuiltSystem& sys, const FamilyEval& ev,
                               const std::vector<std::vector<double>>& cands,
                               const std::vector<long>& times, RngStream& rng) {
  const int nt = ev.n_terms();
  std::vector<NeumaierSum> sums(static_cast<std::size_t>(nt));
  std::vector<double> vals(static_cast<std::size_t>(nt));
  std::vector<double> out;
  out.reserve(times.size() * cands.size());
  const bool torus = sys.is_torus();
  double x = rng.uniform(-1.0, 1.0);
  double y = torus ? rng.uniform(-1.0, 1.0) : 0.0;
  long step = 0;
  for (long n : times) {
    while (step < n) {
      ev.values(x, y, vals.data());
      for (int i = 0; i < nt; ++i)
        sums[static_cast<std::size_t>(i)].add(vals[static_cast<std::size_t>(i)]);
      if (torus) {
        x = pseudo_step(*sys.tmap->f1, x, rng);
        y = pseudo_step(*sys.tmap->f2, y, rng);
      } else {
        x = pseudo_step(*sys.map, x, rng);
      }
      ++step;
    }
    const double inv = 1.0 / static_cast<double>(n);
    for (const auto& cand : cands) {
      NeumaierSum d;
      for (int i = 0; i < nt; ++i)
        d.add(std::ldexp(
            std::abs(sums[static_cast<std::size_t>(i)].value() * inv -
                     cand[static_cast<std::size_t>(i)]),
            -i));
      out.push_back(d.value());
    }
  }
  return out;
}

std::string measure_list_echo(const LabConfig& cfg) {
  std::string s;
  for (const auto& m : cfg.measures) s += (s.empty() ? "" : ",") + m.name;
  return s;
}

}  // namespace

ordered_json pesin_report_json(const PesinReport& rep) {
  ordered_json j;
  j["system"] = rep.system;
  j["measure"] = rep.measure;
  j["method"] = rep.method;
  j["params"] = {{"n_max", rep.n_max_used}, {"orbit_len", rep.orbit_len_used}};
  j["h_sequence"] = rep.h_sequence;
  j["increments"] = rep.increments;
  j["h_final"] = rep.h_final;
  j["lyap"] = rep.lyap;
  j["lyap_error"] = rep.lyap_error;
  j["defect"] = rep.defect;
  j["pressure"] = rep.pressure;
  if (rep.birkhoff) j["birkhoff"] = *rep.birkhoff;
  if (rep.invariance_residual) j["invariance_residual"] = *rep.invariance_residual;
  j["ruelle_tol"] = rep.ruelle_tol;
  j["ruelle_ok"] = rep.ruelle_ok;
  j["seed"] = rep.seed;
  j["warnings"] = rep.warnings;
  return j;
}

LabReport cmd_validate(const LabConfig& cfg) {
  LabReport rep;
  rep.experiment = "validate";
  rep.summary = meta_block(cfg, "validate");
  const BuiltSystem sys = build_system(cfg.map);

  ordered_json maps = ordered_json::array();
  auto validate_one = [&](const std::string& label, const CircleMap& map) {
    const ValidationReport v = validate_circle_map(map, cfg.exp.tol);
    ordered_json j;
    j["map"] = label;
    j["c0_residual"] = v.c0_max;
    j["c1_residual"] = v.c1_max;
    j["lambda"] = v.lambda;
    j["degree"] = v.degree;
    j["degree_residual"] = v.degree_residual;
    j["pieces"] = map.pieces.size();
    maps.push_back(j);
  };
  if (sys.is_torus()) {
    validate_one("left:" + sys.left->kind, *sys.tmap->f1);
    validate_one("right:" + sys.right->kind, *sys.tmap->f2);
    rep.summary["gamma"] = sys.tmap->gamma();
  } else {
    validate_one(sys.kind, *sys.map);
  }
  rep.summary["maps"] = maps;

  const GapImageReport gap = gap_image_check(sys, cfg.exp.max_gen, cfg.exp.gap_tol, true);
  ordered_json gj;
  gj["max_gap_residual"] = gap.max_gap_residual;
  gj["max_atom_residual"] = gap.max_atom_residual;
  gj["checked"] = gap.checked;
  gj["max_generation"] = gap.max_generation;
  rep.summary["gap_conjugacy"] = gj;

  CsvTable t;
  t.name = "validate";
  t.header = {"map", "c0_residual", "c1_residual", "lambda", "degree"};
  for (const auto& j : maps)
    t.rows.push_back({j["map"].get<std::string>(), fmt_double(j["c0_residual"].get<double>()),
                      fmt_double(j["c1_residual"].get<double>()),
                      fmt_double(j["lambda"].get<double>()),
                      fmt_int(j["degree"].get<long long>())});
  rep.tables.push_back(std::move(t));
  return rep;
}

LabReport cmd_cantor_report(const LabConfig& cfg) {
  LabReport rep;
  rep.experiment = "cantor-report";
  rep.summary = meta_block(cfg, "cantor-report");
  const BuiltSystem sys = build_system(cfg.map);
  if (sys.is_torus()) fail(Err::config, "cantor-report expects a circle system");
  if (sys.skeletons.empty()) fail(Err::config, sys.kind + " carries no Cantor skeleton");

  ordered_json totals = ordered_json::array();
  for (std::size_t si = 0; si < sys.skeletons.size(); ++si) {
    const auto& ref = sys.skeletons[si];
    const auto& sk = *ref.skel;
    const int N = sk.max_generation();
    const auto masses = atom_mass_decay(sys, N, static_cast<int>(si));
    CsvTable t;
    t.name = sys.skeletons.size() == 1 ? "cantor_report" : "cantor_report_" + ref.label;
    t.header = {"generation", "L_n", "m_A_n", "alpha_n", "gap_len"};
    for (int n = 1; n <= N; ++n) {
      std::string alpha_s, gap_s;
      if (sk.params().schedule.closed_form ||
          static_cast<std::size_t>(n) <= sk.params().schedule.values.size()) {
        const double a = sk.alpha(n);
        alpha_s = fmt_double(a);
        gap_s = fmt_double(std::ldexp(a, -n));
      }
      t.rows.push_back({fmt_int(n), fmt_double(sk.atom_len(n)),
                        fmt_double(masses[static_cast<std::size_t>(n - 1)]), alpha_s, gap_s});
    }
    rep.tables.push_back(std::move(t));
    ordered_json tj;
    tj["skeleton"] = ref.label;
    tj["total_measure"] = sk.total_measure();
    tj["tail_bound"] = sk.total_measure_tail();
    tj["warnings"] = sk.warnings();
    totals.push_back(tj);
  }
  rep.summary["totals"] = totals;
  return rep;
}

LabReport cmd_pesin_check(const LabConfig& cfg) {
  LabReport rep;
  rep.experiment = "pesin-check";
  rep.summary = meta_block(cfg, "pesin-check");
  rep.summary["measures"] = measure_list_echo(cfg);
  if (cfg.measures.empty()) fail(Err::infeasible_experiment, "no measures configured");
  const BuiltSystem sys = build_system(cfg.map);
  const ObservableFamily fam = make_family(sys);

  PesinOptions opts;
  opts.n_max = cfg.exp.n_max;
  opts.orbit_len = cfg.exp.orbit_len;
  opts.seed = cfg.seed;

  ordered_json reports = ordered_json::array();
  CsvTable t;
  t.name = "pesin_check";
  t.header = {"system", "measure",  "method",  "h_final", "lyap",
              "defect", "pressure", "residual", "ruelle_ok"};
  for (const auto& mspec : cfg.measures) {
    const Measure mu = build_measure(mspec, sys);
    const PesinReport pr = pesin_defect(sys, mu, fam, opts);
    reports.push_back(pesin_report_json(pr));
    t.rows.push_back({pr.system, pr.measure, pr.method, fmt_double(pr.h_final),
                      fmt_double(pr.lyap), fmt_double(pr.defect), fmt_double(pr.pressure),
                      pr.invariance_residual ? fmt_double(*pr.invariance_residual) : "",
                      pr.ruelle_ok ? "1" : "0"});
  }
  rep.summary["reports"] = reports;
  rep.tables.push_back(std::move(t));
  return rep;
}

LabReport cmd_basin_scan(const LabConfig& cfg) {
  LabReport rep;
  rep.experiment = "basin-scan";
  rep.summary = meta_block(cfg, "basin-scan");
  const auto& exp = cfg.exp;
  if (exp.times.empty() || exp.epsilons.empty())
    fail(Err::infeasible_experiment, "basin-scan needs a times schedule and epsilons");
  if (exp.n_points < 1) fail(Err::infeasible_experiment, "n_points must be >= 1");
  if (!std::is_sorted(exp.times.begin(), exp.times.end()))
    fail(Err::config, "times schedule must be ascending");

  const BuiltSystem sys = build_system(cfg.map);
  const ObservableFamily fam = make_family(sys);
  const FamilyEval ev(sys, fam);

  std::vector<std::string> cand_names = exp.candidates;
  if (cand_names.empty())
    for (const auto& m : cfg.measures) cand_names.push_back(m.name);
  if (cand_names.empty()) fail(Err::infeasible_experiment, "no candidate measures");

  std::vector<std::vector<double>> cand_vecs;
  for (const auto& name : cand_names) {
    const MeasureSpec* found = nullptr;
    for (const auto& m : cfg.measures)
      if (m.name == name) found = &m;
    if (!found) fail(Err::config, "candidate '" + name + "' is not a configured measure");
    cand_vecs.push_back(family_integrals(build_measure(*found, sys), fam));
  }

  const std::size_t M = static_cast<std::size_t>(exp.n_points);
  const auto dists = run_indexed<std::vector<double>>(M, cfg.workers, [&](std::size_t idx) {
    RngStream rng = derive_stream(cfg.seed, idx);
    return scan_point(sys, ev, cand_vecs, exp.times, rng);
  });

  CsvTable t;
  t.name = "basin_scan";
  t.header = {"n", "epsilon", "candidate", "fraction"};
  for (std::size_t ti = 0; ti < exp.times.size(); ++ti)
    for (double eps : exp.epsilons)
      for (std::size_t ci = 0; ci < cand_names.size(); ++ci) {
        long hits = 0;
        const std::size_t off = ti * cand_names.size() + ci;
        for (const auto& d : dists)
          if (d[off] < eps) ++hits;
        t.rows.push_back({fmt_int(exp.times[ti]), fmt_double(eps), cand_names[ci],
                          fmt_double(static_cast<double>(hits) / static_cast<double>(M))});
      }
  rep.summary["n_points"] = exp.n_points;
  rep.summary["candidates"] = cand_names;
  rep.summary["tail_bound"] = fam.tail_bound();
  rep.summary["note"] =
      "fractions are finite-time proxies for epsilon-weak basin mass; orbits are dithered "
      "pseudo-orbits (amplitude 2^-48, seeded)";
  rep.tables.push_back(std::move(t));
  return rep;
}

LabReport cmd_decay_rate(const LabConfig& cfg) {
  LabReport rep;
  rep.experiment = "decay-rate";
  rep.summary = meta_block(cfg, "decay-rate");
  const auto& exp = cfg.exp;
  if (exp.schedule.empty()) fail(Err::infeasible_experiment, "decay-rate needs a schedule");
  if (!std::is_sorted(exp.schedule.begin(), exp.schedule.end()))
    fail(Err::config, "schedule must be ascending");
  if (exp.schedule.size() > 64) fail(Err::config, "schedule too long (max 64 rows)");
  if (cfg.measures.empty()) fail(Err::infeasible_experiment, "no measures configured");

  const BuiltSystem sys = build_system(cfg.map);
  const ObservableFamily fam = make_family(sys);
  const FamilyEval ev(sys, fam);

  const MeasureSpec* tspec = &cfg.measures.front();
  if (!exp.target.empty()) {
    tspec = nullptr;
    for (const auto& m : cfg.measures)
      if (m.name == exp.target) tspec = &m;
    if (!tspec) fail(Err::config, "target '" + exp.target + "' is not a configured measure");
  }
  const Measure target = build_measure(*tspec, sys);
  const std::vector<std::vector<double>> cand_vecs = {family_integrals(target, fam)};

  // defect r of the target drives the theoretical e^{-n r / 2} ceiling
  PesinOptions popts;
  popts.n_max = cfg.exp.n_max;
  popts.orbit_len = cfg.exp.orbit_len;
  popts.seed = cfg.seed;
  const PesinReport target_rep = pesin_defect(sys, target, fam, popts);
  const double r = target_rep.defect;

  const std::size_t M = static_cast<std::size_t>(exp.decay_points);
  const double eps = exp.epsilon_star;
  const auto masks = run_indexed<std::uint64_t>(M, cfg.workers, [&](std::size_t idx) {
    RngStream rng = derive_stream(cfg.seed, idx);
    const auto d = scan_point(sys, ev, cand_vecs, exp.schedule, rng);
    std::uint64_t mask = 0;
    for (std::size_t i = 0; i < d.size(); ++i)
      if (d[i] < eps) mask |= 1ull << i;
    return mask;
  });

  std::vector<long> hits(exp.schedule.size(), 0);
  for (std::uint64_t m : masks)
    for (std::size_t i = 0; i < exp.schedule.size(); ++i)
      if (m & (1ull << i)) ++hits[i];

  CsvTable t;
  t.name = "decay_rate";
  t.header = {"n", "fraction"};
  std::vector<double> fractions(exp.schedule.size());
  for (std::size_t i = 0; i < exp.schedule.size(); ++i) {
    fractions[i] = static_cast<double>(hits[i]) / static_cast<double>(M);
    t.rows.push_back({fmt_int(exp.schedule[i]), fmt_double(fractions[i])});
  }
  rep.tables.push_back(std::move(t));

  // weighted least squares of log(fraction) on n, rows censored below min_hits
  ordered_json fit;
  std::vector<std::size_t> used;
  ordered_json censored = ordered_json::array();
  for (std::size_t i = 0; i < hits.size(); ++i) {
    if (hits[i] >= exp.min_hits)
      used.push_back(i);
    else
      censored.push_back(exp.schedule[i]);
  }
  if (used.size() >= 2) {
    double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i : used) {
      const double wgt = static_cast<double>(hits[i]);
      const double x = static_cast<double>(exp.schedule[i]);
      const double y = std::log(fractions[i]);
      sw += wgt;
      sx += wgt * x;
      sy += wgt * y;
      sxx += wgt * x * x;
      sxy += wgt * x * y;
    }
    const double det = sw * sxx - sx * sx;
    const double slope = (sw * sxy - sx * sy) / det;
    const double intercept = (sxx * sy - sx * sxy) / det;
    double ss_res = 0, ss_tot = 0;
    const double ybar = sy / sw;
    for (std::size_t i : used) {
      const double wgt = static_cast<double>(hits[i]);
      const double x = static_cast<double>(exp.schedule[i]);
      const double y = std::log(fractions[i]);
      ss_res += wgt * (y - (intercept + slope * x)) * (y - (intercept + slope * x));
      ss_tot += wgt * (y - ybar) * (y - ybar);
    }
    fit["rate"] = -slope;
    fit["intercept"] = intercept;
    fit["r_squared"] = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
    fit["rows_used"] = used.size();
  } else {
    fit["skipped"] = "AllZeroFractions: fewer than two rows reached min_hits";
  }
  fit["censored_rows"] = censored;
  fit["min_hits"] = exp.min_hits;
  fit["target_defect_r"] = r;
  if (r > 1e-6) {
    fit["ceiling_r_over_2"] = 0.5 * r;
    if (fit.contains("rate")) {
      const double ratio = fit["rate"].get<double>() / (0.5 * r);
      fit["rate_over_ceiling"] = ratio;
      if (ratio > 1.0)
        fit["note"] = "fitted rate exceeds the one-sided ceiling (allowed: the bound is an "
                      "upper bound on the fraction, not on the rate)";
    }
  } else {
    fit["ceiling_r_over_2"] = nullptr;
  }
  rep.summary["target"] = tspec->name;
  rep.summary["epsilon_star"] = eps;
  rep.summary["n_points"] = exp.decay_points;
  rep.summary["hits"] = hits;
  rep.summary["fit"] = fit;
  return rep;
}

LabReport cmd_distortion(const LabConfig& cfg) {
  LabReport rep;
  rep.experiment = "distortion";
  rep.summary = meta_block(cfg, "distortion");
  const auto& exp = cfg.exp;
  if (exp.systems.empty()) fail(Err::infeasible_experiment, "no systems listed");
  if (exp.generations < 1) fail(Err::infeasible_experiment, "generations must be >= 1");

  CsvTable t;
  t.name = "distortion";
  t.header = {"system", "n", "inf_deriv", "sup_deriv", "ratio", "m_A_n"};
  ordered_json sysinfo = ordered_json::array();
  for (const auto& kind : exp.systems) {
    MapSpec ms = cfg.map;
    if (ms.kind != kind) {
      ms = MapSpec{};
      ms.kind = kind;
    }
    const BuiltSystem sys = build_system(ms);
    if (sys.is_torus() || sys.skeletons.empty())
      fail(Err::config, "distortion rows need circle systems with a skeleton, got " + kind);
    const int gens = std::min(exp.generations,
                              std::min(sys.skeletons[0].skel->max_generation(), 20));
    const auto masses = atom_mass_decay(sys, gens);
    Word w;
    for (int n = 1; n <= gens; ++n) {
      w.push_back('0');  // leftmost atom chain, representative and deterministic
      const DistortionRow row = distortion_ratio(sys, w);
      t.rows.push_back({kind, fmt_int(n), fmt_double(row.inf_deriv),
                        fmt_double(row.sup_deriv), fmt_double(row.ratio),
                        fmt_double(masses[static_cast<std::size_t>(n - 1)])});
    }
    ordered_json sj;
    sj["system"] = kind;
    sj["generations"] = gens;
    sj["total_measure"] = sys.skeletons[0].skel->total_measure();
    sysinfo.push_back(sj);
  }
  rep.summary["systems"] = sysinfo;
  rep.summary["word_convention"] = "atom word 0^n (leftmost chain)";
  rep.tables.push_back(std::move(t));
  return rep;
}

std::vector<std::string> write_report(const LabReport& rep, const std::string& out_dir,
                                      const std::string& format) {
  std::filesystem::create_directories(out_dir);
  std::vector<std::string> written;
  if (format == "json" || format == "both") {
    const std::string path = out_dir + "/" + rep.experiment + ".json";
    write_text_file(path, rep.summary.dump(2) + "\n");
    written.push_back(path);
  }
  if (format == "csv" || format == "both") {
    for (const auto& t : rep.tables) {
      const std::string path = out_dir + "/" + t.name + ".csv";
      write_text_file(path, t.to_string());
      written.push_back(path);
    }
  }
  return written;
}

}  // namespace pesinlab
