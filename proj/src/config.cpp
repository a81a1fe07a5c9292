#include "pesinlab/config.hpp"

#include <json.hpp>

#include "pesinlab/errors.hpp"
#include "pesinlab/textio.hpp"

namespace pesinlab {

namespace {

using nlohmann::json;

MapSpec parse_map_spec(const json& j) {
  MapSpec m;
  m.kind = j.value("kind", m.kind);
  m.b0 = j.value("b0", m.b0);
  m.k = j.value("k", m.k);
  m.N = j.value("N", m.N);
  m.map_depth = j.value("map_depth", m.map_depth);
  m.c1 = j.value("c1", m.c1);
  m.b1 = j.value("b1", m.b1);
  m.k2 = j.value("k2", m.k2);
  if (j.contains("left")) m.left = std::make_shared<MapSpec>(parse_map_spec(j.at("left")));
  if (j.contains("right")) m.right = std::make_shared<MapSpec>(parse_map_spec(j.at("right")));
  return m;
}

MeasureSpec parse_measure_spec(const json& j) {
  MeasureSpec s;
  s.kind = j.value("kind", s.kind);
  s.name = j.value("name", s.name);
  s.skeleton_label = j.value("skeleton_label", s.skeleton_label);
  s.depth = j.value("depth", s.depth);
  s.point = j.value("point", s.point);
  s.point_y = j.value("point_y", s.point_y);
  s.x0 = j.value("x0", s.x0);
  s.n = j.value("n", s.n);
  if (j.contains("left"))
    s.left = std::make_shared<MeasureSpec>(parse_measure_spec(j.at("left")));
  if (j.contains("right"))
    s.right = std::make_shared<MeasureSpec>(parse_measure_spec(j.at("right")));
  if (s.name.empty()) s.name = s.kind;
  return s;
}

}  // namespace

LabConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& ex) {
    fail(Err::config, std::string("config is not valid JSON: ") + ex.what());
  }
  LabConfig cfg;
  try {
    if (j.contains("map")) cfg.map = parse_map_spec(j.at("map"));
    if (j.contains("torus")) {
      // torus.left / torus.right reference factor sub-specs
      const auto& t = j.at("torus");
      cfg.map.kind = "torus";
      if (t.contains("left")) cfg.map.left = std::make_shared<MapSpec>(parse_map_spec(t.at("left")));
      if (t.contains("right"))
        cfg.map.right = std::make_shared<MapSpec>(parse_map_spec(t.at("right")));
    }
    if (j.contains("measures"))
      for (const auto& m : j.at("measures")) cfg.measures.push_back(parse_measure_spec(m));
    if (j.contains("experiment")) {
      const auto& e = j.at("experiment");
      auto& x = cfg.exp;
      x.n_points = e.value("n_points", x.n_points);
      if (e.contains("times")) x.times = e.at("times").get<std::vector<long>>();
      if (e.contains("epsilons")) x.epsilons = e.at("epsilons").get<std::vector<double>>();
      if (e.contains("candidates"))
        x.candidates = e.at("candidates").get<std::vector<std::string>>();
      x.target = e.value("target", x.target);
      x.epsilon_star = e.value("epsilon_star", x.epsilon_star);
      if (e.contains("schedule")) x.schedule = e.at("schedule").get<std::vector<long>>();
      x.decay_points = e.value("decay_points", x.decay_points);
      x.min_hits = e.value("min_hits", x.min_hits);
      x.generations = e.value("generations", x.generations);
      if (e.contains("systems")) x.systems = e.at("systems").get<std::vector<std::string>>();
      x.max_gen = e.value("max_gen", x.max_gen);
      x.tol = e.value("tol", x.tol);
      x.gap_tol = e.value("gap_tol", x.gap_tol);
      x.n_max = e.value("n_max", x.n_max);
      x.orbit_len = e.value("orbit_len", x.orbit_len);
    }
    if (j.contains("rng")) cfg.seed = j.at("rng").value("seed", cfg.seed);
    cfg.workers = j.value("workers", cfg.workers);
    if (j.contains("output")) {
      cfg.out_dir = j.at("output").value("dir", cfg.out_dir);
      cfg.format = j.at("output").value("format", cfg.format);
    }
  } catch (const LabError&) {
    throw;
  } catch (const std::exception& ex) {
    fail(Err::config, std::string("bad config field: ") + ex.what());
  }
  if (cfg.workers < 1) fail(Err::config, "workers must be >= 1");
  if (cfg.format != "csv" && cfg.format != "json" && cfg.format != "both")
    fail(Err::config, "output.format must be csv, json or both");
  return cfg;
}

LabConfig parse_config_file(const std::string& path) {
  return parse_config_text(read_text_file(path));
}

BuiltSystem build_system(const MapSpec& spec) {
  if (spec.kind == "doubling") return build_doubling();
  if (spec.kind == "affine3") return build_reference_affine(spec.N);
  if (spec.kind == "example1") {
    Example1Spec s;
    s.params.b0 = spec.b0;
    s.params.schedule = AlphaSchedule::inverse_square(spec.k);
    s.params.max_generation = spec.N;
    s.map_depth = spec.map_depth;
    return build_example1(s);
  }
  if (spec.kind == "example2") {
    Example2Spec s;
    s.b0 = spec.b0;
    s.k = spec.k;
    s.c1 = spec.c1;
    s.b1 = spec.b1;
    s.k2 = spec.k2;
    s.N = spec.N;
    s.map_depth = spec.map_depth;
    return build_example2(s);
  }
  if (spec.kind == "torus") {
    if (!spec.left || !spec.right)
      fail(Err::config, "torus map needs torus.left and torus.right sub-specs");
    return build_torus(build_system(*spec.left), build_system(*spec.right));
  }
  fail(Err::config, "unknown map.kind '" + spec.kind + "'");
}

namespace {

Measure build_mu_K(const MeasureSpec& spec, const BuiltSystem& sys) {
  if (!sys.is_torus()) {
    for (const auto& ref : sys.skeletons)
      if (ref.label == spec.skeleton_label) {
        Measure m = cantor_bernoulli(ref.skel, std::min(spec.depth, ref.skel->max_generation()));
        m.name = spec.name;
        return m;
      }
    fail(Err::config, "skeleton label '" + spec.skeleton_label + "' not found in " + sys.kind);
  }
  for (const auto& p : sys.product_skeletons)
    if (p.label == spec.skeleton_label) {
      Measure m = product_measure(
          cantor_bernoulli(p.first.skel, std::min(spec.depth, p.first.skel->max_generation())),
          cantor_bernoulli(p.second.skel,
                           std::min(spec.depth, p.second.skel->max_generation())));
      m.name = spec.name;
      return m;
    }
  fail(Err::config, "product skeleton label '" + spec.skeleton_label + "' not found");
}

}  // namespace

Measure build_measure(const MeasureSpec& spec, const BuiltSystem& sys) {
  Measure m;
  if (spec.kind == "lebesgue") {
    m = sys.is_torus() ? product_measure(lebesgue(), lebesgue()) : lebesgue();
  } else if (spec.kind == "dirac") {
    m = sys.is_torus() ? dirac2(spec.point, spec.point_y) : dirac(spec.point);
  } else if (spec.kind == "mu_K") {
    m = build_mu_K(spec, sys);
  } else if (spec.kind == "empirical") {
    if (sys.is_torus()) fail(Err::config, "empirical measure specs are circle-side");
    if (spec.n < 1) fail(Err::config, "empirical.n must be >= 1");
    m = empirical_from_orbit(*sys.map, spec.x0, static_cast<int>(spec.n));
  } else if (spec.kind == "product") {
    if (!sys.is_torus()) fail(Err::config, "product measures need a torus system");
    if (!spec.left || !spec.right) fail(Err::config, "product measure needs left/right");
    m = product_measure(build_measure(*spec.left, *sys.left),
                        build_measure(*spec.right, *sys.right));
  } else {
    fail(Err::config, "unknown measure.kind '" + spec.kind + "'");
  }
  m.name = spec.name;
  return m;
}

}  // namespace pesinlab
