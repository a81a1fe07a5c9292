#include "pesinlab/systems.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "pesinlab/errors.hpp"
#include "pesinlab/textio.hpp"

namespace pesinlab {

namespace {

// Pieces for one Bowen branch (itinerary bit a0), realized to generation D.
// Every atom of generation D maps onto its shifted atom, every gap of
// generation n < D onto its shifted gap (generation 1 onto the central gap),
// all with endpoint derivatives exactly 2. Images are stored in circle
// coordinates: endpoint values are then the skeleton's own doubles and the
// realized map follows the shift bit-exactly on skeleton endpoints.
void emit_branch(const BowenSkeleton& sk, char a0, int depth,
                 std::vector<MonotonePiece>& out) {
  std::function<void(const Word&)> rec = [&](const Word& w) {
    const int n = static_cast<int>(w.size());
    if (n == depth) {
      const Interval dom = sk.atom_interval(w);
      const Interval img = depth == 1 ? sk.ambient() : sk.atom_interval(w.substr(1));
      out.push_back(make_piece(dom.lo, dom.hi, img.lo, img.hi, 2.0, 2.0));
      return;
    }
    rec(w + '0');
    const Interval dom = sk.gap_interval(w);
    const Interval img = n == 1 ? sk.central_gap() : sk.gap_interval(w.substr(1));
    const double r = img.len() / dom.len();
    if (!(r > 2.0))
      fail(Err::gap_ratio, "gap " + w + ": image/gap ratio " + fmt_double(r) +
                               " must exceed 2");
    out.push_back(make_piece(dom.lo, dom.hi, img.lo, img.hi, 2.0, 2.0));
    rec(w + '1');
  };
  rec(Word(1, a0));
}

void sort_pieces(std::vector<MonotonePiece>& ps) {
  std::sort(ps.begin(), ps.end(),
            [](const MonotonePiece& a, const MonotonePiece& b) { return a.x_lo < b.x_lo; });
}

}  // namespace

BuiltSystem build_doubling() {
  std::vector<MonotonePiece> ps;
  ps.push_back(make_piece(-1.0, 0.0, -2.0, 0.0, 2.0, 2.0));
  ps.push_back(make_piece(0.0, 1.0, 0.0, 2.0, 2.0, 2.0));
  std::vector<SymbolCell> cells = {{{-1.0, 0.0}, "0"}, {{0.0, 1.0}, "1"}};
  BuiltSystem sys;
  sys.kind = "doubling";
  sys.map = std::make_shared<CircleMap>(assemble_circle_map(std::move(ps), std::move(cells)));
  sys.map_depth = 0;
  sys.log_deriv_on_K = std::log(2.0);
  return sys;
}

BuiltSystem build_example1(const Example1Spec& spec) {
  if (!(spec.params.b0 < 0.5))
    fail(Err::params_infeasible,
         "example 1 needs b0 < 1/2 so the central piece ratio 1/b0 exceeds 2");
  auto sk = std::make_shared<BowenSkeleton>(spec.params);
  const int D = std::min(spec.map_depth, sk->max_generation());
  if (D < 1) fail(Err::params_infeasible, "map_depth must be >= 1");

  const double b0 = spec.params.b0;
  std::vector<MonotonePiece> ps;
  emit_branch(*sk, '0', D, ps);
  // central piece maps the generation-0 gap closure onto the whole circle
  ps.push_back(make_piece(-b0, b0, -1.0, 1.0, 2.0, 2.0));
  emit_branch(*sk, '1', D, ps);
  sort_pieces(ps);

  std::vector<SymbolCell> cells = {
      {{-1.0, -b0}, "I0"}, {{b0, 1.0}, "I1"}, {{-b0, b0}, "Ic"}};
  BuiltSystem sys;
  sys.kind = "example1";
  sys.map = std::make_shared<CircleMap>(assemble_circle_map(std::move(ps), std::move(cells)));
  sys.skeletons.push_back({"K", sk});
  sys.map_depth = D;
  sys.log_deriv_on_K = std::log(2.0);
  return sys;
}

BuiltSystem build_example2(const Example2Spec& spec) {
  if (!(0.0 < spec.b1 && spec.b1 < spec.c1 && spec.c1 < spec.b0 && spec.b0 < 1.0))
    fail(Err::params_infeasible, "example 2 needs 0 < b1 < c1 < b0 < 1");

  const double b0 = spec.b0, c1 = spec.c1, b1 = spec.b1;
  // the four glue segments, each mapped with endpoint derivatives 2
  struct Glue {
    const char* name;
    double x0, x1, y0, y1;
  };
  const Glue glues[] = {
      {"[-b0,-c1] -> [-1,-c1]", -b0, -c1, -1.0, -c1},
      {"[-b1,0]  -> [c1,1]", -b1, 0.0, c1, 1.0},
      {"[0,b1]   -> [-1,-c1]", 0.0, b1, -1.0, -c1},
      {"[c1,b0]  -> [c1,1]", c1, b0, c1, 1.0},
  };
  for (const auto& g : glues) {
    const double r = (g.y1 - g.y0) / (g.x1 - g.x0);
    if (!(r > 2.0))
      fail(Err::glue_ratio,
           std::string(g.name) + ": ratio " + fmt_double(r) + " must exceed 2");
  }

  BowenParams outer;
  outer.lo = -1.0;
  outer.hi = 1.0;
  outer.b0 = b0;
  outer.schedule = AlphaSchedule::inverse_square(spec.k);
  outer.max_generation = spec.N;
  auto outer_sk = std::make_shared<BowenSkeleton>(outer);

  BowenParams inner;
  inner.lo = -c1;
  inner.hi = c1;
  inner.b0 = b1;
  inner.schedule = AlphaSchedule::inverse_square(spec.k2);
  inner.max_generation = spec.N;
  auto inner_sk = std::make_shared<BowenSkeleton>(inner);

  const int D = std::min(spec.map_depth, spec.N);
  if (D < 1) fail(Err::params_infeasible, "map_depth must be >= 1");

  std::vector<MonotonePiece> ps;
  emit_branch(*outer_sk, '0', D, ps);  // G0 on [-1,-b0]
  emit_branch(*inner_sk, '0', D, ps);  // H0 on [-c1,-b1]
  emit_branch(*inner_sk, '1', D, ps);  // H1 on [b1,c1]
  emit_branch(*outer_sk, '1', D, ps);  // G1 on [b0,1]
  for (const auto& g : glues) ps.push_back(make_piece(g.x0, g.x1, g.y0, g.y1, 2.0, 2.0));
  sort_pieces(ps);

  std::vector<SymbolCell> cells = {
      {{-1.0, -b0}, "I0"}, {{b0, 1.0}, "I1"},  {{-c1, -b1}, "J0"}, {{b1, c1}, "J1"},
      {{-b0, -c1}, "g0a"}, {{-b1, 0.0}, "g0b"}, {{0.0, b1}, "g1a"}, {{c1, b0}, "g1b"}};
  BuiltSystem sys;
  sys.kind = "example2";
  sys.map = std::make_shared<CircleMap>(assemble_circle_map(std::move(ps), std::move(cells)));
  sys.skeletons.push_back({"K1", outer_sk});
  sys.skeletons.push_back({"K2", inner_sk});
  sys.map_depth = D;
  sys.log_deriv_on_K = std::log(2.0);
  return sys;
}

BuiltSystem build_reference_affine(int N) {
  const double third = 1.0 / 3.0;
  // endpoint derivatives pinned to each piece's own ratio: e_coeff is then
  // exactly zero and every piece is genuinely affine
  auto affine = [](double x0, double x1, double y0, double y1) {
    const double rho = (y1 - y0) / (x1 - x0);
    return make_piece(x0, x1, y0, y1, rho, rho);
  };
  std::vector<MonotonePiece> ps;
  ps.push_back(affine(-1.0, -third, -3.0, -1.0));
  ps.push_back(affine(-third, third, -1.0, 1.0));
  ps.push_back(affine(third, 1.0, 1.0, 3.0));
  std::vector<SymbolCell> cells = {
      {{-1.0, -third}, "I0"}, {{third, 1.0}, "I1"}, {{-third, third}, "Ic"}};

  // middle-thirds geometry as an explicit schedule: gaps of generation n have
  // length 2/3^{n+1}, i.e. alpha_n = (2/3)^{n+1}
  std::vector<double> alphas(static_cast<std::size_t>(std::max(N - 1, 1)));
  for (std::size_t i = 0; i < alphas.size(); ++i)
    alphas[i] = std::pow(2.0 / 3.0, static_cast<double>(i) + 2.0);
  BowenParams params;
  params.lo = -1.0;
  params.hi = 1.0;
  params.b0 = third;
  params.schedule = AlphaSchedule::explicit_list(std::move(alphas));
  params.max_generation = N;

  BuiltSystem sys;
  sys.kind = "affine3";
  sys.map = std::make_shared<CircleMap>(assemble_circle_map(std::move(ps), std::move(cells)));
  sys.skeletons.push_back({"K", std::make_shared<BowenSkeleton>(params)});
  sys.map_depth = N;  // the map is globally affine, no realization cutoff
  sys.log_deriv_on_K = std::log(3.0);
  return sys;
}

BuiltSystem build_torus(BuiltSystem left_sys, BuiltSystem right_sys) {
  if (left_sys.is_torus() || right_sys.is_torus())
    fail(Err::domain_mismatch, "torus factors must be circle systems");
  BuiltSystem sys;
  sys.kind = "torus(" + left_sys.kind + "," + right_sys.kind + ")";
  sys.left = std::make_shared<BuiltSystem>(std::move(left_sys));
  sys.right = std::make_shared<BuiltSystem>(std::move(right_sys));
  sys.tmap = std::make_shared<TorusMap>(TorusMap{sys.left->map, sys.right->map});
  if (!sys.left->skeletons.empty()) {
    for (const auto& r : sys.right->skeletons)
      sys.product_skeletons.push_back(
          {sys.left->skeletons[0].label + "x" + r.label, sys.left->skeletons[0], r});
  }
  sys.map_depth = std::min(sys.left->map_depth, sys.right->map_depth);
  sys.log_deriv_on_K = sys.left->log_deriv_on_K + sys.right->log_deriv_on_K;
  return sys;
}

namespace {

void check_skeleton_conjugacy(const CircleMap& map, const BowenSkeleton& sk, int max_gen,
                              int map_depth, double tol, const std::string& label,
                              GapImageReport& rep) {
  const int gap_gen = std::min({max_gen, map_depth - 1, sk.max_generation() - 1});
  const int atom_gen = std::min({max_gen, map_depth, sk.max_generation()});
  rep.max_generation = std::max(rep.max_generation, atom_gen);

  auto check_pair = [&](const std::string& what, const Word& w, const Interval& dom,
                        const Interval& img, bool is_gap) {
    const double rlo = circle_distance(map_eval(map, dom.lo), img.lo);
    const double rhi = circle_distance(map_eval(map, dom.hi), img.hi);
    const double r = std::max(rlo, rhi);
    double& worst = is_gap ? rep.max_gap_residual : rep.max_atom_residual;
    worst = std::max(worst, r);
    ++rep.checked;
    if (r > tol)
      rep.violations.push_back(label + " " + what + " " + w + " residual " + fmt_double(r));
  };

  std::function<void(const Word&)> rec = [&](const Word& w) {
    const int n = static_cast<int>(w.size());
    if (n <= atom_gen) {
      const Interval img = n == 1 ? sk.ambient() : sk.atom_interval(w.substr(1));
      check_pair("atom", w, sk.atom_interval(w), img, false);
    }
    if (n <= gap_gen) {
      const Interval img = n == 1 ? sk.central_gap() : sk.gap_interval(w.substr(1));
      check_pair("gap", w, sk.gap_interval(w), img, true);
    }
    if (n < atom_gen) {
      rec(w + '0');
      rec(w + '1');
    }
  };
  if (atom_gen >= 1) {
    rec("0");
    rec("1");
  }
}

}  // namespace

GapImageReport gap_image_check(const BuiltSystem& sys, int max_gen, double tol, bool strict) {
  GapImageReport rep;
  if (sys.is_torus()) {
    for (const auto* f : {sys.left.get(), sys.right.get()}) {
      GapImageReport sub = gap_image_check(*f, max_gen, tol, false);
      rep.max_gap_residual = std::max(rep.max_gap_residual, sub.max_gap_residual);
      rep.max_atom_residual = std::max(rep.max_atom_residual, sub.max_atom_residual);
      rep.checked += sub.checked;
      rep.max_generation = std::max(rep.max_generation, sub.max_generation);
      rep.violations.insert(rep.violations.end(), sub.violations.begin(), sub.violations.end());
    }
  } else {
    for (const auto& ref : sys.skeletons)
      check_skeleton_conjugacy(*sys.map, *ref.skel, max_gen, sys.map_depth, tol, ref.label,
                               rep);
  }
  if (strict && !rep.violations.empty()) {
    std::string msg = fmt_int((long long)rep.violations.size()) + " offending words:";
    for (std::size_t i = 0; i < rep.violations.size() && i < 8; ++i)
      msg += " [" + rep.violations[i] + "]";
    fail(Err::conjugacy_violation, msg);
  }
  return rep;
}

}  // namespace pesinlab
