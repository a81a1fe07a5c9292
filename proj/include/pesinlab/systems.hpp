#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "pesinlab/bowen.hpp"
#include "pesinlab/circle_map.hpp"

namespace pesinlab {

struct SkeletonRef {
  std::string label;
  std::shared_ptr<const BowenSkeleton> skel;
};

// A map bundled with the Cantor skeletons that carry its invariant measures.
// For torus systems the skeleton pairs (left factor x right factor) are listed
// alongside the factor systems.
struct BuiltSystem {
  std::string kind;
  std::shared_ptr<const CircleMap> map;   // circle systems
  std::shared_ptr<const TorusMap> tmap;   // torus systems
  std::shared_ptr<const BuiltSystem> left, right;
  std::vector<SkeletonRef> skeletons;
  struct ProductSkeleton {
    std::string label;
    SkeletonRef first, second;
  };
  std::vector<ProductSkeleton> product_skeletons;
  int map_depth = 0;            // generation down to which the map realizes skeleton structure
  double log_deriv_on_K = 0.0;  // log of the (constant) derivative on realized K points

  bool is_torus() const { return tmap != nullptr; }
};

struct Example1Spec {
  BowenParams params;   // defaults: ambient [-1,1], b0 = 0.25, k = 4, N = 24
  int map_depth = 12;   // explicit pieces stop here; skeleton queries go to N
};

struct Example2Spec {
  double b0 = 0.4, k = 4.0;                // outer Bowen set in [-1,-b0] u [b0,1]
  double c1 = 0.2, b1 = 0.1, k2 = 12.0;    // inner Bowen set in [-c1,-b1] u [b1,c1]
  int N = 24;
  int map_depth = 12;
};

BuiltSystem build_doubling();
BuiltSystem build_example1(const Example1Spec& spec = {});
BuiltSystem build_example2(const Example2Spec& spec = {});
// Tripling map with the middle-thirds (zero-measure) Cantor set; the smooth
// contrast case for the distortion dichotomy.
BuiltSystem build_reference_affine(int N = 24);
BuiltSystem build_torus(BuiltSystem left_sys, BuiltSystem right_sys);

struct GapImageReport {
  double max_gap_residual = 0;
  double max_atom_residual = 0;
  long checked = 0;
  int max_generation = 0;  // deepest generation actually checked
  std::vector<std::string> violations;
};

// Verifies the defining conjugacy of the construction: each gap maps onto the
// previous-generation gap (generation 1 onto the central gap) and each atom
// onto the previous-generation atom, endpoint by endpoint. Throws
// ConjugacyViolation listing offending words when strict.
GapImageReport gap_image_check(const BuiltSystem& sys, int max_gen, double tol,
                               bool strict = true);

}  // namespace pesinlab
