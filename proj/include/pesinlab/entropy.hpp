#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pesinlab/measures.hpp"
#include "pesinlab/systems.hpp"

namespace pesinlab {

// -sum p log p with 0 log 0 = 0, natural log.
double partition_entropy(std::span<const double> masses);

// Word frequencies of length-n itinerary windows. Words are encoded base
// `alphabet` (MSB-first) into 64 bits; cells are sorted by encoded word.
struct CylinderTable {
  int n = 0;
  int alphabet = 0;
  double total = 0;
  std::vector<std::pair<std::uint64_t, double>> cells;
  std::vector<std::string> warnings;

  double entropy() const;
};

// Exact table of a CantorBernoulli measure (or a product of two): 2^n binary
// words of mass 2^{-n}, resp. 4^n pair words of mass 4^{-n}. Gap symbols carry
// zero mass and are omitted.
CylinderTable cylinder_table_symbolic(const Measure& mu, int n);

// Sliding-window plug-in masses over an itinerary. Warns when undersampled
// (distinct words > windows/10, or alphabet^n > windows).
CylinderTable cylinder_table_empirical(std::span<const int> symbols, int alphabet, int n);

struct EntropyRate {
  std::vector<double> h_over_n;    // H(P^n)/n
  std::vector<double> increments;  // H(P^{n+1}) - H(P^n)
  double h_plugin = 0;             // min_n H(n)/n
  double h_increment = 0;          // last increment
  double h_final = 0;              // min of the two
  std::vector<std::string> warnings;
};

EntropyRate entropy_rate(const std::vector<CylinderTable>& tables);

// Liouville route: integral of log|det Df| (exact through the K-constant flag
// on skeleton-supported measures).
IntegralResult lyapunov_integral(const BuiltSystem& sys, const Measure& mu);

// Finite-time Birkhoff mean of log|det Df| along an orbit; compensated
// summation, dithered iteration when an RNG stream is supplied. On the torus
// this is defined as the sum of the coordinate means.
double birkhoff_lyapunov(const BuiltSystem& sys, double x0, double y0, long n,
                         RngStream* rng = nullptr);

struct PesinOptions {
  int n_max = 12;            // cylinder lengths for the entropy rate
  long orbit_len = 1000000;  // empirical estimation paths
  std::uint64_t seed = 42;
  int torus_n_max = 8;
};

struct PesinReport {
  std::string system, measure, method;
  std::vector<double> h_sequence;   // H(n)/n
  std::vector<double> increments;
  double h_final = 0;
  double lyap = 0;
  double lyap_error = 0;
  double defect = 0;    // lyap - h_final >= 0 is the Margulis-Ruelle direction
  double pressure = 0;  // h + int psi dmu = -defect
  std::optional<double> birkhoff;
  std::optional<double> invariance_residual;  // dist*(push mu, mu)
  double ruelle_tol = 0;
  bool ruelle_ok = false;
  std::uint64_t seed = 0;
  int n_max_used = 0;
  long orbit_len_used = 0;
  std::vector<std::string> warnings;
};

PesinReport pesin_defect(const BuiltSystem& sys, const Measure& mu,
                         const ObservableFamily& fam, const PesinOptions& opts = {});

// m(A_n) for n = 1..n_max; Bowen systems use the skeleton recursion, the
// affine reference its closed form 2 (2/3)^n.
std::vector<double> atom_mass_decay(const BuiltSystem& sys, int n_max,
                                    int skeleton_index = 0);

struct DistortionRow {
  double inf_deriv = 0;  // inf over the atom of (G^n)'
  double sup_deriv = 0;  // composed per-generation maxima, closed-form per piece
  double ratio = 0;
};

DistortionRow distortion_ratio(const BuiltSystem& sys, const Word& w, int skeleton_index = 0);

// Itinerary of a point expressed in the system's symbol alphabet; torus
// systems use the product alphabet. Dithered when rng is supplied.
std::vector<int> system_itinerary(const BuiltSystem& sys, double x0, double y0, long n,
                                  RngStream* rng);
int system_alphabet(const BuiltSystem& sys);

}  // namespace pesinlab
