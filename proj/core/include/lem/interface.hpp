#pragma once

#include <array>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "lem/level_set.hpp"

namespace lem {

struct Segment {
  std::array<double, 2> a{};
  std::array<double, 2> b{};
  std::array<double, 2> midpoint() const { return {0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])}; }
};

/// Zero contour of phi_k - phi_l split into the shared phase boundary and the
/// "ghost" part of the coincidence set where another field lies strictly below.
struct PairInterface {
  int k = 0, l = 0;
  std::vector<Segment> shared; // on the actual boundary between phases k and l
  std::vector<Segment> ghost;  // coincidence set away from the envelope
  std::vector<std::int64_t> degenerate_cells; // phi_k - phi_l vanishes on the whole cell
};

PairInterface pairwise_interface(const LevelFunctionSet& phi, int k, int l,
                                 double tol_eq_rel = 1e-10);

struct TuplePointResult {
  std::vector<std::array<double, 3>> points;      // converged, deduplicated
  std::vector<std::int64_t> non_converged_cells;  // Newton failed in a flagged cell
  std::vector<std::int64_t> singular_cells;       // Jacobian singular during the solve
};

/// Finds the isolated points where all kappa = d+1 phases meet: Newton on the
/// d pairwise differences from the centroid of every cell whose corner labels
/// show all phases. Duplicates within radius h are merged.
TuplePointResult detect_tuple_points(const LevelFunctionSet& phi, double tol_eq_rel = 1e-10,
                                     double eps_rank = 1e-6);

/// Angles of the three phase sectors at a triple point (d=2, kappa=3, field 0
/// pinned to zero). beta[k] is the aperture of phase k; they sum to 2*pi.
std::array<double, 3> triple_angles(const LevelFunctionSet& phi, std::array<double, 2> xhat,
                                    double tol_eq_rel = 1e-10, double eps_rank = 1e-6);

/// Sampled check of the non-overlap conditions: pairwise |grad(phi_k - phi_l)|
/// along the coincidence sets, and the smallest singular value of the
/// difference Jacobian at every detected tuple point.
struct RegularityReport {
  struct PairEntry {
    int k = 0, l = 0;
    double min_grad_norm = 0; // +inf when the coincidence set was not sampled
    std::int64_t samples = 0;
    std::int64_t degenerate_cells = 0;
  };
  std::vector<PairEntry> pairs;
  std::vector<double> tuple_min_singular; // one entry per detected tuple point
  std::int64_t newton_failures = 0;
  double eps_rank = 1e-6;
  bool pass = false;

  std::string summary() const;
};

RegularityReport check_regularity(const LevelFunctionSet& phi, double eps_rank = 1e-6,
                                  double tol_eq_rel = 1e-10);

} // namespace lem
