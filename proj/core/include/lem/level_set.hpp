#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lem/grid.hpp"

namespace lem {

/// A multiphase configuration: kappa scalar fields sampled at grid nodes.
/// The phases are the regions where the pointwise minimum (the lower
/// envelope) is attained by exactly one field.
struct LevelFunctionSet {
  GridSpec grid;
  std::vector<std::vector<double>> fields; // kappa nodal arrays
  bool pinned_zero = false;                // field 0 identically zero

  int kappa() const { return static_cast<int>(fields.size()); }

  /// Interpolated value of field k at x.
  double value(int k, std::span<const double> x) const;

  /// max_k ||phi_k||_inf, used to scale equality tolerances.
  double sup_norm() const;

  /// Absolute equality tolerance: tol_eq_rel * sup_norm().
  double eq_tol(double tol_eq_rel = 1e-10) const { return tol_eq_rel * sup_norm(); }

  void validate() const; // shapes match, pinned field really zero
};

/// Builds a set by sampling analytic functions at the nodes.
LevelFunctionSet sample_level_set(
    const GridSpec& g,
    std::span<const std::function<double(std::span<const double>)>> funcs, bool pinned_zero);

/// min_k phi_k(x), interpolated. Throws DomainError outside [0,1]^d.
double lower_envelope(const LevelFunctionSet& phi, std::span<const double> x);

/// Smallest index attaining the minimum of the interpolated values.
int argmin_label(const LevelFunctionSet& phi, std::span<const double> x);

/// Per-cell phase labels; one label per grid cell, taken at the centroid.
struct PhaseLabelField {
  GridSpec grid;
  int kappa = 0;
  std::vector<std::uint8_t> labels; // cell-ordered

  /// Phase area (volume in 3D) as cell-count ratio, so the areas sum to 1 exactly.
  double area(int k) const;
  std::vector<std::int64_t> counts() const;
};

PhaseLabelField extract_phases(const LevelFunctionSet& phi);

/// Closed-form field primitives used for ground truths, initial guesses and
/// CLI inputs. Grammar (space-separated tokens):
///   zero
///   constant C
///   plane A B C                      -> A*x1 + B*x2 + C
///   sine_interface Y0 AMP FREQ       -> x2 - Y0 - AMP*sin(2*pi*FREQ*x1)
///   ellipses SCALE (CX CY RX RY)+    -> SCALE * min_e [((x1-CX)/RX)^2 + ((x2-CY)/RY)^2 - 1]
struct AnalyticField {
  enum class Kind { Zero, Constant, Plane, SineInterface, Ellipses };
  Kind kind = Kind::Zero;
  std::vector<double> params;

  double eval(double x1, double x2) const;
  static AnalyticField parse(const std::string& text); // throws ConfigError
  std::string str() const;
};

} // namespace lem
