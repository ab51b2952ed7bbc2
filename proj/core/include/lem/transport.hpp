#pragma once

#include <array>
#include <vector>

#include "lem/level_set.hpp"

namespace lem {

/// Nodal velocity field on a 2D grid. Construction projects the normal
/// component at boundary nodes to zero (both components at corners), so the
/// flow never leaves the unit square.
struct VelocityField {
  GridSpec grid;
  std::vector<double> x, y;

  VelocityField() = default;
  VelocityField(GridSpec g, std::vector<double> vx, std::vector<double> vy);

  /// max over nodes of |vx| + |vy| (the norm entering the CFL bound)
  double max_speed() const;

  std::array<double, 2> at(double px, double py) const; // bilinear

  static VelocityField sampled(const GridSpec& g,
                               const std::function<std::array<double, 2>(double, double)>& f);
};

struct TransportParams {
  double cfl = 0.9;
  double t_end = 0.0;

  void validate() const;
};

/// Stable step size: cfl * h / max(max_speed, 1e-14).
double cfl_dt(const VelocityField& theta, double h, double cfl);

/// One explicit first-order upwind step of every non-pinned field.
/// Rejects dt above the CFL bound.
LevelFunctionSet advect_step(const LevelFunctionSet& phi, const VelocityField& theta, double dt);

/// Repeats advect_step with dt = min(cfl_dt, remaining) until t_end.
LevelFunctionSet advect(const LevelFunctionSet& phi, const VelocityField& theta,
                        const TransportParams& params);

} // namespace lem
