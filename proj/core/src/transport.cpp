#include "lem/transport.hpp"

#include <algorithm>
#include <cmath>

namespace lem {

namespace {
constexpr double kSpeedFloor = 1e-14;
}

VelocityField::VelocityField(GridSpec g, std::vector<double> vx, std::vector<double> vy)
    : grid(g), x(std::move(vx)), y(std::move(vy)) {
  if (grid.dim != 2) throw ConfigError("VelocityField: 2D only");
  const auto nn = static_cast<std::size_t>(grid.node_count());
  if (x.size() != nn || y.size() != nn)
    throw ConfigError("VelocityField: component size does not match grid");
  // project the normal component at boundary nodes to zero
  const int n = grid.n;
  for (int j = 0; j <= n; ++j) {
    x[static_cast<std::size_t>(grid.node_index(0, j))] = 0.0;
    x[static_cast<std::size_t>(grid.node_index(n, j))] = 0.0;
  }
  for (int i = 0; i <= n; ++i) {
    y[static_cast<std::size_t>(grid.node_index(i, 0))] = 0.0;
    y[static_cast<std::size_t>(grid.node_index(i, n))] = 0.0;
  }
}

double VelocityField::max_speed() const {
  double m = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i]) + std::abs(y[i]));
  return m;
}

std::array<double, 2> VelocityField::at(double px, double py) const {
  const double p[2] = {px, py};
  return {interpolate(grid, x, std::span<const double>(p, 2)),
          interpolate(grid, y, std::span<const double>(p, 2))};
}

VelocityField VelocityField::sampled(
    const GridSpec& g, const std::function<std::array<double, 2>(double, double)>& f) {
  const auto nn = static_cast<std::size_t>(g.node_count());
  std::vector<double> vx(nn), vy(nn);
  const double h = g.spacing();
  for (int j = 0; j <= g.n; ++j)
    for (int i = 0; i <= g.n; ++i) {
      const auto v = f(i * h, j * h);
      vx[static_cast<std::size_t>(g.node_index(i, j))] = v[0];
      vy[static_cast<std::size_t>(g.node_index(i, j))] = v[1];
    }
  return VelocityField(g, std::move(vx), std::move(vy));
}

void TransportParams::validate() const {
  if (!(cfl > 0.0 && cfl <= 1.0)) throw ConfigError("TransportParams: cfl must be in (0,1]");
  if (t_end < 0.0) throw ConfigError("TransportParams: t_end must be >= 0");
}

double cfl_dt(const VelocityField& theta, double h, double cfl) {
  return cfl * h / std::max(theta.max_speed(), kSpeedFloor);
}

LevelFunctionSet advect_step(const LevelFunctionSet& phi, const VelocityField& theta, double dt) {
  phi.validate();
  if (phi.grid.dim != 2) throw ConfigError("advect_step: 2D only");
  if (phi.grid != theta.grid) throw ConfigError("advect_step: grids do not match");
  const double h = phi.grid.spacing();
  if (dt * theta.max_speed() > h * (1.0 + 1e-12))
    throw NumericError("advect_step: dt violates the CFL bound");

  const GridSpec& g = phi.grid;
  const int n = g.n;
  LevelFunctionSet out = phi;
  const int k0 = phi.pinned_zero ? 1 : 0;
  for (int k = k0; k < phi.kappa(); ++k) {
    const auto& f = phi.fields[static_cast<std::size_t>(k)];
    auto& r = out.fields[static_cast<std::size_t>(k)];
    for (int j = 0; j <= n; ++j) {
      for (int i = 0; i <= n; ++i) {
        const std::size_t id = static_cast<std::size_t>(g.node_index(i, j));
        const double vx = theta.x[id];
        const double vy = theta.y[id];
        double dfx = 0.0, dfy = 0.0;
        if (vx != 0.0) {
          // upwind; one-sided toward the interior at the box edge
          if (vx > 0.0)
            dfx = i > 0 ? (f[id] - f[id - 1]) / h : (f[id + 1] - f[id]) / h;
          else
            dfx = i < n ? (f[id + 1] - f[id]) / h : (f[id] - f[id - 1]) / h;
        }
        if (vy != 0.0) {
          const std::size_t stride = static_cast<std::size_t>(n + 1);
          if (vy > 0.0)
            dfy = j > 0 ? (f[id] - f[id - stride]) / h : (f[id + stride] - f[id]) / h;
          else
            dfy = j < n ? (f[id + stride] - f[id]) / h : (f[id] - f[id - stride]) / h;
        }
        r[id] = f[id] - dt * (vx * dfx + vy * dfy);
      }
    }
  }
  return out;
}

LevelFunctionSet advect(const LevelFunctionSet& phi, const VelocityField& theta,
                        const TransportParams& params) {
  params.validate();
  if (params.t_end == 0.0) return phi;
  const double h = phi.grid.spacing();
  const double dt_max = cfl_dt(theta, h, params.cfl);
  LevelFunctionSet cur = phi;
  double remaining = params.t_end;
  while (remaining > 0.0) {
    const double dt = std::min(dt_max, remaining);
    cur = advect_step(cur, theta, dt);
    remaining -= dt; // exact zero on the final step
  }
  return cur;
}

} // namespace lem
