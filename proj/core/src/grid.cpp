#include "lem/grid.hpp"

#include <algorithm>
#include <cmath>

namespace lem {

GridSpec::GridSpec(int dim_, int n_) : dim(dim_), n(n_) {
  if (dim != 2 && dim != 3) throw ConfigError("GridSpec: dim must be 2 or 3");
  if (n < 2) throw ConfigError("GridSpec: need n >= 2 cells per side");
}

std::int64_t GridSpec::node_count() const {
  std::int64_t m = n + 1;
  std::int64_t c = m * m;
  return dim == 2 ? c : c * m;
}

std::int64_t GridSpec::cell_count() const {
  std::int64_t c = static_cast<std::int64_t>(n) * n;
  return dim == 2 ? c : c * n;
}

bool GridSpec::contains(std::span<const double> x) const {
  for (int a = 0; a < dim; ++a)
    if (!(x[a] >= 0.0 && x[a] <= 1.0)) return false;
  return true;
}

namespace {

struct CellCoord {
  int idx[3];    // cell index per axis, in [0, n-1]
  double loc[3]; // local coordinate in [0,1] within the cell
};

CellCoord locate(const GridSpec& g, std::span<const double> x) {
  CellCoord c{};
  for (int a = 0; a < g.dim; ++a) {
    double s = x[a] * g.n;
    int i = static_cast<int>(s);
    i = std::clamp(i, 0, g.n - 1);
    c.idx[a] = i;
    c.loc[a] = s - i;
  }
  return c;
}

} // namespace

double interpolate(const GridSpec& g, std::span<const double> values, std::span<const double> x) {
  if (!g.contains(x)) throw DomainError("interpolate: point outside the unit box");
  const CellCoord c = locate(g, x);
  const double tx = c.loc[0], ty = c.loc[1];
  const int i = c.idx[0], j = c.idx[1];
  if (g.dim == 2) {
    const double v00 = values[g.node_index(i, j)];
    const double v10 = values[g.node_index(i + 1, j)];
    const double v01 = values[g.node_index(i, j + 1)];
    const double v11 = values[g.node_index(i + 1, j + 1)];
    return (1 - ty) * ((1 - tx) * v00 + tx * v10) + ty * ((1 - tx) * v01 + tx * v11);
  }
  const double tz = c.loc[2];
  const int k = c.idx[2];
  double layer[2];
  for (int dz = 0; dz < 2; ++dz) {
    const double v00 = values[g.node_index(i, j, k + dz)];
    const double v10 = values[g.node_index(i + 1, j, k + dz)];
    const double v01 = values[g.node_index(i, j + 1, k + dz)];
    const double v11 = values[g.node_index(i + 1, j + 1, k + dz)];
    layer[dz] = (1 - ty) * ((1 - tx) * v00 + tx * v10) + ty * ((1 - tx) * v01 + tx * v11);
  }
  return (1 - tz) * layer[0] + tz * layer[1];
}

std::array<double, 3> interp_gradient(const GridSpec& g, std::span<const double> values,
                                      std::span<const double> x) {
  const double h = g.spacing();
  std::array<double, 3> grad{0, 0, 0};
  double p[3] = {0, 0, 0};
  for (int a = 0; a < g.dim; ++a) p[a] = x[a];
  for (int a = 0; a < g.dim; ++a) {
    const double keep = p[a];
    const double hi = std::min(keep + h, 1.0);
    const double lo = std::max(keep - h, 0.0);
    p[a] = hi;
    const double fhi = interpolate(g, values, std::span<const double>(p, g.dim));
    p[a] = lo;
    const double flo = interpolate(g, values, std::span<const double>(p, g.dim));
    p[a] = keep;
    grad[a] = (fhi - flo) / (hi - lo);
  }
  return grad;
}

std::vector<double> sample_nodes(const GridSpec& g,
                                 const std::function<double(std::span<const double>)>& f) {
  std::vector<double> out(static_cast<std::size_t>(g.node_count()));
  const double h = g.spacing();
  if (g.dim == 2) {
    for (int j = 0; j <= g.n; ++j)
      for (int i = 0; i <= g.n; ++i) {
        const double p[2] = {i * h, j * h};
        out[g.node_index(i, j)] = f(std::span<const double>(p, 2));
      }
  } else {
    for (int k = 0; k <= g.n; ++k)
      for (int j = 0; j <= g.n; ++j)
        for (int i = 0; i <= g.n; ++i) {
          const double p[3] = {i * h, j * h, k * h};
          out[g.node_index(i, j, k)] = f(std::span<const double>(p, 3));
        }
  }
  return out;
}

} // namespace lem
