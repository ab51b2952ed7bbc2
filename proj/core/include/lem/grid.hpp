#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "lem/errors.hpp"

namespace lem {

/// Uniform node grid over the unit box [0,1]^d, d in {2,3}.
/// n cells per axis, n+1 nodes per axis, spacing h = 1/n.
struct GridSpec {
  int dim = 2;
  int n = 2;

  GridSpec() = default;
  GridSpec(int dim_, int n_);

  double spacing() const { return 1.0 / n; }
  int nodes_per_side() const { return n + 1; }

  std::int64_t node_count() const;
  std::int64_t cell_count() const;

  std::int64_t node_index(int i, int j) const { return static_cast<std::int64_t>(j) * (n + 1) + i; }
  std::int64_t node_index(int i, int j, int k) const {
    return (static_cast<std::int64_t>(k) * (n + 1) + j) * (n + 1) + i;
  }
  std::int64_t cell_index(int i, int j) const { return static_cast<std::int64_t>(j) * n + i; }
  std::int64_t cell_index(int i, int j, int k) const {
    return (static_cast<std::int64_t>(k) * n + j) * n + i;
  }

  bool contains(std::span<const double> x) const;

  bool operator==(const GridSpec&) const = default;
};

/// Multilinear (bilinear/trilinear) interpolation of a node-sampled field.
/// Throws DomainError if x is outside [0,1]^d.
double interpolate(const GridSpec& g, std::span<const double> values, std::span<const double> x);

/// Gradient of the interpolated field by central differences with stencil h,
/// degrading to one-sided near the box boundary (sample points are clamped).
std::array<double, 3> interp_gradient(const GridSpec& g, std::span<const double> values,
                                      std::span<const double> x);

/// Samples an analytic function at every node. f receives a d-span.
std::vector<double> sample_nodes(const GridSpec& g, const std::function<double(std::span<const double>)>& f);

} // namespace lem
