#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "lem/errors.hpp"

namespace lem {

enum class Side : int { Left = 0, Right = 1, Lower = 2, Upper = 3 };

constexpr std::array<Side, 4> kAllSides{Side::Left, Side::Right, Side::Lower, Side::Upper};

/// Structured P1 triangulation of the unit square: n x n cells, each split
/// along its lower-left -> upper-right diagonal, lower triangle first.
/// Node (i,j) sits at (i*h, j*h) with index j*(n+1)+i.
struct TriMesh {
  int n = 0;

  explicit TriMesh(int n_);

  double spacing() const { return 1.0 / n; }
  int node_count() const { return (n + 1) * (n + 1); }
  int element_count() const { return 2 * n * n; }
  double element_area() const { return 0.5 / (static_cast<double>(n) * n); }

  int node_index(int i, int j) const { return j * (n + 1) + i; }
  std::array<double, 2> node_xy(int idx) const {
    const int i = idx % (n + 1), j = idx / (n + 1);
    return {i * spacing(), j * spacing()};
  }

  std::array<int, 3> element_nodes(int e) const;
  std::array<double, 2> element_centroid(int e) const;
  /// Constant P1 basis gradients for the element, one 2-vector per vertex.
  std::array<std::array<double, 2>, 3> element_gradients(int e) const;

  bool node_on_side(int idx, Side s) const;
  bool is_boundary_node(int idx) const;
  std::vector<int> side_nodes(Side s) const;  // ordered by tangential coordinate
  std::vector<int> boundary_nodes() const;    // ascending node index

  /// Tangential coordinate of a boundary node on the given side.
  double side_coordinate(int idx, Side s) const;
};

TriMesh build_mesh(int n);

} // namespace lem
