#include "lem/mesh.hpp"

namespace lem {

TriMesh::TriMesh(int n_) : n(n_) {
  if (n < 2) throw ConfigError("TriMesh: need n >= 2 cells per side");
}

std::array<int, 3> TriMesh::element_nodes(int e) const {
  const int cell = e / 2;
  const int i = cell % n, j = cell / n;
  const int a = node_index(i, j);
  const int b = node_index(i + 1, j);
  const int c = node_index(i + 1, j + 1);
  const int d = node_index(i, j + 1);
  return (e % 2 == 0) ? std::array<int, 3>{a, b, c} : std::array<int, 3>{a, c, d};
}

std::array<double, 2> TriMesh::element_centroid(int e) const {
  const auto nodes = element_nodes(e);
  double cx = 0, cy = 0;
  for (int v : nodes) {
    const auto p = node_xy(v);
    cx += p[0];
    cy += p[1];
  }
  return {cx / 3.0, cy / 3.0};
}

std::array<std::array<double, 2>, 3> TriMesh::element_gradients(int e) const {
  const double ih = static_cast<double>(n); // 1/h
  if (e % 2 == 0) // (i,j), (i+1,j), (i+1,j+1)
    return {{{-ih, 0.0}, {ih, -ih}, {0.0, ih}}};
  return {{{0.0, -ih}, {ih, 0.0}, {-ih, ih}}}; // (i,j), (i+1,j+1), (i,j+1)
}

bool TriMesh::node_on_side(int idx, Side s) const {
  const int i = idx % (n + 1), j = idx / (n + 1);
  switch (s) {
    case Side::Left: return i == 0;
    case Side::Right: return i == n;
    case Side::Lower: return j == 0;
    case Side::Upper: return j == n;
  }
  return false;
}

bool TriMesh::is_boundary_node(int idx) const {
  const int i = idx % (n + 1), j = idx / (n + 1);
  return i == 0 || i == n || j == 0 || j == n;
}

std::vector<int> TriMesh::side_nodes(Side s) const {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(n) + 1);
  for (int t = 0; t <= n; ++t) {
    switch (s) {
      case Side::Left: out.push_back(node_index(0, t)); break;
      case Side::Right: out.push_back(node_index(n, t)); break;
      case Side::Lower: out.push_back(node_index(t, 0)); break;
      case Side::Upper: out.push_back(node_index(t, n)); break;
    }
  }
  return out;
}

std::vector<int> TriMesh::boundary_nodes() const {
  std::vector<int> out;
  for (int idx = 0; idx < node_count(); ++idx)
    if (is_boundary_node(idx)) out.push_back(idx);
  return out;
}

double TriMesh::side_coordinate(int idx, Side s) const {
  const auto p = node_xy(idx);
  return (s == Side::Left || s == Side::Right) ? p[1] : p[0];
}

TriMesh build_mesh(int n) { return TriMesh(n); }

} // namespace lem
