#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <array>
#include <memory>
#include <optional>
#include <vector>

#include "lem/level_set.hpp"
#include "lem/mesh.hpp"

namespace lem {

struct NodalField {
  int n = 0;
  std::vector<double> values;

  NodalField() = default;
  NodalField(int n_, std::vector<double> v) : n(n_), values(std::move(v)) {}
  explicit NodalField(const TriMesh& mesh)
      : n(mesh.n), values(static_cast<std::size_t>(mesh.node_count()), 0.0) {}
};

/// Per-phase 2x2 SPD conductivity matrices.
struct PhaseConductivity {
  std::vector<Eigen::Matrix2d> sigma;

  static PhaseConductivity isotropic(std::span<const double> values);
  void validate(double sigma_lower = 1e-12) const; // SPD, pairwise distinct
  int kappa() const { return static_cast<int>(sigma.size()); }
};

using ElementSigma = std::vector<Eigen::Matrix2d>;

/// Per-triangle conductivity: the phase label of the cell containing the
/// triangle centroid selects the matrix.
ElementSigma element_sigma(const PhaseLabelField& labels, const PhaseConductivity& sigma,
                           const TriMesh& mesh);

/// Mixed boundary conditions: each side is either Dirichlet or Neumann.
/// A node on at least one Dirichlet side is a Dirichlet node (corners resolve
/// to Dirichlet). Neumann data is the flux sampled at side nodes.
struct BoundaryData {
  std::array<bool, 4> dirichlet_side{false, false, false, false};
  std::vector<double> dirichlet_values;              // full nodal array, read at Dirichlet nodes
  std::array<std::vector<double>, 4> neumann_values; // per side, n+1 samples in side order

  bool side_is_neumann(Side s) const { return !dirichlet_side[static_cast<std::size_t>(s)]; }
  bool node_is_dirichlet(const TriMesh& mesh, int idx) const;
  void validate(const TriMesh& mesh) const;
};

Eigen::SparseMatrix<double> assemble_stiffness(const TriMesh& mesh, const ElementSigma& sig,
                                               bool transpose_sigma = false);
Eigen::SparseMatrix<double> assemble_mass(const TriMesh& mesh);

/// Edge-trapezoid boundary load: F_i += h/2 * g(node) per adjacent Neumann edge.
std::vector<double> neumann_load(const TriMesh& mesh, const BoundaryData& bc);

/// One-point element rule: F_v += area * f_e / 3 for each vertex.
std::vector<double> volume_load(const TriMesh& mesh, const std::vector<double>& f_elem);

/// Trapezoid integral of per-side boundary data over the whole boundary.
double boundary_integral(const TriMesh& mesh, const std::array<std::vector<double>, 4>& g_sides);

/// Reduced SPD system with the Dirichlet rows eliminated; the factorization
/// is reusable across right-hand sides. Sparse Cholesky first, Jacobi-CG as
/// the fallback; residual must meet tol_lin * ||rhs||.
class DirichletSolver {
public:
  static constexpr double kTolLin = 1e-10;

  DirichletSolver(const TriMesh& mesh, const ElementSigma& sig,
                  const std::vector<bool>& dirichlet_mask, bool transpose_sigma = false);

  /// load: full nodal load vector; dirichlet_values read at masked nodes.
  NodalField solve(const std::vector<double>& load,
                   const std::vector<double>& dirichlet_values) const;

  int free_count() const { return static_cast<int>(free_of_node_.size()); }

private:
  int n_ = 0;      // node count
  int mesh_n_ = 0; // cells per side
  std::vector<int> free_of_node_;             // free index -> node index
  std::vector<int> node_to_free_;             // node index -> free index or -1
  Eigen::SparseMatrix<double> k_ff_;
  Eigen::SparseMatrix<double> k_fd_;          // columns: Dirichlet nodes (original indexing)
  std::vector<int> dirichlet_nodes_;
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt_;
  bool llt_ok_ = false;
};

/// Galerkin solution with Dirichlet data on bc's Dirichlet sides and
/// edge-trapezoid Neumann data elsewhere. f is per-element constant.
NodalField solve_mixed(const TriMesh& mesh, const ElementSigma& sig,
                       const std::vector<double>& f_elem, const BoundaryData& bc);

/// Pure-Neumann solve with the zero-mean gauge (mean of nodal values = 0).
/// Requires |int g + int f| <= tol_compat.
NodalField solve_neumann_gauged(const TriMesh& mesh, const ElementSigma& sig,
                                const std::vector<double>& f_elem,
                                const std::array<std::vector<double>, 4>& g_sides,
                                double tol_compat = 1e-6);

/// Adjoint pair for the misfit u - v: p has homogeneous Dirichlet data on
/// gamma_a and load -M(u-v); q on the complementary sides with load +M(u-v).
/// The stiffness uses the transposed conductivity.
std::pair<NodalField, NodalField> solve_adjoints(const TriMesh& mesh, const ElementSigma& sig,
                                                 const NodalField& u, const NodalField& v,
                                                 const std::array<bool, 4>& gamma_a);

} // namespace lem
