#include "lem/fem.hpp"

#include <Eigen/IterativeLinearSolvers>

#include <algorithm>
#include <cmath>

namespace lem {

PhaseConductivity PhaseConductivity::isotropic(std::span<const double> values) {
  PhaseConductivity pc;
  pc.sigma.reserve(values.size());
  for (double v : values) pc.sigma.push_back(v * Eigen::Matrix2d::Identity());
  pc.validate();
  return pc;
}

void PhaseConductivity::validate(double sigma_lower) const {
  if (sigma.size() < 2) throw ConfigError("PhaseConductivity: need at least two phases");
  for (const auto& m : sigma) {
    const Eigen::Matrix2d s = 0.5 * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(s);
    if (es.eigenvalues()(0) < sigma_lower)
      throw ConfigError("PhaseConductivity: matrix is not uniformly positive definite");
  }
  for (std::size_t a = 0; a < sigma.size(); ++a)
    for (std::size_t b = a + 1; b < sigma.size(); ++b)
      if ((sigma[a] - sigma[b]).norm() == 0.0)
        throw ConfigError("PhaseConductivity: phases must carry distinct conductivities");
}

ElementSigma element_sigma(const PhaseLabelField& labels, const PhaseConductivity& sigma,
                           const TriMesh& mesh) {
  if (labels.grid.dim != 2 || labels.grid.n != mesh.n)
    throw ConfigError("element_sigma: label grid does not match the mesh");
  if (labels.kappa > sigma.kappa())
    throw ConfigError("element_sigma: more phases than conductivities");
  ElementSigma out(static_cast<std::size_t>(mesh.element_count()));
  for (int e = 0; e < mesh.element_count(); ++e) {
    const auto c = mesh.element_centroid(e);
    const int ci = std::clamp(static_cast<int>(c[0] * mesh.n), 0, mesh.n - 1);
    const int cj = std::clamp(static_cast<int>(c[1] * mesh.n), 0, mesh.n - 1);
    const auto label = labels.labels[static_cast<std::size_t>(labels.grid.cell_index(ci, cj))];
    out[static_cast<std::size_t>(e)] = sigma.sigma[label];
  }
  return out;
}

bool BoundaryData::node_is_dirichlet(const TriMesh& mesh, int idx) const {
  for (Side s : kAllSides)
    if (dirichlet_side[static_cast<std::size_t>(s)] && mesh.node_on_side(idx, s)) return true;
  return false;
}

void BoundaryData::validate(const TriMesh& mesh) const {
  bool any_dir = false;
  for (Side s : kAllSides) {
    const auto si = static_cast<std::size_t>(s);
    if (dirichlet_side[si]) {
      any_dir = true;
      if (dirichlet_values.size() != static_cast<std::size_t>(mesh.node_count()))
        throw ConfigError("BoundaryData: dirichlet_values must cover all nodes");
    } else if (neumann_values[si].size() != static_cast<std::size_t>(mesh.n + 1)) {
      throw ConfigError("BoundaryData: Neumann side needs n+1 flux samples");
    }
  }
  if (!any_dir) throw ConfigError("BoundaryData: no Dirichlet side (gauge error)");
}

Eigen::SparseMatrix<double> assemble_stiffness(const TriMesh& mesh, const ElementSigma& sig,
                                               bool transpose_sigma) {
  if (sig.size() != static_cast<std::size_t>(mesh.element_count()))
    throw ConfigError("assemble_stiffness: element count mismatch");
  const int nn = mesh.node_count();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(mesh.element_count()) * 9);
  const double area = mesh.element_area();
  for (int e = 0; e < mesh.element_count(); ++e) {
    const auto nodes = mesh.element_nodes(e);
    const auto grads = mesh.element_gradients(e);
    Eigen::Matrix2d s = sig[static_cast<std::size_t>(e)];
    if (transpose_sigma) s.transposeInPlace();
    for (int a = 0; a < 3; ++a) {
      const Eigen::Vector2d ga(grads[static_cast<std::size_t>(a)][0], grads[static_cast<std::size_t>(a)][1]);
      for (int b = 0; b < 3; ++b) {
        const Eigen::Vector2d gb(grads[static_cast<std::size_t>(b)][0], grads[static_cast<std::size_t>(b)][1]);
        trip.emplace_back(nodes[static_cast<std::size_t>(a)], nodes[static_cast<std::size_t>(b)],
                          area * ga.dot(s * gb));
      }
    }
  }
  Eigen::SparseMatrix<double> k(nn, nn);
  k.setFromTriplets(trip.begin(), trip.end());
  return k;
}

Eigen::SparseMatrix<double> assemble_mass(const TriMesh& mesh) {
  const int nn = mesh.node_count();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(mesh.element_count()) * 9);
  const double w = mesh.element_area() / 12.0;
  for (int e = 0; e < mesh.element_count(); ++e) {
    const auto nodes = mesh.element_nodes(e);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        trip.emplace_back(nodes[static_cast<std::size_t>(a)], nodes[static_cast<std::size_t>(b)],
                          (a == b ? 2.0 : 1.0) * w);
  }
  Eigen::SparseMatrix<double> m(nn, nn);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

std::vector<double> neumann_load(const TriMesh& mesh, const BoundaryData& bc) {
  std::vector<double> load(static_cast<std::size_t>(mesh.node_count()), 0.0);
  const double half_h = 0.5 * mesh.spacing();
  for (Side s : kAllSides) {
    const auto si = static_cast<std::size_t>(s);
    if (!bc.side_is_neumann(s)) continue;
    const auto nodes = mesh.side_nodes(s);
    const auto& g = bc.neumann_values[si];
    for (int t = 0; t < mesh.n; ++t) {
      load[static_cast<std::size_t>(nodes[static_cast<std::size_t>(t)])] += half_h * g[static_cast<std::size_t>(t)];
      load[static_cast<std::size_t>(nodes[static_cast<std::size_t>(t) + 1])] += half_h * g[static_cast<std::size_t>(t) + 1];
    }
  }
  return load;
}

std::vector<double> volume_load(const TriMesh& mesh, const std::vector<double>& f_elem) {
  std::vector<double> load(static_cast<std::size_t>(mesh.node_count()), 0.0);
  if (f_elem.empty()) return load;
  if (f_elem.size() != static_cast<std::size_t>(mesh.element_count()))
    throw ConfigError("volume_load: element count mismatch");
  const double third_area = mesh.element_area() / 3.0;
  for (int e = 0; e < mesh.element_count(); ++e) {
    const double w = third_area * f_elem[static_cast<std::size_t>(e)];
    for (int v : mesh.element_nodes(e)) load[static_cast<std::size_t>(v)] += w;
  }
  return load;
}

double boundary_integral(const TriMesh& mesh, const std::array<std::vector<double>, 4>& g_sides) {
  double total = 0.0;
  const double half_h = 0.5 * mesh.spacing();
  for (Side s : kAllSides) {
    const auto& g = g_sides[static_cast<std::size_t>(s)];
    if (g.size() != static_cast<std::size_t>(mesh.n + 1))
      throw ConfigError("boundary_integral: side needs n+1 samples");
    for (int t = 0; t < mesh.n; ++t)
      total += half_h * (g[static_cast<std::size_t>(t)] + g[static_cast<std::size_t>(t) + 1]);
  }
  return total;
}

DirichletSolver::DirichletSolver(const TriMesh& mesh, const ElementSigma& sig,
                                 const std::vector<bool>& dirichlet_mask, bool transpose_sigma)
    : n_(mesh.node_count()), mesh_n_(mesh.n) {
  if (dirichlet_mask.size() != static_cast<std::size_t>(n_))
    throw ConfigError("DirichletSolver: mask size mismatch");
  node_to_free_.assign(static_cast<std::size_t>(n_), -1);
  for (int i = 0; i < n_; ++i) {
    if (dirichlet_mask[static_cast<std::size_t>(i)]) {
      dirichlet_nodes_.push_back(i);
    } else {
      node_to_free_[static_cast<std::size_t>(i)] = static_cast<int>(free_of_node_.size());
      free_of_node_.push_back(i);
    }
  }
  if (dirichlet_nodes_.empty())
    throw ConfigError("DirichletSolver: no Dirichlet nodes (gauge error)");
  if (free_of_node_.empty()) throw ConfigError("DirichletSolver: nothing to solve");

  const Eigen::SparseMatrix<double> k = assemble_stiffness(mesh, sig, transpose_sigma);
  const int nf = static_cast<int>(free_of_node_.size());
  std::vector<int> node_to_dir(static_cast<std::size_t>(n_), -1);
  for (std::size_t d = 0; d < dirichlet_nodes_.size(); ++d)
    node_to_dir[static_cast<std::size_t>(dirichlet_nodes_[d])] = static_cast<int>(d);

  std::vector<Eigen::Triplet<double>> tff, tfd;
  for (int col = 0; col < k.outerSize(); ++col) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(k, col); it; ++it) {
      const int r = static_cast<int>(it.row()), c = static_cast<int>(it.col());
      const int fr = node_to_free_[static_cast<std::size_t>(r)];
      if (fr < 0) continue;
      const int fc = node_to_free_[static_cast<std::size_t>(c)];
      if (fc >= 0)
        tff.emplace_back(fr, fc, it.value());
      else
        tfd.emplace_back(fr, node_to_dir[static_cast<std::size_t>(c)], it.value());
    }
  }
  k_ff_.resize(nf, nf);
  k_ff_.setFromTriplets(tff.begin(), tff.end());
  k_fd_.resize(nf, static_cast<int>(dirichlet_nodes_.size()));
  k_fd_.setFromTriplets(tfd.begin(), tfd.end());

  llt_.compute(k_ff_);
  llt_ok_ = llt_.info() == Eigen::Success;
}

NodalField DirichletSolver::solve(const std::vector<double>& load,
                                  const std::vector<double>& dirichlet_values) const {
  if (load.size() != static_cast<std::size_t>(n_))
    throw ConfigError("DirichletSolver: load size mismatch");
  const int nf = static_cast<int>(free_of_node_.size());
  Eigen::VectorXd rhs(nf);
  for (int f = 0; f < nf; ++f) rhs(f) = load[static_cast<std::size_t>(free_of_node_[static_cast<std::size_t>(f)])];
  Eigen::VectorXd ud(static_cast<int>(dirichlet_nodes_.size()));
  for (std::size_t d = 0; d < dirichlet_nodes_.size(); ++d)
    ud(static_cast<int>(d)) = dirichlet_values.empty()
                                  ? 0.0
                                  : dirichlet_values[static_cast<std::size_t>(dirichlet_nodes_[d])];
  rhs -= k_fd_ * ud;

  Eigen::VectorXd uf;
  bool solved = false;
  if (llt_ok_) {
    uf = llt_.solve(rhs);
    solved = (k_ff_ * uf - rhs).norm() <= kTolLin * std::max(rhs.norm(), 1e-300);
  }
  if (!solved) {
    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                             Eigen::DiagonalPreconditioner<double>>
        cg;
    cg.setTolerance(kTolLin);
    cg.setMaxIterations(static_cast<Eigen::Index>(20) * nf);
    cg.compute(k_ff_);
    uf = llt_ok_ ? cg.solveWithGuess(rhs, uf) : cg.solve(rhs);
    if ((k_ff_ * uf - rhs).norm() > 10 * kTolLin * std::max(rhs.norm(), 1e-300))
      throw NumericError("DirichletSolver: linear solve failed (singular or indefinite system)");
  }

  NodalField out;
  out.n = mesh_n_;
  out.values.assign(static_cast<std::size_t>(n_), 0.0);
  for (int f = 0; f < nf; ++f) out.values[static_cast<std::size_t>(free_of_node_[static_cast<std::size_t>(f)])] = uf(f);
  for (std::size_t d = 0; d < dirichlet_nodes_.size(); ++d)
    out.values[static_cast<std::size_t>(dirichlet_nodes_[d])] = ud(static_cast<int>(d));
  return out;
}

NodalField solve_mixed(const TriMesh& mesh, const ElementSigma& sig,
                       const std::vector<double>& f_elem, const BoundaryData& bc) {
  bc.validate(mesh);
  std::vector<bool> mask(static_cast<std::size_t>(mesh.node_count()), false);
  for (int idx : mesh.boundary_nodes())
    if (bc.node_is_dirichlet(mesh, idx)) mask[static_cast<std::size_t>(idx)] = true;
  DirichletSolver solver(mesh, sig, mask);
  std::vector<double> load = neumann_load(mesh, bc);
  const std::vector<double> fv = volume_load(mesh, f_elem);
  for (std::size_t i = 0; i < load.size(); ++i) load[i] += fv[i];
  return solver.solve(load, bc.dirichlet_values);
}

NodalField solve_neumann_gauged(const TriMesh& mesh, const ElementSigma& sig,
                                const std::vector<double>& f_elem,
                                const std::array<std::vector<double>, 4>& g_sides,
                                double tol_compat) {
  double compat = boundary_integral(mesh, g_sides);
  if (!f_elem.empty()) {
    const double area = mesh.element_area();
    for (double f : f_elem) compat += area * f;
  }
  if (std::abs(compat) > tol_compat)
    throw NumericError("solve_neumann_gauged: incompatible Neumann data");

  BoundaryData bc;
  bc.neumann_values = g_sides;
  std::vector<double> load = neumann_load(mesh, bc);
  const std::vector<double> fv = volume_load(mesh, f_elem);
  for (std::size_t i = 0; i < load.size(); ++i) load[i] += fv[i];

  // pin one node to remove the constant nullspace, then shift to zero mean
  std::vector<bool> mask(static_cast<std::size_t>(mesh.node_count()), false);
  mask[0] = true;
  DirichletSolver solver(mesh, sig, mask);
  NodalField u = solver.solve(load, {});
  double mean = 0.0;
  for (double v : u.values) mean += v;
  mean /= static_cast<double>(u.values.size());
  for (double& v : u.values) v -= mean;
  return u;
}

std::pair<NodalField, NodalField> solve_adjoints(const TriMesh& mesh, const ElementSigma& sig,
                                                 const NodalField& u, const NodalField& v,
                                                 const std::array<bool, 4>& gamma_a) {
  if (u.values.size() != static_cast<std::size_t>(mesh.node_count()) ||
      v.values.size() != u.values.size())
    throw ConfigError("solve_adjoints: field size mismatch");

  const Eigen::SparseMatrix<double> m = assemble_mass(mesh);
  Eigen::VectorXd diff(mesh.node_count());
  for (int i = 0; i < mesh.node_count(); ++i)
    diff(i) = u.values[static_cast<std::size_t>(i)] - v.values[static_cast<std::size_t>(i)];
  const Eigen::VectorXd mdiff = m * diff;

  auto make_mask = [&](bool use_gamma_a) {
    std::vector<bool> mask(static_cast<std::size_t>(mesh.node_count()), false);
    for (int idx : mesh.boundary_nodes())
      for (Side s : kAllSides) {
        const auto si = static_cast<std::size_t>(s);
        const bool in_set = use_gamma_a ? gamma_a[si] : !gamma_a[si];
        if (in_set && mesh.node_on_side(idx, s)) mask[static_cast<std::size_t>(idx)] = true;
      }
    return mask;
  };

  std::vector<double> load_p(static_cast<std::size_t>(mesh.node_count()));
  std::vector<double> load_q(static_cast<std::size_t>(mesh.node_count()));
  for (int i = 0; i < mesh.node_count(); ++i) {
    load_p[static_cast<std::size_t>(i)] = -mdiff(i);
    load_q[static_cast<std::size_t>(i)] = mdiff(i);
  }

  DirichletSolver sp(mesh, sig, make_mask(true), /*transpose_sigma=*/true);
  DirichletSolver sq(mesh, sig, make_mask(false), /*transpose_sigma=*/true);
  return {sp.solve(load_p, {}), sq.solve(load_q, {})};
}

} // namespace lem
