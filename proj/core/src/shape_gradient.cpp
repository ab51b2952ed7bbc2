#include "lem/shape_gradient.hpp"

#include <Eigen/SparseCholesky>

#include <cmath>

namespace lem {

ShapeGradientData ShapeGradientData::zeros(const TriMesh& mesh) {
  ShapeGradientData s;
  s.n = mesh.n;
  s.s1.assign(static_cast<std::size_t>(mesh.element_count()), Eigen::Matrix2d::Zero());
  s.s0.assign(static_cast<std::size_t>(mesh.element_count()), Eigen::Vector2d::Zero());
  return s;
}

void ShapeGradientData::add_scaled(const ShapeGradientData& other, double factor) {
  if (other.s1.size() != s1.size()) throw ConfigError("ShapeGradientData: size mismatch");
  for (std::size_t e = 0; e < s1.size(); ++e) {
    s1[e] += factor * other.s1[e];
    s0[e] += factor * other.s0[e];
  }
}

void RegParams::validate() const {
  if (!(alpha1 > 0 && alpha2 > 0 && alpha3 > 0))
    throw ConfigError("RegParams: alpha1, alpha2, alpha3 must be positive");
}

namespace {

Eigen::Vector2d p1_gradient(const TriMesh& mesh, const NodalField& f, int e) {
  const auto nodes = mesh.element_nodes(e);
  const auto grads = mesh.element_gradients(e);
  Eigen::Vector2d g(0, 0);
  for (int a = 0; a < 3; ++a) {
    const double fv = f.values[static_cast<std::size_t>(nodes[static_cast<std::size_t>(a)])];
    g(0) += fv * grads[static_cast<std::size_t>(a)][0];
    g(1) += fv * grads[static_cast<std::size_t>(a)][1];
  }
  return g;
}

double centroid_value(const TriMesh& mesh, const NodalField& f, int e) {
  const auto nodes = mesh.element_nodes(e);
  return (f.values[static_cast<std::size_t>(nodes[0])] + f.values[static_cast<std::size_t>(nodes[1])] +
          f.values[static_cast<std::size_t>(nodes[2])]) /
         3.0;
}

void check_fields(const TriMesh& mesh, std::initializer_list<const NodalField*> fs) {
  for (const NodalField* f : fs)
    if (f->values.size() != static_cast<std::size_t>(mesh.node_count()))
      throw ConfigError("shape gradient: field does not match the mesh");
}

} // namespace

ShapeGradientData assemble_s1_iso(const TriMesh& mesh, const NodalField& u, const NodalField& v,
                                  const NodalField& p, const NodalField& q,
                                  const std::vector<double>& sigma_elem) {
  check_fields(mesh, {&u, &v, &p, &q});
  if (sigma_elem.size() != static_cast<std::size_t>(mesh.element_count()))
    throw ConfigError("assemble_s1_iso: element count mismatch");
  ShapeGradientData out = ShapeGradientData::zeros(mesh);
  for (int e = 0; e < mesh.element_count(); ++e) {
    const double s = sigma_elem[static_cast<std::size_t>(e)];
    const Eigen::Vector2d gu = p1_gradient(mesh, u, e);
    const Eigen::Vector2d gv = p1_gradient(mesh, v, e);
    const Eigen::Vector2d gp = p1_gradient(mesh, p, e);
    const Eigen::Vector2d gq = p1_gradient(mesh, q, e);
    const double ubar = centroid_value(mesh, u, e) - centroid_value(mesh, v, e);
    const double trace_part = 0.5 * ubar * ubar + s * gu.dot(gp) + s * gv.dot(gq);
    const Eigen::Matrix2d sym_up = gu * gp.transpose() + gp * gu.transpose();
    const Eigen::Matrix2d sym_vq = gv * gq.transpose() + gq * gv.transpose();
    out.s1[static_cast<std::size_t>(e)] =
        trace_part * Eigen::Matrix2d::Identity() - s * (sym_up + sym_vq);
  }
  return out;
}

ShapeGradientData assemble_s1_general(const TriMesh& mesh, const NodalField& u,
                                      const NodalField& v, const NodalField& p,
                                      const NodalField& q, const ElementSigma& sig,
                                      const std::vector<double>& f_elem,
                                      const PhaseLabelField* labels,
                                      const VariableCoefficients* coeffs, bool declare_varying) {
  check_fields(mesh, {&u, &v, &p, &q});
  if (sig.size() != static_cast<std::size_t>(mesh.element_count()))
    throw ConfigError("assemble_s1_general: element count mismatch");
  if (declare_varying && (!coeffs || (!coeffs->dsigma_form && !coeffs->grad_f)))
    throw ConfigError("assemble_s1_general: varying coefficients declared but no callback given");
  if (declare_varying && !labels)
    throw ConfigError("assemble_s1_general: varying coefficients need the phase labels");

  const bool has_f = !f_elem.empty();
  if (has_f && f_elem.size() != static_cast<std::size_t>(mesh.element_count()))
    throw ConfigError("assemble_s1_general: f_elem count mismatch");

  ShapeGradientData out = ShapeGradientData::zeros(mesh);
  for (int e = 0; e < mesh.element_count(); ++e) {
    const Eigen::Matrix2d& s = sig[static_cast<std::size_t>(e)];
    const Eigen::Vector2d gu = p1_gradient(mesh, u, e);
    const Eigen::Vector2d gv = p1_gradient(mesh, v, e);
    const Eigen::Vector2d gp = p1_gradient(mesh, p, e);
    const Eigen::Vector2d gq = p1_gradient(mesh, q, e);
    const double ubar = centroid_value(mesh, u, e) - centroid_value(mesh, v, e);
    const double pq = centroid_value(mesh, p, e) + centroid_value(mesh, q, e);
    const double fe = has_f ? f_elem[static_cast<std::size_t>(e)] : 0.0;

    const double trace_part =
        0.5 * ubar * ubar - fe * pq + gu.dot(s * gp) + gv.dot(s * gq);
    Eigen::Matrix2d m = trace_part * Eigen::Matrix2d::Identity();
    m -= gp * (s * gu).transpose();
    m -= gu * (s.transpose() * gp).transpose();
    m -= gq * (s * gv).transpose();
    m -= gv * (s.transpose() * gq).transpose();
    out.s1[static_cast<std::size_t>(e)] = m;

    if (declare_varying) {
      const auto c = mesh.element_centroid(e);
      const Eigen::Vector2d x(c[0], c[1]);
      const int ci = std::clamp(static_cast<int>(c[0] * mesh.n), 0, mesh.n - 1);
      const int cj = std::clamp(static_cast<int>(c[1] * mesh.n), 0, mesh.n - 1);
      const int k = labels->labels[static_cast<std::size_t>(labels->grid.cell_index(ci, cj))];
      Eigen::Vector2d s0 = Eigen::Vector2d::Zero();
      if (coeffs->dsigma_form) s0 += coeffs->dsigma_form(k, x, gu, gp) + coeffs->dsigma_form(k, x, gv, gq);
      if (coeffs->grad_f) s0 -= pq * coeffs->grad_f(k, x);
      out.s0[static_cast<std::size_t>(e)] = s0;
    }
  }
  return out;
}

double evaluate_dj(const ShapeGradientData& s, const TriMesh& mesh, const VectorField& theta) {
  if (s.s1.size() != static_cast<std::size_t>(mesh.element_count()))
    throw ConfigError("evaluate_dj: element count mismatch");
  if (theta.x.size() != static_cast<std::size_t>(mesh.node_count()) ||
      theta.y.size() != theta.x.size())
    throw ConfigError("evaluate_dj: velocity does not match the mesh");
  const double area = mesh.element_area();
  double total = 0.0;
  for (int e = 0; e < mesh.element_count(); ++e) {
    const auto nodes = mesh.element_nodes(e);
    const auto grads = mesh.element_gradients(e);
    // Dtheta_{cd} = d_d theta_c, constant per element
    Eigen::Matrix2d dtheta = Eigen::Matrix2d::Zero();
    double cx = 0, cy = 0;
    for (int a = 0; a < 3; ++a) {
      const double tx = theta.x[static_cast<std::size_t>(nodes[static_cast<std::size_t>(a)])];
      const double ty = theta.y[static_cast<std::size_t>(nodes[static_cast<std::size_t>(a)])];
      dtheta(0, 0) += tx * grads[static_cast<std::size_t>(a)][0];
      dtheta(0, 1) += tx * grads[static_cast<std::size_t>(a)][1];
      dtheta(1, 0) += ty * grads[static_cast<std::size_t>(a)][0];
      dtheta(1, 1) += ty * grads[static_cast<std::size_t>(a)][1];
      cx += tx / 3.0;
      cy += ty / 3.0;
    }
    const auto& s1 = s.s1[static_cast<std::size_t>(e)];
    const auto& s0 = s.s0[static_cast<std::size_t>(e)];
    total += area * (s1.cwiseProduct(dtheta).sum() + s0(0) * cx + s0(1) * cy);
  }
  return total;
}

double evaluate_dj(const ShapeGradientData& s, const TriMesh& mesh, const VelocityField& theta) {
  VectorField vf;
  vf.n = theta.grid.n;
  vf.x = theta.x;
  vf.y = theta.y;
  return evaluate_dj(s, mesh, vf);
}

DescentDirection descent_direction(const ShapeGradientData& s, const TriMesh& mesh,
                                   const RegParams& reg) {
  reg.validate();
  if (s.s1.size() != static_cast<std::size_t>(mesh.element_count()))
    throw ConfigError("descent_direction: element count mismatch");

  const int nn = mesh.node_count();
  const double area = mesh.element_area();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(mesh.element_count()) * 27);

  // interleaved dofs: node i, component c -> 2i + c
  for (int e = 0; e < mesh.element_count(); ++e) {
    const auto nodes = mesh.element_nodes(e);
    const auto grads = mesh.element_gradients(e);
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        const double stiff = reg.alpha1 * area *
                             (grads[static_cast<std::size_t>(a)][0] * grads[static_cast<std::size_t>(b)][0] +
                              grads[static_cast<std::size_t>(a)][1] * grads[static_cast<std::size_t>(b)][1]);
        const double mass = reg.alpha2 * area / 12.0 * (a == b ? 2.0 : 1.0);
        for (int c = 0; c < 2; ++c)
          trip.emplace_back(2 * nodes[static_cast<std::size_t>(a)] + c,
                            2 * nodes[static_cast<std::size_t>(b)] + c, stiff + mass);
      }
    }
  }
  // boundary penalty, edge trapezoid: every boundary node collects alpha3*h
  const double half_h = 0.5 * mesh.spacing();
  for (Side side : kAllSides) {
    const auto nodes = mesh.side_nodes(side);
    for (int t = 0; t < mesh.n; ++t)
      for (int c = 0; c < 2; ++c) {
        trip.emplace_back(2 * nodes[static_cast<std::size_t>(t)] + c, 2 * nodes[static_cast<std::size_t>(t)] + c,
                          reg.alpha3 * half_h);
        trip.emplace_back(2 * nodes[static_cast<std::size_t>(t) + 1] + c,
                          2 * nodes[static_cast<std::size_t>(t) + 1] + c, reg.alpha3 * half_h);
      }
  }

  Eigen::SparseMatrix<double> b(2 * nn, 2 * nn);
  b.setFromTriplets(trip.begin(), trip.end());

  // rhs_i^c = -sum_e area * (S1[c,:] . grad(lambda_i) + S0[c]/3)
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(2 * nn);
  for (int e = 0; e < mesh.element_count(); ++e) {
    const auto nodes = mesh.element_nodes(e);
    const auto grads = mesh.element_gradients(e);
    const auto& s1 = s.s1[static_cast<std::size_t>(e)];
    const auto& s0 = s.s0[static_cast<std::size_t>(e)];
    for (int a = 0; a < 3; ++a)
      for (int c = 0; c < 2; ++c)
        rhs(2 * nodes[static_cast<std::size_t>(a)] + c) -=
            area * (s1(c, 0) * grads[static_cast<std::size_t>(a)][0] +
                    s1(c, 1) * grads[static_cast<std::size_t>(a)][1] + s0(c) / 3.0);
  }

  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(b);
  if (llt.info() != Eigen::Success)
    throw NumericError("descent_direction: factorization of the regularization system failed");
  const Eigen::VectorXd sol = llt.solve(rhs);
  if ((b * sol - rhs).norm() > 1e-8 * std::max(rhs.norm(), 1e-300))
    throw NumericError("descent_direction: solve failed");

  VectorField raw;
  raw.n = mesh.n;
  raw.x.resize(static_cast<std::size_t>(nn));
  raw.y.resize(static_cast<std::size_t>(nn));
  for (int i = 0; i < nn; ++i) {
    raw.x[static_cast<std::size_t>(i)] = sol(2 * i);
    raw.y[static_cast<std::size_t>(i)] = sol(2 * i + 1);
  }

  DescentDirection out;
  out.dj_raw = evaluate_dj(s, mesh, raw);
  double max_normal = 0.0;
  for (int idx : mesh.boundary_nodes()) {
    const auto i = static_cast<std::size_t>(idx);
    if (mesh.node_on_side(idx, Side::Left) || mesh.node_on_side(idx, Side::Right))
      max_normal = std::max(max_normal, std::abs(raw.x[i]));
    if (mesh.node_on_side(idx, Side::Lower) || mesh.node_on_side(idx, Side::Upper))
      max_normal = std::max(max_normal, std::abs(raw.y[i]));
  }
  out.max_boundary_normal = max_normal;
  out.theta = VelocityField(GridSpec(2, mesh.n), std::move(raw.x), std::move(raw.y));
  return out;
}

double fd_check(const std::function<double(const LevelFunctionSet&)>& cost,
                const LevelFunctionSet& phi, const VelocityField& theta, double t, double dj,
                double cfl) {
  if (t <= 0) throw ConfigError("fd_check: t must be positive");
  if (theta.max_speed() == 0.0) return 0.0; // both sides vanish
  TransportParams params;
  params.cfl = cfl;
  params.t_end = t;
  const LevelFunctionSet phi_t = advect(phi, theta, params);
  const double j0 = cost(phi);
  const double j1 = cost(phi_t);
  const double fd = (j1 - j0) / t;
  return std::abs(fd - dj) / std::max(std::abs(dj), 1e-300);
}

} // namespace lem
