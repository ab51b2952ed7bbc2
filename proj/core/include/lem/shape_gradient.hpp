#pragma once

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <vector>

#include "lem/fem.hpp"
#include "lem/transport.hpp"

namespace lem {

/// Volume form of the cost derivative: dJ(theta) = sum_e area*(S1 : Dtheta + S0 . theta).
/// S1 is piecewise constant (one 2x2 matrix per triangle), S0 one 2-vector.
struct ShapeGradientData {
  int n = 0;
  std::vector<Eigen::Matrix2d> s1;
  std::vector<Eigen::Vector2d> s0;

  static ShapeGradientData zeros(const TriMesh& mesh);
  void add_scaled(const ShapeGradientData& other, double factor);
};

struct RegParams {
  double alpha1 = 0.2;
  double alpha2 = 0.8;
  double alpha3 = 1e5;

  void validate() const;
};

/// Isotropic specialization: sigma = s*I per element, f = 0, S0 = 0.
ShapeGradientData assemble_s1_iso(const TriMesh& mesh, const NodalField& u, const NodalField& v,
                                  const NodalField& p, const NodalField& q,
                                  const std::vector<double>& sigma_elem);

/// Callbacks for spatially varying coefficients. dsigma_form(k, x, a, b)
/// returns the vector with components sum_{i,j} d_l (sigma_k)_{ij} a_j b_i;
/// grad_f(k, x) the gradient of the phase source term.
struct VariableCoefficients {
  std::function<Eigen::Vector2d(int, Eigen::Vector2d, Eigen::Vector2d, Eigen::Vector2d)> dsigma_form;
  std::function<Eigen::Vector2d(int, Eigen::Vector2d)> grad_f;
};

/// Full anisotropic tensor, including the -f(p+q) trace term and the S0
/// contributions from the callbacks. declare_varying without callbacks is a
/// config error; without it S0 = 0 (element-constant coefficients).
ShapeGradientData assemble_s1_general(const TriMesh& mesh, const NodalField& u,
                                      const NodalField& v, const NodalField& p,
                                      const NodalField& q, const ElementSigma& sig,
                                      const std::vector<double>& f_elem,
                                      const PhaseLabelField* labels = nullptr,
                                      const VariableCoefficients* coeffs = nullptr,
                                      bool declare_varying = false);

/// Nodal vector field on the mesh (no boundary projection applied).
struct VectorField {
  int n = 0;
  std::vector<double> x, y;
};

double evaluate_dj(const ShapeGradientData& s, const TriMesh& mesh, const VectorField& theta);
double evaluate_dj(const ShapeGradientData& s, const TriMesh& mesh, const VelocityField& theta);

struct DescentDirection {
  VelocityField theta;          // normal component projected at the boundary
  double dj_raw = 0;            // dJ on the unprojected solution = -B(theta,theta)
  double max_boundary_normal = 0; // projection magnitude, recorded per call
};

/// Solves the regularized vector problem B(theta, xi) = -dJ(xi) and returns
/// the transport-ready field.
DescentDirection descent_direction(const ShapeGradientData& s, const TriMesh& mesh,
                                   const RegParams& reg);

/// Finite-difference validation of dj against the advected cost:
/// |(J(phi_t) - J(phi))/t - dj| / max(|dj|, eps).
double fd_check(const std::function<double(const LevelFunctionSet&)>& cost,
                const LevelFunctionSet& phi, const VelocityField& theta, double t, double dj,
                double cfl = 0.9);

} // namespace lem
