#include "lem/interface.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace lem {

namespace {

int argmin_at_node(const LevelFunctionSet& phi, std::int64_t node) {
  int best = 0;
  double bestv = phi.fields[0][static_cast<std::size_t>(node)];
  for (int k = 1; k < phi.kappa(); ++k) {
    const double v = phi.fields[static_cast<std::size_t>(k)][static_cast<std::size_t>(node)];
    if (v < bestv) {
      bestv = v;
      best = k;
    }
  }
  return best;
}

std::vector<double> difference_field(const LevelFunctionSet& phi, int k, int l) {
  const auto& a = phi.fields[static_cast<std::size_t>(k)];
  const auto& b = phi.fields[static_cast<std::size_t>(l)];
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return d;
}

// Midpoint classification: the segment belongs to the shared boundary iff the
// two smallest field values there are the pair's own.
bool is_shared(const LevelFunctionSet& phi, int k, int l, const Segment& s, double tol_abs) {
  const auto m = s.midpoint();
  const double x[2] = {m[0], m[1]};
  const double vk = phi.value(k, std::span<const double>(x, 2));
  const double vl = phi.value(l, std::span<const double>(x, 2));
  const double cut = std::max(vk, vl) - tol_abs;
  for (int j = 0; j < phi.kappa(); ++j) {
    if (j == k || j == l) continue;
    if (phi.value(j, std::span<const double>(x, 2)) < cut) return false;
  }
  return true;
}

} // namespace

PairInterface pairwise_interface(const LevelFunctionSet& phi, int k, int l, double tol_eq_rel) {
  phi.validate();
  if (phi.grid.dim != 2) throw ConfigError("pairwise_interface: contour extraction is 2D only");
  if (k == l || k < 0 || l < 0 || k >= phi.kappa() || l >= phi.kappa())
    throw ConfigError("pairwise_interface: bad pair of labels");

  const GridSpec& g = phi.grid;
  const double h = g.spacing();
  const double tol_abs = phi.eq_tol(tol_eq_rel);
  const std::vector<double> psi = difference_field(phi, k, l);

  PairInterface out;
  out.k = k;
  out.l = l;

  auto emit = [&](double ax, double ay, double bx, double by) {
    Segment s{{ax, ay}, {bx, by}};
    if (is_shared(phi, k, l, s, tol_abs))
      out.shared.push_back(s);
    else
      out.ghost.push_back(s);
  };

  for (int j = 0; j < g.n; ++j) {
    for (int i = 0; i < g.n; ++i) {
      const double v00 = psi[static_cast<std::size_t>(g.node_index(i, j))];
      const double v10 = psi[static_cast<std::size_t>(g.node_index(i + 1, j))];
      const double v11 = psi[static_cast<std::size_t>(g.node_index(i + 1, j + 1))];
      const double v01 = psi[static_cast<std::size_t>(g.node_index(i, j + 1))];

      if (std::abs(v00) <= tol_abs && std::abs(v10) <= tol_abs && std::abs(v11) <= tol_abs &&
          std::abs(v01) <= tol_abs) {
        out.degenerate_cells.push_back(g.cell_index(i, j));
        continue;
      }

      const int code = (v00 < 0 ? 1 : 0) | (v10 < 0 ? 2 : 0) | (v11 < 0 ? 4 : 0) | (v01 < 0 ? 8 : 0);
      if (code == 0 || code == 15) continue;

      const double x0 = i * h, y0 = j * h, x1 = (i + 1) * h, y1 = (j + 1) * h;
      // crossing points on the four edges (valid only where signs differ)
      auto cut = [](double va, double vb) { return va / (va - vb); };
      const double bx = x0 + cut(v00, v10) * h, by = y0;       // bottom
      const double rx = x1, ry = y0 + cut(v10, v11) * h;       // right
      const double tx = x0 + cut(v01, v11) * h, ty = y1;       // top
      const double lx = x0, ly = y0 + cut(v00, v01) * h;       // left

      switch (code) {
        case 1: case 14: emit(lx, ly, bx, by); break;
        case 2: case 13: emit(bx, by, rx, ry); break;
        case 4: case 11: emit(rx, ry, tx, ty); break;
        case 8: case 7: emit(tx, ty, lx, ly); break;
        case 3: case 12: emit(lx, ly, rx, ry); break;
        case 6: case 9: emit(bx, by, tx, ty); break;
        case 5: { // saddle, corners 00 and 11 negative
          const double center = 0.25 * (v00 + v10 + v11 + v01);
          if (center < 0) {
            emit(bx, by, rx, ry);
            emit(tx, ty, lx, ly);
          } else {
            emit(lx, ly, bx, by);
            emit(rx, ry, tx, ty);
          }
          break;
        }
        case 10: { // saddle, corners 10 and 01 negative
          const double center = 0.25 * (v00 + v10 + v11 + v01);
          if (center < 0) {
            emit(lx, ly, bx, by);
            emit(rx, ry, tx, ty);
          } else {
            emit(bx, by, rx, ry);
            emit(tx, ty, lx, ly);
          }
          break;
        }
        default: break;
      }
    }
  }
  return out;
}

namespace {

// Interpolated pairwise differences against field 0 and their Jacobian.
void envelope_system(const LevelFunctionSet& phi, const double* x, double* F, Eigen::MatrixXd* J) {
  const int d = phi.grid.dim;
  std::span<const double> xs(x, static_cast<std::size_t>(d));
  const double v0 = phi.value(0, xs);
  for (int r = 0; r < d; ++r) F[r] = v0 - phi.value(r + 1, xs);
  if (J) {
    const auto g0 = interp_gradient(phi.grid, phi.fields[0], xs);
    for (int r = 0; r < d; ++r) {
      const auto gr = interp_gradient(phi.grid, phi.fields[static_cast<std::size_t>(r + 1)], xs);
      for (int c = 0; c < d; ++c) (*J)(r, c) = g0[static_cast<std::size_t>(c)] - gr[static_cast<std::size_t>(c)];
    }
  }
}

double norm_inf(const double* v, int d) {
  double m = 0;
  for (int a = 0; a < d; ++a) m = std::max(m, std::abs(v[a]));
  return m;
}

} // namespace

TuplePointResult detect_tuple_points(const LevelFunctionSet& phi, double tol_eq_rel,
                                     double eps_rank) {
  phi.validate();
  const GridSpec& g = phi.grid;
  const int d = g.dim;
  if (phi.kappa() != d + 1)
    throw ConfigError("detect_tuple_points: requires kappa = d + 1 fields");

  (void)eps_rank; // machine-rank is used for the solve; eps_rank applies in check_regularity
  const double h = g.spacing();
  const double tol_abs = std::max(phi.eq_tol(tol_eq_rel), 1e-300);
  TuplePointResult out;

  const int corners = d == 2 ? 4 : 8;
  std::array<std::int64_t, 8> corner_nodes{};

  auto cell_candidates = [&](int i, int j, int k) {
    if (d == 2) {
      corner_nodes = {g.node_index(i, j), g.node_index(i + 1, j), g.node_index(i, j + 1),
                      g.node_index(i + 1, j + 1), 0, 0, 0, 0};
    } else {
      corner_nodes = {g.node_index(i, j, k),         g.node_index(i + 1, j, k),
                      g.node_index(i, j + 1, k),     g.node_index(i + 1, j + 1, k),
                      g.node_index(i, j, k + 1),     g.node_index(i + 1, j, k + 1),
                      g.node_index(i, j + 1, k + 1), g.node_index(i + 1, j + 1, k + 1)};
    }
    unsigned seen = 0;
    for (int c = 0; c < corners; ++c) seen |= 1u << argmin_at_node(phi, corner_nodes[static_cast<std::size_t>(c)]);
    return seen == (1u << phi.kappa()) - 1u;
  };

  auto run_newton = [&](std::int64_t cell, double* x) {
    Eigen::MatrixXd J(d, d);
    Eigen::VectorXd step(d);
    double F[3];
    envelope_system(phi, x, F, nullptr);
    double res = norm_inf(F, d);
    for (int it = 0; it < 50; ++it) {
      if (res <= tol_abs) {
        // accept; deduplicate within radius h
        for (const auto& p : out.points) {
          double dist2 = 0;
          for (int a = 0; a < d; ++a) dist2 += (p[static_cast<std::size_t>(a)] - x[a]) * (p[static_cast<std::size_t>(a)] - x[a]);
          if (dist2 <= h * h) return;
        }
        std::array<double, 3> pt{0, 0, 0};
        for (int a = 0; a < d; ++a) pt[static_cast<std::size_t>(a)] = x[a];
        out.points.push_back(pt);
        return;
      }
      envelope_system(phi, x, F, &J);
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(J, Eigen::ComputeThinU | Eigen::ComputeThinV);
      const double sv_max = svd.singularValues()(0);
      if (!std::isfinite(sv_max) || svd.singularValues()(d - 1) <= 1e-14 * sv_max) {
        out.singular_cells.push_back(cell);
        return;
      }
      Eigen::VectorXd rhs(d);
      for (int a = 0; a < d; ++a) rhs(a) = -F[a];
      step = svd.solve(rhs);
      // damped update, clamped into the unit box
      double lambda = 1.0;
      for (int half = 0; half < 20; ++half) {
        double trial[3];
        for (int a = 0; a < d; ++a)
          trial[a] = std::clamp(x[a] + lambda * step(a), 0.0, 1.0);
        double Ft[3];
        envelope_system(phi, trial, Ft, nullptr);
        const double rt = norm_inf(Ft, d);
        if (rt < res || rt <= tol_abs) {
          for (int a = 0; a < d; ++a) x[a] = trial[a];
          res = rt;
          break;
        }
        lambda *= 0.5;
        if (half == 19) {
          out.non_converged_cells.push_back(cell);
          return;
        }
      }
    }
    if (res <= tol_abs) {
      for (const auto& p : out.points) {
        double dist2 = 0;
        for (int a = 0; a < d; ++a) dist2 += (p[static_cast<std::size_t>(a)] - x[a]) * (p[static_cast<std::size_t>(a)] - x[a]);
        if (dist2 <= h * h) return;
      }
      std::array<double, 3> pt{0, 0, 0};
      for (int a = 0; a < d; ++a) pt[static_cast<std::size_t>(a)] = x[a];
      out.points.push_back(pt);
    } else {
      out.non_converged_cells.push_back(cell);
    }
  };

  if (d == 2) {
    for (int j = 0; j < g.n; ++j)
      for (int i = 0; i < g.n; ++i) {
        if (!cell_candidates(i, j, 0)) continue;
        double x[3] = {(i + 0.5) * h, (j + 0.5) * h, 0};
        run_newton(g.cell_index(i, j), x);
      }
  } else {
    for (int k = 0; k < g.n; ++k)
      for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.n; ++i) {
          if (!cell_candidates(i, j, k)) continue;
          double x[3] = {(i + 0.5) * h, (j + 0.5) * h, (k + 0.5) * h};
          run_newton(g.cell_index(i, j, k), x);
        }
  }
  return out;
}

std::array<double, 3> triple_angles(const LevelFunctionSet& phi, std::array<double, 2> xhat,
                                    double tol_eq_rel, double eps_rank) {
  phi.validate();
  if (phi.grid.dim != 2 || phi.kappa() != 3)
    throw ConfigError("triple_angles: requires d = 2 and kappa = 3");
  if (!phi.pinned_zero)
    throw ConfigError("triple_angles: requires field 0 pinned to zero");

  const double x[2] = {xhat[0], xhat[1]};
  std::span<const double> xs(x, 2);
  if (!phi.grid.contains(xs)) throw DomainError("triple_angles: point outside the unit box");

  const double tol_abs = phi.eq_tol(tol_eq_rel);
  const double v0 = phi.value(0, xs), v1 = phi.value(1, xs), v2 = phi.value(2, xs);
  const double res = std::max({std::abs(v0 - v1), std::abs(v0 - v2), std::abs(v1 - v2)});
  if (res > tol_abs) throw DomainError("triple_angles: point is not on the triple junction");

  std::array<std::array<double, 2>, 3> grad{};
  for (int k = 0; k < 3; ++k) {
    const auto gk = interp_gradient(phi.grid, phi.fields[static_cast<std::size_t>(k)], xs);
    grad[static_cast<std::size_t>(k)] = {gk[0], gk[1]};
  }

  // rank condition on the difference Jacobian
  Eigen::Matrix2d J;
  J << grad[0][0] - grad[1][0], grad[0][1] - grad[1][1],
       grad[0][0] - grad[2][0], grad[0][1] - grad[2][1];
  Eigen::JacobiSVD<Eigen::Matrix2d> svd(J);
  if (svd.singularValues()(1) <= eps_rank)
    throw NumericError("triple_angles: degenerate junction (rank condition fails)");

  auto diff = [&](int a, int b) {
    return std::array<double, 2>{grad[static_cast<std::size_t>(a)][0] - grad[static_cast<std::size_t>(b)][0],
                                 grad[static_cast<std::size_t>(a)][1] - grad[static_cast<std::size_t>(b)][1]};
  };
  std::array<double, 3> beta{};
  for (int k = 0; k < 3; ++k) {
    const auto u = diff((k + 1) % 3, k);
    const auto v = diff(k, (k + 2) % 3);
    const double nu = std::hypot(u[0], u[1]);
    const double nv = std::hypot(v[0], v[1]);
    double c = (u[0] * v[0] + u[1] * v[1]) / (nu * nv);
    c = std::clamp(c, -1.0, 1.0);
    beta[static_cast<std::size_t>(k)] = std::acos(c);
  }
  return beta;
}

RegularityReport check_regularity(const LevelFunctionSet& phi, double eps_rank,
                                  double tol_eq_rel) {
  phi.validate();
  const GridSpec& g = phi.grid;
  const double tol_abs = phi.eq_tol(tol_eq_rel);
  RegularityReport rep;
  rep.eps_rank = eps_rank;

  for (int k = 0; k < phi.kappa(); ++k) {
    for (int l = k + 1; l < phi.kappa(); ++l) {
      RegularityReport::PairEntry e;
      e.k = k;
      e.l = l;
      e.min_grad_norm = std::numeric_limits<double>::infinity();
      const std::vector<double> psi = difference_field(phi, k, l);
      if (g.dim == 2) {
        PairInterface pi = pairwise_interface(phi, k, l, tol_eq_rel);
        e.degenerate_cells = static_cast<std::int64_t>(pi.degenerate_cells.size());
        auto visit = [&](const Segment& s) {
          const auto m = s.midpoint();
          const double x[2] = {m[0], m[1]};
          const auto gr = interp_gradient(g, psi, std::span<const double>(x, 2));
          e.min_grad_norm = std::min(e.min_grad_norm, std::hypot(gr[0], gr[1]));
          ++e.samples;
        };
        for (const auto& s : pi.shared) visit(s);
        for (const auto& s : pi.ghost) visit(s);
      } else {
        for (int kk = 0; kk < g.n; ++kk)
          for (int j = 0; j < g.n; ++j)
            for (int i = 0; i < g.n; ++i) {
              double lo = std::numeric_limits<double>::infinity(), hi = -lo;
              double amax = 0;
              for (int c = 0; c < 8; ++c) {
                const int ii = i + (c & 1), jj = j + ((c >> 1) & 1), cc = kk + ((c >> 2) & 1);
                const double v = psi[static_cast<std::size_t>(g.node_index(ii, jj, cc))];
                lo = std::min(lo, v);
                hi = std::max(hi, v);
                amax = std::max(amax, std::abs(v));
              }
              if (amax <= tol_abs) {
                ++e.degenerate_cells;
                continue;
              }
              if (lo > 0 || hi < 0) continue;
              const double h = g.spacing();
              const double x[3] = {(i + 0.5) * h, (j + 0.5) * h, (kk + 0.5) * h};
              const auto gr = interp_gradient(g, psi, std::span<const double>(x, 3));
              e.min_grad_norm =
                  std::min(e.min_grad_norm, std::sqrt(gr[0] * gr[0] + gr[1] * gr[1] + gr[2] * gr[2]));
              ++e.samples;
            }
      }
      if (e.degenerate_cells > 0) e.min_grad_norm = 0.0;
      rep.pairs.push_back(e);
    }
  }

  if (phi.kappa() == g.dim + 1) {
    TuplePointResult tp = detect_tuple_points(phi, tol_eq_rel, eps_rank);
    rep.newton_failures =
        static_cast<std::int64_t>(tp.non_converged_cells.size() + tp.singular_cells.size());
    const int d = g.dim;
    Eigen::MatrixXd J(d, d);
    for (const auto& p : tp.points) {
      double F[3];
      double x[3] = {p[0], p[1], p[2]};
      envelope_system(phi, x, F, &J);
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(J);
      rep.tuple_min_singular.push_back(svd.singularValues()(d - 1));
    }
  }

  bool ok = true;
  for (const auto& e : rep.pairs)
    if (!(e.min_grad_norm > eps_rank) && e.samples + e.degenerate_cells > 0) ok = false;
  for (double s : rep.tuple_min_singular)
    if (!(s > eps_rank)) ok = false;
  rep.pass = ok;
  return rep;
}

std::string RegularityReport::summary() const {
  std::ostringstream out;
  out << "regularity check (eps_rank = " << eps_rank << "): " << (pass ? "PASS" : "FAIL") << '\n';
  for (const auto& e : pairs) {
    out << "  pair (" << e.k << ',' << e.l << "): ";
    if (e.samples + e.degenerate_cells == 0)
      out << "coincidence set empty";
    else
      out << "min |grad| = " << e.min_grad_norm << " over " << e.samples << " samples";
    if (e.degenerate_cells > 0) out << ", " << e.degenerate_cells << " degenerate cells";
    out << '\n';
  }
  for (std::size_t i = 0; i < tuple_min_singular.size(); ++i)
    out << "  tuple point " << i << ": min singular value = " << tuple_min_singular[i] << '\n';
  if (newton_failures > 0) out << "  " << newton_failures << " tuple-point cells failed to converge\n";
  return out.str();
}

} // namespace lem
