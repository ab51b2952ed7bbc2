#include "lem/level_set.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace lem {

double LevelFunctionSet::value(int k, std::span<const double> x) const {
  return interpolate(grid, fields[static_cast<std::size_t>(k)], x);
}

double LevelFunctionSet::sup_norm() const {
  double m = 0.0;
  for (const auto& f : fields)
    for (double v : f) m = std::max(m, std::abs(v));
  return m;
}

void LevelFunctionSet::validate() const {
  if (kappa() < 2) throw ConfigError("LevelFunctionSet: need kappa >= 2 fields");
  const auto nn = static_cast<std::size_t>(grid.node_count());
  for (const auto& f : fields)
    if (f.size() != nn) throw ConfigError("LevelFunctionSet: field size does not match grid");
  if (pinned_zero)
    for (double v : fields[0])
      if (v != 0.0) throw ConfigError("LevelFunctionSet: pinned field 0 is not identically zero");
}

LevelFunctionSet sample_level_set(
    const GridSpec& g,
    std::span<const std::function<double(std::span<const double>)>> funcs, bool pinned_zero) {
  LevelFunctionSet phi;
  phi.grid = g;
  phi.pinned_zero = pinned_zero;
  phi.fields.reserve(funcs.size());
  for (const auto& f : funcs) phi.fields.push_back(sample_nodes(g, f));
  phi.validate();
  return phi;
}

double lower_envelope(const LevelFunctionSet& phi, std::span<const double> x) {
  double m = std::numeric_limits<double>::infinity();
  for (int k = 0; k < phi.kappa(); ++k) m = std::min(m, phi.value(k, x));
  return m;
}

int argmin_label(const LevelFunctionSet& phi, std::span<const double> x) {
  int best = 0;
  double bestv = phi.value(0, x);
  for (int k = 1; k < phi.kappa(); ++k) {
    const double v = phi.value(k, x);
    if (v < bestv) { // strict: exact ties keep the lowest index
      bestv = v;
      best = k;
    }
  }
  return best;
}

double PhaseLabelField::area(int k) const {
  std::int64_t c = 0;
  for (auto l : labels)
    if (l == k) ++c;
  return static_cast<double>(c) / static_cast<double>(grid.cell_count());
}

std::vector<std::int64_t> PhaseLabelField::counts() const {
  std::vector<std::int64_t> c(static_cast<std::size_t>(kappa), 0);
  for (auto l : labels) ++c[l];
  return c;
}

PhaseLabelField extract_phases(const LevelFunctionSet& phi) {
  phi.validate();
  const GridSpec& g = phi.grid;
  PhaseLabelField out;
  out.grid = g;
  out.kappa = phi.kappa();
  out.labels.resize(static_cast<std::size_t>(g.cell_count()));
  const double h = g.spacing();
  if (g.dim == 2) {
    for (int j = 0; j < g.n; ++j)
      for (int i = 0; i < g.n; ++i) {
        const double c[2] = {(i + 0.5) * h, (j + 0.5) * h};
        out.labels[static_cast<std::size_t>(g.cell_index(i, j))] =
            static_cast<std::uint8_t>(argmin_label(phi, std::span<const double>(c, 2)));
      }
  } else {
    for (int k = 0; k < g.n; ++k)
      for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.n; ++i) {
          const double c[3] = {(i + 0.5) * h, (j + 0.5) * h, (k + 0.5) * h};
          out.labels[static_cast<std::size_t>(g.cell_index(i, j, k))] =
              static_cast<std::uint8_t>(argmin_label(phi, std::span<const double>(c, 3)));
        }
  }
  return out;
}

double AnalyticField::eval(double x1, double x2) const {
  switch (kind) {
    case Kind::Zero: return 0.0;
    case Kind::Constant: return params[0];
    case Kind::Plane: return params[0] * x1 + params[1] * x2 + params[2];
    case Kind::SineInterface:
      return x2 - params[0] - params[1] * std::sin(2.0 * std::numbers::pi * params[2] * x1);
    case Kind::Ellipses: {
      const double scale = params[0];
      double m = std::numeric_limits<double>::infinity();
      for (std::size_t e = 1; e + 3 < params.size(); e += 4) {
        const double dx = (x1 - params[e]) / params[e + 2];
        const double dy = (x2 - params[e + 1]) / params[e + 3];
        m = std::min(m, dx * dx + dy * dy - 1.0);
      }
      return scale * m;
    }
  }
  return 0.0;
}

AnalyticField AnalyticField::parse(const std::string& text) {
  std::istringstream in(text);
  std::string kind;
  in >> kind;
  AnalyticField f;
  std::vector<double>& p = f.params;
  double v;
  while (in >> v) p.push_back(v);
  if (!in.eof()) throw ConfigError("field spec: trailing garbage in '" + text + "'");
  auto need = [&](std::size_t c) {
    if (p.size() != c) throw ConfigError("field spec '" + kind + "': wrong parameter count");
  };
  if (kind == "zero") {
    f.kind = Kind::Zero;
    need(0);
  } else if (kind == "constant") {
    f.kind = Kind::Constant;
    need(1);
  } else if (kind == "plane") {
    f.kind = Kind::Plane;
    need(3);
  } else if (kind == "sine_interface") {
    f.kind = Kind::SineInterface;
    need(3);
  } else if (kind == "ellipses") {
    f.kind = Kind::Ellipses;
    if (p.size() < 5 || (p.size() - 1) % 4 != 0)
      throw ConfigError("field spec 'ellipses': expected SCALE + groups of (CX CY RX RY)");
    for (std::size_t e = 1; e + 3 < p.size(); e += 4)
      if (p[e + 2] <= 0.0 || p[e + 3] <= 0.0)
        throw ConfigError("field spec 'ellipses': radii must be positive");
  } else {
    throw ConfigError("field spec: unknown kind '" + kind + "'");
  }
  return f;
}

std::string AnalyticField::str() const {
  std::ostringstream out;
  switch (kind) {
    case Kind::Zero: out << "zero"; break;
    case Kind::Constant: out << "constant"; break;
    case Kind::Plane: out << "plane"; break;
    case Kind::SineInterface: out << "sine_interface"; break;
    case Kind::Ellipses: out << "ellipses"; break;
  }
  for (double p : params) out << ' ' << p;
  return out.str();
}

} // namespace lem
