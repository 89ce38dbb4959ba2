#include "moreau/planar_model.hpp"

#include <cmath>
#include <sstream>

namespace moreau {

namespace {

void require_pair(const Configuration& c, Eigen::Index i, Eigen::Index j) {
  if (i == j) throw std::invalid_argument("disk pair requires i != j");
  if (i < 0 || j < 0 || i >= c.count() || j >= c.count())
    throw std::out_of_range("disk index out of range");
}

}  // namespace

Configuration::Configuration(std::vector<Eigen::Vector2d> pos, std::vector<double> r)
    : positions(std::move(pos)), radii(std::move(r)) {
  if (positions.size() != radii.size())
    throw std::invalid_argument("Configuration: positions/radii size mismatch");
  if (positions.size() < 2)
    throw std::invalid_argument("Configuration: at least two disks required");
  for (double rad : radii)
    if (!(rad > 0.0)) throw std::invalid_argument("Configuration: radii must be positive");
}

Vec Configuration::stacked() const {
  Vec x(2 * count());
  for (Eigen::Index i = 0; i < count(); ++i)
    x.segment<2>(2 * i) = positions[static_cast<size_t>(i)];
  return x;
}

Configuration Configuration::from_stacked(const Vec& x, const std::vector<double>& radii) {
  if (x.size() != 2 * static_cast<Eigen::Index>(radii.size()))
    throw std::invalid_argument("from_stacked: size mismatch");
  std::vector<Eigen::Vector2d> pos(radii.size());
  for (size_t i = 0; i < radii.size(); ++i)
    pos[i] = x.segment<2>(2 * static_cast<Eigen::Index>(i));
  return Configuration(std::move(pos), radii);
}

double disk_distance(const Configuration& c, Eigen::Index i, Eigen::Index j) {
  require_pair(c, i, j);
  const double gap = (c.positions[static_cast<size_t>(i)] - c.positions[static_cast<size_t>(j)]).norm();
  return gap - (c.radii[static_cast<size_t>(i)] + c.radii[static_cast<size_t>(j)]);
}

Vec disk_distance_gradient(const Configuration& c, Eigen::Index i, Eigen::Index j) {
  require_pair(c, i, j);
  const Eigen::Vector2d diff =
      c.positions[static_cast<size_t>(i)] - c.positions[static_cast<size_t>(j)];
  const double norm = diff.norm();
  if (!(norm > 0.0))
    throw std::invalid_argument("disk_distance_gradient: gradient undefined at coincident centers");
  Vec g = Vec::Zero(2 * c.count());
  g.segment<2>(2 * i) = diff / norm;
  g.segment<2>(2 * j) = -diff / norm;
  return g;
}

bool admissible(const Configuration& c, double tol) {
  for (Eigen::Index i = 0; i < c.count(); ++i)
    for (Eigen::Index j = i + 1; j < c.count(); ++j)
      if (disk_distance(c, i, j) < -tol) return false;
  return true;
}

Polyhedron admissible_velocity_set(const Configuration& c, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("admissible_velocity_set: h must be positive");
  std::vector<Halfspace> hs;
  for (Eigen::Index i = 0; i < c.count(); ++i)
    for (Eigen::Index j = i + 1; j < c.count(); ++j) {
      const Vec grad = disk_distance_gradient(c, i, j);
      hs.emplace_back(-h * grad, disk_distance(c, i, j));
    }
  return Polyhedron(std::move(hs), 2 * c.count());
}

Polyhedron linearized_feasible_set(const Configuration& c) {
  const Vec x = c.stacked();
  std::vector<Halfspace> hs;
  for (Eigen::Index i = 0; i < c.count(); ++i)
    for (Eigen::Index j = i + 1; j < c.count(); ++j) {
      const Vec grad = disk_distance_gradient(c, i, j);
      hs.emplace_back(-grad, disk_distance(c, i, j) - grad.dot(x));
    }
  return Polyhedron(std::move(hs), 2 * c.count());
}

std::vector<Vec> vertex_vectors(Eigen::Index n) {
  if (n < 2) throw std::invalid_argument("vertex_vectors: need n >= 2");
  std::vector<Vec> rows;
  rows.reserve(static_cast<size_t>(n - 1));
  for (Eigen::Index j = 0; j < n - 1; ++j) {
    Vec v = Vec::Zero(2 * n);
    v(2 * j) = 1.0;
    v(2 * j + 1) = 1.0;
    v(2 * j + 2) = -1.0;
    v(2 * j + 3) = -1.0;
    rows.push_back(std::move(v));
  }
  return rows;
}

void ControlledVelocityModel::validate_magnitudes(const Vec& u_mags, double tol) const {
  if (u_mags.size() != count())
    throw std::invalid_argument("control magnitudes: wrong count");
  for (Eigen::Index i = 0; i < count(); ++i) {
    if (u_mags(i) < lower(i) - tol || u_mags(i) > upper(i) + tol) {
      std::ostringstream os;
      os << "control bound violated for object " << i << ": |u_" << i + 1 << "| = "
         << u_mags(i) << " outside [" << lower(i) << ", " << upper(i) << "]";
      throw std::invalid_argument(os.str());
    }
  }
  for (size_t k = 0; k < couplings.size(); ++k) {
    const auto& cp = couplings[k];
    const double lhs = cp.coeffs.dot(u_mags);
    if (std::abs(lhs - cp.rhs) > tol * std::max(1.0, std::abs(cp.rhs))) {
      std::ostringstream os;
      os << "control coupling " << k << " violated: <coeffs, |u|> = " << lhs
         << " != " << cp.rhs;
      throw std::invalid_argument(os.str());
    }
  }
}

Vec controlled_velocity(const ControlledVelocityModel& model, const Vec& u_mags) {
  model.validate_magnitudes(u_mags);
  Vec g(2 * model.count());
  for (Eigen::Index i = 0; i < model.count(); ++i) {
    const double mag = model.speeds(i) * u_mags(i);
    g(2 * i) = mag * std::cos(model.angles(i));
    g(2 * i + 1) = mag * std::sin(model.angles(i));
  }
  return g;
}

Polyhedron MovingPolyhedron::at(double) const {
  std::vector<Halfspace> hs;
  hs.reserve(static_cast<size_t>(count()));
  for (Eigen::Index j = 0; j < count(); ++j)
    hs.emplace_back(rows.row(j).transpose(), offsets(j));
  return Polyhedron(std::move(hs), dim());
}

Vec MovingPolyhedron::slacks(const Vec& x) const {
  return offsets - rows * x;
}

void validate_orientation(const Configuration& c) {
  for (Eigen::Index j = 0; j + 1 < c.count(); ++j) {
    const auto& a = c.positions[static_cast<size_t>(j)];
    const auto& b = c.positions[static_cast<size_t>(j + 1)];
    if (!(b.x() > a.x() && b.y() > a.y())) {
      std::ostringstream os;
      os << "orientation assumption violated: object " << j + 2
         << " must lie ahead of object " << j + 1 << " on both axes";
      throw std::domain_error(os.str());
    }
  }
}

MovingPolyhedron build_sum_norm_constraint_set(const ScenarioSpec& spec) {
  const Eigen::Index n = spec.count();
  validate_orientation(spec.initial);
  const auto rows = vertex_vectors(n);
  MovingPolyhedron mp;
  mp.rows = Mat(n - 1, 2 * n);
  mp.offsets = Vec(n - 1);
  for (Eigen::Index j = 0; j < n - 1; ++j) {
    mp.rows.row(j) = rows[static_cast<size_t>(j)].transpose();
    mp.offsets(j) = -(spec.initial.radii[static_cast<size_t>(j)] +
                      spec.initial.radii[static_cast<size_t>(j + 1)]);
  }
  if (spec.offset_override) {
    if (spec.offset_override->size() != mp.offsets.size())
      throw std::invalid_argument("offset_override: wrong number of offsets");
    mp.offsets = *spec.offset_override;
  }
  return mp;
}

MovingPolyhedron scenario_constraints(const ScenarioSpec& spec, const Configuration& c) {
  if (spec.constraint == ConstraintKind::SumNormChain)
    return build_sum_norm_constraint_set(spec);

  const Eigen::Index n = c.count();
  const Vec x = c.stacked();
  const Eigen::Index pairs = n * (n - 1) / 2;
  MovingPolyhedron mp;
  mp.rows = Mat(pairs, 2 * n);
  mp.offsets = Vec(pairs);
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j, ++r) {
      const Vec grad = disk_distance_gradient(c, i, j);
      mp.rows.row(r) = -grad.transpose();
      mp.offsets(r) = disk_distance(c, i, j) - grad.dot(x);
    }
  return mp;
}

double cost_value(CostKind kind, const Vec& terminal_state, double T) {
  switch (kind) {
    case CostKind::QuadraticStateTime:
      return 0.5 * terminal_state.squaredNorm() + 0.5 * T * T;
  }
  throw std::logic_error("unknown cost kind");
}

}  // namespace moreau
