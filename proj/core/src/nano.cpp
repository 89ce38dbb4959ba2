#include "moreau/nano.hpp"

#include "moreau/optimize.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace moreau::nano {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kPi = std::numbers::pi;

// Nondimensional frame for the closed forms: lengths / kLengthUnit,
// times / kClosedFormTimeUnit, chosen so s_i * |u2| is O(1).
constexpr double kLengthUnit = 350.0;
constexpr double kClosedFormTimeUnit = 1e-12;

struct Radii {
  double r1 = 5.0;
  double r2 = 10.0;
};

ParticleForces particle_forces(const NanoEnvironment& env, double z_coord, double radius,
                               double pair_surface_distance, double other_radius) {
  ParticleForces f;
  const double az = std::abs(z_coord);
  f.dw1 = env.tube_half_width - az - radius;
  f.dw2 = env.tube_half_width + az - radius;
  if (!(f.dw1 > 0.0) || !(f.dw2 > 0.0))
    throw std::domain_error("wall contact");

  const double mu = env.viscosity;
  auto h6 = [&](double dw) {
    const double r = radius / (radius + dw);
    return 6.0 * kPi * mu * radius *
           (1.0 + 9.0 / 16.0 * r + 0.13868 * std::pow(r, 1.4829));
  };
  auto h1 = [&](double dw) {
    const double r = radius / (radius + dw);
    return 48.0 / 15.0 * kPi * mu * radius * (std::log(1.0 - r) + r);
  };
  f.h6_w1 = h6(f.dw1);
  f.h6_w2 = h6(f.dw2);
  f.h1_w1 = h1(f.dw1);
  f.h1_w2 = h1(f.dw2);

  // Both walls contribute the same z-axis drag. The bracket enters with
  // -1/(1 - R/|z|) for either particle; the printed sign flip for the
  // second particle does not reproduce its own tabulated value.
  if (!(az > radius)) throw std::domain_error("wall contact");
  const double rz = radius / az;
  f.h5 = 6.0 * kPi * mu * radius * (-1.0 / (1.0 - rz) + 0.125 * std::log(1.0 - rz));

  const double ar3 = env.hamaker * radius * radius * radius;
  f.f_wall = std::abs(ar3 / std::pow(f.dw1, 4) - ar3 / std::pow(f.dw2, 4));
  f.pair_distance = pair_surface_distance;
  f.f_pair = ar3 / std::pow(pair_surface_distance, 4);
  (void)other_radius;

  f.vx = -(f.h6_w1 + f.h6_w2) * env.shear_rate / (f.h1_w1 + f.h1_w2);
  const double buoyancy = 4.0 / 3.0 * kPi * env.gravity * radius * env.density_diff;
  f.vz = (buoyancy + f.f_pair + f.f_wall) / (2.0 * f.h5);
  f.speed = std::hypot(f.vx, f.vz);
  return f;
}

struct ClosedFormFrame {
  double gap0;     // per-axis start gap / length_unit
  double sum0;     // per-axis coordinate sum / length_unit
  double contact;  // (R1 + R2)/2 / length_unit
};

ClosedFormFrame make_frame(const NanoEnvironment& env) {
  (void)env;
  const Configuration c = initial_configuration();
  ClosedFormFrame fr;
  const auto& p1 = c.positions[0];
  const auto& p2 = c.positions[1];
  if (std::abs((p2 - p1).x() - (p2 - p1).y()) > 1e-9)
    throw std::domain_error("closed forms require a diagonal start configuration");
  validate_orientation(c);
  fr.gap0 = (p2 - p1).x() / kLengthUnit;
  fr.sum0 = (p1.x() + p2.x()) / kLengthUnit;
  fr.contact = 0.5 * (c.radii[0] + c.radii[1]) / kLengthUnit;
  return fr;
}

double cos45() { return 0.5 * kSqrt2; }

}  // namespace

Configuration initial_configuration() {
  return Configuration({Eigen::Vector2d(-350.0, -350.0), Eigen::Vector2d(-200.0, -200.0)},
                       {5.0, 10.0});
}

NanoForces compute_forces(const NanoEnvironment& env, const Configuration& c) {
  if (c.count() != 2) throw std::invalid_argument("compute_forces: two particles expected");
  if (!((c.positions[0] - c.positions[1]).norm() > 0.0))
    throw std::invalid_argument("compute_forces: coincident centers");
  const double d12 = disk_distance(c, 0, 1);
  NanoForces out;
  out.particle[0] = particle_forces(env, c.positions[0].y(), c.radii[0], d12, c.radii[1]);
  out.particle[1] = particle_forces(env, c.positions[1].y(), c.radii[1], d12, c.radii[0]);
  return out;
}

double eta_coefficient(double s1, double s2) {
  return 0.5 * (2.0 * s1 - s2) * cos45();
}

double eta_closed_form(double s1, double s2, double u2, double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  if (std::abs(c - s) > 1e-12 * std::max(std::abs(c), std::abs(s)))
    throw std::domain_error("eta_closed_form: requires cos(theta) == sin(theta)");
  if (2.0 * s1 == s2) return 0.0;
  return 0.5 * (s1 * (2.0 * u2) - s2 * u2) * c;
}

std::pair<double, double> contact_products(double s1, double s2, const NanoEnvironment& env) {
  if (2.0 * s1 == s2) throw std::domain_error("contact_products: closing speed is zero");
  const ClosedFormFrame fr = make_frame(env);
  const double sg1 = s1 * kClosedFormTimeUnit / kLengthUnit;
  const double sg2 = s2 * kClosedFormTimeUnit / kLengthUnit;
  const double closing = (2.0 * sg1 - sg2) * cos45();
  const double near = (fr.gap0 - fr.contact) / closing;
  const double far = (fr.gap0 + fr.contact) / closing;
  return {near * kClosedFormTimeUnit, far * kClosedFormTimeUnit};
}

double horizon_product(double s1, double s2, const NanoEnvironment& env) {
  const ClosedFormFrame fr = make_frame(env);
  const double sg1 = s1 * kClosedFormTimeUnit / kLengthUnit;
  const double sg2 = s2 * kClosedFormTimeUnit / kLengthUnit;
  const double mean_rate = (2.0 * sg1 + sg2) * cos45();
  return (-fr.sum0 / mean_rate) * kClosedFormTimeUnit;
}

NanoCandidate evaluate_case(int case_id, double u2, const NanoEnvironment& env) {
  if (case_id != 1 && case_id != 2) throw std::invalid_argument("evaluate_case: case_id in {1,2}");
  const double u2_max = env.u_max / 2.0;
  if (!(u2 > 0.0) || u2 > u2_max * (1.0 + 1e-12))
    throw std::invalid_argument("evaluate_case: |u2| outside (0, u_max/2]");

  const Configuration c0 = initial_configuration();
  const NanoForces forces = compute_forces(env, c0);
  const double s1 = forces.s1();
  const double s2 = forces.s2();

  NanoCandidate cand;
  cand.case_id = case_id;
  cand.u2 = u2;
  cand.u1 = 2.0 * u2;
  const auto products = contact_products(s1, s2, env);
  cand.t_star = ((case_id == 1) ? products.first : products.second) / u2;
  cand.T_bar = horizon_product(s1, s2, env) / u2;
  cand.eta = eta_coefficient(s1, s2) * u2;
  cand.pre_slope1 = s1 * cand.u1 * cos45();
  cand.pre_slope2 = s2 * cand.u2 * cos45();
  cand.post_slope = 0.5 * (cand.pre_slope1 + cand.pre_slope2);
  if (cand.t_star > cand.T_bar * (1.0 + 1e-12))
    throw std::domain_error("contact after horizon");

  cand.terminal = position_at(cand, cand.T_bar, env);
  cand.cost = cost_value(CostKind::QuadraticStateTime, cand.terminal, cand.T_bar);

  // Chain-constraint slack 2*gap(t) - (R1+R2) is piecewise affine with
  // its minimum at t_star; the far root dips through the constraint.
  const double axis_gap_at_tstar =
      (c0.positions[1] - c0.positions[0]).x() -
      (cand.pre_slope1 - cand.pre_slope2) * cand.t_star;
  const double rsum = c0.radii[0] + c0.radii[1];
  cand.min_chain_slack = 2.0 * axis_gap_at_tstar - rsum;
  cand.sweeping_feasible = cand.min_chain_slack >= -1e-6 * rsum;
  return cand;
}

Vec position_at(const NanoCandidate& cand, double t, const NanoEnvironment&) {
  const Configuration c0 = initial_configuration();
  const double a1 = cand.pre_slope1;
  const double a2 = cand.pre_slope2;
  Vec x(4);
  if (t < cand.t_star) {
    x << c0.positions[0].x() + a1 * t, c0.positions[0].y() + a1 * t,
         c0.positions[1].x() + a2 * t, c0.positions[1].y() + a2 * t;
  } else {
    const double dt = t - cand.t_star;
    x << c0.positions[0].x() + a1 * t - cand.eta * dt,
         c0.positions[0].y() + a1 * t - cand.eta * dt,
         c0.positions[1].x() + a2 * t + cand.eta * dt,
         c0.positions[1].y() + a2 * t + cand.eta * dt;
  }
  return x;
}

NanoOptimum optimize(const NanoEnvironment& env) {
  const double u2_max = env.u_max / 2.0;
  auto case_objective = [&](int case_id) {
    return [&, case_id](const Vec& u) {
      try {
        const NanoCandidate c = evaluate_case(case_id, u(0), env);
        if (!c.sweeping_feasible) return std::numeric_limits<double>::infinity();
        return c.cost;
      } catch (const std::exception&) {
        return std::numeric_limits<double>::infinity();
      }
    };
  };

  opt::BoxDomain dom;
  dom.lower = Vec::Constant(1, 1e-6);
  dom.upper = Vec::Constant(1, u2_max);

  NanoOptimum out;
  NanoCandidate by_case[2];
  for (int case_id : {1, 2}) {
    const auto obj = case_objective(case_id);
    const Vec start = Vec::Constant(1, 0.5 * u2_max);
    const opt::NelderMeadResult r = opt::nelder_mead(obj, start, dom);
    const double u2 = std::isfinite(r.value) ? r.point(0) : 0.5 * u2_max;
    by_case[case_id - 1] = evaluate_case(case_id, u2, env);
  }

  const auto extended = [](const NanoCandidate& c) {
    return c.sweeping_feasible ? c.cost : std::numeric_limits<double>::infinity();
  };
  if (extended(by_case[0]) <= extended(by_case[1])) {
    out.best = by_case[0];
    out.other_case = by_case[1];
  } else {
    out.best = by_case[1];
    out.other_case = by_case[0];
  }

  // Report the flat valley of J over u2 for the winning case.
  const int win = out.best.case_id;
  double jmin = std::numeric_limits<double>::infinity();
  std::vector<std::pair<double, double>> sweep;
  for (int i = 1; i <= 200; ++i) {
    const double u2 = u2_max * static_cast<double>(i) / 200.0;
    const double j = evaluate_case(win, u2, env).cost;
    sweep.emplace_back(u2, j);
    jmin = std::min(jmin, j);
  }
  out.flat_range_lo = std::numeric_limits<double>::infinity();
  out.flat_range_hi = 0.0;
  double jmax_in_range = jmin;
  for (const auto& [u2, j] : sweep) {
    if (j - jmin <= 1e-6 * std::max(1.0, jmin)) {
      out.flat_range_lo = std::min(out.flat_range_lo, u2);
      out.flat_range_hi = std::max(out.flat_range_hi, u2);
      jmax_in_range = std::max(jmax_in_range, j);
    }
  }
  out.flat_spread = jmax_in_range - jmin;
  return out;
}

Trajectory synthesize_trajectory(const NanoCandidate& cand, Eigen::Index k,
                                 const NanoEnvironment& env) {
  const Grid grid(cand.T_bar / kSimTimeUnit, k);
  std::vector<Vec> states;
  states.reserve(static_cast<size_t>(k + 1));
  for (Eigen::Index i = 0; i <= k; ++i)
    states.push_back(position_at(cand, grid.node(i) * kSimTimeUnit, env));
  return Trajectory(grid, std::move(states));
}

ScenarioSpec scenario(const NanoEnvironment& env) {
  const Configuration c0 = initial_configuration();
  const NanoForces forces = compute_forces(env, c0);
  ScenarioSpec spec;
  spec.model.speeds = Vec(2);
  spec.model.speeds << forces.s1() * kSimTimeUnit, forces.s2() * kSimTimeUnit;
  spec.model.angles = Vec::Constant(2, kPi / 4.0);
  spec.model.lower = Vec::Zero(2);
  spec.model.upper = Vec::Constant(2, env.u_max);
  MagnitudeCoupling coupling;
  coupling.coeffs = Vec(2);
  coupling.coeffs << 1.0, -2.0;  // |u1| = 2 |u2|
  coupling.rhs = 0.0;
  spec.model.couplings.push_back(std::move(coupling));
  spec.initial = c0;
  spec.constraint = ConstraintKind::SumNormChain;
  return spec;
}

}  // namespace moreau::nano
