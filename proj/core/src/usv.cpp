#include "moreau/usv.hpp"

#include "moreau/optimize.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace moreau::usv {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;

// Per-axis slope of object i before contact: (sqrt(2)/2) * s_i * u_i.
double axis_slope(double speed, double u) { return 0.5 * kSqrt2 * speed * u; }

// Mirrored datasets (starts reflected through the origin, headings
// rotated half a turn) describe the same problem; the closed forms run
// in the canonical frame and reflect results back.
UsvData canonical(const UsvData& data, bool* mirrored = nullptr) {
  UsvData d = data;
  const bool flip = d.start1.x() + d.start2.x() > 0.0;
  if (flip) {
    d.start1 = -d.start1;
    d.start2 = -d.start2;
  }
  if (mirrored) *mirrored = flip;
  return d;
}

}  // namespace

UsvData UsvData::make() {
  UsvData d;
  d.theta = std::numbers::pi / 4.0;
  return d;
}

ScenarioSpec scenario(const UsvData& data) {
  ScenarioSpec spec;
  spec.model.speeds = Vec(2);
  spec.model.speeds << data.speed1, data.speed2;
  spec.model.angles = Vec::Constant(2, data.theta);
  spec.model.lower = Vec::Zero(2);
  spec.model.upper = Vec(2);
  spec.model.upper << data.u1_max, data.u2_max;
  spec.initial = Configuration({data.start1, data.start2}, {data.radius, data.radius});
  spec.constraint = ConstraintKind::SumNormChain;
  spec.offset_override = Vec::Constant(1, data.chain_offset);
  return spec;
}

std::pair<double, double> hitting_times(double u1, double u2, const UsvData& raw_data) {
  if (!(u1 > 0.0 && u2 > 0.0))
    throw std::invalid_argument("hitting_times: magnitudes must be positive");
  if (u1 <= u2)
    throw std::domain_error("no contact: requires |u1| > |u2|");
  const UsvData data = canonical(raw_data);
  // Per-axis gap: g0 + t*(slope2 - slope1); chain contact at |gap| = -offset/2.
  const double g0 = (data.start2 - data.start1).x();
  const double contact_gap = -data.chain_offset / 2.0;
  if (!(g0 > contact_gap))
    throw std::domain_error("hitting_times: objects start at or inside contact");
  const double closing = axis_slope(data.speed1, u1) - axis_slope(data.speed2, u2);
  return {(g0 - contact_gap) / closing, (g0 + contact_gap) / closing};
}

double boundary_multiplier(double u1, double u2) {
  if (u1 < u2) throw std::domain_error("boundary_multiplier: requires u1 >= u2");
  return kSqrt2 * (u1 - u2) / 4.0;
}

double optimal_horizon(double u1, double u2, const UsvData& raw_data) {
  if (!(u1 + u2 > 0.0)) throw std::invalid_argument("optimal_horizon: u1 + u2 must be positive");
  const UsvData data = canonical(raw_data);
  // Terminal positions cancel per axis: (start1 + start2) + T*(a1 + a2) = 0.
  const double s0 = -(data.start1.x() + data.start2.x());
  return s0 / (axis_slope(data.speed1, u1) + axis_slope(data.speed2, u2));
}

Vec position_at(const UsvCandidate& cand, double t, const UsvData& raw_data) {
  bool mirrored = false;
  const UsvData data = canonical(raw_data, &mirrored);
  const double a1 = axis_slope(data.speed1, cand.u1);
  const double a2 = axis_slope(data.speed2, cand.u2);
  Vec x(4);
  if (t < cand.t_m) {
    x << data.start1.x() + a1 * t, data.start1.y() + a1 * t,
         data.start2.x() + a2 * t, data.start2.y() + a2 * t;
  } else {
    const double dt = t - cand.t_m;
    x << data.start1.x() + a1 * t - cand.eta_m * dt,
         data.start1.y() + a1 * t - cand.eta_m * dt,
         data.start2.x() + a2 * t + cand.eta_m * dt,
         data.start2.y() + a2 * t + cand.eta_m * dt;
  }
  return mirrored ? Vec(-x) : x;
}

double axis_gap_at(const UsvCandidate& cand, double t, const UsvData& data) {
  const Vec x = position_at(cand, t, data);
  return x(2) - x(0);
}

UsvCandidate evaluate(double u1, double u2, int root_index, const UsvData& data) {
  if (root_index != 0 && root_index != 1)
    throw std::invalid_argument("evaluate: root_index must be 0 or 1");
  UsvCandidate c;
  c.u1 = u1;
  c.u2 = u2;
  c.root_index = root_index;
  const auto roots = hitting_times(u1, u2, data);
  c.t_m = (root_index == 0) ? roots.first : roots.second;
  c.eta_m = boundary_multiplier(u1, u2);
  c.T_bar = optimal_horizon(u1, u2, data);
  if (c.t_m > c.T_bar * (1.0 + 1e-12))
    throw std::domain_error("contact after horizon");
  // The far root crosses the chain constraint between the two roots.
  c.sweeping_feasible = (root_index == 0);
  c.boundary_control = (u1 >= data.u1_max * (1.0 - 1e-9)) || (u2 >= data.u2_max * (1.0 - 1e-9));
  c.terminal = position_at(c, c.T_bar, data);
  c.cost = cost_value(CostKind::QuadraticStateTime, c.terminal, c.T_bar);
  return c;
}

double cost(double u1, double u2, int root_index, const UsvData& data) {
  return evaluate(u1, u2, root_index, data).cost;
}

UsvCandidate optimize(const UsvData& data) {
  auto objective = [&](const Vec& u) {
    if (!(u(0) > u(1))) return std::numeric_limits<double>::infinity();
    double best = std::numeric_limits<double>::infinity();
    for (int root : {0, 1}) {
      try {
        const UsvCandidate c = evaluate(u(0), u(1), root, data);
        if (!c.sweeping_feasible) continue;
        best = std::min(best, c.cost);
      } catch (const std::exception&) {
        // zero magnitude, no contact, or root beyond horizon
      }
    }
    return best;
  };

  opt::BoxDomain dom;
  dom.lower = Vec::Zero(2);
  dom.upper = Vec(2);
  dom.upper << data.u1_max, data.u2_max;

  const opt::SearchResult coarse = opt::grid_search(objective, dom, 101);
  opt::NelderMeadOptions nm;
  nm.tol_x = 1e-10;
  const opt::NelderMeadResult polished = opt::nelder_mead(objective, coarse.point, dom, nm);

  const Vec u = (polished.value <= coarse.value) ? polished.point : coarse.point;
  UsvCandidate best;
  bool found = false;
  for (int root : {0, 1}) {
    try {
      const UsvCandidate c = evaluate(u(0), u(1), root, data);
      const bool better = !found || (c.sweeping_feasible && !best.sweeping_feasible) ||
                          (c.sweeping_feasible == best.sweeping_feasible && c.cost < best.cost);
      if (better) { best = c; found = true; }
    } catch (const std::exception&) {
    }
  }
  if (!found) throw std::runtime_error("usv::optimize: no feasible candidate");
  return best;
}

Trajectory synthesize_trajectory(const UsvCandidate& cand, Eigen::Index k, const UsvData& data) {
  const Grid grid(cand.T_bar, k);
  std::vector<Vec> states;
  states.reserve(static_cast<size_t>(k + 1));
  for (Eigen::Index i = 0; i <= k; ++i) states.push_back(position_at(cand, grid.node(i), data));
  return Trajectory(grid, std::move(states));
}

}  // namespace moreau::usv
