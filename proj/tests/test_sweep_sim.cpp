#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "moreau/sweep_sim.hpp"
#include "moreau/usv.hpp"
#include "support/random_instances.hpp"

#include <random>

using namespace moreau;

namespace {

ScenarioSpec euclidean_scenario(const Configuration& c, const Vec& speeds, const Vec& angles) {
  ScenarioSpec spec;
  spec.model.speeds = speeds;
  spec.model.angles = angles;
  spec.model.lower = Vec::Zero(speeds.size());
  spec.model.upper = Vec::Constant(speeds.size(), 10.0);
  spec.initial = c;
  spec.constraint = ConstraintKind::EuclideanPairs;
  return spec;
}

}  // namespace

TEST_CASE("trajectory invariants") {
  Grid g(1.0, 4);
  std::vector<Vec> states;
  for (int i = 0; i <= 4; ++i) states.push_back(Vec::Constant(2, static_cast<double>(i)));
  Trajectory traj(g, states);
  // states[i+1] = states[i] + h*velocities[i] holds exactly
  for (int i = 0; i < 4; ++i) {
    const Vec lhs = traj.states()[static_cast<size_t>(i + 1)];
    const Vec rhs = traj.states()[static_cast<size_t>(i)] + g.h() * traj.velocities()[static_cast<size_t>(i)];
    CHECK((lhs - rhs).norm() == 0.0);
  }
  CHECK((traj.state_at(0.375) - Vec::Constant(2, 1.5)).norm() < 1e-14);
  CHECK_THROWS_AS(Trajectory(g, {Vec::Zero(2)}), std::invalid_argument);
  CHECK_THROWS_AS(Grid(0.0, 4), std::invalid_argument);
  CHECK_THROWS_AS(Grid(1.0, 0), std::invalid_argument);
}

TEST_CASE("step without near contacts keeps the desired velocity") {
  std::mt19937 rng(23);
  const Configuration c = testgen::random_configuration(rng, 2, 2.0);
  auto spec = euclidean_scenario(c, Vec::Ones(2), Vec::Zero(2));
  StepOptions opts;
  opts.h = 1e-3;
  const Vec u = (Vec(2) << 1.0, 1.0).finished();
  const StepResult r = step(spec, c, u, opts);
  CHECK((r.velocity - controlled_velocity(spec.model, u)).norm() < 1e-12);
  CHECK(r.active.empty());
  CHECK(r.eta.norm() == 0.0);
}

TEST_CASE("contact step has zero approach rate") {
  const Configuration c({{0.0, 0.0}, {2.0, 0.0}}, {1.0, 1.0});
  ScenarioSpec spec = euclidean_scenario(c, Vec::Ones(2), Vec::Zero(2));
  // both head along +x; the rear disk pushes the front one
  spec.model.angles = Vec::Zero(2);
  StepOptions opts;
  opts.h = 1e-3;
  const StepResult r = step(spec, c, (Vec(2) << 2.0, 0.5).finished(), opts);
  const Vec grad = disk_distance_gradient(c, 0, 1);
  CHECK(grad.dot(r.velocity) >= -1e-9);
  CHECK(r.eta(0) > 0.0);
  CHECK(r.representation_residual < 1e-10);
}

TEST_CASE("zero control is stationary") {
  std::mt19937 rng(29);
  const Configuration c = testgen::random_configuration(rng, 3);
  const auto spec = euclidean_scenario(c, Vec::Ones(3), Vec::Zero(3));
  const auto sim = simulate(spec, ControlSignal::constant(Vec::Zero(3)), Grid(1.0, 16));
  for (const auto& x : sim.trajectory.states())
    CHECK((x - c.stacked()).norm() == 0.0);
  CHECK_FALSE(sim.first_contact.has_value());
}

TEST_CASE("usv simulation hits the chain boundary near the closed-form time") {
  const auto spec = usv::scenario();
  const auto cand = usv::evaluate(100.0, 60.0, 0);
  const Grid grid(cand.T_bar, 4096);
  const auto sim = simulate(spec, ControlSignal::constant((Vec(2) << 100.0, 60.0).finished()), grid);
  REQUIRE(sim.first_contact.has_value());
  CHECK(std::abs(*sim.first_contact - cand.t_m) <= 2.0 * grid.h());

  SUBCASE("post-contact sliding matches the closed-form slope") {
    const Vec v_last = sim.trajectory.velocities().back();
    for (int c = 0; c < 4; ++c) CHECK(v_last(c) == doctest::Approx(56.5685).epsilon(1e-2));
  }
  SUBCASE("post-contact multiplier equals the boundary multiplier") {
    CHECK(sim.multipliers.back()(0) == doctest::Approx(cand.eta_m).epsilon(1e-9));
  }
  SUBCASE("simulated nodes match the analytic synthesis") {
    const Trajectory synth = usv::synthesize_trajectory(cand, 4096);
    double sup = 0.0;
    for (size_t i = 0; i < synth.states().size(); ++i)
      sup = std::max(sup, (synth.states()[i] - sim.trajectory.states()[i]).lpNorm<Eigen::Infinity>());
    CHECK(sup <= 5e-2);
  }
}

TEST_CASE("velocity and state projections define the same step") {
  std::mt19937 rng(31);
  for (int t = 0; t < 200; ++t) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng() % 2);
    const Configuration c = testgen::random_configuration(rng, n);
    const auto spec = euclidean_scenario(c, Vec::Ones(n), Vec::Zero(n));
    const double h = 3e-4;
    const Vec g = testgen::random_vector(rng, 2 * n, 2.0);
    const Vec via_velocity = c.stacked() + h * project(velocity_feasible_set(spec, c, h), g);
    const Vec via_state = project(linearized_feasible_set(c), c.stacked() + h * g);
    CHECK((via_velocity - via_state).lpNorm<Eigen::Infinity>() < 1e-9);
  }
}

TEST_CASE("linearized steps never overshoot the true gaps") {
  // The pairwise gap is convex in the stacked configuration, so its
  // first-order model underestimates it: a step satisfying the
  // linearized constraint keeps the true gap nonnegative, not just
  // within O(h^2).
  std::mt19937 rng(37);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi);
  for (double h : {1e-2, 5e-3, 2.5e-3}) {
    for (int t = 0; t < 100; ++t) {
      const Configuration c = testgen::random_configuration(rng, 2, 0.0);
      Vec angles(2);
      angles << ang(rng), ang(rng);
      const auto spec = euclidean_scenario(c, Vec::Ones(2), angles);
      StepOptions opts;
      opts.h = h;
      const StepResult r = step(spec, c, (Vec(2) << 2.0, 2.0).finished(), opts);
      CHECK(disk_distance(r.next, 0, 1) >= -1e-10);
    }
  }
}

TEST_CASE("randomized feasibility sweep") {
  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> h_dist(1e-5, 3e-4);
  std::uniform_real_distribution<double> mag(0.0, 2.0);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi);
  std::uniform_int_distribution<int> k_dist(4, 32);

  for (int run = 0; run < 500; ++run) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng() % 2);
    const Configuration c0 = testgen::random_configuration(rng, n);
    Vec angles(n), u(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      angles(i) = ang(rng);
      u(i) = mag(rng);
    }
    const auto spec = euclidean_scenario(c0, Vec::Ones(n), angles);
    const int k = k_dist(rng);
    const double h = h_dist(rng);
    const auto sim = simulate(spec, ControlSignal::constant(u), Grid(h * k, k));

    double scale = 1.0;
    for (const auto& p : c0.positions) scale = std::max(scale, p.lpNorm<Eigen::Infinity>());
    for (const auto& x : sim.trajectory.states()) {
      const Configuration c = Configuration::from_stacked(x, c0.radii);
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j)
          CHECK(disk_distance(c, i, j) >= -1e-6 * scale);
    }
    // reconstructed multipliers: nonnegative with discrete complementarity
    for (size_t s = 0; s < sim.multipliers.size(); ++s) {
      const Configuration c =
          Configuration::from_stacked(sim.trajectory.states()[s + 1], c0.radii);
      Eigen::Index r = 0;
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j, ++r) {
          CHECK(sim.multipliers[s](r) >= -1e-10);
          CHECK(sim.multipliers[s](r) * std::max(0.0, disk_distance(c, i, j)) <= 1e-8);
        }
    }
  }
}

TEST_CASE("refinement study") {
  SUBCASE("no contact means identical refinements") {
    const Configuration c({{-4.0, 0.0}, {4.0, 0.0}}, {0.5, 0.5});
    auto spec = euclidean_scenario(c, Vec::Ones(2), Vec::Zero(2));
    const auto rows = refine_and_compare(spec, ControlSignal::constant((Vec(2) << 1.0, 1.0).finished()),
                                         1.0, {8, 16, 32});
    for (const auto& r : rows) CHECK(r.distance < 1e-12);
  }
  SUBCASE("usv distances decay overall") {
    const auto spec = usv::scenario();
    const auto cand = usv::evaluate(100.0, 60.0, 0);
    const auto rows = refine_and_compare(
        spec, ControlSignal::constant((Vec(2) << 100.0, 60.0).finished()), cand.T_bar,
        {64, 256, 1024, 4096});
    CHECK(rows.back().distance < 0.2 * rows.front().distance);
    for (const auto& r : rows) CHECK(r.distance >= 0.0);
  }
  SUBCASE("monotone k list is required") {
    const auto spec = usv::scenario();
    CHECK_THROWS_AS(refine_and_compare(spec,
                                       ControlSignal::constant((Vec(2) << 100.0, 60.0).finished()),
                                       0.35, {64, 64}),
                    std::invalid_argument);
  }
}

TEST_CASE("per-interval control signals") {
  const Configuration c({{-4.0, 0.0}, {4.0, 0.0}}, {0.5, 0.5});
  const auto spec = euclidean_scenario(c, Vec::Ones(2), Vec::Zero(2));
  std::vector<Vec> samples{(Vec(2) << 1.0, 0.0).finished(), (Vec(2) << 0.0, 2.0).finished()};
  const auto u = ControlSignal::per_interval(samples);
  CHECK_FALSE(u.is_constant());
  const auto sim = simulate(spec, u, Grid(0.2, 2));
  CHECK(sim.trajectory.velocities()[0](0) == doctest::Approx(1.0));
  CHECK(sim.trajectory.velocities()[0](2) == doctest::Approx(0.0));
  CHECK(sim.trajectory.velocities()[1](0) == doctest::Approx(0.0));
  CHECK(sim.trajectory.velocities()[1](2) == doctest::Approx(2.0));
  CHECK_THROWS_AS(u.sample(5), std::out_of_range);
  CHECK_THROWS_AS(ControlSignal::per_interval({}), std::invalid_argument);
}

TEST_CASE("w12 distance merges non-nested grids") {
  // constant-velocity lines sampled on a 3-grid and a 5-grid
  Grid g3(1.0, 3), g5(1.0, 5);
  std::vector<Vec> s3, s5;
  for (int i = 0; i <= 3; ++i) s3.push_back(Vec::Constant(1, static_cast<double>(i) / 3.0));
  for (int i = 0; i <= 5; ++i) s5.push_back(Vec::Constant(1, static_cast<double>(i) / 5.0));
  CHECK(w12_distance(Trajectory(g3, s3), Trajectory(g5, s5)) < 1e-12);

  std::vector<Vec> offset = s5;
  for (auto& x : offset) x.array() += 2.0;  // same slope, shifted start
  CHECK(w12_distance(Trajectory(g3, s3), Trajectory(g5, offset)) == doctest::Approx(2.0));
}
