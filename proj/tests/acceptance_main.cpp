// Acceptance suite: one line per criterion, exit code = number of
// failed criteria.

#include "moreau/certify.hpp"
#include "moreau/nano.hpp"
#include "moreau/optimize.hpp"
#include "moreau/regression.hpp"
#include "moreau/sweep_sim.hpp"
#include "moreau/usv.hpp"
#include "support/oracles.hpp"
#include "support/random_instances.hpp"

#include <chrono>
#include <cstdarg>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

using namespace moreau;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion, detail.c_str());
  if (!pass) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof(buf), f, args);
  va_end(args);
  return buf;
}

// 1. Optimum of the two-vessel study.
void criterion_1() {
  const auto t0 = std::chrono::steady_clock::now();
  const usv::UsvCandidate best = usv::optimize();
  const double elapsed = seconds_since(t0);

  bool ok = true;
  std::string detail;
  ok &= std::abs(best.cost - 6.1875) <= 1e-3;
  ok &= std::abs(best.T_bar - 0.35355) <= 1e-4;
  ok &= std::abs(best.t_m - 0.2298) <= 1e-3;
  const Vec terminal_ref = (Vec(4) << -1.75, -1.75, 1.75, 1.75).finished();
  ok &= (best.terminal - terminal_ref).lpNorm<Eigen::Infinity>() <= 1e-2;
  const Vec g = controlled_velocity(usv::scenario().model, (Vec(2) << best.u1, best.u2).finished());
  const Vec control_ref = (Vec(4) << 70.7106, 70.7106, 42.4263, 42.4263).finished();
  ok &= (g - control_ref).lpNorm<Eigen::Infinity>() <= 1e-3;
  ok &= elapsed < 5.0;
  report(1, ok,
         fmt("usv optimum: J=%.6f T=%.6f t_m=%.5f control=(%.4f,%.4f,%.4f,%.4f) [%.2fs]",
             best.cost, best.T_bar, best.t_m, g(0), g(1), g(2), g(3), elapsed));
}

// 2. Force-table reproduction.
void criterion_2() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto f = nano::compute_forces(nano::NanoEnvironment::make(), nano::initial_configuration());
  const double elapsed = seconds_since(t0);

  struct Entry { const char* name; double got; double expected; double ulp; };
  const Entry entries[] = {
      {"dw11", f.particle[0].dw1, 145.0, 1e-9},
      {"dw21", f.particle[0].dw2, 845.0, 1e-9},
      {"h6w1(1)", f.particle[0].h6_w1, 0.3267374, 1e-7},
      {"h6w2(1)", f.particle[0].h6_w2, 0.3215246, 1e-7},
      {"h1w1(1)", f.particle[0].h1_w1, -0.0000971, 1e-7},
      {"h1w2(1)", f.particle[0].h1_w2, -0.0000030, 1e-7},
      {"h5(1)", f.particle[0].h5, -0.3256629, 1e-7},
      {"F12", f.particle[0].f_pair, 4.139e-28, 1e-31},
      {"D12", f.particle[0].pair_distance, 197.1320344, 1e-7},
      {"v11", f.particle[0].vx, 1.036e13, 1e10},
      {"v12", f.particle[0].vz, 3.154e14, 1e11},
      {"s1", f.particle[0].speed, 3.156e14, 1e11},
      {"dw12", f.particle[1].dw1, 290.0, 1e-9},
      {"dw22", f.particle[1].dw2, 690.0, 1e-9},
      {"h6w1(2)", f.particle[1].h6_w1, 0.6534748, 1e-7},
      {"h6w2(2)", f.particle[1].h6_w2, 0.6461981, 1e-7},
      {"h1w1(2)", f.particle[1].h1_w1, -0.0001942, 1e-7},
      {"h1w2(2)", f.particle[1].h1_w2, -0.0000352, 1e-7},
      {"h5(2)", f.particle[1].h5, -0.6787248, 1e-7},
      {"F2w", f.particle[1].f_wall, 6.849e-28, 1e-31},
      {"F21", f.particle[1].f_pair, 3.311e-27, 1e-30},
      {"v21", f.particle[1].vx, 9.064e12, 1e9},
      {"v22", f.particle[1].vz, 3.027e14, 1e11},
      {"s2", f.particle[1].speed, 3.0284e14, 1e10},
      // The table's F_1w (1.325e-27) contradicts the same table's printed
      // gaps: the formula with dw=(145,845) gives 1.4126e-27, and the
      // printed number equals the formula at dw=(145,290). The force model
      // is held to the recomputed value; the slip is re-derived below.
      {"F1w(recomputed)", f.particle[0].f_wall, 1.4126e-27, 1e-31},
  };
  bool ok = true;
  std::string worst = "all values within 1e-3 relative";
  for (const auto& e : entries) {
    const double allowed = 1e-3 * std::abs(e.expected) + 0.5 * e.ulp;
    if (std::abs(e.got - e.expected) > allowed) {
      ok = false;
      worst = fmt("%s: got %.7g want %.7g", e.name, e.got, e.expected);
    }
  }
  const double ar3 = 5e-21 * 125.0;
  const double slip = std::abs(ar3 / std::pow(145.0, 4) - ar3 / std::pow(290.0, 4));
  ok &= std::abs(slip - 1.325e-27) <= 1e-3 * 1.325e-27 + 0.5e-30;
  ok &= elapsed < 0.1;
  report(2, ok, fmt("force table: %s; printed F1w matches the dw=(145,290) slip [%.4fs]",
                    worst.c_str(), elapsed));
}

// 3. Microtube closed-form products, ratios and case ordering.
void criterion_3() {
  const auto f = nano::compute_forces(nano::NanoEnvironment::make(), nano::initial_configuration());
  const auto products = nano::contact_products(f.s1(), f.s2());
  const double horizon = nano::horizon_product(f.s1(), f.s2());

  bool ok = true;
  ok &= std::abs(products.first - 6.1372e-13) <= 1e-3 * 6.1372e-13;
  ok &= std::abs(products.second - 6.7832e-13) <= 1e-3 * 6.7832e-13;
  ok &= std::abs(horizon - 8.3275e-13) <= 1e-3 * 8.3275e-13;
  ok &= std::abs(horizon / products.first - 1.3569) <= 1e-3;
  ok &= std::abs(horizon / products.second - 1.2277) <= 1e-3;

  // Recomputed costs with the infeasible far-root case at +inf; the
  // printed per-case scalars are not reproducible from their own data.
  const auto c1 = nano::evaluate_case(1, 1.1903);
  const auto c2 = nano::evaluate_case(2, 1.1903);
  const double j1 = c1.sweeping_feasible ? c1.cost : std::numeric_limits<double>::infinity();
  const double j2 = c2.sweeping_feasible ? c2.cost : std::numeric_limits<double>::infinity();
  ok &= j1 < j2;

  report(3, ok,
         fmt("products t*|u2|={%.5g, %.5g} T|u2|=%.5g ratios=(%.4f, %.4f); "
             "recomputed J: case1=%.4f case2=%s",
             products.first, products.second, horizon, horizon / products.first,
             horizon / products.second, j1,
             std::isfinite(j2) ? fmt("%.4f", j2).c_str() : "inf (crosses constraint)"));
}

// 4. Projection against the subset-enumeration oracle.
void criterion_4() {
  std::mt19937 rng(271828);
  int agreed = 0;
  double worst = 0.0;
  bool kkt_ok = true;
  for (int t = 0; t < 1000; ++t) {
    const Eigen::Index dim = 2 + static_cast<Eigen::Index>(rng() % 5);  // 2..6
    const auto P = testgen::random_feasible_polyhedron(rng, dim, 5);
    const Vec y = testgen::random_vector(rng, dim);
    const auto oracle = oracles::project_bruteforce(P, y);
    if (!oracle) continue;
    const Projection got = project_with_certificate(P, y);
    worst = std::max(worst, (got.point - *oracle).norm());
    kkt_ok &= got.lambda.minCoeff() >= -1e-10;
    if ((got.point - *oracle).norm() <= 1e-8) ++agreed;
  }
  const bool ok = agreed == 1000 && kkt_ok;
  report(4, ok, fmt("projection oracle: %d/1000 agree, worst gap %.2e, multipliers >= -1e-10: %s",
                    agreed, worst, kkt_ok ? "yes" : "NO"));
}

// 5. Randomized feasibility sweep and step-formulation equivalence.
void criterion_5() {
  std::mt19937 rng(314159);
  std::uniform_real_distribution<double> h_dist(1e-5, 3e-4);
  std::uniform_real_distribution<double> mag(0.0, 2.0);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi);
  std::uniform_int_distribution<int> k_dist(4, 24);

  double worst_gap = 0.0;
  bool feasible = true;
  for (int run = 0; run < 10000 && feasible; ++run) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng() % 2);
    const Configuration c0 = testgen::random_configuration(rng, n);
    ScenarioSpec spec;
    spec.model.speeds = Vec::Ones(n);
    spec.model.angles = Vec(n);
    spec.model.lower = Vec::Zero(n);
    spec.model.upper = Vec::Constant(n, 10.0);
    Vec u(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      spec.model.angles(i) = ang(rng);
      u(i) = mag(rng);
    }
    spec.initial = c0;
    spec.constraint = ConstraintKind::EuclideanPairs;

    const int k = k_dist(rng);
    const double h = h_dist(rng);
    double scale = 1.0;
    for (const auto& p : c0.positions) scale = std::max(scale, p.lpNorm<Eigen::Infinity>());
    try {
      const auto sim = simulate(spec, ControlSignal::constant(u), Grid(h * k, k));
      for (const auto& x : sim.trajectory.states()) {
        const Configuration c = Configuration::from_stacked(x, c0.radii);
        for (Eigen::Index i = 0; i < n; ++i)
          for (Eigen::Index j = i + 1; j < n; ++j) {
            const double d = disk_distance(c, i, j);
            worst_gap = std::min(worst_gap, d / scale);
            if (d < -1e-6 * scale) feasible = false;
          }
      }
    } catch (const std::exception&) {
      feasible = false;
    }
  }

  double worst_eq = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng() % 2);
    const Configuration c = testgen::random_configuration(rng, n);
    ScenarioSpec spec;
    spec.model.speeds = Vec::Ones(n);
    spec.model.angles = Vec::Zero(n);
    spec.model.lower = Vec::Zero(n);
    spec.model.upper = Vec::Constant(n, 10.0);
    spec.initial = c;
    spec.constraint = ConstraintKind::EuclideanPairs;
    const double h = 3e-4;
    const Vec g = testgen::random_vector(rng, 2 * n, 2.0);
    const Vec via_velocity = c.stacked() + h * project(velocity_feasible_set(spec, c, h), g);
    const Vec via_state = project(linearized_feasible_set(c), c.stacked() + h * g);
    worst_eq = std::max(worst_eq, (via_velocity - via_state).lpNorm<Eigen::Infinity>());
  }

  const bool ok = feasible && worst_eq <= 1e-9;
  report(5, ok, fmt("feasibility sweep: 10^4 runs, min gap %.2e of scale; "
                    "step formulations agree to %.2e",
                    worst_gap, worst_eq));
}

// 6. Discrete-approximation study for the optimal control.
void criterion_6() {
  const auto spec = usv::scenario();
  const auto cand = usv::evaluate(100.0, 60.0, 0);
  const ControlSignal u = ControlSignal::constant((Vec(2) << 100.0, 60.0).finished());

  const std::vector<Eigen::Index> ks{64, 128, 256, 512, 1024, 2048, 4096};
  const auto rows = refine_and_compare(spec, u, cand.T_bar, ks);
  bool monotone = true;
  for (size_t i = 0; i + 1 < rows.size(); ++i)
    if (rows[i + 1].distance > rows[i].distance * (1.0 + 1e-12)) monotone = false;
  const double final_distance = rows.back().distance;
  const bool below = final_distance < 1e-3;

  const Trajectory synth = usv::synthesize_trajectory(cand, 4096);
  const auto sim = simulate(spec, u, Grid(cand.T_bar, 4096));
  double sup = 0.0;
  for (size_t i = 0; i < synth.states().size(); ++i)
    sup = std::max(sup, (synth.states()[i] - sim.trajectory.states()[i]).lpNorm<Eigen::Infinity>());
  const bool sup_ok = sup <= 5e-2;

  std::string table = "d(k,2k) =";
  for (const auto& r : rows) table += fmt(" %.3g", r.distance);
  report(6, monotone && below && sup_ok,
         fmt("refinement: %s; final %.3g (<1e-3: %s, monotone: %s); sup|sim-synth|=%.2e (<=5e-2)",
             table.c_str(), final_distance, below ? "yes" : "NO", monotone ? "yes" : "NO", sup));
  if (!(monotone && below)) {
    // The W^{1,2} velocity distance concentrates on the single interval
    // straddling the contact kink: it scales like sqrt(h) with a factor
    // set by the kink's position inside the grid cell (period-2 in dyadic
    // refinement for this dataset), so the consecutive-pair sequence
    // oscillates and cannot reach 1e-3 by k=4096. The state distance
    // contracts at every refinement; it is printed for diagnosis.
    std::string diag = "  note: state-space L2 distances:";
    for (Eigen::Index k : ks) {
      const auto a = simulate(spec, u, Grid(cand.T_bar, k)).trajectory;
      const auto b = simulate(spec, u, Grid(cand.T_bar, 2 * k)).trajectory;
      double acc = 0.0;
      const Eigen::Index fine = 4 * k;
      for (Eigen::Index i = 0; i < fine; ++i) {
        const double t = cand.T_bar * (static_cast<double>(i) + 0.5) / static_cast<double>(fine);
        acc += (a.state_at(t) - b.state_at(t)).squaredNorm() * (cand.T_bar / static_cast<double>(fine));
      }
      diag += fmt(" %.3g", std::sqrt(acc));
    }
    std::printf("%s\n", diag.c_str());
  }
}

// 7. Certificate: zero residuals at the optimum, discrimination under
// one-percent control perturbations at the optimal horizon.
void criterion_7() {
  const auto spec = usv::scenario();
  const auto cand = usv::optimize();
  const Grid grid(cand.T_bar, 4096);

  const auto sim = simulate(spec, ControlSignal::constant((Vec(2) << cand.u1, cand.u2).finished()), grid);
  const Certificate cert =
      certify(spec, sim.trajectory, ControlSignal::constant((Vec(2) << cand.u1, cand.u2).finished()));
  const bool optimum_ok = cert.max_residual() <= 1e-6;

  std::mt19937 rng(161803);
  std::uniform_real_distribution<double> shrink(0.90, 0.99);
  bool discriminated = true;
  double weakest = std::numeric_limits<double>::infinity();
  for (int t = 0; t < 20; ++t) {
    double u1 = cand.u1, u2 = cand.u2;
    switch (t % 3) {
      case 0: u1 *= shrink(rng); break;
      case 1: u2 *= shrink(rng); break;
      default: u1 *= shrink(rng); u2 *= shrink(rng); break;
    }
    const auto psim = simulate(spec, ControlSignal::constant((Vec(2) << u1, u2).finished()), grid);
    const Certificate pcert =
        certify(spec, psim.trajectory, ControlSignal::constant((Vec(2) << u1, u2).finished()));
    weakest = std::min(weakest, pcert.max_residual());
    if (pcert.max_residual() <= 1e-3) discriminated = false;
  }

  report(7, optimum_ok && discriminated,
         fmt("certificate: optimum max residual %.2e (<=1e-6); weakest perturbed residual %.2e (>1e-3)",
             cert.max_residual(), weakest));
}

// 8. Gradient of the disk gap against central differences.
void criterion_8() {
  std::mt19937 rng(141421);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng() % 2);
    const Configuration c = testgen::random_configuration(rng, n, 0.5);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const Vec g = disk_distance_gradient(c, i, j);
        const Vec fd = oracles::disk_distance_fd_gradient(c, i, j, 1e-6);
        worst = std::max(worst, (g - fd).norm() / g.norm());
      }
  }
  report(8, worst <= 1e-6, fmt("gradient vs central differences: worst relative error %.2e", worst));
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  std::printf("%d of 8 criteria failed\n", g_failures);
  return g_failures;
}
