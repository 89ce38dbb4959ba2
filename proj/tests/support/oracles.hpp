// Test-only oracles, deliberately independent of the library's
// implementation paths.
#pragma once

#include "moreau/planar_model.hpp"
#include "moreau/polytope.hpp"

#include <Eigen/Dense>
#include <limits>
#include <optional>
#include <vector>

namespace oracles {

using moreau::Mat;
using moreau::Vec;

// Brute-force Euclidean projection: enumerate every subset of
// halfspaces, solve the equality-constrained least squares through the
// full KKT block system, keep the feasible candidate with nonnegative
// multipliers closest to y. Returns nullopt when the polyhedron is
// empty.
inline std::optional<Vec> project_bruteforce(const moreau::Polyhedron& P, const Vec& y) {
  const Eigen::Index s = P.num_halfspaces();
  const Eigen::Index m = P.dim();
  double best_dist = std::numeric_limits<double>::infinity();
  std::optional<Vec> best;

  for (unsigned mask = 0; mask < (1u << s); ++mask) {
    std::vector<Eigen::Index> subset;
    for (Eigen::Index j = 0; j < s; ++j)
      if (mask & (1u << j)) subset.push_back(j);
    const auto a = static_cast<Eigen::Index>(subset.size());
    if (a > m) continue;

    // KKT block system for min |x-y|^2 s.t. A x = c:
    //   [ I  A^T ] [x ]   [y]
    //   [ A   0  ] [nu] = [c]
    Mat K = Mat::Zero(m + a, m + a);
    K.topLeftCorner(m, m).setIdentity();
    Vec rhs(m + a);
    rhs.head(m) = y;
    for (Eigen::Index r = 0; r < a; ++r) {
      const auto& h = P.halfspaces()[static_cast<size_t>(subset[static_cast<size_t>(r)])];
      K.block(m + r, 0, 1, m) = h.normal.transpose();
      K.block(0, m + r, m, 1) = h.normal;
      rhs(m + r) = h.offset;
    }
    Eigen::FullPivLU<Mat> lu(K);
    if (!lu.isInvertible()) continue;
    const Vec sol = lu.solve(rhs);
    const Vec x = sol.head(m);
    // stationarity row reads x + A^T nu = y, so y - x = A^T nu and the
    // multipliers are nu themselves
    const Vec nu = sol.tail(a);

    bool ok = true;
    for (Eigen::Index r = 0; r < a; ++r)
      if (nu(r) < -1e-9) ok = false;
    for (Eigen::Index j = 0; j < s && ok; ++j)
      if (P.slack(j, x) < -1e-9 * std::max(1.0, y.lpNorm<Eigen::Infinity>())) ok = false;
    if (!ok) continue;

    const double d = (x - y).norm();
    if (d < best_dist) {
      best_dist = d;
      best = x;
    }
  }
  return best;
}

// Central finite differences of the disk gap with respect to the
// stacked configuration.
inline Vec disk_distance_fd_gradient(const moreau::Configuration& c, Eigen::Index i,
                                     Eigen::Index j, double step = 1e-6) {
  const Vec x0 = c.stacked();
  Vec g(x0.size());
  for (Eigen::Index d = 0; d < x0.size(); ++d) {
    Vec xp = x0, xm = x0;
    xp(d) += step;
    xm(d) -= step;
    const auto cp = moreau::Configuration::from_stacked(xp, c.radii);
    const auto cm = moreau::Configuration::from_stacked(xm, c.radii);
    g(d) = (moreau::disk_distance(cp, i, j) - moreau::disk_distance(cm, i, j)) / (2.0 * step);
  }
  return g;
}

}  // namespace oracles
