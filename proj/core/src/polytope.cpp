#include "moreau/polytope.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>

namespace moreau {

namespace {

void require_dim(const Polyhedron& P, const Vec& x) {
  if (x.size() != P.dim())
    throw std::invalid_argument("polytope: dimension mismatch");
}

Mat stack_rows(const Polyhedron& P, const std::vector<Eigen::Index>& idx) {
  Mat A(static_cast<Eigen::Index>(idx.size()), P.dim());
  for (Eigen::Index r = 0; r < A.rows(); ++r)
    A.row(r) = P.halfspaces()[static_cast<size_t>(idx[static_cast<size_t>(r)])].normal.transpose();
  return A;
}

double offset_scale(const Polyhedron& P) {
  double s = 1.0;
  for (const auto& h : P.halfspaces()) s = std::max(s, std::abs(h.offset));
  return s;
}

}  // namespace

Halfspace Halfspace::normalized(const Vec& n, double c) {
  const double norm = n.norm();
  if (!(norm > 0.0))
    throw std::invalid_argument("Halfspace::normalized: zero normal");
  return Halfspace(n / norm, c / norm);
}

Polyhedron::Polyhedron(std::vector<Halfspace> halfspaces, Eigen::Index dim)
    : halfspaces_(std::move(halfspaces)), dim_(dim) {
  if (dim_ <= 0) throw std::invalid_argument("Polyhedron: dim must be positive");
  for (auto& h : halfspaces_) {
    if (h.normal.size() != dim_)
      throw std::invalid_argument("Polyhedron: halfspace normal has wrong dimension");
    h = Halfspace::normalized(h.normal, h.offset);
  }
}

double Polyhedron::slack(Eigen::Index j, const Vec& x) const {
  const auto& h = halfspaces_[static_cast<size_t>(j)];
  return h.offset - h.normal.dot(x);
}

bool ActiveSet::contains(Eigen::Index j) const {
  return std::binary_search(indices.begin(), indices.end(), j);
}

bool contains(const Polyhedron& P, const Vec& x, double tol) {
  require_dim(P, x);
  if (tol < 0.0) throw std::invalid_argument("contains: negative tolerance");
  for (Eigen::Index j = 0; j < P.num_halfspaces(); ++j)
    if (P.slack(j, x) < -tol) return false;
  return true;
}

ActiveSet active_set(const Polyhedron& P, const Vec& x, double tol) {
  require_dim(P, x);
  ActiveSet a;
  a.tolerance = tol;
  for (Eigen::Index j = 0; j < P.num_halfspaces(); ++j)
    if (std::abs(P.slack(j, x)) <= tol) a.indices.push_back(j);
  return a;
}

namespace {

// Equality-constrained nearest point on the face where the subset S of
// halfspaces is tight. Returns false when the Gram system is too
// ill-conditioned to trust; another subset spanning the same face will
// then be tried by the caller.
bool face_candidate(const Polyhedron& P, const Vec& y,
                    const std::vector<Eigen::Index>& S, Vec& x, Vec& mu) {
  const Mat A = stack_rows(P, S);
  Vec c(A.rows());
  for (Eigen::Index r = 0; r < A.rows(); ++r)
    c(r) = P.halfspaces()[static_cast<size_t>(S[static_cast<size_t>(r)])].offset;

  const Mat G = A * A.transpose();
  Eigen::LDLT<Mat> ldlt(G);
  if (ldlt.info() != Eigen::Success) return false;
  mu = ldlt.solve(c - A * y);
  if (!mu.allFinite()) return false;
  // Reject rank-deficient subsets: the solve must actually hit the face.
  if (((A * (y + A.transpose() * mu)) - c).lpNorm<Eigen::Infinity>() >
      1e-9 * std::max(1.0, c.lpNorm<Eigen::Infinity>() + y.lpNorm<Eigen::Infinity>()))
    return false;
  x = y + A.transpose() * mu;
  return true;
}

Projection project_enumerate(const Polyhedron& P, const Vec& y) {
  const Eigen::Index s = P.num_halfspaces();
  const double feas_tol = kMembershipTol * std::max(1.0, y.lpNorm<Eigen::Infinity>() + offset_scale(P));

  Projection best;
  best.lambda = Vec::Zero(s);
  double best_dist = std::numeric_limits<double>::infinity();
  bool found = false;

  std::vector<Eigen::Index> subset;
  for (unsigned mask = 0; mask < (1u << s); ++mask) {
    subset.clear();
    for (Eigen::Index j = 0; j < s; ++j)
      if (mask & (1u << j)) subset.push_back(j);
    if (static_cast<Eigen::Index>(subset.size()) > P.dim()) continue;

    Vec x, mu;
    if (subset.empty()) {
      x = y;
      mu = Vec();
    } else if (!face_candidate(P, y, subset, x, mu)) {
      continue;
    }

    // KKT: y - x = sum lambda_j n_j with lambda = -mu >= 0.
    bool lambda_ok = true;
    for (Eigen::Index r = 0; r < mu.size(); ++r)
      if (-mu(r) < -1e-10) { lambda_ok = false; break; }
    if (!lambda_ok) continue;
    if (!contains(P, x, feas_tol)) continue;

    const double dist = (x - y).norm();
    if (dist < best_dist) {
      best_dist = dist;
      best.point = x;
      best.lambda = Vec::Zero(s);
      for (size_t r = 0; r < subset.size(); ++r)
        best.lambda(subset[r]) = std::max(0.0, -mu(static_cast<Eigen::Index>(r)));
      found = true;
    }
  }

  if (!found) throw std::runtime_error("empty set");
  best.active = active_set(P, best.point, feas_tol).indices;
  return best;
}

Projection project_dykstra(const Polyhedron& P, const Vec& y) {
  const Eigen::Index s = P.num_halfspaces();
  const double scale = std::max(1.0, y.norm());
  Vec x = y;
  Mat corrections = Mat::Zero(s, P.dim());
  constexpr int kMaxSweeps = 20000;

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double moved = 0.0;
    for (Eigen::Index j = 0; j < s; ++j) {
      const Vec z = x + corrections.row(j).transpose();
      const auto& h = P.halfspaces()[static_cast<size_t>(j)];
      const double viol = h.normal.dot(z) - h.offset;
      Vec xn = (viol > 0.0) ? Vec(z - viol * h.normal) : z;
      corrections.row(j) = (z - xn).transpose();
      moved = std::max(moved, (xn - x).lpNorm<Eigen::Infinity>());
      x = xn;
    }
    if (moved < 1e-14 * scale) break;
  }
  if (!contains(P, x, 1e-7 * scale))
    throw std::runtime_error("empty set");

  Projection result;
  result.point = x;
  result.active = active_set(P, x, 1e-8 * scale).indices;
  // Recover multipliers for y - x over the active normals.
  result.lambda = Vec::Zero(s);
  if (!result.active.empty()) {
    const Mat A = stack_rows(P, result.active).transpose();
    const NnlsResult fit = nnls(A, y - x);
    for (size_t r = 0; r < result.active.size(); ++r)
      result.lambda(result.active[r]) = fit.x(static_cast<Eigen::Index>(r));
  }
  return result;
}

}  // namespace

Projection project_with_certificate(const Polyhedron& P, const Vec& y) {
  require_dim(P, y);
  if (P.num_halfspaces() == 0) {
    Projection id;
    id.point = y;
    id.lambda = Vec();
    return id;
  }
  if (P.num_halfspaces() <= 6) return project_enumerate(P, y);
  return project_dykstra(P, y);
}

Vec project(const Polyhedron& P, const Vec& y) {
  return project_with_certificate(P, y).point;
}

NnlsResult nnls(const Mat& A, const Vec& b) {
  const Eigen::Index n = A.cols();
  Vec x = Vec::Zero(n);
  if (n == 0) return {x, b.norm()};

  std::vector<bool> passive(static_cast<size_t>(n), false);
  Vec w = A.transpose() * b;
  const double tol = 1e-12 * std::max(1.0, w.lpNorm<Eigen::Infinity>());
  constexpr int kMaxIter = 400;

  for (int iter = 0; iter < kMaxIter; ++iter) {
    // Most violated dual coordinate among the zero set.
    Eigen::Index t = -1;
    double wmax = tol;
    for (Eigen::Index j = 0; j < n; ++j)
      if (!passive[static_cast<size_t>(j)] && w(j) > wmax) { wmax = w(j); t = j; }
    if (t < 0) break;
    passive[static_cast<size_t>(t)] = true;

    for (int inner = 0; inner < kMaxIter; ++inner) {
      std::vector<Eigen::Index> Pidx;
      for (Eigen::Index j = 0; j < n; ++j)
        if (passive[static_cast<size_t>(j)]) Pidx.push_back(j);
      Mat Ap(A.rows(), static_cast<Eigen::Index>(Pidx.size()));
      for (size_t c = 0; c < Pidx.size(); ++c) Ap.col(static_cast<Eigen::Index>(c)) = A.col(Pidx[c]);
      const Vec z = Ap.colPivHouseholderQr().solve(b);

      double alpha = 1.0;
      for (size_t c = 0; c < Pidx.size(); ++c) {
        if (z(static_cast<Eigen::Index>(c)) <= 0.0) {
          const double xi = x(Pidx[c]);
          const double denom = xi - z(static_cast<Eigen::Index>(c));
          if (denom > 0.0) alpha = std::min(alpha, xi / denom);
        }
      }
      if (alpha >= 1.0) {
        x.setZero();
        for (size_t c = 0; c < Pidx.size(); ++c) x(Pidx[c]) = z(static_cast<Eigen::Index>(c));
        break;
      }
      for (size_t c = 0; c < Pidx.size(); ++c) {
        x(Pidx[c]) += alpha * (z(static_cast<Eigen::Index>(c)) - x(Pidx[c]));
        if (x(Pidx[c]) <= tol) { x(Pidx[c]) = 0.0; passive[static_cast<size_t>(Pidx[c])] = false; }
      }
    }
    w = A.transpose() * (b - A * x);
  }
  return {x, (A * x - b).norm()};
}

std::optional<Vec> normal_cone_coefficients(const Polyhedron& P, const Vec& x,
                                            const Vec& v, double tol) {
  require_dim(P, x);
  require_dim(P, v);
  if (!contains(P, x, tol))
    throw std::invalid_argument("normal_cone_coefficients: point outside polyhedron");

  const ActiveSet act = active_set(P, x, tol);
  Vec lambda = Vec::Zero(P.num_halfspaces());
  if (act.indices.empty()) {
    if (v.norm() <= tol) return lambda;
    return std::nullopt;
  }
  Mat A(P.dim(), static_cast<Eigen::Index>(act.indices.size()));
  for (size_t c = 0; c < act.indices.size(); ++c)
    A.col(static_cast<Eigen::Index>(c)) = P.halfspaces()[static_cast<size_t>(act.indices[c])].normal;
  const NnlsResult fit = nnls(A, v);
  if (fit.residual > tol) return std::nullopt;
  for (size_t c = 0; c < act.indices.size(); ++c)
    lambda(act.indices[c]) = fit.x(static_cast<Eigen::Index>(c));
  return lambda;
}

bool check_licq(const Polyhedron& P, const Vec& x, double tol) {
  require_dim(P, x);
  if (!contains(P, x, tol))
    throw std::invalid_argument("check_licq: point outside polyhedron");
  const ActiveSet act = active_set(P, x, tol);
  if (act.indices.empty()) return true;
  if (static_cast<Eigen::Index>(act.indices.size()) > P.dim()) return false;
  const Mat A = stack_rows(P, act.indices);
  Eigen::JacobiSVD<Mat> svd(A);
  return svd.singularValues().minCoeff() > 1e-10;
}

bool check_slater(const Polyhedron& P) {
  const Eigen::Index s = P.num_halfspaces();
  if (s == 0) return true;
  if (s == 1) return true;
  if (s == 2) {
    const auto& a = P.halfspaces()[0];
    const auto& b = P.halfspaces()[1];
    // Only an antiparallel pair can pinch away the strict interior.
    if ((a.normal + b.normal).norm() < 1e-12) return a.offset + b.offset > 0.0;
    return true;
  }

  // P has a strictly feasible point iff some uniformly shrunken copy is
  // nonempty; emptiness is certified by the enumeration projector. The
  // shrink must stay well above the membership tolerance, so interior
  // margins below 1e-7 of the offset scale are not detectable.
  const double scale = offset_scale(P);
  for (int j = 0; j < 24; ++j) {
    const double eps = scale * std::ldexp(1.0, -j);
    std::vector<Halfspace> shrunk = P.halfspaces();
    for (auto& h : shrunk) h.offset -= eps;
    try {
      (void)project(Polyhedron(std::move(shrunk), P.dim()), Vec::Zero(P.dim()));
      return true;
    } catch (const std::runtime_error&) {
      // empty at this eps, try a smaller shrink
    }
  }
  return false;
}

}  // namespace moreau
