#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>
#include <vector>

namespace moreau {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// A closed halfspace { x : <normal, x> <= offset }.
struct Halfspace {
  Vec normal;
  double offset = 0.0;

  Halfspace() = default;
  Halfspace(Vec n, double c) : normal(std::move(n)), offset(c) {}

  /// Rescales so that the stored normal has unit Euclidean norm.
  /// The described set is unchanged.
  static Halfspace normalized(const Vec& n, double c);
};

/// Intersection of finitely many halfspaces in R^dim. Normals are
/// normalized on construction, offsets rescaled accordingly.
class Polyhedron {
public:
  Polyhedron(std::vector<Halfspace> halfspaces, Eigen::Index dim);

  Eigen::Index dim() const { return dim_; }
  Eigen::Index num_halfspaces() const { return static_cast<Eigen::Index>(halfspaces_.size()); }
  const std::vector<Halfspace>& halfspaces() const { return halfspaces_; }

  /// Signed slack offset_j - <normal_j, x> of halfspace j (>= 0 inside).
  double slack(Eigen::Index j, const Vec& x) const;

private:
  std::vector<Halfspace> halfspaces_;
  Eigen::Index dim_;
};

/// Indices of constraints holding with equality at a query point,
/// up to `tolerance`.
struct ActiveSet {
  std::vector<Eigen::Index> indices;  // sorted ascending
  double tolerance = 0.0;

  bool contains(Eigen::Index j) const;
};

inline constexpr double kMembershipTol = 1e-9;

/// True iff every halfspace inequality holds within tol.
bool contains(const Polyhedron& P, const Vec& x, double tol = kMembershipTol);

/// Constraints with |<normal_j, x> - offset_j| <= tol.
ActiveSet active_set(const Polyhedron& P, const Vec& x, double tol = kMembershipTol);

/// Euclidean projection with its KKT multipliers:
///   y - point = sum_j lambda_j normal_j,  lambda_j >= 0,
///   lambda_j > 0 only on active halfspaces.
struct Projection {
  Vec point;
  Vec lambda;                         // one entry per halfspace
  std::vector<Eigen::Index> active;   // halfspaces held with equality
};

/// Nearest point of P to y. Exact active-subset enumeration for up to
/// six halfspaces, cyclic Dykstra iteration beyond that. Throws
/// std::runtime_error("empty set") when the enumeration certifies that
/// no feasible point exists.
Projection project_with_certificate(const Polyhedron& P, const Vec& y);
Vec project(const Polyhedron& P, const Vec& y);

/// Nonnegative least squares: minimize ||A x - b|| over x >= 0.
/// Lawson-Hanson active set iteration.
struct NnlsResult {
  Vec x;
  double residual = 0.0;
};
NnlsResult nnls(const Mat& A, const Vec& b);

/// Nonnegative coefficients of v over the active normals at x, i.e. a
/// certificate that v lies in the normal cone N(x; P). Returns
/// std::nullopt when the best nonnegative combination misses v by more
/// than tol. Throws when x is not a member of P.
std::optional<Vec> normal_cone_coefficients(const Polyhedron& P, const Vec& x,
                                            const Vec& v, double tol = kMembershipTol);

/// Linear independence of the active normals at x (smallest singular
/// value above 1e-10).
bool check_licq(const Polyhedron& P, const Vec& x, double tol = kMembershipTol);

/// Existence of a strictly feasible point. Analytic for one or two
/// halfspaces, otherwise probes shrunken copies of P through the
/// projection machinery.
bool check_slater(const Polyhedron& P);

}  // namespace moreau
