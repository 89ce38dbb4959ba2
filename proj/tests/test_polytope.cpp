#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "moreau/polytope.hpp"
#include "support/oracles.hpp"
#include "support/random_instances.hpp"

#include <random>

using namespace moreau;

namespace {

Polyhedron make_poly(std::initializer_list<std::pair<std::vector<double>, double>> rows,
                     Eigen::Index dim) {
  std::vector<Halfspace> hs;
  for (const auto& [n, c] : rows) {
    Vec normal = Eigen::Map<const Vec>(n.data(), static_cast<Eigen::Index>(n.size()));
    hs.emplace_back(normal, c);
  }
  return Polyhedron(std::move(hs), dim);
}

Vec vec2(double a, double b) { return (Vec(2) << a, b).finished(); }

}  // namespace

TEST_CASE("halfspace normalization preserves the set and unit norm") {
  const Halfspace h = Halfspace::normalized(vec2(3.0, 4.0), 10.0);
  CHECK(std::abs(h.normal.norm() - 1.0) < 1e-12);
  // (2, 1): 3*2+4*1 = 10 on the boundary, must stay on the boundary
  CHECK(std::abs(h.normal.dot(vec2(2.0, 1.0)) - h.offset) < 1e-12);
  CHECK_THROWS_AS(Halfspace::normalized(Vec::Zero(2), 1.0), std::invalid_argument);
}

TEST_CASE("contains") {
  const auto P = make_poly({{{1.0, 0.0}, 0.0}}, 2);
  CHECK(contains(P, vec2(-1.0, 5.0), 0.0));
  CHECK(contains(P, vec2(1e-13, 0.0), 1e-9));
  CHECK_FALSE(contains(P, vec2(1.0, 0.0)));

  const auto empty = make_poly({{{1.0, 0.0}, 0.0}, {{-1.0, 0.0}, -1.0}}, 2);
  CHECK_FALSE(contains(empty, vec2(0.5, 0.0)));

  CHECK_THROWS_AS(contains(P, Vec::Zero(3)), std::invalid_argument);
  CHECK_THROWS_AS(contains(P, vec2(0, 0), -1.0), std::invalid_argument);
}

TEST_CASE("projection basics") {
  const auto P = make_poly({{{1.0, 1.0}, 0.0}}, 2);
  SUBCASE("interior points are fixed") {
    const Vec y = vec2(-1.0, -2.0);
    CHECK((project(P, y) - y).norm() < 1e-14);
  }
  SUBCASE("symmetric halfspace projection") {
    CHECK((project(P, vec2(1.0, 1.0)) - vec2(0.0, 0.0)).norm() < 1e-12);
  }
  SUBCASE("empty polyhedron is detected") {
    const auto empty = make_poly({{{1.0, 0.0}, 0.0}, {{-1.0, 0.0}, -1.0}}, 2);
    CHECK_THROWS_WITH_AS(project(empty, vec2(0.0, 0.0)), "empty set", std::runtime_error);
  }
}

TEST_CASE("projection agrees with the subset-enumeration oracle") {
  std::mt19937 rng(20240517);
  int checked = 0;
  while (checked < 1000) {
    const Eigen::Index dim = 2 + static_cast<Eigen::Index>(rng() % 3);  // 2..4
    const auto P = testgen::random_feasible_polyhedron(rng, dim, 5);
    const Vec y = testgen::random_vector(rng, dim);
    const auto expected = oracles::project_bruteforce(P, y);
    REQUIRE(expected.has_value());
    const Projection got = project_with_certificate(P, y);
    CHECK((got.point - *expected).norm() < 1e-8);
    CHECK(got.lambda.minCoeff() >= -1e-10);
    ++checked;
  }
}

TEST_CASE("projection properties: idempotence, nonexpansiveness, KKT") {
  std::mt19937 rng(7);
  for (int i = 0; i < 300; ++i) {
    const Eigen::Index dim = 2 + static_cast<Eigen::Index>(rng() % 5);  // 2..6
    const auto P = testgen::random_feasible_polyhedron(rng, dim, 5);
    const Vec a = testgen::random_vector(rng, dim);
    const Vec b = testgen::random_vector(rng, dim);

    const Projection pa = project_with_certificate(P, a);
    CHECK((project(P, pa.point) - pa.point).norm() < 1e-10);
    CHECK((pa.point - project(P, b)).norm() <= (a - b).norm() + 1e-10);

    // KKT: decomposition and complementary slackness
    Vec recon = pa.point;
    for (Eigen::Index j = 0; j < P.num_halfspaces(); ++j) {
      recon += pa.lambda(j) * P.halfspaces()[static_cast<size_t>(j)].normal;
      CHECK(pa.lambda(j) >= -1e-10);
      CHECK(std::abs(pa.lambda(j) * P.slack(j, pa.point)) < 1e-8);
    }
    CHECK((recon - a).norm() < 1e-8);
  }
}

TEST_CASE("normal cone coefficients") {
  const auto P = make_poly({{{1.0, 0.0}, 0.0}}, 2);
  SUBCASE("interior point has the zero cone") {
    const auto lam = normal_cone_coefficients(P, vec2(-1.0, 0.0), Vec::Zero(2));
    REQUIRE(lam.has_value());
    CHECK(lam->norm() == 0.0);
    CHECK_FALSE(normal_cone_coefficients(P, vec2(-1.0, 0.0), vec2(0.5, 0.0)).has_value());
  }
  SUBCASE("single active normal") {
    const auto lam = normal_cone_coefficients(P, vec2(0.0, 3.0), vec2(2.0, 0.0));
    REQUIRE(lam.has_value());
    CHECK(std::abs((*lam)(0) - 2.0) < 1e-12);
  }
  SUBCASE("wrong direction fails") {
    CHECK_FALSE(normal_cone_coefficients(P, vec2(0.0, 3.0), vec2(-1.0, 0.0)).has_value());
  }
  SUBCASE("outside point throws") {
    CHECK_THROWS_AS(normal_cone_coefficients(P, vec2(1.0, 0.0), Vec::Zero(2)),
                    std::invalid_argument);
  }
}

TEST_CASE("licq") {
  const auto single = make_poly({{{1.0, 0.0}, 0.0}}, 2);
  CHECK(check_licq(single, vec2(0.0, 1.0)));

  const auto repeated = make_poly({{{1.0, 0.0}, 0.0}, {{2.0, 0.0}, 0.0}}, 2);
  CHECK_FALSE(check_licq(repeated, vec2(0.0, 1.0)));

  // inactive constraints do not enter
  CHECK(check_licq(repeated, vec2(-1.0, 0.0)));
}

TEST_CASE("slater") {
  CHECK(check_slater(make_poly({{{1.0, 0.0}, 0.0}}, 2)));
  CHECK_FALSE(check_slater(make_poly({{{1.0, 0.0}, 0.0}, {{-1.0, 0.0}, 0.0}}, 2)));
  CHECK(check_slater(make_poly({{{1.0, 0.0}, 1.0}, {{-1.0, 0.0}, 0.0}}, 2)));
  // simplex-like triple in R^2, strictly feasible interior
  CHECK(check_slater(make_poly({{{1.0, 0.0}, 1.0}, {{0.0, 1.0}, 1.0}, {{-1.0, -1.0}, 0.0}}, 2)));
  // three halfspaces pinching a single point only
  CHECK_FALSE(check_slater(
      make_poly({{{1.0, 0.0}, 0.0}, {{-1.0, 0.0}, 0.0}, {{0.0, 1.0}, 0.0}, {{0.0, -1.0}, 0.0}}, 2)));
}

TEST_CASE("nnls") {
  Mat A(2, 2);
  A << 1.0, 0.0, 0.0, 1.0;
  SUBCASE("feasible sign pattern") {
    const auto r = nnls(A, vec2(2.0, 3.0));
    CHECK((r.x - vec2(2.0, 3.0)).norm() < 1e-12);
    CHECK(r.residual < 1e-12);
  }
  SUBCASE("negative component clipped to zero") {
    const auto r = nnls(A, vec2(-1.0, 2.0));
    CHECK(r.x(0) == 0.0);
    CHECK(std::abs(r.x(1) - 2.0) < 1e-12);
    CHECK(std::abs(r.residual - 1.0) < 1e-12);
  }
}

TEST_CASE("dykstra path handles more than six halfspaces") {
  // regular 8-gon in the plane, project an outside point
  std::vector<Halfspace> hs;
  for (int j = 0; j < 8; ++j) {
    const double a = 2.0 * std::numbers::pi * j / 8.0;
    hs.emplace_back(vec2(std::cos(a), std::sin(a)), 1.0);
  }
  const Polyhedron P(std::move(hs), 2);
  const Vec y = vec2(3.0, 0.0);
  const Vec x = project(P, y);
  CHECK(contains(P, x, 1e-7));
  CHECK(std::abs(x(0) - 1.0) < 1e-6);
  CHECK(std::abs(x(1)) < 1e-6);
}
