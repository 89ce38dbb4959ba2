#include "moreau/polytope.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace moreau;

namespace {

std::vector<std::pair<Polyhedron, Vec>> make_instances(Eigen::Index dim, Eigen::Index halfspaces,
                                                       int count) {
  std::mt19937 rng(42);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<std::pair<Polyhedron, Vec>> instances;
  for (int t = 0; t < count; ++t) {
    Vec anchor(dim);
    for (Eigen::Index i = 0; i < dim; ++i) anchor(i) = gauss(rng);
    std::vector<Halfspace> hs;
    for (Eigen::Index j = 0; j < halfspaces; ++j) {
      Vec n(dim);
      for (Eigen::Index i = 0; i < dim; ++i) n(i) = gauss(rng);
      n.normalize();
      hs.emplace_back(n, n.dot(anchor) + 0.5);
    }
    Vec y(dim);
    for (Eigen::Index i = 0; i < dim; ++i) y(i) = 3.0 * gauss(rng);
    instances.emplace_back(Polyhedron(std::move(hs), dim), std::move(y));
  }
  return instances;
}

void BM_project(benchmark::State& state) {
  const auto instances = make_instances(state.range(0), state.range(1), 64);
  size_t i = 0;
  for (auto _ : state) {
    const auto& [P, y] = instances[i++ % instances.size()];
    benchmark::DoNotOptimize(project(P, y));
  }
}

void BM_nnls(benchmark::State& state) {
  std::mt19937 rng(7);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const Eigen::Index m = state.range(0);
  Mat A(m, m);
  Vec b(m);
  for (Eigen::Index r = 0; r < m; ++r) {
    b(r) = gauss(rng);
    for (Eigen::Index c = 0; c < m; ++c) A(r, c) = gauss(rng);
  }
  for (auto _ : state) benchmark::DoNotOptimize(nnls(A, b));
}

}  // namespace

BENCHMARK(BM_project)->ArgPair(4, 3)->ArgPair(4, 5)->ArgPair(6, 5)->ArgPair(2, 8);
BENCHMARK(BM_nnls)->Arg(4)->Arg(8);

BENCHMARK_MAIN();
