#include "moreau/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <future>
#include <limits>
#include <random>
#include <stdexcept>
#include <thread>

namespace moreau::opt {

namespace {

bool lex_less(const Vec& a, const Vec& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a(i) < b(i)) return true;
    if (a(i) > b(i)) return false;
  }
  return false;
}

}  // namespace

unsigned max_threads() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("MOREAU_OPT_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(v));
  }
  return n;
}

void BoxDomain::validate() const {
  if (lower.size() != upper.size())
    throw std::invalid_argument("BoxDomain: bound size mismatch");
  for (Eigen::Index i = 0; i < dim(); ++i)
    if (lower(i) > upper(i)) throw std::invalid_argument("BoxDomain: lower > upper");
  for (const auto& c : couplings) {
    if (c.coeffs.size() != dim() || c.bound < 0 || c.bound >= dim())
      throw std::invalid_argument("BoxDomain: malformed coupling");
    if (c.coeffs(c.bound) != 0.0)
      throw std::invalid_argument("BoxDomain: coupling must not reference its own coordinate");
  }
}

std::vector<Eigen::Index> BoxDomain::free_coordinates() const {
  std::vector<bool> bound(static_cast<size_t>(dim()), false);
  for (const auto& c : couplings) bound[static_cast<size_t>(c.bound)] = true;
  std::vector<Eigen::Index> free;
  for (Eigen::Index i = 0; i < dim(); ++i)
    if (!bound[static_cast<size_t>(i)]) free.push_back(i);
  return free;
}

Vec BoxDomain::lift(const Vec& free_values) const {
  const auto free = free_coordinates();
  if (free_values.size() != static_cast<Eigen::Index>(free.size()))
    throw std::invalid_argument("BoxDomain::lift: wrong number of free values");
  Vec x = Vec::Zero(dim());
  for (size_t i = 0; i < free.size(); ++i) x(free[i]) = free_values(static_cast<Eigen::Index>(i));
  for (const auto& c : couplings) x(c.bound) = c.coeffs.dot(x) + c.shift;
  return clamp(x);
}

Vec BoxDomain::clamp(const Vec& x) const {
  Vec y = x;
  for (Eigen::Index i = 0; i < dim(); ++i) y(i) = std::clamp(y(i), lower(i), upper(i));
  return y;
}

SearchResult grid_search(const Objective& f, const BoxDomain& dom,
                         const std::vector<Eigen::Index>& resolutions) {
  dom.validate();
  const auto free = dom.free_coordinates();
  const auto d = static_cast<Eigen::Index>(free.size());
  if (static_cast<Eigen::Index>(resolutions.size()) != d)
    throw std::invalid_argument("grid_search: one resolution per free coordinate");
  for (Eigen::Index r : resolutions)
    if (r < 2) throw std::invalid_argument("grid_search: resolution must be >= 2");

  Eigen::Index total = 1;
  for (Eigen::Index i = 0; i < d; ++i) total *= resolutions[static_cast<size_t>(i)];

  auto point_at = [&](Eigen::Index flat) {
    Vec fv(d);
    for (Eigen::Index i = 0; i < d; ++i) {
      const Eigen::Index res = resolutions[static_cast<size_t>(i)];
      const Eigen::Index idx = flat % res;
      flat /= res;
      const double lo = dom.lower(free[static_cast<size_t>(i)]);
      const double hi = dom.upper(free[static_cast<size_t>(i)]);
      fv(i) = lo + (hi - lo) * static_cast<double>(idx) / static_cast<double>(res - 1);
    }
    return dom.lift(fv);
  };

  const unsigned workers = std::min<unsigned>(max_threads(), static_cast<unsigned>(total));
  struct Chunk { double value; Vec point; Eigen::Index evals; };
  std::vector<std::future<Chunk>> futs;
  for (unsigned w = 0; w < workers; ++w) {
    futs.push_back(std::async(std::launch::async, [&, w]() {
      Chunk best{std::numeric_limits<double>::infinity(), Vec(), 0};
      for (Eigen::Index flat = w; flat < total; flat += workers) {
        const Vec x = point_at(flat);
        const double v = f(x);
        ++best.evals;
        if (!std::isfinite(v)) continue;
        if (v < best.value || (v == best.value && (best.point.size() == 0 || lex_less(x, best.point)))) {
          best.value = v;
          best.point = x;
        }
      }
      return best;
    }));
  }

  SearchResult result;
  result.value = std::numeric_limits<double>::infinity();
  for (auto& fu : futs) {
    Chunk c = fu.get();
    result.evaluations += c.evals;
    if (c.point.size() == 0) continue;
    if (c.value < result.value ||
        (c.value == result.value && (result.point.size() == 0 || lex_less(c.point, result.point)))) {
      result.value = c.value;
      result.point = c.point;
    }
  }
  if (result.point.size() == 0)
    throw std::runtime_error("grid_search: objective was non-finite everywhere");
  return result;
}

SearchResult grid_search(const Objective& f, const BoxDomain& dom, Eigen::Index resolution) {
  dom.validate();
  const auto d = static_cast<Eigen::Index>(dom.free_coordinates().size());
  return grid_search(f, dom, std::vector<Eigen::Index>(static_cast<size_t>(d), resolution));
}

NelderMeadResult nelder_mead(const Objective& f, const Vec& start, const BoxDomain& dom,
                             const NelderMeadOptions& opts) {
  dom.validate();
  const auto free = dom.free_coordinates();
  const auto d = static_cast<Eigen::Index>(free.size());

  auto reduce = [&](const Vec& x) {
    Vec fv(d);
    for (Eigen::Index i = 0; i < d; ++i) fv(i) = x(free[static_cast<size_t>(i)]);
    return fv;
  };
  auto eval = [&](const Vec& fv) {
    const double v = f(dom.lift(fv));
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };

  struct Vertex { Vec x; double v; };
  std::vector<Vertex> simplex;
  const Vec s0 = reduce(dom.clamp(start));
  simplex.push_back({s0, eval(s0)});
  for (Eigen::Index i = 0; i < d; ++i) {
    Vec x = s0;
    const double lo = dom.lower(free[static_cast<size_t>(i)]);
    const double hi = dom.upper(free[static_cast<size_t>(i)]);
    double h = opts.initial_step > 0.0 ? opts.initial_step : 0.05 * (hi - lo);
    if (h == 0.0) h = 0.05;
    x(i) = (x(i) + h <= hi) ? x(i) + h : x(i) - h;
    simplex.push_back({x, eval(x)});
  }

  auto order = [&]() {
    std::sort(simplex.begin(), simplex.end(), [](const Vertex& a, const Vertex& b) {
      return a.v < b.v;
    });
  };
  order();

  NelderMeadResult result;
  int iter = 0;
  for (; iter < opts.max_iter; ++iter) {
    double diam = 0.0;
    for (size_t i = 1; i < simplex.size(); ++i)
      diam = std::max(diam, (simplex[i].x - simplex[0].x).lpNorm<Eigen::Infinity>());
    const double spread = simplex.back().v - simplex.front().v;
    if (diam < opts.tol_x || spread < opts.tol_f) {
      result.converged = true;
      result.flat_spread = spread < opts.tol_f && diam >= opts.tol_x;
      break;
    }

    Vec centroid = Vec::Zero(d);
    for (size_t i = 0; i + 1 < simplex.size(); ++i) centroid += simplex[i].x;
    centroid /= static_cast<double>(simplex.size() - 1);

    auto propose = [&](double coef) {
      Vec x = centroid + coef * (centroid - simplex.back().x);
      return reduce(dom.lift(x));  // project onto the box
    };

    const Vec xr = propose(1.0);
    const double vr = eval(xr);
    if (vr < simplex.front().v) {
      const Vec xe = propose(2.0);
      const double ve = eval(xe);
      simplex.back() = (ve < vr) ? Vertex{xe, ve} : Vertex{xr, vr};
    } else if (vr < simplex[simplex.size() - 2].v) {
      simplex.back() = {xr, vr};
    } else {
      const bool outside = vr < simplex.back().v;
      const Vec xc = outside ? propose(0.5)
                             : reduce(dom.lift(centroid - 0.5 * (centroid - simplex.back().x)));
      const double vc = eval(xc);
      if (vc < std::min(vr, simplex.back().v)) {
        simplex.back() = {xc, vc};
      } else {
        for (size_t i = 1; i < simplex.size(); ++i) {
          simplex[i].x = simplex[0].x + 0.5 * (simplex[i].x - simplex[0].x);
          simplex[i].v = eval(simplex[i].x);
        }
      }
    }
    order();
  }

  result.point = dom.lift(simplex.front().x);
  result.value = simplex.front().v;
  result.iterations = iter;
  return result;
}

NelderMeadResult nelder_mead_multistart(const Objective& f, const BoxDomain& dom, int starts,
                                        unsigned seed, const NelderMeadOptions& opts) {
  if (starts < 1) throw std::invalid_argument("nelder_mead_multistart: need at least one start");
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  NelderMeadResult best;
  best.value = std::numeric_limits<double>::infinity();
  int total_iterations = 0;
  for (int s = 0; s < starts; ++s) {
    Vec start(dom.dim());
    for (Eigen::Index i = 0; i < dom.dim(); ++i)
      start(i) = dom.lower(i) + (dom.upper(i) - dom.lower(i)) * unit(rng);
    const NelderMeadResult r = nelder_mead(f, start, dom, opts);
    total_iterations += r.iterations;
    if (r.value < best.value) best = r;
  }
  best.iterations = total_iterations;
  return best;
}

}  // namespace moreau::opt
