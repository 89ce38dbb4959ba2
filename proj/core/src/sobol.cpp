#include "moreau/sobol.hpp"

#include <stdexcept>
#include <vector>

namespace moreau {

namespace {

// Primitive polynomial degrees, coefficients and initial direction
// numbers for dimensions 2..6 (dimension 1 is the van der Corput
// radical inverse). Joe-Kuo table, first entries.
struct DimInit {
  int s;
  std::uint32_t a;
  std::uint32_t m[4];
};

constexpr DimInit kDims[5] = {
    {1, 0, {1, 0, 0, 0}},
    {2, 1, {1, 3, 0, 0}},
    {3, 1, {1, 3, 1, 0}},
    {3, 2, {1, 1, 1, 0}},
    {4, 1, {1, 1, 3, 3}},
};

}  // namespace

SobolSequence::SobolSequence(int dim) : dim_(dim) {
  if (dim < 1 || dim > 6) throw std::invalid_argument("SobolSequence: dim must be in [1, 6]");
  constexpr int kBits = 32;
  direction_.resize(dim, kBits);
  state_ = Eigen::Matrix<std::uint32_t, Eigen::Dynamic, 1>::Zero(dim);

  for (int b = 0; b < kBits; ++b) direction_(0, b) = 1u << (31 - b);

  for (int d = 1; d < dim; ++d) {
    const DimInit& init = kDims[d - 1];
    const int s = init.s;
    std::vector<std::uint32_t> m(static_cast<size_t>(kBits));
    for (int i = 0; i < s; ++i) m[static_cast<size_t>(i)] = init.m[i];
    for (int i = s; i < kBits; ++i) {
      std::uint32_t v = m[static_cast<size_t>(i - s)] ^ (m[static_cast<size_t>(i - s)] << s);
      for (int k = 1; k < s; ++k)
        if ((init.a >> (s - 1 - k)) & 1u) v ^= m[static_cast<size_t>(i - k)] << k;
      m[static_cast<size_t>(i)] = v;
    }
    for (int b = 0; b < kBits; ++b) direction_(d, b) = m[static_cast<size_t>(b)] << (31 - b);
  }
}

Eigen::VectorXd SobolSequence::next() {
  Eigen::VectorXd point(dim_);
  if (index_ == 0) {
    point.setZero();
    ++index_;
    return point;
  }
  // Gray-code update: flip the direction of the lowest zero bit.
  std::uint64_t c = 0;
  std::uint64_t value = index_ - 1;
  while (value & 1u) {
    value >>= 1;
    ++c;
  }
  for (int d = 0; d < dim_; ++d) {
    state_(d) ^= direction_(d, static_cast<int>(c));
    point(d) = static_cast<double>(state_(d)) / 4294967296.0;
  }
  ++index_;
  return point;
}

}  // namespace moreau
