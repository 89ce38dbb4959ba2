#pragma once

#include <Eigen/Dense>
#include <cstdint>

namespace moreau {

/// Gray-code Sobol sequence in [0,1)^dim, dimensions up to 6.
class SobolSequence {
public:
  explicit SobolSequence(int dim);

  Eigen::VectorXd next();

private:
  int dim_;
  std::uint64_t index_ = 0;
  Eigen::Matrix<std::uint32_t, Eigen::Dynamic, Eigen::Dynamic> direction_;  // dim x 32
  Eigen::Matrix<std::uint32_t, Eigen::Dynamic, 1> state_;
};

}  // namespace moreau
