#ifndef HCMS_TEST_SUPPORT_HPP
#define HCMS_TEST_SUPPORT_HPP

#include <random>

#include "hcms/experiment.hpp"

namespace hcms::test {

inline RunConfig small_config(int n = 16, int N = 4, int example = 1) {
  RunConfig c;
  c.n = n;
  c.N = N;
  c.example = example;
  c.coarse_list = {N};
  c.timing = false;
  return c;
}

inline Vector random_vector(Eigen::Index size, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Vector v(size);
  for (Eigen::Index k = 0; k < size; ++k) v[k] = dist(gen);
  return v;
}

inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace hcms::test

#endif
