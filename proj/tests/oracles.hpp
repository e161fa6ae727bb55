#ifndef HCMS_TEST_ORACLES_HPP
#define HCMS_TEST_ORACLES_HPP

#include <array>
#include <cmath>

#include "hcms/assembly.hpp"

namespace hcms::test {

// Edge basis on [0,h]^2 with unit tangential integral, order (bottom, top,
// left, right). Returns (phi_x, phi_y) and the scalar curl.
struct BasisEval {
  std::array<std::array<double, 2>, 4> phi;
  std::array<double, 4> curl;
};

inline BasisEval eval_basis(double h, double x, double y) {
  const double s = 1.0 / (h * h);
  BasisEval out;
  out.phi[0] = {(h - y) * s, 0.0};
  out.phi[1] = {y * s, 0.0};
  out.phi[2] = {0.0, (h - x) * s};
  out.phi[3] = {0.0, x * s};
  out.curl = {s, -s, -s, s};
  return out;
}

// 2x2 Gauss quadrature, exact for the bilinear integrands involved.
inline ElementMatrices quadrature_element(double h, double a, double b) {
  const double g = 0.5 / std::sqrt(3.0);
  const std::array<double, 2> pts{0.5 - g, 0.5 + g};
  ElementMatrices m;
  m.curl.setZero();
  m.mass.setZero();
  const double w = h * h / 4.0;
  for (double px : pts)
    for (double py : pts) {
      const BasisEval e = eval_basis(h, px * h, py * h);
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
          m.curl(i, j) += w * a * e.curl[static_cast<std::size_t>(i)] * e.curl[static_cast<std::size_t>(j)];
          m.mass(i, j) += w * b *
                          (e.phi[static_cast<std::size_t>(i)][0] * e.phi[static_cast<std::size_t>(j)][0] +
                           e.phi[static_cast<std::size_t>(i)][1] * e.phi[static_cast<std::size_t>(j)][1]);
        }
    }
  return m;
}

}  // namespace hcms::test

#endif
