#pragma once

#include "pdqp/driver.hpp"

#include <doctest.h>

#include <random>
#include <string>

namespace pdqp::test {

inline const std::string kFixtures = PDQP_FIXTURE_DIR;

inline Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

// P1: min ½‖x‖² s.t. x1 + x2 = b, x ≥ 0. P2 is P1 with c = (2, 0).
inline QpProblem p1(double b = 1, Vector c = Vector::Zero(2)) {
  return QpProblem(Matrix::Identity(2, 2), Matrix::Zero(1, 1), Matrix::Ones(1, 2),
                   Vector::Constant(1, b), std::move(c));
}
inline QpProblem p2() { return p1(1, vec({2, 0})); }

// H = 0, x1 = x2, objective −x1: unbounded below.
inline QpProblem h0_unbounded() {
  Matrix A(1, 2);
  A << 1, -1;
  return QpProblem(Matrix::Zero(2, 2), Matrix::Zero(1, 1), A, Vector::Zero(1), vec({-1, 0}));
}

inline bool near(double a, double b, double tol = 1e-12) {
  return std::abs(a - b) <= tol * (1 + std::abs(b));
}

inline bool near(const Vector& a, const Vector& b, double tol = 1e-12) {
  if (a.size() != b.size()) return false;
  if (a.size() == 0) return true;
  return (a - b).cwiseAbs().maxCoeff() <= tol * (1 + b.cwiseAbs().maxCoeff());
}

}  // namespace pdqp::test
