#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace motslab {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Field = Eigen::ArrayXd;  // one scalar value per surface node

// Vector field in frame components (sphere: 3 tangential-Cartesian slots,
// torus: first 2 slots used).
using VecField = std::array<Field, 3>;

// Symmetric rank-2 frame tensor field, packed (00,01,02,11,12,22).
using SymField = std::array<Field, 6>;

inline constexpr int sym_index(int a, int b) {
  if (a > b) std::swap(a, b);
  constexpr int row_start[3] = {0, 3, 5};
  return row_start[a] + b - a;
}

inline Mat3 sym_at(const SymField& s, Eigen::Index k) {
  Mat3 m;
  m(0, 0) = s[0][k];
  m(0, 1) = m(1, 0) = s[1][k];
  m(0, 2) = m(2, 0) = s[2][k];
  m(1, 1) = s[3][k];
  m(1, 2) = m(2, 1) = s[4][k];
  m(2, 2) = s[5][k];
  return m;
}

inline void sym_set(SymField& s, Eigen::Index k, const Mat3& m) {
  s[0][k] = m(0, 0);
  s[1][k] = 0.5 * (m(0, 1) + m(1, 0));
  s[2][k] = 0.5 * (m(0, 2) + m(2, 0));
  s[3][k] = m(1, 1);
  s[4][k] = 0.5 * (m(1, 2) + m(2, 1));
  s[5][k] = m(2, 2);
}

inline Vec3 vec_at(const VecField& v, Eigen::Index k) {
  return Vec3(v[0][k], v[1][k], v[2][k]);
}

inline void vec_set(VecField& v, Eigen::Index k, const Vec3& x) {
  v[0][k] = x[0];
  v[1][k] = x[1];
  v[2][k] = x[2];
}

inline VecField make_vec_field(Eigen::Index n) {
  return {Field::Zero(n), Field::Zero(n), Field::Zero(n)};
}

inline SymField make_sym_field(Eigen::Index n) {
  return {Field::Zero(n), Field::Zero(n), Field::Zero(n),
          Field::Zero(n), Field::Zero(n), Field::Zero(n)};
}

inline double sup_norm(const Field& f) { return f.abs().maxCoeff(); }

constexpr double kPi = 3.14159265358979323846;

}  // namespace motslab
