#pragma once

#include <vector>

#include "hmflow/map_field.hpp"

namespace hmflow::detail {

// Sixth-order centered differences at an interior node k of an n x n chart
// stored with i fastest. Reach is kStencilReach = 3 nodes.
struct NodeDerivatives {
  Vec3 ux;
  Vec3 uy;
  Vec3 lap;
};

inline Vec3 d1(const Vec3* v, int k, int s, double inv60h) {
  return (45.0 * (v[k + s] - v[k - s]) - 9.0 * (v[k + 2 * s] - v[k - 2 * s]) + (v[k + 3 * s] - v[k - 3 * s])) * inv60h;
}

// Second difference along one axis, written on offsets from the center so
// that constant data gives exactly zero.
inline Vec3 d2(const Vec3* v, int k, int s) {
  const Vec3& c = v[k];
  return 270.0 * ((v[k + s] - c) + (v[k - s] - c)) - 27.0 * ((v[k + 2 * s] - c) + (v[k - 2 * s] - c)) +
         2.0 * ((v[k + 3 * s] - c) + (v[k - 3 * s] - c));
}

inline NodeDerivatives derivatives(const std::vector<Vec3>& values, int k, int n, double h) {
  const Vec3* v = values.data();
  const double inv60h = 1.0 / (60.0 * h);
  NodeDerivatives d;
  d.ux = d1(v, k, 1, inv60h);
  d.uy = d1(v, k, n, inv60h);
  d.lap = (d2(v, k, 1) + d2(v, k, n)) / (180.0 * h * h);
  return d;
}

// First derivatives only.
inline void gradient(const std::vector<Vec3>& values, int k, int n, double h, Vec3& ux, Vec3& uy) {
  const double inv60h = 1.0 / (60.0 * h);
  ux = d1(values.data(), k, 1, inv60h);
  uy = d1(values.data(), k, n, inv60h);
}

}  // namespace hmflow::detail
