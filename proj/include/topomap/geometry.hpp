#pragma once

#include <cmath>
#include <compare>

namespace topomap {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Vec3&, const Vec3&) = default;
  friend auto operator<=>(const Vec3&, const Vec3&) = default;
};

inline Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator*(Vec3 a, double s) { return {a.x * s, a.y * s, a.z * s}; }

inline double squared_distance(Vec3 a, Vec3 b) {
  const Vec3 d = a - b;
  return d.x * d.x + d.y * d.y + d.z * d.z;
}

inline double distance(Vec3 a, Vec3 b) { return std::sqrt(squared_distance(a, b)); }

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Vec2&, const Vec2&) = default;
  friend auto operator<=>(const Vec2&, const Vec2&) = default;
};

struct Box3 {
  Vec3 min;
  Vec3 max;

  friend bool operator==(const Box3&, const Box3&) = default;
};

// Integer point of the voxel lattice (voxel corners).
struct LatticePoint {
  int x = 0;
  int y = 0;
  int z = 0;

  friend bool operator==(const LatticePoint&, const LatticePoint&) = default;
  friend auto operator<=>(const LatticePoint&, const LatticePoint&) = default;
};

}  // namespace topomap
