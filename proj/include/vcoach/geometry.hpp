/*
 * Copyright 2026 The vcoach Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cmath>

namespace vcoach::geometry {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double deg2rad(double d) { return d * kPi / 180.0; }
inline constexpr double rad2deg(double r) { return r * 180.0 / kPi; }

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator-() const { return {-x, -y, -z}; }
  constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  constexpr Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
  Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
  constexpr bool operator==(const Vec3&) const = default;

  constexpr double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  constexpr Vec3 cross(const Vec3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  double norm() const { return std::sqrt(dot(*this)); }
  bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
  // Throws Domain on zero length.
  Vec3 normalized() const;
};

inline constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }
inline double distance(const Vec3& a, const Vec3& b) { return (a - b).norm(); }

// Unit quaternion (w, x, y, z). Constructors renormalize.
class UnitQuat {
 public:
  constexpr UnitQuat() = default;
  // Normalizes; throws Domain on a zero or non-finite quaternion.
  UnitQuat(double w, double x, double y, double z);

  // Keeps components bit-exact when already unit to within 1e-9; used when
  // decoding stored poses. Otherwise normalizes like the constructor.
  static UnitQuat exact(double w, double x, double y, double z);
  static UnitQuat from_axis_angle(const Vec3& axis, double angle_deg);
  // Rotation taking frame axes onto the given orthonormal columns.
  static UnitQuat from_basis(const Vec3& x_axis, const Vec3& y_axis, const Vec3& z_axis);
  // Shortest-arc rotation taking direction `from` onto direction `to`.
  static UnitQuat from_to(const Vec3& from, const Vec3& to);

  double w() const { return w_; }
  double x() const { return x_; }
  double y() const { return y_; }
  double z() const { return z_; }

  Vec3 rotate(const Vec3& v) const;
  UnitQuat conjugate() const;
  UnitQuat operator*(const UnitQuat& o) const;
  bool operator==(const UnitQuat&) const = default;
  double norm() const { return std::sqrt(w_ * w_ + x_ * x_ + y_ * y_ + z_ * z_); }

  // Spherical interpolation along the shorter path.
  static UnitQuat slerp(const UnitQuat& a, const UnitQuat& b, double s);

 private:
  double w_ = 1.0, x_ = 0.0, y_ = 0.0, z_ = 0.0;
};

struct Pose {
  Vec3 position;
  UnitQuat orientation;

  Vec3 transform(const Vec3& local) const { return position + orientation.rotate(local); }
  Vec3 inverse_transform(const Vec3& world) const {
    return orientation.conjugate().rotate(world - position);
  }
  Pose operator*(const Pose& child) const {
    return {transform(child.position), orientation * child.orientation};
  }
  Pose inverse() const {
    auto inv = orientation.conjugate();
    return {inv.rotate(-position), inv};
  }
  Vec3 axis_x() const { return orientation.rotate({1, 0, 0}); }
  Vec3 axis_y() const { return orientation.rotate({0, 1, 0}); }
  Vec3 axis_z() const { return orientation.rotate({0, 0, 1}); }
  bool finite() const;
  bool operator==(const Pose&) const = default;
};

// Planar circular needle. Body lies on a circle of `radius` in the local XY
// plane centred at the local origin; tip at local angle 0, tail at `span`.
struct NeedleModel {
  double radius = 6.0;
  double span = 180.0;  // degrees
  void validate() const;
  bool operator==(const NeedleModel&) const = default;
};

// Circular arc: points are center + radius*(cos a * ref_axis + sin a * (normal x ref_axis)).
struct ArcPath {
  Vec3 center;
  double radius = 0.0;
  Vec3 plane_normal{0, 0, 1};
  Vec3 ref_axis{1, 0, 0};  // in-plane direction of angle 0
  double start_angle = 0.0;
  double end_angle = 0.0;
  int drive_direction = 1;

  Vec3 point_at(double angle_deg) const;
  Vec3 start_point() const { return point_at(start_angle); }
  Vec3 end_point() const { return point_at(end_angle); }
  Vec3 in_plane_y() const { return plane_normal.cross(ref_axis); }
};

struct ArcDeviation {
  double in_plane = 0.0;
  double out_plane = 0.0;
  double arc_angle = 0.0;
};

// Needle-body tube radius for grasp detection.
inline constexpr double kNeedleTubeTolerance = 1.0;

Vec3 needle_point(const Pose& pose, const NeedleModel& model, double theta_deg);
// Unit tangent at theta, pointing toward increasing theta.
Vec3 needle_tangent(const Pose& pose, const NeedleModel& model, double theta_deg);
Vec3 needle_plane_normal(const Pose& pose);

ArcPath chord_arc(const Vec3& entry, const Vec3& exit, double radius, const Vec3& surface_normal);
ArcDeviation arc_deviation(const Vec3& p, const ArcPath& arc);

// Nearest needle angle to a point; throws Domain when the point is outside the tube.
double angle_on_needle(const Vec3& grasp_point, const Pose& pose, const NeedleModel& model,
                       double tolerance = kNeedleTubeTolerance);
// Unchecked variant: nearest angle and its distance.
struct NeedleProjection {
  double theta = 0.0;
  double distance = 0.0;
};
NeedleProjection project_on_needle(const Vec3& p, const Pose& pose, const NeedleModel& model);

// Axis-sign-insensitive angle between two directions, in [0, 90] degrees.
double orientation_deviation(const Vec3& gripper_axis, const Vec3& needle_plane_normal);

// Needle pose that lays the body on `arc` with the tip at arc angle `tip_angle`
// and the body trailing behind the tip (toward decreasing arc angle).
Pose needle_pose_on_arc(const ArcPath& arc, double tip_angle_deg);

}  // namespace vcoach::geometry
