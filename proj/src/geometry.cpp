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

#include "vcoach/geometry.hpp"

#include <algorithm>
#include <string>

#include "vcoach/error.hpp"

namespace vcoach::geometry {

Vec3 Vec3::normalized() const {
  const double n = norm();
  if (!(n > 0.0) || !std::isfinite(n)) fail(ErrorCode::Domain, "cannot normalize a zero-length vector");
  return *this / n;
}

UnitQuat::UnitQuat(double w, double x, double y, double z) {
  const double n = std::sqrt(w * w + x * x + y * y + z * z);
  if (!(n > 0.0) || !std::isfinite(n)) fail(ErrorCode::Domain, "invalid quaternion");
  w_ = w / n;
  x_ = x / n;
  y_ = y / n;
  z_ = z / n;
}

UnitQuat UnitQuat::exact(double w, double x, double y, double z) {
  const double n2 = w * w + x * x + y * y + z * z;
  if (!(std::abs(n2 - 1.0) < 1e-9)) return UnitQuat(w, x, y, z);
  UnitQuat q;
  q.w_ = w;
  q.x_ = x;
  q.y_ = y;
  q.z_ = z;
  return q;
}

UnitQuat UnitQuat::from_axis_angle(const Vec3& axis, double angle_deg) {
  const Vec3 a = axis.normalized();
  const double half = deg2rad(angle_deg) * 0.5;
  const double s = std::sin(half);
  return {std::cos(half), a.x * s, a.y * s, a.z * s};
}

UnitQuat UnitQuat::from_basis(const Vec3& xa, const Vec3& ya, const Vec3& za) {
  // Shepperd's method on the matrix with columns xa, ya, za.
  const double m00 = xa.x, m01 = ya.x, m02 = za.x;
  const double m10 = xa.y, m11 = ya.y, m12 = za.y;
  const double m20 = xa.z, m21 = ya.z, m22 = za.z;
  const double trace = m00 + m11 + m22;
  if (trace > 0.0) {
    const double s = std::sqrt(trace + 1.0) * 2.0;
    return {0.25 * s, (m21 - m12) / s, (m02 - m20) / s, (m10 - m01) / s};
  }
  if (m00 > m11 && m00 > m22) {
    const double s = std::sqrt(1.0 + m00 - m11 - m22) * 2.0;
    return {(m21 - m12) / s, 0.25 * s, (m01 + m10) / s, (m02 + m20) / s};
  }
  if (m11 > m22) {
    const double s = std::sqrt(1.0 + m11 - m00 - m22) * 2.0;
    return {(m02 - m20) / s, (m01 + m10) / s, 0.25 * s, (m12 + m21) / s};
  }
  const double s = std::sqrt(1.0 + m22 - m00 - m11) * 2.0;
  return {(m10 - m01) / s, (m02 + m20) / s, (m12 + m21) / s, 0.25 * s};
}

UnitQuat UnitQuat::from_to(const Vec3& from, const Vec3& to) {
  const Vec3 a = from.normalized();
  const Vec3 b = to.normalized();
  const double c = a.dot(b);
  if (c < -1.0 + 1e-12) {
    // Antiparallel: rotate 180 degrees about any axis orthogonal to a.
    Vec3 ortho = std::abs(a.x) < 0.9 ? a.cross({1, 0, 0}) : a.cross({0, 1, 0});
    return from_axis_angle(ortho, 180.0);
  }
  const Vec3 axis = a.cross(b);
  return {1.0 + c, axis.x, axis.y, axis.z};
}

Vec3 UnitQuat::rotate(const Vec3& v) const {
  const Vec3 q{x_, y_, z_};
  const Vec3 t = q.cross(v) * 2.0;
  return v + t * w_ + q.cross(t);
}

UnitQuat UnitQuat::conjugate() const {
  UnitQuat r;
  r.w_ = w_;
  r.x_ = -x_;
  r.y_ = -y_;
  r.z_ = -z_;
  return r;
}

UnitQuat UnitQuat::operator*(const UnitQuat& o) const {
  return {w_ * o.w_ - x_ * o.x_ - y_ * o.y_ - z_ * o.z_,
          w_ * o.x_ + x_ * o.w_ + y_ * o.z_ - z_ * o.y_,
          w_ * o.y_ - x_ * o.z_ + y_ * o.w_ + z_ * o.x_,
          w_ * o.z_ + x_ * o.y_ - y_ * o.x_ + z_ * o.w_};
}

UnitQuat UnitQuat::slerp(const UnitQuat& a, const UnitQuat& b, double s) {
  double bw = b.w_, bx = b.x_, by = b.y_, bz = b.z_;
  double c = a.w_ * bw + a.x_ * bx + a.y_ * by + a.z_ * bz;
  if (c < 0.0) {
    c = -c;
    bw = -bw;
    bx = -bx;
    by = -by;
    bz = -bz;
  }
  double ka = 1.0 - s, kb = s;
  if (c < 1.0 - 1e-9) {
    const double theta = std::acos(std::min(1.0, c));
    const double st = std::sin(theta);
    ka = std::sin((1.0 - s) * theta) / st;
    kb = std::sin(s * theta) / st;
  }
  return {ka * a.w_ + kb * bw, ka * a.x_ + kb * bx, ka * a.y_ + kb * by, ka * a.z_ + kb * bz};
}

bool Pose::finite() const {
  return position.finite() && std::isfinite(orientation.w()) && std::isfinite(orientation.x()) &&
         std::isfinite(orientation.y()) && std::isfinite(orientation.z());
}

void NeedleModel::validate() const {
  if (!(radius > 0.0)) fail(ErrorCode::InvalidArgument, "needle radius must be positive");
  if (!(span > 0.0 && span <= 360.0)) fail(ErrorCode::InvalidArgument, "needle span must be in (0, 360]");
  if (span < 165.0) fail(ErrorCode::InvalidArgument, "needle span must cover the 135-165 degree grasp range");
}

Vec3 ArcPath::point_at(double angle_deg) const {
  const double a = deg2rad(angle_deg);
  return center + (ref_axis * std::cos(a) + in_plane_y() * std::sin(a)) * radius;
}

Vec3 needle_point(const Pose& pose, const NeedleModel& model, double theta_deg) {
  if (!(theta_deg >= 0.0 && theta_deg <= model.span))
    fail(ErrorCode::Domain, "needle angle " + std::to_string(theta_deg) + " outside [0, span]");
  const double t = deg2rad(theta_deg);
  return pose.transform({model.radius * std::cos(t), model.radius * std::sin(t), 0.0});
}

Vec3 needle_tangent(const Pose& pose, const NeedleModel& model, double theta_deg) {
  if (!(theta_deg >= 0.0 && theta_deg <= model.span))
    fail(ErrorCode::Domain, "needle angle outside [0, span]");
  const double t = deg2rad(theta_deg);
  return pose.orientation.rotate({-std::sin(t), std::cos(t), 0.0});
}

Vec3 needle_plane_normal(const Pose& pose) { return pose.axis_z(); }

ArcPath chord_arc(const Vec3& entry, const Vec3& exit, double radius, const Vec3& surface_normal) {
  if (!(radius > 0.0)) fail(ErrorCode::InvalidArgument, "arc radius must be positive");
  const Vec3 chord = exit - entry;
  const double d = chord.norm();
  if (!(d > 1e-12)) fail(ErrorCode::Domain, "degenerate targets: entry and exit coincide");
  if (d > 2.0 * radius * (1.0 + 1e-12)) fail(ErrorCode::Domain, "no arc: chord exceeds needle diameter");
  const Vec3 u = chord / d;
  const Vec3 n = (surface_normal - u * surface_normal.dot(u)).normalized();
  const double half = 0.5 * d;
  const double h = std::sqrt(std::max(0.0, radius * radius - half * half));

  ArcPath arc;
  arc.center = entry + u * half + n * h;
  arc.radius = radius;
  arc.ref_axis = u;
  arc.plane_normal = u.cross(n);
  arc.start_angle = rad2deg(std::atan2(-h, -half));
  arc.end_angle = rad2deg(std::atan2(-h, half));
  arc.drive_direction = 1;
  return arc;
}

ArcDeviation arc_deviation(const Vec3& p, const ArcPath& arc) {
  const Vec3 rel = p - arc.center;
  const double signed_dist = rel.dot(arc.plane_normal);
  const Vec3 in_plane = rel - arc.plane_normal * signed_dist;
  const double rho = in_plane.norm();
  ArcDeviation dev;
  dev.out_plane = std::abs(signed_dist);
  dev.in_plane = std::abs(rho - arc.radius);
  dev.arc_angle = rho < 1e-12 ? arc.start_angle
                              : rad2deg(std::atan2(in_plane.dot(arc.in_plane_y()), in_plane.dot(arc.ref_axis)));
  return dev;
}

NeedleProjection project_on_needle(const Vec3& p, const Pose& pose, const NeedleModel& model) {
  const Vec3 local = pose.inverse_transform(p);
  double phi = rad2deg(std::atan2(local.y, local.x));
  if (phi < 0.0) phi += 360.0;
  double theta = phi;
  if (phi > model.span) {
    const double d_tip = distance(p, needle_point(pose, model, 0.0));
    const double d_tail = distance(p, needle_point(pose, model, model.span));
    theta = d_tip <= d_tail ? 0.0 : model.span;
  }
  return {theta, distance(p, needle_point(pose, model, theta))};
}

double angle_on_needle(const Vec3& grasp_point, const Pose& pose, const NeedleModel& model, double tolerance) {
  const auto proj = project_on_needle(grasp_point, pose, model);
  if (proj.distance > tolerance + 1e-9) fail(ErrorCode::Domain, "point is not on the needle");
  return proj.theta;
}

double orientation_deviation(const Vec3& gripper_axis, const Vec3& plane_normal) {
  const double na = gripper_axis.norm();
  const double nb = plane_normal.norm();
  if (!(na > 0.0) || !(nb > 0.0)) fail(ErrorCode::Domain, "orientation deviation of a zero-length axis");
  const double c = std::min(1.0, std::abs(gripper_axis.dot(plane_normal)) / (na * nb));
  return rad2deg(std::acos(c));
}

Pose needle_pose_on_arc(const ArcPath& arc, double tip_angle_deg) {
  const double a = deg2rad(tip_angle_deg);
  const Vec3 e1 = arc.ref_axis;
  const Vec3 e2 = arc.in_plane_y();
  const Vec3 local_x = e1 * std::cos(a) + e2 * std::sin(a);
  const Vec3 local_y = e1 * std::sin(a) - e2 * std::cos(a);
  const Vec3 local_z = -arc.plane_normal;
  return {arc.center, UnitQuat::from_basis(local_x, local_y, local_z)};
}

}  // namespace vcoach::geometry
