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

#include "vcoach/task.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "vcoach/error.hpp"

namespace vcoach::task {

using geometry::UnitQuat;

void TaskConfig::validate() const {
  needle.validate();
  if (!(inner_radius > 0.0 && outer_radius > inner_radius))
    fail(ErrorCode::InvalidArgument, "target radii must satisfy outer > inner > 0");
  if (n_pairs < 1) fail(ErrorCode::InvalidArgument, "n_pairs must be at least 1");
  if (outer_radius - inner_radius > 2.0 * needle.radius)
    fail(ErrorCode::InvalidArgument, "target pairs must be drivable in one bite");
  if (!(tick_rate > 0.0)) fail(ErrorCode::InvalidArgument, "tick_rate must be positive");
  if (std::abs(surface_normal.norm() - 1.0) > 1e-9)
    fail(ErrorCode::InvalidArgument, "surface_normal must be unit length");
  if (!(pierce_tolerance > 0.0 && force_threshold > 0.0 && icon_proximity > 0.0))
    fail(ErrorCode::InvalidArgument, "tolerances and thresholds must be positive");
  if (stiffness_tissue < 0.0 || stiffness_contact < 0.0)
    fail(ErrorCode::InvalidArgument, "stiffness must be non-negative");
}

TaskConfig default_task_config() { return TaskConfig{}; }

TargetPair target_pair(const TaskConfig& config, int index) {
  if (index < 0 || index >= config.n_pairs) fail(ErrorCode::Internal, "unknown target index " + std::to_string(index));
  const double az = 90.0 - index * (360.0 / config.n_pairs);
  const double a = geometry::deg2rad(az);
  const Vec3 dir{std::cos(a), std::sin(a), 0.0};
  return {index, dir * config.inner_radius, dir * config.outer_radius, az};
}

std::vector<TargetPair> target_pairs(const TaskConfig& config) {
  std::vector<TargetPair> pairs;
  pairs.reserve(config.n_pairs);
  for (int i = 0; i < config.n_pairs; ++i) pairs.push_back(target_pair(config, i));
  return pairs;
}

geometry::ArcPath ideal_arc(const TaskConfig& config, int index) {
  const auto pair = target_pair(config, index);
  return geometry::chord_arc(pair.entry, pair.exit, config.needle.radius, config.surface_normal);
}

Pose staging_needle_pose(const TaskConfig& config, int index) {
  const auto arc = ideal_arc(config, index);
  return geometry::needle_pose_on_arc(arc, arc.start_angle - kStagingLead);
}

WorldState initial_world(const TaskConfig& config) {
  config.validate();
  WorldState w;
  for (Side s : kSides) {
    const int i = index_of(s);
    auto& inst = w.instruments[i];
    inst.side = s;
    inst.base_direction = config.base_direction[i];
    inst.tip_pose = {config.rest_position[i], UnitQuat::from_to({0, 0, 1}, config.base_direction[i])};
    inst.jaw = 1.0;
    w.master_positions[i] = config.rest_position[i] * 3.0;
  }
  w.needle_pose = staging_needle_pose(config, 0);
  return w;
}

double surface_height(const Vec3& p, const TaskConfig& config) { return p.dot(config.surface_normal); }

namespace {

// Unit-circle coordinates of the body sample angles, cached per model.
struct BodyTable {
  NeedleModel model{-1.0, -1.0};
  std::vector<double> c, s;
};

const BodyTable& body_table(const NeedleModel& model) {
  thread_local BodyTable table;
  if (!(table.model == model)) {
    const int n = static_cast<int>(std::ceil(model.span / 2.0)) + 1;
    table.c.resize(n);
    table.s.resize(n);
    for (int i = 0; i < n; ++i) {
      const double t = geometry::deg2rad(model.span * i / (n - 1));
      table.c[i] = std::cos(t);
      table.s[i] = std::sin(t);
    }
    table.model = model;
  }
  return table;
}

// Projection of each body sample onto `dir`, relative to `origin`.
template <class Fn>
void for_each_body_projection(const Pose& pose, const NeedleModel& model, const Vec3& origin, const Vec3& dir,
                              Fn&& fn) {
  const BodyTable& t = body_table(model);
  const double base = (pose.position - origin).dot(dir);
  const double a = model.radius * pose.axis_x().dot(dir);
  const double b = model.radius * pose.axis_y().dot(dir);
  for (std::size_t i = 0; i < t.c.size(); ++i) fn(base + a * t.c[i] + b * t.s[i]);
}

}  // namespace

std::vector<Vec3> needle_body_samples(const Pose& needle_pose, const NeedleModel& model) {
  const BodyTable& t = body_table(model);
  std::vector<Vec3> pts;
  pts.reserve(t.c.size());
  for (std::size_t i = 0; i < t.c.size(); ++i)
    pts.push_back(needle_pose.transform({model.radius * t.c[i], model.radius * t.s[i], 0.0}));
  return pts;
}

std::optional<TargetRef> resolve_target(const Vec3& location, const TaskConfig& config) {
  std::optional<TargetRef> best;
  double best_d = std::numeric_limits<double>::infinity();
  for (int i = 0; i < config.n_pairs; ++i) {
    const auto pair = target_pair(config, i);
    const double de = geometry::distance(location, pair.entry);
    const double dx = geometry::distance(location, pair.exit);
    if (de <= config.pierce_tolerance && de < best_d) {
      best_d = de;
      best = TargetRef{i, TargetRole::Entry};
    }
    if (dx <= config.pierce_tolerance && dx < best_d) {
      best_d = dx;
      best = TargetRef{i, TargetRole::Exit};
    }
  }
  return best;
}

Vec3 shaft_point(const Pose& tip_pose, const TaskConfig& config) {
  return tip_pose.transform({0, 0, config.shaft_length});
}

namespace {

Vec3 crossing_point(const Vec3& a, const Vec3& b, const TaskConfig& config) {
  const double ha = surface_height(a, config);
  const double hb = surface_height(b, config);
  const double denom = ha - hb;
  const double s = denom != 0.0 ? ha / denom : 0.0;
  const Vec3 p = a + (b - a) * s;
  return p - config.surface_normal * surface_height(p, config);
}

Vec3 lateral_normal(const Pose& needle_pose, const TaskConfig& config) {
  const Vec3 n = geometry::needle_plane_normal(needle_pose);
  const Vec3 horiz = n - config.surface_normal * n.dot(config.surface_normal);
  if (horiz.norm() < 1e-9) return n;
  return horiz.normalized();
}

SimEvent crossing_event(SimEventKind kind, int64_t tick, const Vec3& loc, const TaskConfig& config) {
  SimEvent e;
  e.kind = kind;
  e.tick = tick;
  e.location = loc;
  e.target = resolve_target(loc, config);
  return e;
}

}  // namespace

ContactForces compute_forces(const WorldState& world, const TaskConfig& config) {
  ContactForces f;
  for (Side s : kSides) {
    const int i = index_of(s);
    if (world.grasp && world.grasp->side == s) continue;
    const double h = surface_height(world.instruments[i].tip_pose.position, config);
    if (h < 0.0) f.instrument_object[i] = config.stiffness_contact * (-h);
  }
  if (!world.pierce_set.empty()) {
    const Hole& hole = world.pierce_set.front();
    // Heights and lateral offsets of the body samples, computed in one pass.
    const BodyTable& t = body_table(config.needle);
    const Pose& pose = world.needle_pose;
    const Vec3 ax = pose.axis_x() * config.needle.radius;
    const Vec3 ay = pose.axis_y() * config.needle.radius;
    const double h0 = surface_height(pose.position, config);
    const double ha = ax.dot(config.surface_normal), hb = ay.dot(config.surface_normal);
    const double l0 = (pose.position - hole.location).dot(hole.lateral_normal);
    const double la = ax.dot(hole.lateral_normal), lb = ay.dot(hole.lateral_normal);
    double sum = 0.0;
    int count = 0;
    for (std::size_t i = 0; i < t.c.size(); ++i) {
      if (h0 + ha * t.c[i] + hb * t.s[i] < 0.0) {
        sum += std::abs(l0 + la * t.c[i] + lb * t.s[i]);
        ++count;
      }
    }
    if (count > 0) f.needle_tissue = config.stiffness_tissue * (sum / count);
  }
  return f;
}

StepResult step(const WorldState& world, const InputTick& input, const TaskConfig& config) {
  if (input.tick <= world.tick)
    fail(ErrorCode::Protocol, "non-monotone tick " + std::to_string(input.tick) + " after " + std::to_string(world.tick));
  for (const auto& cmd : input.instruments)
    if (!cmd.pose.finite() || !std::isfinite(cmd.jaw)) fail(ErrorCode::InvalidArgument, "non-finite instrument input");
  for (const auto& m : input.master)
    if (!m.finite()) fail(ErrorCode::InvalidArgument, "non-finite master position");

  StepResult out{world, {}};
  WorldState& w = out.world;
  auto& events = out.events;
  const int64_t t = input.tick;
  w.tick = t;
  w.master_positions = input.master;

  std::array<double, 2> prev_jaw{};
  for (Side s : kSides) {
    const int i = index_of(s);
    prev_jaw[i] = w.instruments[i].jaw;
    w.instruments[i].tip_pose = input.instruments[i].pose;
    w.instruments[i].jaw = std::clamp(input.instruments[i].jaw, 0.0, 1.0);
  }

  // Grasp.
  if (w.grasp) {
    const int i = index_of(w.grasp->side);
    if (w.instruments[i].jaw > kJawOpen) {
      SimEvent e;
      e.kind = SimEventKind::GraspEnd;
      e.tick = t;
      e.side = w.grasp->side;
      e.theta = w.grasp->theta;
      events.push_back(e);
      w.grasp.reset();
    } else {
      w.needle_pose = w.instruments[i].tip_pose * w.grasp->offset;
    }
  } else {
    for (Side s : kSides) {
      const int i = index_of(s);
      const auto& inst = w.instruments[i];
      if (!(prev_jaw[i] >= kJawClose && inst.jaw < kJawClose)) continue;
      const auto proj = geometry::project_on_needle(inst.tip_pose.position, w.needle_pose, config.needle);
      if (proj.distance > geometry::kNeedleTubeTolerance + 1e-9) continue;
      Grasp g;
      g.side = s;
      g.theta = proj.theta;
      g.orientation_dev =
          geometry::orientation_deviation(inst.tip_pose.axis_z(), geometry::needle_plane_normal(w.needle_pose));
      g.offset = inst.tip_pose.inverse() * w.needle_pose;
      w.grasp = g;
      SimEvent e;
      e.kind = SimEventKind::GraspStart;
      e.tick = t;
      e.side = s;
      e.theta = g.theta;
      e.orientation_dev = g.orientation_dev;
      events.push_back(e);
      break;
    }
  }

  // Needle-surface crossings.
  const Vec3 prev_tip = geometry::needle_point(world.needle_pose, config.needle, 0.0);
  const Vec3 prev_tail = geometry::needle_point(world.needle_pose, config.needle, config.needle.span);
  const Vec3 tip = geometry::needle_point(w.needle_pose, config.needle, 0.0);
  const Vec3 tail = geometry::needle_point(w.needle_pose, config.needle, config.needle.span);
  const bool tip_below = surface_height(tip, config) < 0.0;
  const bool tail_below = surface_height(tail, config) < 0.0;
  bool any_below = false;
  if (surface_height(w.needle_pose.position, config) < config.needle.radius) {
    for_each_body_projection(w.needle_pose, config.needle, {}, config.surface_normal,
                             [&](double h) { any_below = any_below || h < 0.0; });
  }

  if (tip_below != w.tip_below) {
    const Vec3 loc = crossing_point(prev_tip, tip, config);
    auto e = crossing_event(tip_below ? SimEventKind::Pierce : SimEventKind::TipExit, t, loc, config);
    e.upward = !tip_below;
    events.push_back(e);
    w.pierce_set.push_back({e.target, loc, lateral_normal(w.needle_pose, config)});
  }
  if (tail_below != w.tail_below) {
    const Vec3 loc = crossing_point(prev_tail, tail, config);
    auto e = crossing_event(SimEventKind::TailExit, t, loc, config);
    e.upward = !tail_below;
    events.push_back(e);
  }
  if (w.any_below && !any_below) {
    SimEvent e;
    e.kind = SimEventKind::NeedleFree;
    e.tick = t;
    events.push_back(e);
    w.pierce_set.clear();
  }
  w.tip_below = tip_below;
  w.tail_below = tail_below;
  w.any_below = any_below;

  // Icons.
  for (Side s : kSides) {
    const int i = index_of(s);
    for (IconId icon : kIcons) {
      const int k = static_cast<int>(icon);
      const bool inside =
          geometry::distance(w.instruments[i].tip_pose.position, config.icons[k]) <= config.icon_proximity;
      if (inside && !w.icon_inside[i][k]) {
        SimEvent e;
        e.kind = SimEventKind::IconActivated;
        e.tick = t;
        e.side = s;
        e.icon = icon;
        events.push_back(e);
      }
      w.icon_inside[i][k] = inside;
    }
  }

  // Force threshold crossings.
  const auto forces = compute_forces(w, config);
  for (ForceSource src : {ForceSource::InstrumentLeft, ForceSource::InstrumentRight, ForceSource::NeedleTissue}) {
    const int k = static_cast<int>(src);
    const double f = forces.of(src);
    const bool exceeded = f > config.force_threshold;
    if (exceeded != w.force_exceeded[k]) {
      SimEvent e;
      e.kind = exceeded ? SimEventKind::ForceExceedStart : SimEventKind::ForceExceedEnd;
      e.tick = t;
      e.source = src;
      e.force = f;
      events.push_back(e);
      w.force_exceeded[k] = exceeded;
    }
  }
  return out;
}

const char* to_string(SimEventKind k) {
  switch (k) {
    case SimEventKind::GraspStart: return "GraspStart";
    case SimEventKind::GraspEnd: return "GraspEnd";
    case SimEventKind::Pierce: return "Pierce";
    case SimEventKind::TipExit: return "TipExit";
    case SimEventKind::TailExit: return "TailExit";
    case SimEventKind::NeedleFree: return "NeedleFree";
    case SimEventKind::IconActivated: return "IconActivated";
    case SimEventKind::ForceExceedStart: return "ForceExceedStart";
    case SimEventKind::ForceExceedEnd: return "ForceExceedEnd";
  }
  return "?";
}

const char* to_string(Side s) { return s == Side::Left ? "left" : "right"; }

const char* to_string(IconId i) {
  switch (i) {
    case IconId::Help: return "help";
    case IconId::Video: return "video";
    case IconId::Dismiss: return "dismiss";
  }
  return "?";
}

const char* to_string(ForceSource s) {
  switch (s) {
    case ForceSource::InstrumentLeft: return "instrument_left";
    case ForceSource::InstrumentRight: return "instrument_right";
    case ForceSource::NeedleTissue: return "needle_tissue";
  }
  return "?";
}

const char* to_string(TargetRole r) { return r == TargetRole::Entry ? "entry" : "exit"; }

}  // namespace vcoach::task
