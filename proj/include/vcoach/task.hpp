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

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "vcoach/geometry.hpp"

namespace vcoach::task {

using geometry::NeedleModel;
using geometry::Pose;
using geometry::Vec3;

enum class Side : int { Left = 0, Right = 1 };
inline constexpr std::array<Side, 2> kSides{Side::Left, Side::Right};
inline constexpr int index_of(Side s) { return static_cast<int>(s); }
inline constexpr Side other(Side s) { return s == Side::Left ? Side::Right : Side::Left; }

enum class IconId : int { Help = 0, Video = 1, Dismiss = 2 };
inline constexpr std::array<IconId, 3> kIcons{IconId::Help, IconId::Video, IconId::Dismiss};

// Jaw thresholds: a grasp starts when the jaw closes below kJawClose and ends
// when it opens above kJawOpen.
inline constexpr double kJawClose = 0.2;
inline constexpr double kJawOpen = 0.4;
// The needle waits this many degrees of arc ahead of the entry target at the
// start of a segment.
inline constexpr double kStagingLead = 30.0;

struct TaskConfig {
  NeedleModel needle{6.0, 180.0};
  double inner_radius = 15.0;
  double outer_radius = 25.0;
  int n_pairs = 8;
  Vec3 surface_normal{0, 0, 1};
  double tick_rate = 50.0;
  double pierce_tolerance = 2.0;
  double force_threshold = 1.5;
  double stiffness_tissue = 0.5;
  double stiffness_contact = 2.0;
  std::array<Vec3, 3> icons{Vec3{-45, 45, 20}, Vec3{45, 45, 20}, Vec3{45, -45, 20}};  // help, video, dismiss
  double icon_proximity = 5.0;
  // Direction from the tip up toward each instrument's base, fixed by the setup.
  std::array<Vec3, 2> base_direction{Vec3{-0.7071067811865476, 0, 0.7071067811865476},
                                     Vec3{0.7071067811865476, 0, 0.7071067811865476}};
  std::array<Vec3, 2> rest_position{Vec3{-30, 0, 30}, Vec3{30, 0, 30}};
  Vec3 camera_forward{0, 0.6, -0.8};
  double shaft_length = 10.0;

  void validate() const;
  bool operator==(const TaskConfig&) const = default;
};

TaskConfig default_task_config();

struct TargetPair {
  int index = 0;
  Vec3 entry;
  Vec3 exit;
  double azimuth = 0.0;  // degrees
};

TargetPair target_pair(const TaskConfig& config, int index);
std::vector<TargetPair> target_pairs(const TaskConfig& config);
geometry::ArcPath ideal_arc(const TaskConfig& config, int index);
Pose staging_needle_pose(const TaskConfig& config, int index);

struct Instrument {
  Side side = Side::Left;
  Pose tip_pose;
  double jaw = 1.0;
  Vec3 base_direction;
};

struct InstrumentCommand {
  Pose pose;
  double jaw = 1.0;
  bool operator==(const InstrumentCommand&) const = default;
};

struct InputTick {
  int64_t tick = 0;
  std::array<InstrumentCommand, 2> instruments;
  std::array<Vec3, 2> master;
  bool operator==(const InputTick&) const = default;
};

enum class TargetRole { Entry, Exit };

struct TargetRef {
  int index = 0;
  TargetRole role = TargetRole::Entry;
  bool operator==(const TargetRef&) const = default;
};

struct Grasp {
  Side side = Side::Left;
  double theta = 0.0;            // degrees from the tip
  double orientation_dev = 0.0;  // degrees
  Pose offset;                   // needle pose in the tool frame
};

// A hole currently occupied by the needle.
struct Hole {
  std::optional<TargetRef> target;
  Vec3 location;
  Vec3 lateral_normal;  // normal of the vertical pierce plane
};

enum class ForceSource : int { InstrumentLeft = 0, InstrumentRight = 1, NeedleTissue = 2 };

struct ContactForces {
  std::array<double, 2> instrument_object{0.0, 0.0};
  double needle_tissue = 0.0;
  double of(ForceSource s) const {
    return s == ForceSource::NeedleTissue ? needle_tissue : instrument_object[static_cast<int>(s)];
  }
};

struct WorldState {
  int64_t tick = -1;
  std::array<Instrument, 2> instruments;
  Pose needle_pose;
  std::optional<Grasp> grasp;
  std::vector<Hole> pierce_set;
  std::array<Vec3, 2> master_positions;

  // Detector memory carried between ticks.
  bool tip_below = false;
  bool tail_below = false;
  bool any_below = false;
  std::array<bool, 3> force_exceeded{false, false, false};
  std::array<std::array<bool, 3>, 2> icon_inside{};
};

WorldState initial_world(const TaskConfig& config);

enum class SimEventKind {
  GraspStart,
  GraspEnd,
  Pierce,
  TipExit,
  TailExit,
  NeedleFree,
  IconActivated,
  ForceExceedStart,
  ForceExceedEnd,
};

// Flat event record; only the fields relevant to `kind` are meaningful.
struct SimEvent {
  SimEventKind kind = SimEventKind::NeedleFree;
  int64_t tick = 0;
  Side side = Side::Left;          // grasp, icon
  double theta = 0.0;              // GraspStart
  double orientation_dev = 0.0;    // GraspStart
  std::optional<TargetRef> target; // crossings; empty = off-target
  Vec3 location;                   // crossings
  bool upward = false;             // TailExit direction
  IconId icon = IconId::Help;      // IconActivated
  ForceSource source = ForceSource::NeedleTissue;  // force events
  double force = 0.0;              // force events

  bool operator==(const SimEvent&) const = default;
};

struct StepResult {
  WorldState world;
  std::vector<SimEvent> events;
};

// Advances the world by one input tick.
StepResult step(const WorldState& world, const InputTick& input, const TaskConfig& config);
ContactForces compute_forces(const WorldState& world, const TaskConfig& config);

// Signed height above the tissue plane.
double surface_height(const Vec3& p, const TaskConfig& config);
std::vector<Vec3> needle_body_samples(const Pose& needle_pose, const NeedleModel& model);
std::optional<TargetRef> resolve_target(const Vec3& location, const TaskConfig& config);
Vec3 shaft_point(const Pose& tip_pose, const TaskConfig& config);

const char* to_string(SimEventKind k);
const char* to_string(Side s);
const char* to_string(IconId i);
const char* to_string(ForceSource s);
const char* to_string(TargetRole r);

}  // namespace vcoach::task
