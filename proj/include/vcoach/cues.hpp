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

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vcoach/cue_types.hpp"
#include "vcoach/geometry.hpp"
#include "vcoach/record.hpp"
#include "vcoach/task.hpp"
#include "vcoach/tpm.hpp"

namespace vcoach::cues {

using geometry::ArcPath;
using geometry::Pose;
using geometry::Vec3;

enum class VideoPlacement { SideView, InSitu };
const char* to_string(VideoPlacement p);

// Angle (degrees) between each side's base direction and the needle-plane
// normal the ideal grasp requires at the current pair.
struct InstrumentScores {
  double left = 0.0;
  double right = 0.0;
};

inline constexpr double kHandednessMargin = 10.0;

InstrumentScores instrument_scores(const tpm::SegmentContext& context, const task::TaskConfig& config);
task::Side ideal_instrument(const tpm::SegmentContext& context, const task::TaskConfig& config,
                            task::Side handedness);
// Decision rule on precomputed scores.
task::Side choose_instrument(const InstrumentScores& scores, task::Side handedness);

inline constexpr double kGraspRangeLo = 135.0;
inline constexpr double kGraspRangeHi = 165.0;
inline constexpr double kGraspRangeMid = 150.0;
inline constexpr double kFlashPeriod = 0.5;  // s

struct GraspSpheres {
  Vec3 low;   // at 135 degrees
  Vec3 high;  // at 165 degrees
  double flash_period = kFlashPeriod;
};

GraspSpheres grasp_position_cue(const Pose& needle_pose, const geometry::NeedleModel& model);

struct GhostRamp {
  double full_angle = 30.0;     // degrees at which alpha saturates
  double full_distance = 10.0;  // mm at which alpha saturates
  double hide_angle = 3.0;
  double hide_distance = 1.0;
};

struct GhostCue {
  Pose ghost;
  double alpha = 0.0;
  double angular_error = 0.0;     // degrees
  double positional_error = 0.0;  // mm
};

GhostCue grasp_orientation_cue(const Pose& needle_pose, const geometry::NeedleModel& model, const Pose& gripper,
                               const GhostRamp& ramp = {});

ArcPath ideal_path_cue(const tpm::SegmentContext& context);

struct TrajectorySample {
  int64_t tick = 0;
  Vec3 position;
};

inline constexpr double kPlaybackLift = 30.0;     // mm
inline constexpr double kPlaybackDuration = 10.0;  // s

struct PlaybackCue {
  std::vector<Vec3> polyline;
  std::vector<double> schedule;  // seconds from the first sample
  ArcPath ideal;
};

// Lifts the pass above the surface and turns the ideal-arc plane toward the
// camera. Throws Domain on an empty trajectory.
PlaybackCue playback_cue(std::span<const TrajectorySample> trajectory, const Vec3& camera_forward,
                         const Vec3& surface_normal, const ArcPath& ideal, double tick_rate);

struct CueLifecycle {
  CueSet visible;
  std::optional<int64_t> playback_deadline;
  VideoPlacement video_placement = VideoPlacement::SideView;
  bool operator==(const CueLifecycle&) const = default;
};

struct CueUpdate {
  CueLifecycle lifecycle;
  std::vector<CueEvent> events;
};

// One tick of the cue state machine. `authorized` comes from the coach.
CueUpdate update_cues(const CueLifecycle& lifecycle, const tpm::TaskProgress& progress,
                      std::span<const tpm::TpmEvent> tpm_events, std::span<const task::SimEvent> sim_events,
                      CueSet authorized, int64_t tick, double tick_rate);

// Renderable cue state for the wire protocol.
struct CueDescriptor {
  CueKind kind = CueKind::VideoDemo;
  bool visible = false;
  std::optional<task::Side> instrument;  // IdealInstrument
  std::vector<Vec3> points;              // spheres, instrument marker, playback polyline
  std::optional<Pose> ghost;             // GraspOrientation
  double alpha = 0.0;
  std::optional<ArcPath> arc;            // IdealDrivePath, playback ideal
  std::vector<double> schedule;          // playback timing
  double flash_period = 0.0;
  std::string clip_id;                   // VideoDemo
  VideoPlacement placement = VideoPlacement::SideView;
  std::optional<std::string> prompt;
};

struct DescribeInput {
  const CueLifecycle* lifecycle = nullptr;
  const task::WorldState* world = nullptr;
  const tpm::TaskProgress* progress = nullptr;
  const task::TaskConfig* config = nullptr;
  task::Side handedness = task::Side::Right;
  const PlaybackCue* playback = nullptr;
  std::vector<std::pair<CueKind, std::string>> prompts;
};

// Visible cues only, in kind order.
std::vector<CueDescriptor> describe(const DescribeInput& in);

}  // namespace vcoach::cues
