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

#include "vcoach/cues.hpp"

#include <algorithm>
#include <cmath>

#include "vcoach/error.hpp"

namespace vcoach::cues {

using geometry::UnitQuat;
using task::Side;

const char* to_string(VideoPlacement p) { return p == VideoPlacement::SideView ? "side_view" : "in_situ"; }

namespace {

double angle_between(const Vec3& a, const Vec3& b) {
  const double c = a.normalized().dot(b.normalized());
  return geometry::rad2deg(std::acos(std::clamp(c, -1.0, 1.0)));
}

}  // namespace

InstrumentScores instrument_scores(const tpm::SegmentContext& context, const task::TaskConfig& config) {
  // The needle normal when lying on the ideal arc (see needle_pose_on_arc).
  const Vec3 approach = -context.ideal_arc.plane_normal;
  return {angle_between(config.base_direction[0], approach), angle_between(config.base_direction[1], approach)};
}

Side choose_instrument(const InstrumentScores& scores, Side handedness) {
  if (std::abs(scores.left - scores.right) < kHandednessMargin) return handedness;
  return scores.left < scores.right ? Side::Left : Side::Right;
}

Side ideal_instrument(const tpm::SegmentContext& context, const task::TaskConfig& config, Side handedness) {
  return choose_instrument(instrument_scores(context, config), handedness);
}

GraspSpheres grasp_position_cue(const Pose& needle_pose, const geometry::NeedleModel& model) {
  // The range constants sit inside any valid span (>= 165); evaluate on the full circle.
  const auto at = [&](double deg) {
    const double a = geometry::deg2rad(deg);
    return needle_pose.transform({model.radius * std::cos(a), model.radius * std::sin(a), 0.0});
  };
  return {at(kGraspRangeLo), at(kGraspRangeHi), kFlashPeriod};
}

GhostCue grasp_orientation_cue(const Pose& needle_pose, const geometry::NeedleModel& model, const Pose& gripper,
                               const GhostRamp& ramp) {
  const double a = geometry::deg2rad(kGraspRangeMid);
  const Vec3 pos = needle_pose.transform({model.radius * std::cos(a), model.radius * std::sin(a), 0.0});
  const Vec3 z = needle_pose.axis_z();
  const Vec3 x = needle_pose.orientation.rotate({-std::sin(a), std::cos(a), 0.0});
  GhostCue cue;
  cue.ghost = {pos, UnitQuat::from_basis(x, z.cross(x), z)};
  cue.angular_error = geometry::orientation_deviation(gripper.axis_z(), z);
  cue.positional_error = geometry::distance(gripper.position, pos);
  if (cue.angular_error < ramp.hide_angle && cue.positional_error < ramp.hide_distance) {
    cue.alpha = 0.0;
  } else {
    cue.alpha = std::clamp(std::max(cue.angular_error / ramp.full_angle, cue.positional_error / ramp.full_distance),
                           0.0, 1.0);
  }
  return cue;
}

ArcPath ideal_path_cue(const tpm::SegmentContext& context) { return context.ideal_arc; }

PlaybackCue playback_cue(std::span<const TrajectorySample> trajectory, const Vec3& camera_forward,
                         const Vec3& surface_normal, const ArcPath& ideal, double tick_rate) {
  if (trajectory.empty()) fail(ErrorCode::Domain, "no playback: empty trajectory");
  if (!(tick_rate > 0.0)) fail(ErrorCode::InvalidArgument, "tick_rate must be positive");
  const Vec3 lift = surface_normal.normalized() * kPlaybackLift;
  const Vec3 toward_camera = -camera_forward.normalized();

  Vec3 centroid;
  for (const auto& s : trajectory) centroid += s.position;
  centroid = centroid / static_cast<double>(trajectory.size()) + lift;

  Vec3 facing = ideal.plane_normal;
  if (facing.dot(toward_camera) < 0.0) facing = -facing;
  const UnitQuat rot = UnitQuat::from_to(facing, toward_camera);
  const auto place = [&](const Vec3& p) { return centroid + rot.rotate(p + lift - centroid); };

  PlaybackCue out;
  out.polyline.reserve(trajectory.size());
  out.schedule.reserve(trajectory.size());
  const int64_t t0 = trajectory.front().tick;
  for (const auto& s : trajectory) {
    out.polyline.push_back(place(s.position));
    out.schedule.push_back(static_cast<double>(s.tick - t0) / tick_rate);
  }
  out.ideal = ideal;
  out.ideal.center = place(ideal.center);
  out.ideal.plane_normal = rot.rotate(ideal.plane_normal);
  out.ideal.ref_axis = rot.rotate(ideal.ref_axis);
  return out;
}

CueUpdate update_cues(const CueLifecycle& lifecycle, const tpm::TaskProgress& progress,
                      std::span<const tpm::TpmEvent> tpm_events, std::span<const task::SimEvent> sim_events,
                      CueSet authorized, int64_t tick, double tick_rate) {
  CueUpdate out;
  CueLifecycle& next = out.lifecycle;
  next = lifecycle;

  bool playback = lifecycle.visible.has(CueKind::TrajectoryPlayback);
  if (playback && next.playback_deadline && tick >= *next.playback_deadline) playback = false;

  for (const auto& e : tpm_events) {
    if (e.kind == tpm::TpmEventKind::Transition && e.from == tpm::Topo::S0 && e.to == tpm::Topo::S1)
      playback = false;
    if (e.kind == tpm::TpmEventKind::SegmentComplete && authorized.has(CueKind::TrajectoryPlayback)) {
      playback = true;
      next.playback_deadline = tick + static_cast<int64_t>(std::llround(kPlaybackDuration * tick_rate));
    }
  }
  for (const auto& e : sim_events) {
    if (e.kind != task::SimEventKind::IconActivated) continue;
    if (e.icon == task::IconId::Dismiss) playback = false;
    if (e.icon == task::IconId::Video)
      next.video_placement = next.video_placement == VideoPlacement::SideView ? VideoPlacement::InSitu
                                                                             : VideoPlacement::SideView;
  }
  if (!playback) next.playback_deadline.reset();

  const bool setup = progress.phase == tpm::Phase::Setup || progress.phase == tpm::Phase::Withdrawn;
  const bool driving = progress.phase == tpm::Phase::Driving;
  CueSet want;
  for (CueKind k : {CueKind::IdealInstrument, CueKind::GraspPosition, CueKind::GraspOrientation})
    if (setup && !playback && authorized.has(k)) want.add(k);
  if (authorized.has(CueKind::IdealDrivePath) && ((setup && !playback) || driving)) want.add(CueKind::IdealDrivePath);
  if (playback) want.add(CueKind::TrajectoryPlayback);
  if (authorized.has(CueKind::VideoDemo)) want.add(CueKind::VideoDemo);

  for (CueKind k : kAllCues) {
    const bool was = lifecycle.visible.has(k), is = want.has(k);
    if (was != is) out.events.push_back({tick, k, is});
  }
  next.visible = want;
  return out;
}

std::vector<CueDescriptor> describe(const DescribeInput& in) {
  std::vector<CueDescriptor> out;
  if (!in.lifecycle || !in.world || !in.progress || !in.config)
    fail(ErrorCode::InvalidArgument, "describe: missing input");
  const auto& cfg = *in.config;
  const auto& world = *in.world;
  const bool active = in.progress->phase != tpm::Phase::Complete && in.progress->segment_index < cfg.n_pairs;

  std::optional<tpm::SegmentContext> ctx;
  if (active) ctx = tpm::current_context(*in.progress, cfg);
  std::optional<Side> ideal;
  if (ctx) ideal = ideal_instrument(*ctx, cfg, in.handedness);

  for (CueKind k : kAllCues) {
    if (!in.lifecycle->visible.has(k)) continue;
    CueDescriptor d;
    d.kind = k;
    d.visible = true;
    switch (k) {
      case CueKind::IdealInstrument:
        if (!ideal) continue;
        d.instrument = ideal;
        d.points.push_back(world.instruments[task::index_of(*ideal)].tip_pose.position);
        break;
      case CueKind::GraspPosition: {
        const auto s = grasp_position_cue(world.needle_pose, cfg.needle);
        d.points = {s.low, s.high};
        d.flash_period = s.flash_period;
        break;
      }
      case CueKind::GraspOrientation: {
        if (!ideal) continue;
        const auto g = grasp_orientation_cue(world.needle_pose, cfg.needle,
                                             world.instruments[task::index_of(*ideal)].tip_pose);
        d.ghost = g.ghost;
        d.alpha = g.alpha;
        break;
      }
      case CueKind::IdealDrivePath:
        if (!ctx) continue;
        d.arc = ideal_path_cue(*ctx);
        break;
      case CueKind::TrajectoryPlayback:
        if (!in.playback) continue;
        d.points = in.playback->polyline;
        d.schedule = in.playback->schedule;
        d.arc = in.playback->ideal;
        break;
      case CueKind::VideoDemo:
        d.clip_id = "segment_" + std::to_string(std::min(in.progress->segment_index, cfg.n_pairs - 1));
        d.placement = in.lifecycle->video_placement;
        break;
    }
    for (const auto& [kind, text] : in.prompts)
      if (kind == k) d.prompt = text;
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace vcoach::cues
