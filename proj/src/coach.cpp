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

#include "vcoach/coach.hpp"

#include <cstdio>

#include "vcoach/error.hpp"

namespace vcoach::coach {

using cues::CueKind;

const char* to_string(Mode m) {
  switch (m) {
    case Mode::Teach: return "teach";
    case Mode::Metrics: return "metrics";
    case Mode::User: return "user";
    case Mode::None: return "none";
  }
  return "?";
}

std::optional<Mode> mode_from_string(std::string_view s) {
  for (Mode m : {Mode::Teach, Mode::Metrics, Mode::User, Mode::None})
    if (s == to_string(m)) return m;
  return std::nullopt;
}

const char* to_string(Trigger t) {
  switch (t) {
    case Trigger::GraspPositionDev: return "grasp_position_dev";
    case Trigger::GraspOrientationDev: return "grasp_orientation_dev";
    case Trigger::InPlaneDev: return "in_plane_dev";
    case Trigger::OutPlaneDev: return "out_plane_dev";
    case Trigger::SegmentTime: return "segment_time";
    case Trigger::ExcessPierces: return "excess_pierces";
  }
  return "?";
}

std::optional<Trigger> trigger_from_string(std::string_view s) {
  for (int i = 0; i < kTriggerCount; ++i)
    if (s == to_string(static_cast<Trigger>(i))) return static_cast<Trigger>(i);
  return std::nullopt;
}

const ThresholdEntry& ThresholdTable::lookup(Trigger t) const {
  for (const auto& e : entries)
    if (e.trigger == t) return e;
  fail(ErrorCode::NotFound, std::string("no threshold for ") + to_string(t));
}

double ThresholdTable::lookup(CueKind cue) const {
  for (const auto& e : entries)
    if (e.cue == cue) return e.threshold;
  fail(ErrorCode::NotFound, std::string("no threshold mapped to cue ") + cues::to_string(cue));
}

void ThresholdTable::validate() const {
  std::array<bool, kTriggerCount> seen{};
  for (const auto& e : entries) {
    const int i = static_cast<int>(e.trigger);
    if (i < 0 || i >= kTriggerCount || seen[i]) fail(ErrorCode::InvalidArgument, "threshold table: duplicate trigger");
    seen[i] = true;
    if (!(e.threshold > 0.0))
      fail(ErrorCode::InvalidArgument, std::string("threshold must be positive: ") + to_string(e.trigger));
  }
}

ThresholdTable default_thresholds() {
  return {{{
      {Trigger::GraspPositionDev, 10.0, CueKind::GraspPosition,
       "Grasp position was {value} deg from the ideal point (limit {threshold} deg)."},
      {Trigger::GraspOrientationDev, 15.0, CueKind::GraspOrientation,
       "Grasp orientation was off by {value} deg (limit {threshold} deg)."},
      {Trigger::InPlaneDev, 1.0, CueKind::IdealDrivePath,
       "Needle path strayed {value} mm in the needle plane (limit {threshold} mm)."},
      {Trigger::OutPlaneDev, 1.0, CueKind::TrajectoryPlayback,
       "Needle path twisted {value} mm out of the needle plane (limit {threshold} mm)."},
      {Trigger::SegmentTime, 30.0, CueKind::VideoDemo, "The last pass took {value} s (limit {threshold} s)."},
      {Trigger::ExcessPierces, 1.0, CueKind::IdealInstrument,
       "{value} extra pierces on the last pass (limit {threshold})."},
  }}};
}

std::optional<double> trigger_value(const metrics::SegmentMetrics& m, Trigger t) {
  switch (t) {
    case Trigger::GraspPositionDev: return m.grasp_position_dev;
    case Trigger::GraspOrientationDev: return m.grasp_orientation_dev;
    case Trigger::InPlaneDev: return m.in_plane_dev;
    case Trigger::OutPlaneDev: return m.out_plane_dev;
    case Trigger::SegmentTime: return m.time;
    case Trigger::ExcessPierces: return static_cast<double>(m.excess_pierces);
  }
  return std::nullopt;
}

namespace {

std::string fmt_number(double v) {
  char buf[32];
  if (v == static_cast<double>(static_cast<long long>(v)))
    std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(v));
  else
    std::snprintf(buf, sizeof buf, "%.1f", v);
  return buf;
}

void replace_all(std::string& s, std::string_view key, const std::string& value) {
  for (std::size_t pos = s.find(key); pos != std::string::npos; pos = s.find(key, pos + value.size()))
    s.replace(pos, key.size(), value);
}

}  // namespace

std::string render_prompt(const ThresholdEntry& entry, double value) {
  std::string s = entry.prompt;
  replace_all(s, "{value}", fmt_number(value));
  replace_all(s, "{threshold}", fmt_number(entry.threshold));
  return s;
}

Intervention decide(Mode mode, const tpm::TaskProgress& progress,
                    const std::optional<metrics::SegmentMetrics>& last_segment_metrics, bool help_requested,
                    const ThresholdTable& thresholds) {
  Intervention out;
  switch (mode) {
    case Mode::Teach:
      out.authorized = cues::CueSet::all();
      break;
    case Mode::User:
      if (help_requested) out.authorized = cues::CueSet::all();
      break;
    case Mode::None:
      break;
    case Mode::Metrics: {
      if (!last_segment_metrics) {
        if (progress.segment_index >= 1)
          fail(ErrorCode::InvalidArgument, "metrics mode needs the previous segment's metrics");
        break;
      }
      for (const auto& e : thresholds.entries) {
        const auto v = trigger_value(*last_segment_metrics, e.trigger);
        if (!v || !(*v > e.threshold)) continue;
        out.authorized.add(e.cue);
        out.causes.push_back({e.trigger, *v, e.threshold});
        out.prompts.emplace_back(e.cue, render_prompt(e, *v));
      }
      break;
    }
  }
  return out;
}

}  // namespace vcoach::coach
