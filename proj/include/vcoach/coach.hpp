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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vcoach/cue_types.hpp"
#include "vcoach/metrics.hpp"
#include "vcoach/tpm.hpp"

// Coaching-mode policies: which cues the trainee sees, and why.
namespace vcoach::coach {

enum class Mode { Teach, Metrics, User, None };
const char* to_string(Mode m);
std::optional<Mode> mode_from_string(std::string_view s);

// Segment metrics that can trigger a Metrics-mode intervention.
enum class Trigger : int { GraspPositionDev, GraspOrientationDev, InPlaneDev, OutPlaneDev, SegmentTime, ExcessPierces };
inline constexpr int kTriggerCount = 6;
const char* to_string(Trigger t);
std::optional<Trigger> trigger_from_string(std::string_view s);

struct ThresholdEntry {
  Trigger trigger = Trigger::GraspPositionDev;
  double threshold = 0.0;
  cues::CueKind cue = cues::CueKind::GraspPosition;
  // "{value}" and "{threshold}" are substituted.
  std::string prompt;
  bool operator==(const ThresholdEntry&) const = default;
};

struct ThresholdTable {
  std::array<ThresholdEntry, kTriggerCount> entries;

  const ThresholdEntry& lookup(Trigger t) const;
  // Threshold of the entry mapped to `cue`; throws NotFound if none is.
  double lookup(cues::CueKind cue) const;
  void validate() const;
  bool operator==(const ThresholdTable&) const = default;
};

ThresholdTable default_thresholds();

struct Cause {
  Trigger trigger = Trigger::GraspPositionDev;
  double value = 0.0;
  double threshold = 0.0;
  bool operator==(const Cause&) const = default;
};

struct Intervention {
  cues::CueSet authorized;
  std::vector<std::pair<cues::CueKind, std::string>> prompts;
  std::vector<Cause> causes;
};

std::optional<double> trigger_value(const metrics::SegmentMetrics& m, Trigger t);
std::string render_prompt(const ThresholdEntry& entry, double value);

// Metrics mode reads only `last_segment_metrics`; it must be present once
// progress has passed the first segment.
Intervention decide(Mode mode, const tpm::TaskProgress& progress,
                    const std::optional<metrics::SegmentMetrics>& last_segment_metrics, bool help_requested,
                    const ThresholdTable& thresholds);

}  // namespace vcoach::coach
