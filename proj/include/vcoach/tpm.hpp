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
#include <span>
#include <string>
#include <vector>

#include "vcoach/geometry.hpp"
#include "vcoach/task.hpp"

// Task progress manager: tracks how the needle threads the current target pair
// and flags protocol deviations.
namespace vcoach::tpm {

// S0: through no target, S1: entry only, S2: entry and exit, S3: exit only.
enum class Topo : int { S0 = 0, S1 = 1, S2 = 2, S3 = 3 };
enum class Phase { Setup, Driving, Withdrawn, Complete };
enum class DeviationKind { OffTargetPierce, WrongOrderTarget, ReverseDirection, TipGrasp, OutOfRangeGrasp };

struct ProtocolDeviation {
  DeviationKind kind = DeviationKind::OffTargetPierce;
  int64_t tick = 0;
  std::string detail;
  bool operator==(const ProtocolDeviation&) const = default;
};

struct TaskProgress {
  int segment_index = 0;
  Topo topo = Topo::S0;
  Phase phase = Phase::Setup;
  std::vector<ProtocolDeviation> deviations;
  int retractions = 0;
  bool operator==(const TaskProgress&) const = default;
};

enum class TpmEventKind { Transition, Retraction, Deviation, SegmentComplete, TaskComplete };

struct TpmEvent {
  TpmEventKind kind = TpmEventKind::Transition;
  int64_t tick = 0;
  int segment = 0;
  Topo from = Topo::S0;
  Topo to = Topo::S0;
  DeviationKind deviation = DeviationKind::OffTargetPierce;
  std::string detail;
  bool operator==(const TpmEvent&) const = default;
};

// Grasp-angle limits for drive-initiating grasps, in degrees from the tip.
struct ProtocolRules {
  double tip_grasp_limit = 15.0;
  double grasp_range_lo = 135.0;
  double grasp_range_hi = 165.0;
  double out_of_range_slack = 30.0;
};

struct AdvanceResult {
  TaskProgress progress;
  std::vector<TpmEvent> events;
};

// Applies one tick's simulation events, in firing order.
AdvanceResult advance(const TaskProgress& progress, std::span<const task::SimEvent> events,
                      const task::TaskConfig& config, const ProtocolRules& rules = {});

struct SegmentContext {
  task::TargetPair pair;
  geometry::ArcPath ideal_arc;
  geometry::Vec3 drive_direction;
  Phase phase = Phase::Setup;
};

SegmentContext current_context(const TaskProgress& progress, const task::TaskConfig& config);

bool is_forward_edge(Topo from, Topo to);
bool is_retraction_edge(Topo from, Topo to);

const char* to_string(Topo t);
const char* to_string(Phase p);
const char* to_string(DeviationKind k);
const char* to_string(TpmEventKind k);

}  // namespace vcoach::tpm
