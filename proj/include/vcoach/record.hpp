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
#include <string>
#include <variant>
#include <vector>

#include "vcoach/cue_types.hpp"
#include "vcoach/task.hpp"
#include "vcoach/tpm.hpp"

namespace vcoach {

// One simulation tick as logged: the input and the resulting needle pose and cue set.
struct TickRecord {
  int64_t t = 0;
  task::InputTick input;
  geometry::Pose needle;
  cues::CueSet cues;
  bool operator==(const TickRecord&) const = default;
};

struct CueEvent {
  int64_t tick = 0;
  cues::CueKind kind = cues::CueKind::VideoDemo;
  bool shown = true;
  bool operator==(const CueEvent&) const = default;
};

// Free-text log entries: coach prompts and service warnings.
struct NoteEvent {
  enum class Kind { Prompt, Warning };
  int64_t tick = 0;
  Kind kind = Kind::Prompt;
  std::string text;
  bool operator==(const NoteEvent&) const = default;
};

using LoggedEvent = std::variant<task::SimEvent, tpm::TpmEvent, CueEvent, NoteEvent>;

int64_t event_tick(const LoggedEvent& e);
std::string event_kind(const LoggedEvent& e);

// Simulation events in log order.
std::vector<task::SimEvent> sim_events(const std::vector<LoggedEvent>& events);

}  // namespace vcoach
