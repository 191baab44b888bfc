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

#include "vcoach/record.hpp"

#include "vcoach/error.hpp"

namespace vcoach {

namespace cues {

const char* to_string(CueKind k) {
  switch (k) {
    case CueKind::IdealInstrument: return "IdealInstrument";
    case CueKind::GraspPosition: return "GraspPosition";
    case CueKind::GraspOrientation: return "GraspOrientation";
    case CueKind::IdealDrivePath: return "IdealDrivePath";
    case CueKind::TrajectoryPlayback: return "TrajectoryPlayback";
    case CueKind::VideoDemo: return "VideoDemo";
  }
  return "?";
}

std::optional<CueKind> cue_from_string(std::string_view s) {
  for (CueKind k : kAllCues)
    if (s == to_string(k)) return k;
  return std::nullopt;
}

}  // namespace cues

int64_t event_tick(const LoggedEvent& e) {
  return std::visit([](const auto& v) -> int64_t { return v.tick; }, e);
}

std::string event_kind(const LoggedEvent& e) {
  struct V {
    std::string operator()(const task::SimEvent& s) const { return task::to_string(s.kind); }
    std::string operator()(const tpm::TpmEvent& t) const { return tpm::to_string(t.kind); }
    std::string operator()(const CueEvent& c) const { return c.shown ? "CueShown" : "CueHidden"; }
    std::string operator()(const NoteEvent& n) const {
      return n.kind == NoteEvent::Kind::Prompt ? "Prompt" : "Warning";
    }
  };
  return std::visit(V{}, e);
}

std::vector<task::SimEvent> sim_events(const std::vector<LoggedEvent>& events) {
  std::vector<task::SimEvent> out;
  for (const auto& e : events)
    if (const auto* s = std::get_if<task::SimEvent>(&e)) out.push_back(*s);
  return out;
}

}  // namespace vcoach
