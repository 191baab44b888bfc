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
#include <vector>

#include "vcoach/engine.hpp"
#include "vcoach/synth.hpp"

namespace vcoach::test {

// Inputs of a clean pass through pair 0 by the synthetic expert.
inline std::vector<task::InputTick> clean_pass_inputs(uint64_t seed = 1) {
  synth::SynthRequest req;
  req.profile = synth::expert_profile(seed);
  req.segments = 1;
  const auto rec = synth::synth_session(req);
  std::vector<task::InputTick> out;
  for (const auto& t : rec.ticks) out.push_back(t.input);
  return out;
}

struct CueTimeline {
  std::vector<cues::CueSet> visible;  // per tick
  int64_t pierce = -1;
  int64_t needle_free = -1;
};

// Drives a TEACH-mode engine through the clean pass, then holds still for `hold_ticks`.
inline CueTimeline teach_timeline(const std::vector<task::InputTick>& inputs, int hold_ticks) {
  session::SessionHeader h;
  h.mode = coach::Mode::Teach;
  Engine engine(h);
  CueTimeline out;
  auto step = [&](const task::InputTick& in) {
    for (const auto& e : engine.step(in)) {
      const auto* s = std::get_if<task::SimEvent>(&e);
      if (!s) continue;
      if (s->kind == task::SimEventKind::Pierce && out.pierce < 0) out.pierce = s->tick;
      if (s->kind == task::SimEventKind::NeedleFree && out.needle_free < 0) out.needle_free = s->tick;
    }
    out.visible.push_back(engine.cue_state().visible);
  };
  for (const auto& in : inputs) step(in);
  auto last = inputs.back();
  for (int k = 0; k < hold_ticks; ++k) {
    ++last.tick;
    step(last);
  }
  return out;
}

// Visibility expected at each tick from the pierce and needle-free ticks.
inline std::vector<cues::CueSet> expected_teach_timeline(std::size_t n, int64_t pierce, int64_t needle_free,
                                                         double tick_rate) {
  using cues::CueKind;
  cues::CueSet setup, driving, playback;
  setup.add(CueKind::IdealInstrument).add(CueKind::GraspPosition).add(CueKind::GraspOrientation);
  setup.add(CueKind::IdealDrivePath).add(CueKind::VideoDemo);
  driving.add(CueKind::IdealDrivePath).add(CueKind::VideoDemo);
  playback.add(CueKind::TrajectoryPlayback).add(CueKind::VideoDemo);
  const auto playback_ticks = static_cast<int64_t>(10.0 * tick_rate);
  std::vector<cues::CueSet> out;
  for (int64_t t = 0; t < static_cast<int64_t>(n); ++t) {
    if (t < pierce)
      out.push_back(setup);
    else if (t < needle_free)
      out.push_back(driving);
    else if (t < needle_free + playback_ticks)
      out.push_back(playback);
    else
      out.push_back(setup);
  }
  return out;
}

inline std::string cue_names(cues::CueSet s) {
  std::string out;
  for (auto k : cues::kAllCues)
    if (s.has(k)) out += std::string(out.empty() ? "" : ",") + cues::to_string(k);
  return out;
}

}  // namespace vcoach::test
