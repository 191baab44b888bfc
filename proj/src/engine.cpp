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

#include "vcoach/engine.hpp"

#include <algorithm>

#include "vcoach/error.hpp"

namespace vcoach {

Engine::Engine(session::SessionHeader header) {
  if (header.version != session::kSessionVersion)
    fail(ErrorCode::Version, "unsupported session version " + std::to_string(header.version));
  header.config.task.validate();
  header.config.thresholds.validate();
  config_ = header.config.task;
  const int start = header.config.start_segment;
  if (start < 0 || start >= config_.n_pairs) fail(ErrorCode::InvalidArgument, "start_segment out of range");
  record_.header = std::move(header);
  world_ = task::initial_world(config_);
  world_.needle_pose = task::staging_needle_pose(config_, start);
  progress_.segment_index = start;
}

void Engine::log(LoggedEvent e) {
  record_.append_event(e);
  tick_events_.push_back(std::move(e));
}

void Engine::warn(const std::string& text) {
  if (record_.ticks.empty()) {
    pending_warnings_.push_back(text);
    return;
  }
  log(NoteEvent{record_.ticks.back().t, NoteEvent::Kind::Warning, text});
}

const std::vector<LoggedEvent>& Engine::step(const task::InputTick& input) {
  if (input.tick != next_tick_)
    fail(ErrorCode::Protocol, "expected tick " + std::to_string(next_tick_) + ", got " + std::to_string(input.tick));
  tick_events_.clear();
  const int64_t t = input.tick;

  auto sim = task::step(world_, input, config_);
  auto adv = tpm::advance(progress_, sim.events, config_);
  world_ = std::move(sim.world);
  progress_ = std::move(adv.progress);
  ++next_tick_;

  // Needle tip trace of the current pass, for playback.
  bool segment_done = false;
  for (const auto& e : adv.events) {
    if (e.kind == tpm::TpmEventKind::Transition && e.from == tpm::Topo::S0 && e.to == tpm::Topo::S1) {
      tracing_pass_ = true;
      pass_.clear();
    }
  }
  if (tracing_pass_) pass_.push_back({t, geometry::needle_point(world_.needle_pose, config_.needle, 0.0)});

  TickRecord tr;
  tr.t = t;
  tr.input = input;
  tr.needle = world_.needle_pose;
  record_.append_tick(tr);
  for (auto& w : pending_warnings_) log(NoteEvent{t, NoteEvent::Kind::Warning, std::move(w)});
  pending_warnings_.clear();
  for (const auto& e : sim.events) log(e);
  for (const auto& e : adv.events) log(e);

  std::optional<int> completed;
  for (const auto& e : adv.events)
    if (e.kind == tpm::TpmEventKind::SegmentComplete) completed = e.segment;
  if (completed) {
    segment_done = true;
    // Evaluate from the previous segment's completion tick onward.
    const auto ticks = std::span<const TickRecord>(record_.ticks).subspan(segment_begin_);
    std::vector<task::SimEvent> evs;
    for (const auto& e : record_.events)
      if (const auto* se = std::get_if<task::SimEvent>(&e); se && (segment_begin_ == 0 || se->tick > ticks.front().t))
        evs.push_back(*se);
    try {
      const auto rep = metrics::evaluate(config_, ticks, evs, *completed, false);
      for (const auto& s : rep.segments)
        if (s.segment == *completed) last_metrics_ = s;
    } catch (const Error& err) {
      if (err.code() != ErrorCode::Domain) throw;
    }
    segment_begin_ = record_.ticks.size() - 1;
  }
  for (const auto& e : sim.events)
    if (e.kind == task::SimEventKind::IconActivated && e.icon == task::IconId::Help) help_latch_ = true;

  const auto decision =
      coach::decide(record_.header.mode, progress_, last_metrics_, help_latch_, record_.header.config.thresholds);

  if (segment_done) {
    tracing_pass_ = false;
    playback_.reset();
    if (decision.authorized.has(cues::CueKind::TrajectoryPlayback) && !pass_.empty()) {
      playback_ = cues::playback_cue(pass_, config_.camera_forward, config_.surface_normal,
                                     task::ideal_arc(config_, *completed), config_.tick_rate);
    }
  }

  auto upd = cues::update_cues(cues_, progress_, adv.events, sim.events, decision.authorized, t, config_.tick_rate);
  if (!playback_) upd.lifecycle.visible.remove(cues::CueKind::TrajectoryPlayback);
  // Recompute hide events against the filtered set.
  std::vector<CueEvent> cue_events;
  for (auto k : cues::kAllCues) {
    const bool was = cues_.visible.has(k), is = upd.lifecycle.visible.has(k);
    if (was != is) cue_events.push_back({t, k, is});
  }
  cues_ = upd.lifecycle;
  if (!cues_.visible.has(cues::CueKind::TrajectoryPlayback)) {
    cues_.playback_deadline.reset();
    if (!segment_done) playback_.reset();
  }
  record_.ticks.back().cues = cues_.visible;
  for (auto& c : cue_events) log(c);

  if (decision.prompts != prompts_) {
    for (const auto& p : decision.prompts)
      if (std::find(prompts_.begin(), prompts_.end(), p) == prompts_.end())
        log(NoteEvent{t, NoteEvent::Kind::Prompt, p.second});
    prompts_ = decision.prompts;
  }
  if (segment_done) help_latch_ = false;
  return tick_events_;
}

std::vector<cues::CueDescriptor> Engine::descriptors() const {
  cues::DescribeInput in;
  in.lifecycle = &cues_;
  in.world = &world_;
  in.progress = &progress_;
  in.config = &config_;
  in.handedness = record_.header.handedness;
  in.playback = playback_ ? &*playback_ : nullptr;
  in.prompts = prompts_;
  return cues::describe(in);
}

session::SessionRecord Engine::finish() {
  const auto rep = metrics::evaluate(config_, record_.ticks, sim_events(record_.events),
                                     record_.header.config.start_segment);
  record_.footer = rep.task;
  return record_;
}

}  // namespace vcoach
