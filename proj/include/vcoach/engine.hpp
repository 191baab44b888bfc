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

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vcoach/coach.hpp"
#include "vcoach/cues.hpp"
#include "vcoach/metrics.hpp"
#include "vcoach/session.hpp"
#include "vcoach/task.hpp"
#include "vcoach/tpm.hpp"

namespace vcoach {

// Per-session simulation loop: world step, progress tracking, coaching, cue
// lifecycle and logging. Single-threaded; one instance per session.
class Engine {
 public:
  explicit Engine(session::SessionHeader header);

  // Runs one tick. The input tick must be next_tick(). Returns the events
  // logged for this tick.
  const std::vector<LoggedEvent>& step(const task::InputTick& input);
  // Logs a warning at the latest tick (or the upcoming one if none ran yet).
  void warn(const std::string& text);

  int64_t next_tick() const { return next_tick_; }
  bool complete() const { return progress_.phase == tpm::Phase::Complete; }

  const task::WorldState& world() const { return world_; }
  const tpm::TaskProgress& progress() const { return progress_; }
  const cues::CueLifecycle& cue_state() const { return cues_; }
  const std::optional<metrics::SegmentMetrics>& last_segment_metrics() const { return last_metrics_; }
  const std::vector<std::pair<cues::CueKind, std::string>>& prompts() const { return prompts_; }
  const std::vector<LoggedEvent>& tick_events() const { return tick_events_; }
  const session::SessionRecord& record() const { return record_; }

  std::vector<cues::CueDescriptor> descriptors() const;

  // Computes the footer and returns the finished record.
  session::SessionRecord finish();

 private:
  void log(LoggedEvent e);

  session::SessionRecord record_;
  task::TaskConfig config_;
  task::WorldState world_;
  tpm::TaskProgress progress_;
  cues::CueLifecycle cues_;
  std::optional<metrics::SegmentMetrics> last_metrics_;
  std::vector<std::pair<cues::CueKind, std::string>> prompts_;
  std::vector<std::string> pending_warnings_;
  bool help_latch_ = false;
  std::size_t segment_begin_ = 0;
  int64_t next_tick_ = 0;
  std::vector<LoggedEvent> tick_events_;

  bool tracing_pass_ = false;
  std::vector<cues::TrajectorySample> pass_;
  std::optional<cues::PlaybackCue> playback_;
};

}  // namespace vcoach
