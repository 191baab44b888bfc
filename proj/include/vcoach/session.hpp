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
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vcoach/coach.hpp"
#include "vcoach/metrics.hpp"
#include "vcoach/record.hpp"
#include "vcoach/task.hpp"

// Session files (.vcs): one JSON object per line. A header line, then each
// tick line followed by that tick's event lines, then a footer line.
namespace vcoach::session {

inline constexpr int kSessionVersion = 1;

struct SessionConfig {
  task::TaskConfig task;
  coach::ThresholdTable thresholds = coach::default_thresholds();
  // Segment the run starts at; expert clips cover a single segment.
  int start_segment = 0;
  bool operator==(const SessionConfig&) const = default;
};

struct SessionHeader {
  int version = kSessionVersion;
  SessionConfig config;
  coach::Mode mode = coach::Mode::None;
  std::string participant;
  task::Side handedness = task::Side::Right;
  uint64_t seed = 0;
  bool operator==(const SessionHeader&) const = default;
};

struct SessionRecord {
  SessionHeader header;
  std::vector<TickRecord> ticks;
  std::vector<LoggedEvent> events;
  std::optional<metrics::TaskMetrics> footer;

  // Ticks must be consecutive; throws Protocol otherwise.
  void append_tick(const TickRecord& tick);
  // Events attach to the latest tick and keep their order; throws Protocol
  // for an event that does not belong to the latest tick.
  void append_event(const LoggedEvent& event);
  bool operator==(const SessionRecord&) const = default;
};

std::string serialize_header(const SessionHeader& h);
std::string serialize_tick(const TickRecord& t);
std::string serialize_event(const LoggedEvent& e);
std::string serialize_footer(const metrics::TaskMetrics& m);
// Full file text, newline-terminated lines.
std::string serialize(const SessionRecord& record);

// Throws Integrity on malformed, truncated or footer-less input and Version on
// an unsupported header version.
SessionRecord parse(std::string_view text);

SessionRecord read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const SessionRecord& record);

// Offline evaluation of the stored ticks and events.
metrics::MetricsReport evaluate(const SessionRecord& record);

// Re-runs the engine over the stored inputs.
SessionRecord rerun(const SessionRecord& record);

// Re-runs the engine and checks the result against the stored footer; throws
// Integrity on mismatch.
metrics::TaskMetrics replay(const SessionRecord& record);

// Expert demonstrations, one file per segment: <dir>/segment_<k>.vcs.
struct ExpertClip {
  int segment = 0;
  SessionRecord record;
};

// Throws Integrity unless the clip threads segment `segment` cleanly.
void validate_clip(const SessionRecord& record, int segment);

class ClipStore {
 public:
  explicit ClipStore(std::filesystem::path dir);
  std::filesystem::path path_for(int segment) const;
  // Validates, then writes.
  void put(const SessionRecord& record) const;
  // Throws NotFound for a missing clip or out-of-range segment.
  ExpertClip clip(int segment) const;
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
};

}  // namespace vcoach::session
