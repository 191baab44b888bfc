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
#include "vcoach/session.hpp"

// Synthetic trainees: scripted closed-loop operators that stand in for human
// participants and expert demonstrations.
namespace vcoach::synth {

enum class ProfileKind { Expert, Novice };
const char* to_string(ProfileKind k);
std::optional<ProfileKind> profile_from_string(std::string_view s);

struct SynthProfile {
  ProfileKind kind = ProfileKind::Novice;
  uint64_t seed = 1;
  double grasp_bias = 20.0;         // degrees past 150 toward the tail
  double grasp_noise = 8.0;         // SD, degrees
  double orientation_bias = 20.0;   // degrees of gripper tilt about the needle tangent
  double orientation_noise = 8.0;   // SD, degrees
  double wobble = 1.5;              // peak path offset while driving, mm
  double extra_movement_rate = 0.1; // idle fidgets per second
  double pace = 0.5;                // speed multiplier
  double help_probability = 0.5;    // chance of a help request per segment in User mode

  // Throws InvalidArgument on negative noise or non-positive pace.
  void validate() const;
  bool operator==(const SynthProfile&) const = default;
};

SynthProfile expert_profile(uint64_t seed);
SynthProfile novice_profile(uint64_t seed);
SynthProfile default_profile(ProfileKind kind, uint64_t seed);

inline constexpr double kSegmentTimeLimit = 120.0;  // s

struct SynthRequest {
  SynthProfile profile;
  session::SessionConfig config;
  coach::Mode mode = coach::Mode::None;
  std::string participant = "synthetic";
  task::Side handedness = task::Side::Right;
  // Segments to perform from config.start_segment; -1 runs to the end.
  int segments = -1;
};

// Runs the synthetic operator through the engine. Deterministic per seed.
// Throws Generation when a segment cannot be completed within the time limit.
session::SessionRecord synth_session(const SynthRequest& request);

// Expected mean path offset of a half-sine wobble of peak `amplitude`.
double expected_wobble_deviation(double amplitude);

// Builds and stores one expert clip per segment.
void build_clip_store(const session::ClipStore& store, const session::SessionConfig& config, uint64_t seed);

// Study cohorts.
enum class Plan { Study, Control };
const char* to_string(Plan p);
std::optional<Plan> plan_from_string(std::string_view s);

inline constexpr std::array<std::string_view, 5> kRepetitionLabels{"baseline", "rep2", "rep3", "rep4", "final"};

// Mode for each repetition: Study = None, Teach, Metrics, User, None;
// Control = None x5.
std::array<coach::Mode, 5> plan_modes(Plan plan);

struct CohortOptions {
  Plan plan = Plan::Study;
  ProfileKind kind = ProfileKind::Novice;
  int participants = 1;
  uint64_t seed = 1;
  session::SessionConfig config;
  // Reduction of the orientation bias reached by coached participants (degrees).
  double coached_orientation_gain = 12.0;
  std::string participant_prefix = "p";
};

struct ParticipantSessions {
  std::string participant;
  std::array<session::SessionRecord, 5> repetitions;
};

// Participant i uses seed + i. Coached (Study) participants reduce their
// orientation bias after the baseline; every participant practices alike
// otherwise.
ParticipantSessions participant_sessions(const CohortOptions& options, int index);

// Writes <dir>/<participant>/<label>.vcs for every participant.
void write_cohort(const std::filesystem::path& dir, const CohortOptions& options);

}  // namespace vcoach::synth
