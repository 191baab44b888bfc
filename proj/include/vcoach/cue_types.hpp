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
#include <cstdint>
#include <optional>
#include <string_view>

namespace vcoach::cues {

enum class CueKind : int {
  IdealInstrument = 0,
  GraspPosition = 1,
  GraspOrientation = 2,
  IdealDrivePath = 3,
  TrajectoryPlayback = 4,
  VideoDemo = 5,
};

inline constexpr std::array<CueKind, 6> kAllCues{CueKind::IdealInstrument, CueKind::GraspPosition,
                                                 CueKind::GraspOrientation, CueKind::IdealDrivePath,
                                                 CueKind::TrajectoryPlayback, CueKind::VideoDemo};

const char* to_string(CueKind k);
std::optional<CueKind> cue_from_string(std::string_view s);

// Small value set of cue kinds.
class CueSet {
 public:
  constexpr CueSet() = default;
  static constexpr CueSet all() {
    CueSet s;
    s.bits_ = 0x3f;
    return s;
  }
  constexpr bool has(CueKind k) const { return (bits_ >> static_cast<int>(k)) & 1u; }
  constexpr CueSet& add(CueKind k) {
    bits_ |= static_cast<std::uint8_t>(1u << static_cast<int>(k));
    return *this;
  }
  constexpr CueSet& remove(CueKind k) {
    bits_ &= static_cast<std::uint8_t>(~(1u << static_cast<int>(k)));
    return *this;
  }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr int size() const {
    int n = 0;
    for (int i = 0; i < 6; ++i) n += (bits_ >> i) & 1;
    return n;
  }
  constexpr bool operator==(const CueSet&) const = default;

 private:
  std::uint8_t bits_ = 0;
};

}  // namespace vcoach::cues
