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
#include <span>
#include <string>
#include <string_view>

#include "vcoach/engine.hpp"
#include "vcoach/error.hpp"
#include "vcoach/record.hpp"
#include "vcoach/task.hpp"

// Live-session wire messages. Text frames hold one JSON object each.
//
// ClientInput: {"seq", "t", "L", "R", "master"}
// ServerState: {"tick", "needle", "topo", "seg", "phase", "cues", "metrics",
//               "events", "prompts"}
// Error frame: {"error": {"code", "message"}}
namespace vcoach::protocol {

struct ClientInput {
  int64_t seq = 0;
  double t = 0.0;  // client clock, ms
  std::array<task::InstrumentCommand, 2> instruments;
  std::array<geometry::Vec3, 2> master;
};

// Throws Protocol on malformed text or schema violations.
ClientInput parse_client_input(std::string_view text);
std::string client_input_json(const ClientInput& in);

// Input that holds every instrument where it is.
task::InputTick hold_input(const task::WorldState& world);

// Last-writer-wins sampling. Inputs whose seq does not increase are rejected.
class InputSampler {
 public:
  explicit InputSampler(const task::InputTick& initial) : held_(initial) {}

  // False when the input was rejected for a seq regression.
  bool offer(const ClientInput& in);
  task::InputTick sample(int64_t tick) const;
  std::optional<int64_t> last_seq() const { return last_seq_; }

 private:
  task::InputTick held_;
  std::optional<int64_t> last_seq_;
};

std::string server_state_json(const Engine& engine, std::span<const LoggedEvent> events);
std::string error_json(ErrorCode code, std::string_view message);
const char* to_string(ErrorCode code);

}  // namespace vcoach::protocol
