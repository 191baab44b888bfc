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

#include "vcoach/protocol.hpp"

#include "vcoach/json_io.hpp"

namespace vcoach::protocol {

using io::Json;

ClientInput parse_client_input(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    fail(ErrorCode::Protocol, std::string("malformed message: ") + e.what());
  }
  if (!j.is_object()) fail(ErrorCode::Protocol, "message is not an object");
  try {
    ClientInput in;
    in.seq = io::require_int(j, "seq");
    in.t = io::require_number(j, "t");
    in.instruments[0] = io::command_from_json(io::require(j, "L"));
    in.instruments[1] = io::command_from_json(io::require(j, "R"));
    const Json& m = io::require(j, "master");
    if (!m.is_array() || m.size() != 2) fail(ErrorCode::InvalidArgument, "master must hold two positions");
    in.master = {io::vec3_from_json(m[0]), io::vec3_from_json(m[1])};
    for (const auto& c : in.instruments)
      if (!(c.jaw >= 0.0 && c.jaw <= 1.0)) fail(ErrorCode::InvalidArgument, "jaw must lie in [0, 1]");
    return in;
  } catch (const Error& e) {
    fail(ErrorCode::Protocol, e.what());
  }
}

std::string client_input_json(const ClientInput& in) {
  return Json{{"seq", in.seq},
              {"t", in.t},
              {"L", io::to_json(in.instruments[0])},
              {"R", io::to_json(in.instruments[1])},
              {"master", Json::array({io::to_json(in.master[0]), io::to_json(in.master[1])})}}
      .dump();
}

task::InputTick hold_input(const task::WorldState& world) {
  task::InputTick t;
  for (int i = 0; i < 2; ++i) {
    t.instruments[i] = {world.instruments[i].tip_pose, world.instruments[i].jaw};
    t.master[i] = world.master_positions[i];
  }
  return t;
}

bool InputSampler::offer(const ClientInput& in) {
  if (last_seq_ && in.seq <= *last_seq_) return false;
  last_seq_ = in.seq;
  held_.instruments = in.instruments;
  held_.master = in.master;
  return true;
}

task::InputTick InputSampler::sample(int64_t tick) const {
  task::InputTick t = held_;
  t.tick = tick;
  return t;
}

std::string server_state_json(const Engine& engine, std::span<const LoggedEvent> events) {
  const auto& p = engine.progress();
  Json cues = Json::array();
  for (const auto& d : engine.descriptors()) cues.push_back(io::to_json(d));
  Json evs = Json::array();
  for (const auto& e : events) evs.push_back(io::to_json(e));
  Json prompts = Json::array();
  for (const auto& [kind, text] : engine.prompts()) prompts.push_back({{"cue", cues::to_string(kind)}, {"text", text}});
  const auto& m = engine.last_segment_metrics();
  return Json{{"tick", engine.next_tick() - 1},
              {"needle", io::to_json(engine.world().needle_pose)},
              {"topo", tpm::to_string(p.topo)},
              {"seg", p.segment_index},
              {"phase", tpm::to_string(p.phase)},
              {"cues", std::move(cues)},
              {"metrics", m ? io::to_json(*m) : Json(nullptr)},
              {"events", std::move(evs)},
              {"prompts", std::move(prompts)}}
      .dump();
}

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid_argument";
    case ErrorCode::Domain: return "domain";
    case ErrorCode::Protocol: return "protocol";
    case ErrorCode::Io: return "io";
    case ErrorCode::Integrity: return "integrity";
    case ErrorCode::Version: return "version";
    case ErrorCode::NotFound: return "not_found";
    case ErrorCode::Generation: return "generation";
    case ErrorCode::Internal: return "internal";
  }
  return "internal";
}

std::string error_json(ErrorCode code, std::string_view message) {
  return Json{{"error", {{"code", to_string(code)}, {"message", message}}}}.dump();
}

}  // namespace vcoach::protocol
