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

#include "vcoach/vcoach.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <string>

#include "vcoach/analytics.hpp"
#include "vcoach/engine.hpp"
#include "vcoach/error.hpp"
#include "vcoach/json_io.hpp"
#include "vcoach/protocol.hpp"
#include "vcoach/service.hpp"
#include "vcoach/session.hpp"
#include "vcoach/synth.hpp"

struct vc_engine {
  vcoach::Engine engine;
};

struct vc_server {
  vcoach::service::Server server;
};

namespace {

using namespace vcoach;
using io::Json;

thread_local std::string g_last_error;

vc_status to_status(ErrorCode c) { return static_cast<vc_status>(static_cast<int>(c)); }

// Runs `fn`, translating exceptions into status codes.
template <class Fn>
vc_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return VC_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const Json::exception& e) {
    g_last_error = e.what();
    return VC_E_INVALID_ARGUMENT;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return VC_E_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return VC_E_INTERNAL;
  }
}

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

void put(char** out, const std::string& s) {
  if (out) *out = dup(s);
}

void need(const void* p, const char* what) {
  if (!p) fail(ErrorCode::InvalidArgument, std::string(what) + " must not be null");
}

Json parse_object(const char* text, const char* what) {
  if (!text || !*text) return Json::object();
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    fail(ErrorCode::InvalidArgument, std::string(what) + ": " + e.what());
  }
  if (!j.is_object()) fail(ErrorCode::InvalidArgument, std::string(what) + " must be a JSON object");
  return j;
}

session::SessionConfig config_from(const Json& j) {
  session::SessionConfig c;
  if (j.contains("task")) c.task = io::task_config_from_json(j["task"]);
  if (j.contains("thresholds")) c.thresholds = io::thresholds_from_json(j["thresholds"]);
  if (j.contains("start_segment")) c.start_segment = static_cast<int>(io::require_int(j, "start_segment"));
  c.task.validate();
  c.thresholds.validate();
  if (c.start_segment < 0 || c.start_segment >= c.task.n_pairs)
    fail(ErrorCode::InvalidArgument, "start_segment out of range");
  return c;
}

Json config_to_json(const session::SessionConfig& c) {
  return Json{{"task", io::to_json(c.task)}, {"thresholds", io::to_json(c.thresholds)}, {"start_segment", c.start_segment}};
}

coach::Mode mode_from(const Json& j, coach::Mode fallback) {
  if (!j.contains("mode")) return fallback;
  const auto m = coach::mode_from_string(io::require_string(j, "mode"));
  if (!m) fail(ErrorCode::InvalidArgument, "mode must be teach, metrics, user or none");
  return *m;
}

task::Side side_from(const Json& j, const char* key, task::Side fallback) {
  if (!j.contains(key)) return fallback;
  const auto s = io::require_string(j, key);
  if (s != "left" && s != "right") fail(ErrorCode::InvalidArgument, std::string(key) + " must be left or right");
  return s == "left" ? task::Side::Left : task::Side::Right;
}

uint64_t seed_from(const Json& j, uint64_t fallback) {
  if (!j.contains("seed")) return fallback;
  const Json& s = j["seed"];
  if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<int64_t>() >= 0))
    fail(ErrorCode::InvalidArgument, "seed must be a non-negative integer");
  return s.get<uint64_t>();
}

session::SessionHeader header_from(const Json& j) {
  session::SessionHeader h;
  if (j.contains("config")) h.config = config_from(j["config"]);
  h.mode = mode_from(j, coach::Mode::None);
  if (j.contains("participant")) h.participant = io::require_string(j, "participant");
  h.handedness = side_from(j, "handedness", task::Side::Right);
  h.seed = seed_from(j, 0);
  return h;
}

std::string metrics_text(const metrics::TaskMetrics& m) { return io::to_json(m).dump(); }

task::InputTick input_from(const Json& j) {
  task::InputTick t;
  t.tick = io::require_int(j, "t");
  t.instruments[0] = io::command_from_json(io::require(j, "L"));
  t.instruments[1] = io::command_from_json(io::require(j, "R"));
  const Json& m = io::require(j, "master");
  if (!m.is_array() || m.size() != 2) fail(ErrorCode::InvalidArgument, "master must hold two positions");
  t.master = {io::vec3_from_json(m[0]), io::vec3_from_json(m[1])};
  return t;
}

synth::SynthProfile profile_from(const Json& j) {
  synth::ProfileKind kind = synth::ProfileKind::Novice;
  if (j.contains("profile")) {
    const auto k = synth::profile_from_string(io::require_string(j, "profile"));
    if (!k) fail(ErrorCode::InvalidArgument, "profile must be expert or novice");
    kind = *k;
  }
  auto p = synth::default_profile(kind, seed_from(j, 1));
  auto over = [&](const char* key, double& field) {
    if (j.contains(key)) field = io::require_number(j, key);
  };
  over("grasp_bias", p.grasp_bias);
  over("grasp_noise", p.grasp_noise);
  over("orientation_bias", p.orientation_bias);
  over("orientation_noise", p.orientation_noise);
  over("wobble", p.wobble);
  over("extra_movement_rate", p.extra_movement_rate);
  over("pace", p.pace);
  over("help_probability", p.help_probability);
  p.validate();
  return p;
}

}  // namespace

extern "C" {

const char* vc_version(void) { return "1.0.0"; }

const char* vc_last_error(void) { return g_last_error.c_str(); }

const char* vc_status_name(vc_status status) {
  if (status == VC_OK) return "ok";
  if (status < VC_E_INVALID_ARGUMENT || status > VC_E_INTERNAL) return "unknown";
  return protocol::to_string(static_cast<ErrorCode>(status));
}

void vc_free(char* str) { std::free(str); }

int vc_metric_count(void) { return metrics::kMetricCount; }

const char* vc_metric_name(int index) {
  if (index < 0 || index >= metrics::kMetricCount) return nullptr;
  return metrics::kMetrics[index].name.data();
}

vc_status vc_default_config(char** config_json) {
  return guarded([&] {
    need(config_json, "config_json");
    put(config_json, config_to_json(session::SessionConfig{}).dump());
  });
}

vc_status vc_engine_create(const char* header_json, vc_engine** out) {
  return guarded([&] {
    need(out, "out");
    *out = nullptr;
    auto header = header_from(parse_object(header_json, "header"));
    *out = new vc_engine{Engine(std::move(header))};
  });
}

void vc_engine_destroy(vc_engine* engine) { delete engine; }

vc_status vc_engine_step(vc_engine* engine, const char* input_json, char** events_json) {
  return guarded([&] {
    need(engine, "engine");
    const auto& events = engine->engine.step(input_from(parse_object(input_json, "input")));
    if (events_json) {
      Json a = Json::array();
      for (const auto& e : events) a.push_back(io::to_json(e));
      put(events_json, a.dump());
    }
  });
}

vc_status vc_engine_state(const vc_engine* engine, char** state_json) {
  return guarded([&] {
    need(engine, "engine");
    need(state_json, "state_json");
    put(state_json, protocol::server_state_json(engine->engine, engine->engine.tick_events()));
  });
}

int64_t vc_engine_next_tick(const vc_engine* engine) { return engine ? engine->engine.next_tick() : -1; }

int vc_engine_complete(const vc_engine* engine) { return engine && engine->engine.complete() ? 1 : 0; }

vc_status vc_engine_finish(vc_engine* engine, const char* path, char** metrics_json) {
  return guarded([&] {
    need(engine, "engine");
    need(path, "path");
    const auto rec = engine->engine.finish();
    session::write_file(path, rec);
    put(metrics_json, metrics_text(*rec.footer));
  });
}

vc_status vc_session_replay(const char* path, char** metrics_json) {
  return guarded([&] {
    need(path, "path");
    put(metrics_json, metrics_text(session::replay(session::read_file(path))));
  });
}

vc_status vc_session_score(const char* path, char** metrics_json) {
  return guarded([&] {
    need(path, "path");
    put(metrics_json, metrics_text(session::evaluate(session::read_file(path)).task));
  });
}

vc_status vc_session_run_inputs(const char* header_json, const char* inputs_path, const char* out_path,
                                char** metrics_json) {
  return guarded([&] {
    need(inputs_path, "inputs_path");
    need(out_path, "out_path");
    Engine engine(header_from(parse_object(header_json, "header")));
    std::ifstream in(inputs_path, std::ios::binary);
    if (!in) fail(ErrorCode::Io, std::string("cannot open ") + inputs_path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      try {
        engine.step(input_from(parse_object(line.c_str(), "input")));
      } catch (const Error& e) {
        fail(e.code(), "line " + std::to_string(line_no) + ": " + e.what());
      }
      if (engine.complete()) break;
    }
    const auto rec = engine.finish();
    session::write_file(out_path, rec);
    put(metrics_json, metrics_text(*rec.footer));
  });
}

vc_status vc_synth_session(const char* request_json, const char* out_path, char** metrics_json) {
  return guarded([&] {
    need(out_path, "out_path");
    const Json j = parse_object(request_json, "request");
    synth::SynthRequest req;
    req.profile = profile_from(j);
    if (j.contains("config")) req.config = config_from(j["config"]);
    req.mode = mode_from(j, coach::Mode::None);
    if (j.contains("participant")) req.participant = io::require_string(j, "participant");
    req.handedness = side_from(j, "handedness", task::Side::Right);
    if (j.contains("segments")) req.segments = static_cast<int>(io::require_int(j, "segments"));
    const auto rec = synth::synth_session(req);
    session::write_file(out_path, rec);
    put(metrics_json, metrics_text(*rec.footer));
  });
}

vc_status vc_synth_cohort(const char* options_json, const char* dir) {
  return guarded([&] {
    need(dir, "dir");
    const Json j = parse_object(options_json, "options");
    synth::CohortOptions o;
    if (j.contains("plan")) {
      const auto p = synth::plan_from_string(io::require_string(j, "plan"));
      if (!p) fail(ErrorCode::InvalidArgument, "plan must be study or control");
      o.plan = *p;
    }
    if (j.contains("profile")) {
      const auto k = synth::profile_from_string(io::require_string(j, "profile"));
      if (!k) fail(ErrorCode::InvalidArgument, "profile must be expert or novice");
      o.kind = *k;
    }
    if (j.contains("n")) o.participants = static_cast<int>(io::require_int(j, "n"));
    if (o.participants < 1) fail(ErrorCode::InvalidArgument, "n must be at least 1");
    o.seed = seed_from(j, 1);
    if (j.contains("config")) o.config = config_from(j["config"]);
    if (j.contains("coached_orientation_gain"))
      o.coached_orientation_gain = io::require_number(j, "coached_orientation_gain");
    if (j.contains("prefix")) o.participant_prefix = io::require_string(j, "prefix");
    synth::write_cohort(dir, o);
  });
}

vc_status vc_build_clips(const char* config_json, uint64_t seed, const char* dir) {
  return guarded([&] {
    need(dir, "dir");
    synth::build_clip_store(session::ClipStore(dir), config_from(parse_object(config_json, "config")), seed);
  });
}

vc_status vc_report(const char* experimental_dir, const char* control_dir, char** text, char** json,
                    char** grid_csv) {
  return guarded([&] {
    need(experimental_dir, "experimental_dir");
    need(control_dir, "control_dir");
    auto series = analytics::load_arm(experimental_dir, analytics::Arm::Experimental);
    for (auto& s : analytics::load_arm(control_dir, analytics::Arm::Control)) series.push_back(std::move(s));
    const auto r = analytics::report(series);
    put(text, analytics::format_table(r) + "\n" + analytics::format_grid(r));
    put(json, analytics::report_json(r));
    put(grid_csv, analytics::grid_csv(r));
  });
}

vc_status vc_server_create(const char* options_json, vc_server** out) {
  return guarded([&] {
    need(out, "out");
    *out = nullptr;
    const Json j = parse_object(options_json, "options");
    service::ServiceOptions o;
    if (j.contains("address")) o.address = io::require_string(j, "address");
    if (j.contains("port")) {
      const auto port = io::require_int(j, "port");
      if (port < 0 || port > 65535) fail(ErrorCode::InvalidArgument, "port out of range");
      o.port = static_cast<uint16_t>(port);
    }
    if (j.contains("data_dir")) o.data_dir = io::require_string(j, "data_dir");
    if (j.contains("token")) o.token = io::require_string(j, "token");
    if (j.contains("config")) o.config = config_from(j["config"]);
    if (j.contains("speed")) o.speed = io::require_number(j, "speed");
    if (j.contains("threads")) o.threads = static_cast<int>(io::require_int(j, "threads"));
    *out = new vc_server{service::Server(std::move(o))};
  });
}

vc_status vc_server_start(vc_server* server) {
  return guarded([&] {
    need(server, "server");
    server->server.start();
  });
}

uint16_t vc_server_port(const vc_server* server) { return server ? server->server.port() : 0; }

vc_status vc_server_wait_signal(vc_server* server) {
  return guarded([&] {
    need(server, "server");
    server->server.run_until_signal();
  });
}

void vc_server_stop(vc_server* server) {
  if (server) server->server.stop();
}

void vc_server_destroy(vc_server* server) { delete server; }

}  // extern "C"
