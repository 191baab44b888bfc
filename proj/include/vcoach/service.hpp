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
#include <memory>
#include <string>
#include <vector>

#include "vcoach/session.hpp"

// Session host: live sessions over WebSocket at /ws and a request API over
// HTTP. Data layout: <data_dir>/sessions/<id>.vcs, <data_dir>/clips/.
//
// Live session URL: /ws?token=T&mode=teach&participant=P&handedness=right&start_segment=0
//
// HTTP:
//   GET  /sessions                 list stored and live sessions
//   GET  /sessions/{id}            session file
//   GET  /sessions/{id}/metrics    replayed footer metrics
//   POST /reports                  {"experimental": [...], "control": [...]}
//                                  entries {"participant", "sessions": {label: id}};
//                                  ?format=json|text|csv
//   GET  /clips/{segment}          expert clip file
namespace vcoach::service {

struct ServiceOptions {
  std::string address = "127.0.0.1";
  uint16_t port = 8080;  // 0 picks a free port
  std::filesystem::path data_dir = "data";
  std::string token;
  session::SessionConfig config;
  // Engine ticks per wall-clock tick period; > 1 runs faster than real time.
  double speed = 1.0;
  int threads = 1;
};

struct SessionInfo {
  std::string id;
  std::string participant;
  std::string mode;
  bool live = false;
  bool complete = false;  // footer present
};

class Server {
 public:
  explicit Server(ServiceOptions options);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Binds and starts the worker threads. Throws Io when the port is taken.
  void start();
  uint16_t port() const;
  // Finalizes live sessions, then stops. Idempotent.
  void stop();
  // Blocks until SIGINT/SIGTERM, then stops.
  void run_until_signal();

  std::vector<SessionInfo> sessions() const;

  struct Impl;

 private:
  std::shared_ptr<Impl> impl_;
};

}  // namespace vcoach::service
