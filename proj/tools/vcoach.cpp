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

// vcoach command-line front end. Talks to the library through vcoach.h only.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <memory>
#include <sstream>
#include <string>

#include "vcoach/vcoach.h"

namespace {

using Json = nlohmann::json;

constexpr int kExitError = 1;
constexpr int kExitUsage = 2;

struct CString {
  char* p = nullptr;
  ~CString() { vc_free(p); }
  std::string str() const { return p ? p : ""; }
};

struct Failure {
  vc_status status;
  std::string message;
};

void check(vc_status st) {
  if (st != VC_OK) throw Failure{st, vc_last_error()};
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{VC_E_IO, "cannot open " + path};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json load_config(const std::string& path) {
  if (path.empty()) return nullptr;
  try {
    return Json::parse(read_text(path));
  } catch (const Json::exception& e) {
    throw Failure{VC_E_INVALID_ARGUMENT, path + ": " + e.what()};
  }
}

void print_metrics(const std::string& metrics_json, bool as_json) {
  if (as_json) {
    std::cout << metrics_json << '\n';
    return;
  }
  const Json m = Json::parse(metrics_json);
  std::size_t w = 0;
  for (int i = 0; i < vc_metric_count(); ++i) w = std::max(w, std::string(vc_metric_name(i)).size());
  for (int i = 0; i < vc_metric_count(); ++i) {
    std::string name = vc_metric_name(i);
    const Json& v = m.at(name);
    name.resize(w + 2, ' ');
    char buf[64];
    if (v.is_null())
      std::snprintf(buf, sizeof buf, "n/a");
    else
      std::snprintf(buf, sizeof buf, "%.4f", v.get<double>());
    std::cout << name << buf << '\n';
  }
}

struct Options {
  std::string config;
  bool json = false;
  std::string mode = "none";
  std::string out;
  uint64_t seed = 1;
  int n = 1;
  std::string profile = "novice";
  std::string plan;
  std::string participant;
  std::string handedness = "right";
  std::string inputs;
  std::string session;
  std::string arm_a, arm_b;
  bool clips = false;
  int port = 8080;
  std::string address = "127.0.0.1";
  std::string data = "data";
  std::string token;
  double speed = 1.0;
};

int cmd_run(const Options& o) {
  CString metrics;
  if (!o.inputs.empty()) {
    Json header{{"mode", o.mode}, {"handedness", o.handedness}, {"seed", o.seed}};
    if (!o.participant.empty()) header["participant"] = o.participant;
    if (Json c = load_config(o.config); !c.is_null()) header["config"] = c;
    check(vc_session_run_inputs(header.dump().c_str(), o.inputs.c_str(), o.out.c_str(), &metrics.p));
  } else {
    Json req{{"profile", o.profile}, {"seed", o.seed}, {"mode", o.mode}, {"handedness", o.handedness}};
    if (!o.participant.empty()) req["participant"] = o.participant;
    if (Json c = load_config(o.config); !c.is_null()) req["config"] = c;
    check(vc_synth_session(req.dump().c_str(), o.out.c_str(), &metrics.p));
  }
  print_metrics(metrics.str(), o.json);
  return 0;
}

int cmd_replay(const Options& o) {
  CString metrics;
  check(vc_session_replay(o.session.c_str(), &metrics.p));
  print_metrics(metrics.str(), o.json);
  return 0;
}

int cmd_score(const Options& o) {
  CString metrics;
  check(vc_session_score(o.session.c_str(), &metrics.p));
  print_metrics(metrics.str(), o.json);
  return 0;
}

int cmd_synth(const Options& o) {
  const Json config = load_config(o.config);
  if (o.clips) {
    check(vc_build_clips(config.is_null() ? nullptr : config.dump().c_str(), o.seed, o.out.c_str()));
    if (o.json) std::cout << Json{{"clips", o.out}}.dump() << '\n';
    return 0;
  }
  if (!o.plan.empty()) {
    Json opts{{"plan", o.plan}, {"profile", o.profile}, {"n", o.n}, {"seed", o.seed}};
    if (!o.participant.empty()) opts["prefix"] = o.participant;
    if (!config.is_null()) opts["config"] = config;
    check(vc_synth_cohort(opts.dump().c_str(), o.out.c_str()));
    if (o.json) std::cout << Json{{"cohort", o.out}, {"participants", o.n}}.dump() << '\n';
    return 0;
  }
  // Independent sessions, one seed each.
  Json files = Json::array();
  const std::string prefix = o.participant.empty() ? o.profile : o.participant;
  for (int i = 0; i < o.n; ++i) {
    char name[64];
    std::snprintf(name, sizeof name, "%s%03d", prefix.c_str(), i + 1);
    Json req{{"profile", o.profile},
             {"seed", o.seed + static_cast<uint64_t>(i)},
             {"mode", o.mode},
             {"participant", name},
             {"handedness", o.handedness}};
    if (!config.is_null()) req["config"] = config;
    const std::string path = o.out + "/" + name + ".vcs";
    check(vc_synth_session(req.dump().c_str(), path.c_str(), nullptr));
    files.push_back(path);
    if (!o.json) std::cout << path << '\n';
  }
  if (o.json) std::cout << Json{{"files", files}}.dump() << '\n';
  return 0;
}

int cmd_report(const Options& o) {
  CString text, json, csv;
  check(vc_report(o.arm_a.c_str(), o.arm_b.c_str(), &text.p, &json.p, &csv.p));
  if (!o.out.empty()) {
    auto write = [](const std::string& path, const std::string& body) {
      std::ofstream f(path, std::ios::binary | std::ios::trunc);
      if (!(f << body)) throw Failure{VC_E_IO, "cannot write " + path};
    };
    write(o.out + ".txt", text.str());
    write(o.out + ".json", json.str());
    write(o.out + "_grid.csv", csv.str());
  }
  std::cout << (o.json ? json.str() + "\n" : text.str());
  return 0;
}

int cmd_serve(const Options& o) {
  std::string token = o.token;
  if (token.empty())
    if (const char* env = std::getenv("VCOACH_TOKEN")) token = env;
  if (token.empty()) throw Failure{VC_E_INVALID_ARGUMENT, "a token is required (--token or VCOACH_TOKEN)"};
  Json opts{{"address", o.address}, {"port", o.port}, {"data_dir", o.data}, {"token", token}, {"speed", o.speed}};
  if (Json c = load_config(o.config); !c.is_null()) opts["config"] = c;
  vc_server* raw = nullptr;
  check(vc_server_create(opts.dump().c_str(), &raw));
  std::unique_ptr<vc_server, void (*)(vc_server*)> server(raw, vc_server_destroy);
  check(vc_server_start(server.get()));
  std::cerr << "vcoach: serving on " << o.address << ":" << vc_server_port(server.get()) << '\n';
  check(vc_server_wait_signal(server.get()));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vcoach: needle-passing trainer with a virtual coach"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--config", o.config, "Session config JSON file");
  app.add_flag("--json", o.json, "Machine-readable output");

  const auto modes = CLI::IsMember({"teach", "metrics", "user", "none"});
  const auto profiles = CLI::IsMember({"expert", "novice"});
  const auto sides = CLI::IsMember({"left", "right"});

  auto* run = app.add_subcommand("run", "Run one session from an input file or a synthetic operator");
  run->add_option("--inputs", o.inputs, "Input lines {t, L, R, master}")->check(CLI::ExistingFile);
  run->add_option("--profile", o.profile, "Synthetic operator when no inputs are given")->check(profiles);
  run->add_option("--mode", o.mode, "Coaching mode")->check(modes);
  run->add_option("--seed", o.seed, "Seed");
  run->add_option("--participant", o.participant, "Participant id");
  run->add_option("--handedness", o.handedness, "Dominant hand")->check(sides);
  run->add_option("--out", o.out, "Session file to write")->required();

  auto* replay = app.add_subcommand("replay", "Re-run a session and verify its footer");
  replay->add_option("session", o.session, "Session file")->required()->check(CLI::ExistingFile);

  auto* score = app.add_subcommand("score", "Compute metrics from a session log");
  score->add_option("session", o.session, "Session file")->required()->check(CLI::ExistingFile);

  auto* synth = app.add_subcommand("synth", "Generate synthetic sessions, cohorts or expert clips");
  synth->add_option("--profile", o.profile, "Operator profile")->check(profiles);
  synth->add_option("--n", o.n, "Sessions or participants")->check(CLI::PositiveNumber);
  synth->add_option("--seed", o.seed, "Base seed; item i uses seed + i");
  synth->add_option("--mode", o.mode, "Coaching mode for single sessions")->check(modes);
  synth->add_option("--plan", o.plan, "Cohort plan: study or control")->check(CLI::IsMember({"study", "control"}));
  synth->add_option("--participant", o.participant, "Participant id prefix");
  synth->add_option("--handedness", o.handedness, "Dominant hand")->check(sides);
  synth->add_flag("--clips", o.clips, "Build the expert clip store instead");
  synth->add_option("--out", o.out, "Output directory")->required();

  auto* report = app.add_subcommand("report", "Compare two arms of a study");
  report->add_option("--arm-a", o.arm_a, "Experimental arm directory")->required()->check(CLI::ExistingDirectory);
  report->add_option("--arm-b", o.arm_b, "Control arm directory")->required()->check(CLI::ExistingDirectory);
  report->add_option("--out", o.out, "Also write <out>.txt, <out>.json and <out>_grid.csv");

  auto* serve = app.add_subcommand("serve", "Host live sessions and the request API");
  serve->add_option("--port", o.port, "TCP port (0 picks one)")->check(CLI::Range(0, 65535));
  serve->add_option("--address", o.address, "Listen address");
  serve->add_option("--data", o.data, "Data directory");
  serve->add_option("--token", o.token, "Session token (or VCOACH_TOKEN)");
  serve->add_option("--speed", o.speed, "Simulation speed multiplier")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*run) return cmd_run(o);
    if (*replay) return cmd_replay(o);
    if (*score) return cmd_score(o);
    if (*synth) return cmd_synth(o);
    if (*report) return cmd_report(o);
    if (*serve) return cmd_serve(o);
  } catch (const Failure& f) {
    if (o.json)
      std::cerr << Json{{"error", {{"code", vc_status_name(f.status)}, {"message", f.message}}}}.dump() << '\n';
    else
      std::cerr << "vcoach: " << vc_status_name(f.status) << ": " << f.message << '\n';
    return kExitError;
  }
  return kExitUsage;
}
