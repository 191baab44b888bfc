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

#include "vcoach/json_io.hpp"

#include <string>

#include "vcoach/error.hpp"

namespace vcoach::io {

using geometry::Pose;
using geometry::UnitQuat;
using geometry::Vec3;
using task::SimEvent;
using task::SimEventKind;

namespace {

[[noreturn]] void schema(const std::string& what) { fail(ErrorCode::InvalidArgument, "schema: " + what); }

template <class E, std::size_t N>
E enum_from(const Json& j, const std::array<E, N>& values, const char* what) {
  if (!j.is_string()) schema(std::string(what) + " must be a string");
  const auto s = j.get<std::string>();
  for (E v : values)
    if (s == to_string(v)) return v;
  schema(std::string("unknown ") + what + " '" + s + "'");
}

constexpr std::array<SimEventKind, 9> kSimKinds{
    SimEventKind::GraspStart,   SimEventKind::GraspEnd,      SimEventKind::Pierce,
    SimEventKind::TipExit,      SimEventKind::TailExit,      SimEventKind::NeedleFree,
    SimEventKind::IconActivated, SimEventKind::ForceExceedStart, SimEventKind::ForceExceedEnd};
constexpr std::array<tpm::TpmEventKind, 5> kTpmKinds{tpm::TpmEventKind::Transition, tpm::TpmEventKind::Retraction,
                                                     tpm::TpmEventKind::Deviation, tpm::TpmEventKind::SegmentComplete,
                                                     tpm::TpmEventKind::TaskComplete};
constexpr std::array<tpm::Topo, 4> kTopos{tpm::Topo::S0, tpm::Topo::S1, tpm::Topo::S2, tpm::Topo::S3};
constexpr std::array<tpm::DeviationKind, 5> kDeviations{
    tpm::DeviationKind::OffTargetPierce, tpm::DeviationKind::WrongOrderTarget, tpm::DeviationKind::ReverseDirection,
    tpm::DeviationKind::TipGrasp, tpm::DeviationKind::OutOfRangeGrasp};
constexpr std::array<task::ForceSource, 3> kSources{task::ForceSource::InstrumentLeft,
                                                    task::ForceSource::InstrumentRight,
                                                    task::ForceSource::NeedleTissue};
constexpr std::array<task::TargetRole, 2> kRoles{task::TargetRole::Entry, task::TargetRole::Exit};

bool is_sim_kind(const std::string& k) {
  for (auto v : kSimKinds)
    if (k == task::to_string(v)) return true;
  return false;
}

bool is_tpm_kind(const std::string& k) {
  for (auto v : kTpmKinds)
    if (k == tpm::to_string(v)) return true;
  return false;
}

Json target_json(const std::optional<task::TargetRef>& t) {
  if (!t) return nullptr;
  return Json{{"index", t->index}, {"role", task::to_string(t->role)}};
}

std::optional<task::TargetRef> target_from(const Json& j) {
  if (j.is_null()) return std::nullopt;
  task::TargetRef t;
  t.index = static_cast<int>(require_int(j, "index"));
  t.role = enum_from(require(j, "role"), kRoles, "role");
  return t;
}

Json sim_payload(const SimEvent& e) {
  Json p = Json::object();
  switch (e.kind) {
    case SimEventKind::GraspStart:
      p = {{"side", task::to_string(e.side)}, {"theta", e.theta}, {"orientation_dev", e.orientation_dev}};
      break;
    case SimEventKind::GraspEnd:
      p = {{"side", task::to_string(e.side)}, {"theta", e.theta}};
      break;
    case SimEventKind::Pierce:
    case SimEventKind::TipExit:
    case SimEventKind::TailExit:
      p = {{"target", target_json(e.target)}, {"location", to_json(e.location)}, {"upward", e.upward}};
      break;
    case SimEventKind::NeedleFree:
      break;
    case SimEventKind::IconActivated:
      p = {{"side", task::to_string(e.side)}, {"icon", task::to_string(e.icon)}};
      break;
    case SimEventKind::ForceExceedStart:
    case SimEventKind::ForceExceedEnd:
      p = {{"source", task::to_string(e.source)}, {"force", e.force}};
      break;
  }
  return p;
}

SimEvent sim_from(const std::string& kind, int64_t t, const Json& p) {
  SimEvent e;
  e.kind = enum_from(Json(kind), kSimKinds, "event kind");
  e.tick = t;
  switch (e.kind) {
    case SimEventKind::GraspStart:
      e.side = enum_from(require(p, "side"), task::kSides, "side");
      e.theta = require_number(p, "theta");
      e.orientation_dev = require_number(p, "orientation_dev");
      break;
    case SimEventKind::GraspEnd:
      e.side = enum_from(require(p, "side"), task::kSides, "side");
      e.theta = require_number(p, "theta");
      break;
    case SimEventKind::Pierce:
    case SimEventKind::TipExit:
    case SimEventKind::TailExit:
      e.target = target_from(require(p, "target"));
      e.location = vec3_from_json(require(p, "location"));
      if (!require(p, "upward").is_boolean()) schema("upward must be boolean");
      e.upward = p["upward"].get<bool>();
      break;
    case SimEventKind::NeedleFree:
      break;
    case SimEventKind::IconActivated:
      e.side = enum_from(require(p, "side"), task::kSides, "side");
      e.icon = enum_from(require(p, "icon"), task::kIcons, "icon");
      break;
    case SimEventKind::ForceExceedStart:
    case SimEventKind::ForceExceedEnd:
      e.source = enum_from(require(p, "source"), kSources, "source");
      e.force = require_number(p, "force");
      break;
  }
  return e;
}

Json opt(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

const Json& require(const Json& j, const char* key) {
  if (!j.is_object()) schema(std::string("expected object holding '") + key + "'");
  auto it = j.find(key);
  if (it == j.end()) schema(std::string("missing key '") + key + "'");
  return *it;
}

double require_number(const Json& j, const char* key) {
  const Json& v = require(j, key);
  if (!v.is_number()) schema(std::string("'") + key + "' must be a number");
  return v.get<double>();
}

int64_t require_int(const Json& j, const char* key) {
  const Json& v = require(j, key);
  if (!v.is_number_integer()) schema(std::string("'") + key + "' must be an integer");
  return v.get<int64_t>();
}

std::string require_string(const Json& j, const char* key) {
  const Json& v = require(j, key);
  if (!v.is_string()) schema(std::string("'") + key + "' must be a string");
  return v.get<std::string>();
}

Json to_json(const Vec3& v) { return Json::array({v.x, v.y, v.z}); }
Json to_json(const UnitQuat& q) { return Json::array({q.w(), q.x(), q.y(), q.z()}); }
Json to_json(const Pose& p) { return Json{{"p", to_json(p.position)}, {"q", to_json(p.orientation)}}; }

Json to_json(const geometry::ArcPath& a) {
  return Json{{"center", to_json(a.center)},     {"radius", a.radius},
              {"normal", to_json(a.plane_normal)}, {"ref_axis", to_json(a.ref_axis)},
              {"start", a.start_angle},            {"end", a.end_angle},
              {"drive", a.drive_direction}};
}

Vec3 vec3_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 3) schema("vector must be a 3-array");
  for (const auto& x : j)
    if (!x.is_number()) schema("vector components must be numbers");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

UnitQuat quat_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 4) schema("quaternion must be a 4-array [w,x,y,z]");
  for (const auto& x : j)
    if (!x.is_number()) schema("quaternion components must be numbers");
  return UnitQuat::exact(j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>());
}

Pose pose_from_json(const Json& j) { return {vec3_from_json(require(j, "p")), quat_from_json(require(j, "q"))}; }

geometry::ArcPath arc_from_json(const Json& j) {
  geometry::ArcPath a;
  a.center = vec3_from_json(require(j, "center"));
  a.radius = require_number(j, "radius");
  a.plane_normal = vec3_from_json(require(j, "normal"));
  a.ref_axis = vec3_from_json(require(j, "ref_axis"));
  a.start_angle = require_number(j, "start");
  a.end_angle = require_number(j, "end");
  a.drive_direction = static_cast<int>(require_int(j, "drive"));
  return a;
}

Json to_json(const task::TaskConfig& c) {
  return Json{
      {"needle", {{"radius", c.needle.radius}, {"span", c.needle.span}}},
      {"inner_radius", c.inner_radius},
      {"outer_radius", c.outer_radius},
      {"n_pairs", c.n_pairs},
      {"surface_normal", to_json(c.surface_normal)},
      {"tick_rate", c.tick_rate},
      {"pierce_tolerance", c.pierce_tolerance},
      {"force_threshold", c.force_threshold},
      {"stiffness_tissue", c.stiffness_tissue},
      {"stiffness_contact", c.stiffness_contact},
      {"icons", Json::array({to_json(c.icons[0]), to_json(c.icons[1]), to_json(c.icons[2])})},
      {"icon_proximity", c.icon_proximity},
      {"base_direction", Json::array({to_json(c.base_direction[0]), to_json(c.base_direction[1])})},
      {"rest_position", Json::array({to_json(c.rest_position[0]), to_json(c.rest_position[1])})},
      {"camera_forward", to_json(c.camera_forward)},
      {"shaft_length", c.shaft_length},
  };
}

task::TaskConfig task_config_from_json(const Json& j) {
  if (!j.is_object()) schema("task config must be an object");
  task::TaskConfig c;
  auto num = [&](const char* k, double& out) {
    if (j.contains(k)) out = require_number(j, k);
  };
  auto vec = [&](const char* k, Vec3& out) {
    if (j.contains(k)) out = vec3_from_json(j[k]);
  };
  auto vecs = [&](const char* k, auto& arr) {
    if (!j.contains(k)) return;
    const Json& a = j[k];
    if (!a.is_array() || a.size() != arr.size()) schema(std::string("'") + k + "' has the wrong length");
    for (std::size_t i = 0; i < arr.size(); ++i) arr[i] = vec3_from_json(a[i]);
  };
  if (j.contains("needle")) {
    const Json& n = j["needle"];
    if (n.contains("radius")) c.needle.radius = require_number(n, "radius");
    if (n.contains("span")) c.needle.span = require_number(n, "span");
  }
  num("inner_radius", c.inner_radius);
  num("outer_radius", c.outer_radius);
  if (j.contains("n_pairs")) c.n_pairs = static_cast<int>(require_int(j, "n_pairs"));
  vec("surface_normal", c.surface_normal);
  num("tick_rate", c.tick_rate);
  num("pierce_tolerance", c.pierce_tolerance);
  num("force_threshold", c.force_threshold);
  num("stiffness_tissue", c.stiffness_tissue);
  num("stiffness_contact", c.stiffness_contact);
  vecs("icons", c.icons);
  num("icon_proximity", c.icon_proximity);
  vecs("base_direction", c.base_direction);
  vecs("rest_position", c.rest_position);
  vec("camera_forward", c.camera_forward);
  num("shaft_length", c.shaft_length);
  c.validate();
  return c;
}

Json to_json(const coach::ThresholdTable& t) {
  Json a = Json::array();
  for (const auto& e : t.entries)
    a.push_back({{"metric", coach::to_string(e.trigger)},
                 {"threshold", e.threshold},
                 {"cue", cues::to_string(e.cue)},
                 {"prompt", e.prompt}});
  return a;
}

coach::ThresholdTable thresholds_from_json(const Json& j) {
  if (!j.is_array() || j.size() != coach::kTriggerCount)
    schema("thresholds must be an array of " + std::to_string(coach::kTriggerCount) + " entries");
  coach::ThresholdTable t;
  for (std::size_t i = 0; i < j.size(); ++i) {
    auto& e = t.entries[i];
    const auto trig = coach::trigger_from_string(require_string(j[i], "metric"));
    if (!trig) schema("unknown threshold metric");
    e.trigger = *trig;
    e.threshold = require_number(j[i], "threshold");
    const auto cue = cues::cue_from_string(require_string(j[i], "cue"));
    if (!cue) schema("unknown cue kind");
    e.cue = *cue;
    e.prompt = require_string(j[i], "prompt");
  }
  t.validate();
  return t;
}

Json to_json(const task::InstrumentCommand& c) {
  return Json{{"p", to_json(c.pose.position)}, {"q", to_json(c.pose.orientation)}, {"jaw", c.jaw}};
}

task::InstrumentCommand command_from_json(const Json& j) {
  task::InstrumentCommand c;
  c.pose = pose_from_json(j);
  c.jaw = require_number(j, "jaw");
  return c;
}

Json to_json(const cues::CueSet& s) {
  Json a = Json::array();
  for (auto k : cues::kAllCues)
    if (s.has(k)) a.push_back(cues::to_string(k));
  return a;
}

cues::CueSet cue_set_from_json(const Json& j) {
  if (!j.is_array()) schema("cue set must be an array");
  cues::CueSet s;
  for (const auto& x : j) {
    if (!x.is_string()) schema("cue kind must be a string");
    const auto k = cues::cue_from_string(x.get<std::string>());
    if (!k) schema("unknown cue kind '" + x.get<std::string>() + "'");
    s.add(*k);
  }
  return s;
}

Json to_json(const metrics::TaskMetrics& m) {
  Json o = Json::object();
  for (const auto& info : metrics::kMetrics) o[std::string(info.name)] = opt(m.get(info.metric));
  return o;
}

metrics::TaskMetrics task_metrics_from_json(const Json& j) {
  if (!j.is_object()) schema("metrics must be an object");
  metrics::TaskMetrics m;
  for (const auto& info : metrics::kMetrics) {
    const Json& v = require(j, std::string(info.name).c_str());
    if (v.is_null()) {
      m.set(info.metric, std::nullopt);
    } else {
      if (!v.is_number()) schema("metric value must be a number or null");
      m.set(info.metric, v.get<double>());
    }
  }
  return m;
}

Json to_json(const metrics::SegmentMetrics& m) {
  return Json{{"segment", m.segment},
              {"time", m.time},
              {"grasp_position_dev", opt(m.grasp_position_dev)},
              {"grasp_orientation_dev", opt(m.grasp_orientation_dev)},
              {"in_plane_dev", opt(m.in_plane_dev)},
              {"out_plane_dev", opt(m.out_plane_dev)},
              {"excess_pierces", m.excess_pierces},
              {"path_length", m.path_length}};
}

Json to_json(const cues::CueDescriptor& d) {
  Json o{{"kind", cues::to_string(d.kind)}, {"visible", d.visible}};
  if (d.instrument) o["instrument"] = task::to_string(*d.instrument);
  if (!d.points.empty()) {
    Json pts = Json::array();
    for (const auto& p : d.points) pts.push_back(to_json(p));
    o["points"] = std::move(pts);
  }
  if (d.ghost) {
    o["ghost"] = to_json(*d.ghost);
    o["alpha"] = d.alpha;
  }
  if (d.arc) o["arc"] = to_json(*d.arc);
  if (!d.schedule.empty()) o["schedule"] = d.schedule;
  if (d.flash_period > 0.0) o["flash_period"] = d.flash_period;
  if (d.kind == cues::CueKind::VideoDemo) {
    o["clip"] = d.clip_id;
    o["placement"] = cues::to_string(d.placement);
  }
  if (d.prompt) o["prompt"] = *d.prompt;
  return o;
}

Json to_json(const LoggedEvent& e) {
  struct V {
    Json operator()(const SimEvent& s) const { return sim_payload(s); }
    Json operator()(const tpm::TpmEvent& t) const {
      Json p{{"segment", t.segment}};
      if (t.kind != tpm::TpmEventKind::SegmentComplete && t.kind != tpm::TpmEventKind::TaskComplete) {
        p["from"] = tpm::to_string(t.from);
        p["to"] = tpm::to_string(t.to);
      }
      if (t.kind == tpm::TpmEventKind::Deviation) {
        p["deviation"] = tpm::to_string(t.deviation);
        p["detail"] = t.detail;
      }
      return p;
    }
    Json operator()(const CueEvent& c) const { return Json{{"cue", cues::to_string(c.kind)}}; }
    Json operator()(const NoteEvent& n) const { return Json{{"text", n.text}}; }
  };
  return Json{{"t", event_tick(e)}, {"kind", event_kind(e)}, {"payload", std::visit(V{}, e)}};
}

LoggedEvent event_from_json(const Json& j) {
  const int64_t t = require_int(j, "t");
  const std::string kind = require_string(j, "kind");
  const Json& p = require(j, "payload");
  if (!p.is_object()) schema("payload must be an object");
  if (is_sim_kind(kind)) return sim_from(kind, t, p);
  if (is_tpm_kind(kind)) {
    tpm::TpmEvent e;
    e.kind = enum_from(Json(kind), kTpmKinds, "event kind");
    e.tick = t;
    e.segment = static_cast<int>(require_int(p, "segment"));
    if (e.kind != tpm::TpmEventKind::SegmentComplete && e.kind != tpm::TpmEventKind::TaskComplete) {
      e.from = enum_from(require(p, "from"), kTopos, "topo");
      e.to = enum_from(require(p, "to"), kTopos, "topo");
    }
    if (e.kind == tpm::TpmEventKind::Deviation) {
      e.deviation = enum_from(require(p, "deviation"), kDeviations, "deviation");
      e.detail = require_string(p, "detail");
    }
    return e;
  }
  if (kind == "CueShown" || kind == "CueHidden") {
    const auto k = cues::cue_from_string(require_string(p, "cue"));
    if (!k) schema("unknown cue kind");
    return CueEvent{t, *k, kind == "CueShown"};
  }
  if (kind == "Prompt" || kind == "Warning")
    return NoteEvent{t, kind == "Prompt" ? NoteEvent::Kind::Prompt : NoteEvent::Kind::Warning,
                     require_string(p, "text")};
  schema("unknown event kind '" + kind + "'");
}

}  // namespace vcoach::io
