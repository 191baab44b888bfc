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

#include "vcoach/session.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "vcoach/engine.hpp"
#include "vcoach/error.hpp"
#include "vcoach/json_io.hpp"

namespace vcoach::session {

using geometry::Pose;
using geometry::UnitQuat;
using geometry::Vec3;

using io::Json;

void SessionRecord::append_tick(const TickRecord& tick) {
  if (!ticks.empty() && tick.t != ticks.back().t + 1)
    fail(ErrorCode::Protocol, "tick " + std::to_string(tick.t) + " does not follow " + std::to_string(ticks.back().t));
  ticks.push_back(tick);
}

void SessionRecord::append_event(const LoggedEvent& event) {
  if (ticks.empty()) fail(ErrorCode::Protocol, "event before the first tick");
  const int64_t t = event_tick(event);
  if (t != ticks.back().t)
    fail(ErrorCode::Protocol,
         "event at tick " + std::to_string(t) + " does not belong to tick " + std::to_string(ticks.back().t));
  events.push_back(event);
}

namespace {

Json header_json(const SessionHeader& h) {
  return Json{{"version", h.version},
              {"config",
               {{"task", io::to_json(h.config.task)},
                {"thresholds", io::to_json(h.config.thresholds)},
                {"start_segment", h.config.start_segment}}},
              {"mode", coach::to_string(h.mode)},
              {"participant", h.participant},
              {"handedness", task::to_string(h.handedness)},
              {"seed", h.seed}};
}

SessionHeader header_from(const Json& j) {
  SessionHeader h;
  h.version = static_cast<int>(io::require_int(j, "version"));
  if (h.version != kSessionVersion)
    fail(ErrorCode::Version, "unsupported session version " + std::to_string(h.version));
  const Json& c = io::require(j, "config");
  h.config.task = io::task_config_from_json(io::require(c, "task"));
  h.config.thresholds = io::thresholds_from_json(io::require(c, "thresholds"));
  h.config.start_segment = static_cast<int>(io::require_int(c, "start_segment"));
  const auto mode = coach::mode_from_string(io::require_string(j, "mode"));
  if (!mode) fail(ErrorCode::InvalidArgument, "schema: unknown mode");
  h.mode = *mode;
  h.participant = io::require_string(j, "participant");
  const auto hand = io::require_string(j, "handedness");
  if (hand != "left" && hand != "right") fail(ErrorCode::InvalidArgument, "schema: handedness must be left or right");
  h.handedness = hand == "left" ? task::Side::Left : task::Side::Right;
  const Json& seed = io::require(j, "seed");
  if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<int64_t>() >= 0))
    fail(ErrorCode::InvalidArgument, "schema: seed must be a non-negative integer");
  h.seed = seed.get<uint64_t>();
  return h;
}

TickRecord tick_from(const Json& j) {
  TickRecord t;
  t.t = io::require_int(j, "t");
  t.input.tick = t.t;
  t.input.instruments[0] = io::command_from_json(io::require(j, "L"));
  t.input.instruments[1] = io::command_from_json(io::require(j, "R"));
  const Json& m = io::require(j, "master");
  if (!m.is_array() || m.size() != 2) fail(ErrorCode::InvalidArgument, "schema: master must hold two positions");
  t.input.master = {io::vec3_from_json(m[0]), io::vec3_from_json(m[1])};
  t.needle = io::pose_from_json(io::require(j, "needle"));
  t.cues = io::cue_set_from_json(io::require(j, "cues"));
  return t;
}

// Tick lines dominate session files, so they get a direct writer and a
// reader for that exact layout. Any other well-formed JSON tick line goes
// through the generic decoder.

void put_number(std::string& out, double v) {
  if (!std::isfinite(v)) fail(ErrorCode::Domain, "non-finite value in tick record");
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, r.ptr);
}

void put_array(std::string& out, std::initializer_list<double> xs) {
  out += '[';
  bool first = true;
  for (double x : xs) {
    if (!first) out += ',';
    first = false;
    put_number(out, x);
  }
  out += ']';
}

void put_pose(std::string& out, const Pose& p) {
  out += "\"p\":";
  put_array(out, {p.position.x, p.position.y, p.position.z});
  out += ",\"q\":";
  put_array(out, {p.orientation.w(), p.orientation.x(), p.orientation.y(), p.orientation.z()});
}

void put_command(std::string& out, const task::InstrumentCommand& c) {
  out += "{\"jaw\":";
  put_number(out, c.jaw);
  out += ',';
  put_pose(out, c.pose);
  out += '}';
}

class TickReader {
 public:
  explicit TickReader(std::string_view s) : s_(s) {}

  std::optional<TickRecord> read() {
    TickRecord t;
    if (!lit("{\"L\":") || !command(t.input.instruments[0]) || !lit(",\"R\":") ||
        !command(t.input.instruments[1]) || !lit(",\"cues\":[") || !cue_list(t.cues) || !lit(",\"master\":[") ||
        !vec(t.input.master[0]) || !lit(",") || !vec(t.input.master[1]) || !lit("],\"needle\":{") ||
        !pose(t.needle) || !lit("},\"t\":") || !integer(t.t) || !lit("}") || i_ != s_.size())
      return std::nullopt;
    t.input.tick = t.t;
    return t;
  }

 private:
  bool lit(std::string_view l) {
    if (s_.substr(i_, l.size()) != l) return false;
    i_ += l.size();
    return true;
  }
  std::size_t number_end() const {
    std::size_t j = i_;
    while (j < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[j])) || s_[j] == '-' || s_[j] == '+' ||
                             s_[j] == '.' || s_[j] == 'e' || s_[j] == 'E'))
      ++j;
    return j;
  }
  bool number(double& v) {
    const std::size_t j = number_end();
    if (j == i_ || s_[i_] == '+') return false;
    const auto r = std::from_chars(s_.data() + i_, s_.data() + j, v);
    if (r.ec != std::errc{} || r.ptr != s_.data() + j) return false;
    i_ = j;
    return true;
  }
  bool integer(int64_t& v) {
    const std::size_t j = number_end();
    if (j == i_) return false;
    const auto r = std::from_chars(s_.data() + i_, s_.data() + j, v);
    if (r.ec != std::errc{} || r.ptr != s_.data() + j) return false;
    i_ = j;
    return true;
  }
  bool vec(Vec3& v) {
    return lit("[") && number(v.x) && lit(",") && number(v.y) && lit(",") && number(v.z) && lit("]");
  }
  bool pose(Pose& p) {
    double w, x, y, z;
    if (!lit("\"p\":") || !vec(p.position) || !lit(",\"q\":[") || !number(w) || !lit(",") || !number(x) ||
        !lit(",") || !number(y) || !lit(",") || !number(z) || !lit("]"))
      return false;
    p.orientation = UnitQuat::exact(w, x, y, z);
    return true;
  }
  bool command(task::InstrumentCommand& c) {
    return lit("{\"jaw\":") && number(c.jaw) && lit(",") && pose(c.pose) && lit("}");
  }
  bool cue_list(cues::CueSet& set) {
    if (lit("]")) return true;
    do {
      if (!lit("\"")) return false;
      const std::size_t j = s_.find('"', i_);
      if (j == std::string_view::npos) return false;
      const auto k = cues::cue_from_string(s_.substr(i_, j - i_));
      if (!k) return false;
      set.add(*k);
      i_ = j + 1;
    } while (lit(","));
    return lit("]");
  }

  std::string_view s_;
  std::size_t i_ = 0;
};

[[noreturn]] void corrupt(std::size_t line, const std::string& what) {
  fail(ErrorCode::Integrity, "line " + std::to_string(line) + ": " + what);
}

}  // namespace

std::string serialize_header(const SessionHeader& h) { return header_json(h).dump(); }
std::string serialize_tick(const TickRecord& t) {
  std::string out;
  out.reserve(512);
  out += "{\"L\":";
  put_command(out, t.input.instruments[0]);
  out += ",\"R\":";
  put_command(out, t.input.instruments[1]);
  out += ",\"cues\":[";
  bool first = true;
  for (auto k : cues::kAllCues) {
    if (!t.cues.has(k)) continue;
    if (!first) out += ',';
    first = false;
    out += '"';
    out += cues::to_string(k);
    out += '"';
  }
  out += "],\"master\":[";
  put_array(out, {t.input.master[0].x, t.input.master[0].y, t.input.master[0].z});
  out += ',';
  put_array(out, {t.input.master[1].x, t.input.master[1].y, t.input.master[1].z});
  out += "],\"needle\":{";
  put_pose(out, t.needle);
  out += "},\"t\":";
  out += std::to_string(t.t);
  out += '}';
  return out;
}
std::string serialize_event(const LoggedEvent& e) { return io::to_json(e).dump(); }
std::string serialize_footer(const metrics::TaskMetrics& m) { return Json{{"metrics", io::to_json(m)}}.dump(); }

std::string serialize(const SessionRecord& record) {
  std::string out = serialize_header(record.header);
  out += '\n';
  std::size_t ev = 0;
  for (const auto& t : record.ticks) {
    out += serialize_tick(t);
    out += '\n';
    while (ev < record.events.size() && event_tick(record.events[ev]) == t.t) {
      out += serialize_event(record.events[ev++]);
      out += '\n';
    }
  }
  if (ev != record.events.size()) fail(ErrorCode::Internal, "events out of tick order");
  if (record.footer) {
    out += serialize_footer(*record.footer);
    out += '\n';
  }
  return out;
}

SessionRecord parse(std::string_view text) {
  SessionRecord rec;
  bool have_header = false, have_footer = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) corrupt(line_no + 1, "truncated line");
    const std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (line.empty()) continue;
    if (have_footer) corrupt(line_no, "content after footer");
    if (have_header && line.starts_with("{\"L\":")) {
      if (auto t = TickReader(line).read()) {
        try {
          rec.append_tick(*t);
        } catch (const Error& e) {
          corrupt(line_no, e.what());
        }
        continue;
      }
    }
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::exception& e) {
      corrupt(line_no, std::string("malformed record: ") + e.what());
    }
    if (!j.is_object()) corrupt(line_no, "record is not an object");
    try {
      if (j.contains("version")) {
        if (have_header) corrupt(line_no, "duplicate header");
        rec.header = header_from(j);
        have_header = true;
        continue;
      }
      if (!have_header) corrupt(line_no, "missing header");
      if (j.contains("metrics")) {
        rec.footer = io::task_metrics_from_json(j["metrics"]);
        have_footer = true;
      } else if (j.contains("L")) {
        rec.append_tick(tick_from(j));
      } else if (j.contains("kind")) {
        rec.append_event(io::event_from_json(j));
      } else {
        corrupt(line_no, "unrecognized record");
      }
    } catch (const Error& e) {
      if (e.code() == ErrorCode::Version || e.code() == ErrorCode::Integrity) throw;
      corrupt(line_no, e.what());
    }
  }
  if (!have_header) fail(ErrorCode::Integrity, "empty session file");
  if (!have_footer) fail(ErrorCode::Integrity, "truncated session: missing footer");
  return rec;
}

SessionRecord read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

void write_file(const std::filesystem::path& path, const SessionRecord& record) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const std::string text = serialize(record);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::Io, "cannot write " + path.string());
  out << text;
  if (!out) fail(ErrorCode::Io, "write failed for " + path.string());
}

metrics::MetricsReport evaluate(const SessionRecord& record) {
  return metrics::evaluate(record.header.config.task, record.ticks, sim_events(record.events),
                           record.header.config.start_segment);
}

SessionRecord rerun(const SessionRecord& record) {
  Engine engine(record.header);
  for (const auto& t : record.ticks) engine.step(t.input);
  return engine.finish();
}

metrics::TaskMetrics replay(const SessionRecord& record) {
  if (!record.footer) fail(ErrorCode::Integrity, "session has no footer");
  const auto again = rerun(record);
  if (serialize_footer(*again.footer) != serialize_footer(*record.footer))
    fail(ErrorCode::Integrity, "replayed metrics differ from the stored footer");
  return *again.footer;
}

void validate_clip(const SessionRecord& record, int segment) {
  const auto& cfg = record.header.config;
  if (cfg.start_segment != segment)
    fail(ErrorCode::Integrity, "clip starts at segment " + std::to_string(cfg.start_segment));
  tpm::TaskProgress p;
  p.segment_index = segment;
  bool done = false;
  for (const auto& e : sim_events(record.events)) {
    const auto adv = tpm::advance(p, std::span<const task::SimEvent>(&e, 1), cfg.task);
    p = adv.progress;
    for (const auto& te : adv.events)
      if (te.kind == tpm::TpmEventKind::SegmentComplete && te.segment == segment) done = true;
    if (done) break;
  }
  if (!done) fail(ErrorCode::Integrity, "clip does not complete segment " + std::to_string(segment));
  if (!p.deviations.empty()) fail(ErrorCode::Integrity, "clip contains protocol deviations");
}

ClipStore::ClipStore(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::filesystem::path ClipStore::path_for(int segment) const {
  return dir_ / ("segment_" + std::to_string(segment) + ".vcs");
}

void ClipStore::put(const SessionRecord& record) const {
  const int seg = record.header.config.start_segment;
  validate_clip(record, seg);
  write_file(path_for(seg), record);
}

ExpertClip ClipStore::clip(int segment) const {
  if (segment < 0) fail(ErrorCode::NotFound, "no clip for segment " + std::to_string(segment));
  const auto path = path_for(segment);
  if (!std::filesystem::exists(path)) fail(ErrorCode::NotFound, "no clip for segment " + std::to_string(segment));
  auto rec = read_file(path);
  if (segment >= rec.header.config.task.n_pairs)
    fail(ErrorCode::NotFound, "segment " + std::to_string(segment) + " out of range");
  validate_clip(rec, segment);
  return {segment, std::move(rec)};
}

}  // namespace vcoach::session
