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

#include <doctest.h>

#include <fstream>

#include "support.hpp"
#include "vcoach/engine.hpp"
#include "vcoach/session.hpp"
#include "vcoach/synth.hpp"

using namespace vcoach;
using namespace vcoach::session;

namespace {

SessionRecord synthetic(coach::Mode mode, uint64_t seed, int segments = 3) {
  synth::SynthRequest req;
  req.profile = synth::novice_profile(seed);
  req.profile.help_probability = 1.0;
  req.mode = mode;
  req.segments = segments;
  req.participant = "p" + std::to_string(seed);
  return synth::synth_session(req);
}

TickRecord tick(int64_t t) {
  TickRecord r;
  r.t = t;
  r.input.tick = t;
  return r;
}

std::string drop_last_line(const std::string& text) {
  const auto end = text.rfind('\n', text.size() - 2);
  return text.substr(0, end + 1);
}

}  // namespace

TEST_CASE("append order") {
  SessionRecord r;
  test::require_code(ErrorCode::Protocol, [&] { r.append_event(NoteEvent{0, NoteEvent::Kind::Prompt, "x"}); });
  r.append_tick(tick(4));
  CHECK_NOTHROW(r.append_tick(tick(5)));
  test::require_code(ErrorCode::Protocol, [&] { r.append_tick(tick(4)); });
  test::require_code(ErrorCode::Protocol, [&] { r.append_tick(tick(7)); });
  CHECK_NOTHROW(r.append_event(NoteEvent{5, NoteEvent::Kind::Prompt, "a"}));
  CHECK_NOTHROW(r.append_event(NoteEvent{5, NoteEvent::Kind::Warning, "b"}));
  test::require_code(ErrorCode::Protocol, [&] { r.append_event(NoteEvent{4, NoteEvent::Kind::Prompt, "late"}); });
  REQUIRE(r.events.size() == 2);
  CHECK(std::get<NoteEvent>(r.events[0]).text == "a");
  CHECK(std::get<NoteEvent>(r.events[1]).text == "b");
}

TEST_CASE("serialize, parse and serialize again is byte-identical") {
  for (auto mode : {coach::Mode::None, coach::Mode::Teach, coach::Mode::Metrics, coach::Mode::User}) {
    CAPTURE(coach::to_string(mode));
    const auto rec = synthetic(mode, 3);
    const auto text = serialize(rec);
    const auto parsed = parse(text);
    CHECK(parsed == rec);
    CHECK(serialize(parsed) == text);
    // One header, one footer, a line per tick and per event.
    const auto lines = std::count(text.begin(), text.end(), '\n');
    CHECK(lines == static_cast<long>(2 + rec.ticks.size() + rec.events.size()));
  }
}

TEST_CASE("corrupt files are rejected") {
  const auto text = serialize(synthetic(coach::Mode::Teach, 5, 1));
  test::require_code(ErrorCode::Integrity, [&] { parse(drop_last_line(text)); });
  test::require_code(ErrorCode::Integrity, [&] { parse(text.substr(0, text.size() / 2)); });
  test::require_code(ErrorCode::Integrity, [&] { parse(""); });
  test::require_code(ErrorCode::Integrity, [&] { parse("not json\n"); });

  auto bumped = text;
  const auto pos = bumped.find("\"version\":1");
  REQUIRE(pos != std::string::npos);
  bumped.replace(pos, 11, "\"version\":2");
  test::require_code(ErrorCode::Version, [&] { parse(bumped); });

  // A dropped tick line breaks tick continuity.
  const auto second = text.find('\n') + 1;
  const auto third = text.find('\n', second) + 1;
  test::require_code(ErrorCode::Integrity, [&] { parse(text.substr(0, second) + text.substr(third)); });
}

TEST_CASE("replay reproduces the footer") {
  for (uint64_t seed : {1, 2}) {
    const auto rec = parse(serialize(synthetic(coach::Mode::Metrics, seed)));
    const auto a = replay(rec);
    const auto b = replay(rec);
    CHECK(a == *rec.footer);
    CHECK(a == b);
    CHECK(serialize_footer(a) == serialize_footer(*rec.footer));
    CHECK(evaluate(rec).task == *rec.footer);

    // Reruns reproduce every tick and event, cues included.
    const auto again = rerun(rec);
    CHECK(again.ticks == rec.ticks);
    CHECK(again.events == rec.events);

    auto tampered = rec;
    tampered.footer->completion_time += 1e-9;
    test::require_code(ErrorCode::Integrity, [&] { replay(tampered); });
  }
}

TEST_CASE("online segment metrics equal offline evaluation") {
  const auto rec = synthetic(coach::Mode::Metrics, 7, 4);
  Engine engine(rec.header);
  std::vector<metrics::SegmentMetrics> online;
  for (const auto& t : rec.ticks) {
    for (const auto& e : engine.step(t.input))
      if (const auto* te = std::get_if<tpm::TpmEvent>(&e); te && te->kind == tpm::TpmEventKind::SegmentComplete)
        online.push_back(*engine.last_segment_metrics());
  }
  const auto offline = evaluate(rec).segments;
  REQUIRE(online.size() == 4);
  REQUIRE(offline.size() >= online.size());
  for (std::size_t k = 0; k < online.size(); ++k) {
    CAPTURE(k);
    CHECK(online[k].segment == offline[k].segment);
    CHECK(online[k].time == doctest::Approx(offline[k].time));
    CHECK(online[k].grasp_position_dev == offline[k].grasp_position_dev);
    CHECK(online[k].grasp_orientation_dev == offline[k].grasp_orientation_dev);
    CHECK(online[k].in_plane_dev.value_or(-1) == doctest::Approx(offline[k].in_plane_dev.value_or(-1)));
    CHECK(online[k].out_plane_dev.value_or(-1) == doctest::Approx(offline[k].out_plane_dev.value_or(-1)));
    CHECK(online[k].excess_pierces == offline[k].excess_pierces);
  }
}

TEST_CASE("files") {
  test::TempDir dir;
  const auto rec = synthetic(coach::Mode::User, 9, 1);
  write_file(dir.path() / "s.vcs", rec);
  CHECK(read_file(dir.path() / "s.vcs") == rec);
  test::require_code(ErrorCode::Io, [&] { read_file(dir.path() / "missing.vcs"); });
}

TEST_CASE("expert clip store") {
  test::TempDir dir;
  const ClipStore store(dir.path());
  synth::build_clip_store(store, {}, 1);
  for (int k = 0; k < 8; ++k) CHECK(std::filesystem::exists(store.path_for(k)));

  const auto clip = store.clip(0);
  CHECK(clip.segment == 0);
  CHECK_NOTHROW(validate_clip(clip.record, 0));
  const auto& m = *clip.record.footer;
  CHECK(*m.grasp_position_dev < 5.0);
  CHECK(*m.grasp_orientation_dev < 5.0);
  CHECK(*m.in_plane_dev < 0.3);
  CHECK(*m.out_plane_dev < 0.3);
  CHECK(store.clip(5).record.header.config.start_segment == 5);

  test::require_code(ErrorCode::NotFound, [&] { store.clip(8); });
  test::require_code(ErrorCode::NotFound, [&] { store.clip(-1); });
  test::require_code(ErrorCode::Integrity, [&] { validate_clip(clip.record, 1); });

  // A pass with a protocol deviation is not a valid demonstration.
  synth::SynthRequest req;
  req.profile = synth::novice_profile(1);
  req.profile.grasp_bias = 0.0;
  req.profile.grasp_noise = 0.0;
  req.profile.orientation_bias = 0.0;
  req.segments = 1;
  auto rec = synth::synth_session(req);
  CHECK_NOTHROW(validate_clip(rec, 0));
  const auto first_later = std::find_if(rec.events.begin(), rec.events.end(),
                                        [](const LoggedEvent& e) { return event_tick(e) > 0; });
  rec.events.insert(first_later, test::crossing(task::SimEventKind::Pierce, 0, std::nullopt));
  test::require_code(ErrorCode::Integrity, [&] { store.put(rec); });
}
