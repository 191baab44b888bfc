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

#include "support.hpp"
#include "vcoach/coach.hpp"
#include "vcoach/json_io.hpp"
#include "vcoach/synth.hpp"

using namespace vcoach;
using namespace vcoach::coach;
using cues::CueKind;

namespace {

std::vector<tpm::TaskProgress> some_states() {
  std::vector<tpm::TaskProgress> out;
  for (int seg : {0, 3, 7})
    for (auto topo : {tpm::Topo::S0, tpm::Topo::S1, tpm::Topo::S2, tpm::Topo::S3}) {
      tpm::TaskProgress p;
      p.segment_index = seg;
      p.topo = topo;
      p.phase = topo == tpm::Topo::S0 ? tpm::Phase::Setup : tpm::Phase::Driving;
      out.push_back(p);
    }
  return out;
}

metrics::SegmentMetrics quiet_segment() {
  metrics::SegmentMetrics m;
  m.time = 10.0;
  m.grasp_position_dev = 1.0;
  m.grasp_orientation_dev = 1.0;
  m.in_plane_dev = 0.1;
  m.out_plane_dev = 0.1;
  return m;
}

}  // namespace

TEST_CASE("mode names") {
  for (Mode m : {Mode::Teach, Mode::Metrics, Mode::User, Mode::None}) CHECK(mode_from_string(to_string(m)) == m);
  CHECK_FALSE(mode_from_string("coach").has_value());
}

TEST_CASE("teach authorizes every cue in every state") {
  for (const auto& p : some_states())
    for (bool help : {false, true}) {
      const auto i = decide(Mode::Teach, p, quiet_segment(), help, default_thresholds());
      CHECK(i.authorized == cues::CueSet::all());
      CHECK(i.prompts.empty());
    }
}

TEST_CASE("user mode needs a help request; none mode never shows cues") {
  for (const auto& p : some_states()) {
    CHECK(decide(Mode::User, p, std::nullopt, false, default_thresholds()).authorized.empty());
    CHECK(decide(Mode::User, p, std::nullopt, true, default_thresholds()).authorized == cues::CueSet::all());
    CHECK(decide(Mode::None, p, quiet_segment(), true, default_thresholds()).authorized.empty());
  }
}

TEST_CASE("metrics mode intervenes on the previous segment's excesses") {
  tpm::TaskProgress p;
  p.segment_index = 3;
  auto m = quiet_segment();
  CHECK(decide(Mode::Metrics, p, m, false, default_thresholds()).authorized.empty());

  m.grasp_orientation_dev = 20.0;
  const auto i = decide(Mode::Metrics, p, m, false, default_thresholds());
  CHECK(i.authorized.size() == 1);
  CHECK(i.authorized.has(CueKind::GraspOrientation));
  REQUIRE(i.causes.size() == 1);
  CHECK(i.causes[0].trigger == Trigger::GraspOrientationDev);
  CHECK(i.causes[0].value == 20.0);
  CHECK(i.causes[0].threshold == 15.0);
  REQUIRE(i.prompts.size() == 1);
  CHECK(i.prompts[0].first == CueKind::GraspOrientation);
  CHECK(i.prompts[0].second.find("20") != std::string::npos);
  CHECK(i.prompts[0].second.find("15") != std::string::npos);

  // Equal to the threshold is not an excess.
  m.grasp_orientation_dev = 15.0;
  CHECK(decide(Mode::Metrics, p, m, false, default_thresholds()).authorized.empty());

  // Several excesses map to their own cues.
  m = quiet_segment();
  m.time = 45.0;
  m.excess_pierces = 2;
  m.in_plane_dev = 1.5;
  const auto many = decide(Mode::Metrics, p, m, false, default_thresholds());
  CHECK(many.authorized == cues::CueSet{}.add(CueKind::VideoDemo).add(CueKind::IdealInstrument).add(CueKind::IdealDrivePath));
  CHECK(many.prompts.size() == 3);

  // Missing deficits never trigger.
  m = quiet_segment();
  m.grasp_position_dev.reset();
  CHECK(decide(Mode::Metrics, p, m, false, default_thresholds()).authorized.empty());

  // First segment has nothing to react to; later ones must be given metrics.
  CHECK(decide(Mode::Metrics, {}, std::nullopt, false, default_thresholds()).authorized.empty());
  test::require_code(ErrorCode::InvalidArgument,
                     [&] { decide(Mode::Metrics, p, std::nullopt, false, default_thresholds()); });
}

TEST_CASE("metrics mode depends only on the given segment metrics") {
  auto m = quiet_segment();
  m.grasp_position_dev = 25.0;
  const auto ref = decide(Mode::Metrics, some_states()[4], m, true, default_thresholds());
  for (const auto& p : some_states()) {
    if (p.segment_index == 0) continue;
    const auto i = decide(Mode::Metrics, p, m, false, default_thresholds());
    CHECK(i.authorized == ref.authorized);
    CHECK(i.prompts == ref.prompts);
  }
}

TEST_CASE("default thresholds") {
  const auto t = default_thresholds();
  CHECK(t.lookup(CueKind::GraspOrientation) == 15.0);
  CHECK(t.lookup(Trigger::GraspOrientationDev).cue == CueKind::GraspOrientation);
  for (const auto& e : t.entries) CHECK(e.threshold > 0.0);
  CHECK_NOTHROW(t.validate());
  CHECK(io::thresholds_from_json(io::Json::parse(io::to_json(t).dump())) == t);

  auto dup = t;
  dup.entries[1].trigger = Trigger::GraspPositionDev;
  test::require_code(ErrorCode::InvalidArgument, [&] { dup.validate(); });
  auto zero = t;
  zero.entries[0].threshold = 0.0;
  test::require_code(ErrorCode::InvalidArgument, [&] { zero.validate(); });
}

TEST_CASE("render_prompt") {
  ThresholdEntry e{Trigger::SegmentTime, 30.0, CueKind::VideoDemo, "{value} over {threshold}, {value}"};
  CHECK(render_prompt(e, 42.25) == "42.2 over 30, 42.2");
  CHECK(render_prompt(e, 31.0) == "31 over 30, 31");
}

TEST_CASE("sessions without authorization show no cues") {
  for (auto mode : {Mode::None, Mode::User}) {
    synth::SynthRequest req;
    req.profile = synth::novice_profile(4);
    req.profile.help_probability = 0.0;
    req.mode = mode;
    req.segments = 2;
    const auto rec = synth::synth_session(req);
    for (const auto& e : rec.events) CHECK_FALSE(std::holds_alternative<CueEvent>(e));
    for (const auto& t : rec.ticks) CHECK(t.cues.empty());
  }
}
