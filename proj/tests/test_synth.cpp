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
#include "vcoach/session.hpp"
#include "vcoach/synth.hpp"

using namespace vcoach;
using namespace vcoach::synth;

namespace {

session::SessionRecord run(SynthProfile p, coach::Mode mode = coach::Mode::None, int segments = -1) {
  SynthRequest req;
  req.profile = p;
  req.mode = mode;
  req.segments = segments;
  return synth_session(req);
}

int deviations(const session::SessionRecord& rec) {
  int n = 0;
  for (const auto& e : rec.events)
    if (const auto* t = std::get_if<tpm::TpmEvent>(&e)) n += t->kind == tpm::TpmEventKind::Deviation;
  return n;
}

}  // namespace

TEST_CASE("synthetic sessions are deterministic per seed") {
  const auto a = session::serialize(run(novice_profile(42), coach::Mode::User));
  const auto b = session::serialize(run(novice_profile(42), coach::Mode::User));
  CHECK(a == b);
  CHECK(a != session::serialize(run(novice_profile(43), coach::Mode::User)));
}

TEST_CASE("the expert completes every segment without deviations") {
  for (uint64_t seed = 1; seed <= 100; ++seed) {
    CAPTURE(seed);
    const auto rec = run(expert_profile(seed));
    CHECK(deviations(rec) == 0);
    REQUIRE(rec.footer.has_value());
    CHECK(rec.footer->excess_needle_pierces == 0.0);
    int completes = 0;
    for (const auto& e : rec.events)
      if (const auto* t = std::get_if<tpm::TpmEvent>(&e)) completes += t->kind == tpm::TpmEventKind::TaskComplete;
    CHECK(completes == 1);
  }
}

TEST_CASE("experts outperform novices on every deficit") {
  for (uint64_t seed = 1; seed <= 10; ++seed) {
    const auto e = *run(expert_profile(seed)).footer;
    const auto n = *run(novice_profile(seed)).footer;
    CHECK(*e.grasp_position_dev < *n.grasp_position_dev);
    CHECK(*e.grasp_orientation_dev < *n.grasp_orientation_dev);
    CHECK(*e.in_plane_dev < *n.in_plane_dev);
    CHECK(*e.out_plane_dev < *n.out_plane_dev);
    CHECK(e.completion_time < n.completion_time);
  }
}

TEST_CASE("simulated event streams respect the world invariants") {
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    const auto rec = run(novice_profile(seed), coach::Mode::Teach);
    std::optional<task::Side> holder;
    bool tip_in = false;
    for (const auto& ev : sim_events(rec.events)) {
      using K = task::SimEventKind;
      if (ev.kind == K::GraspStart) {
        CHECK_FALSE(holder.has_value());
        holder = ev.side;
      } else if (ev.kind == K::GraspEnd) {
        REQUIRE(holder.has_value());
        CHECK(*holder == ev.side);
        holder.reset();
      } else if (ev.kind == K::Pierce) {
        tip_in = true;
      } else if (ev.kind == K::TipExit) {
        CHECK(tip_in);
        tip_in = false;
      }
    }
  }
}

TEST_CASE("profiles") {
  CHECK(profile_from_string("expert") == ProfileKind::Expert);
  CHECK_FALSE(profile_from_string("master").has_value());
  auto p = novice_profile(1);
  p.grasp_noise = -1.0;
  test::require_code(ErrorCode::InvalidArgument, [&] { p.validate(); });
  p = novice_profile(1);
  p.pace = 0.0;
  test::require_code(ErrorCode::InvalidArgument, [&] { p.validate(); });
  p = novice_profile(1);
  p.pace = 0.002;
  test::require_code(ErrorCode::Generation, [&] { run(p, coach::Mode::None, 1); });
  CHECK(expected_wobble_deviation(1.5) == doctest::Approx(3.0 / geometry::kPi));
}

TEST_CASE("cohorts") {
  CHECK(plan_modes(Plan::Study) == std::array{coach::Mode::None, coach::Mode::Teach, coach::Mode::Metrics,
                                              coach::Mode::User, coach::Mode::None});
  for (auto m : plan_modes(Plan::Control)) CHECK(m == coach::Mode::None);

  CohortOptions study;
  study.participants = 2;
  study.seed = 100;
  CohortOptions control = study;
  control.plan = Plan::Control;

  const auto s = participant_sessions(study, 0);
  const auto c = participant_sessions(control, 0);
  CHECK(s.participant == "p001");
  for (int r = 0; r < 5; ++r) {
    CHECK(s.repetitions[r].header.mode == plan_modes(Plan::Study)[r]);
    CHECK(s.repetitions[r].header.participant == "p001");
  }
  // Same person in both plans: identical baseline, coached orientation gain afterwards.
  CHECK(session::serialize(s.repetitions[0]) == session::serialize(c.repetitions[0]));
  const double gain_s = *s.repetitions[0].footer->grasp_orientation_dev - *s.repetitions[4].footer->grasp_orientation_dev;
  const double gain_c = *c.repetitions[0].footer->grasp_orientation_dev - *c.repetitions[4].footer->grasp_orientation_dev;
  CHECK(gain_s > gain_c + 6.0);

  test::TempDir dir;
  write_cohort(dir.path(), study);
  for (const char* who : {"p001", "p002"})
    for (auto label : kRepetitionLabels)
      CHECK(std::filesystem::exists(dir.path() / who / (std::string(label) + ".vcs")));
  CHECK(session::read_file(dir.path() / "p001" / "final.vcs") == s.repetitions[4]);
}
