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

#include <random>

#include "support.hpp"
#include "vcoach/metrics.hpp"
#include "vcoach/synth.hpp"

using namespace vcoach;
using namespace vcoach::metrics;
using geometry::Pose;
using geometry::UnitQuat;
using task::SimEvent;
using K = task::SimEventKind;

namespace {

const task::TaskConfig kConfig = task::default_task_config();

std::vector<Vec3> transformed(const std::vector<Vec3>& pts, const Pose& p) {
  std::vector<Vec3> out;
  for (const auto& v : pts) out.push_back(p.transform(v));
  return out;
}

std::vector<Vec3> cube(double edge) {
  std::vector<Vec3> out;
  for (int i = 0; i < 8; ++i) out.push_back({edge * (i & 1), edge * ((i >> 1) & 1), edge * ((i >> 2) & 1)});
  return out;
}

SimEvent force(K kind, int64_t tick, task::ForceSource src) {
  auto e = test::sim(kind, tick);
  e.source = src;
  return e;
}

const Pose kRigid{{3, -7, 11}, UnitQuat::from_axis_angle({1, 2, -1}, 37.0)};

}  // namespace

TEST_CASE("path length") {
  CHECK(path_length(std::vector<Vec3>{{0, 0, 0}, {10, 0, 0}}) == doctest::Approx(10.0));
  CHECK(path_length(std::vector<Vec3>(20, Vec3{1, 2, 3})) == 0.0);

  std::vector<Vec3> circle;
  for (int k = 0; k <= 360; ++k) {
    const double a = geometry::deg2rad(k);
    circle.push_back({5 * std::cos(a), 5 * std::sin(a), 0});
  }
  const double c = 2 * geometry::kPi * 5;
  CHECK(std::abs(path_length(circle) - c) / c < 1e-3);
  CHECK(path_length(transformed(circle, kRigid)) == doctest::Approx(path_length(circle)).epsilon(1e-12));

  // Additive over a split at any sample.
  const std::vector<Vec3> first(circle.begin(), circle.begin() + 101), rest(circle.begin() + 100, circle.end());
  CHECK(path_length(first) + path_length(rest) == doctest::Approx(path_length(circle)).epsilon(1e-12));

  test::require_code(ErrorCode::Domain, [] { path_length(std::vector<Vec3>{{0, 0, 0}}); });
}

TEST_CASE("movement onsets") {
  const double rate = 50.0;
  std::vector<Vec3> still(501, Vec3{1, 1, 1});
  CHECK(movement_onsets(still, rate) == 0);

  // One sustained 10 mm/s move over a 10 s session.
  std::vector<MotionSample> samples(501);
  for (int i = 0; i <= 500; ++i) {
    samples[i].tick = i;
    samples[i].tip[0] = {10.0 * i / rate, 0, 0};
    samples[i].tip[1] = {0, 0, 0};
  }
  CHECK(movements_rate(samples, rate, 10.0) == doctest::Approx(0.1));

  // Two bursts separated by rests below v_lo.
  std::vector<Vec3> bursts;
  double x = 0.0;
  const auto segment = [&](int n, double speed) {
    for (int i = 0; i < n; ++i) {
      x += speed / rate;
      bursts.push_back({x, 0, 0});
    }
  };
  bursts.push_back({0, 0, 0});
  segment(50, 0.5);
  segment(50, 20.0);
  segment(50, 1.0);
  segment(50, 20.0);
  segment(50, 0.0);
  CHECK(movement_onsets(bursts, rate) == 2);
  // Dipping only to between the thresholds does not re-arm.
  bursts.assign(1, {0, 0, 0});
  x = 0.0;
  segment(50, 20.0);
  segment(50, 3.5);
  segment(50, 20.0);
  CHECK(movement_onsets(bursts, rate) == 1);
}

TEST_CASE("ribbon area") {
  const std::vector<Vec3> tips{{0, 0, 0}, {10, 0, 0}}, shafts{{0, 0, 10}, {10, 0, 10}};
  CHECK(ribbon_area(tips, shafts) == doctest::Approx(100.0));
  CHECK(ribbon_area(transformed(tips, kRigid), transformed(shafts, kRigid)) == doctest::Approx(100.0));
  const std::vector<Vec3> t0{{1, 1, 1}, {1, 1, 1}}, s0{{1, 1, 11}, {1, 1, 11}};
  CHECK(ribbon_area(t0, s0) == 0.0);

  // A tool spinning about its own shaft axis sweeps nothing.
  std::vector<Vec3> tt, ss;
  for (int k = 0; k <= 36; ++k) {
    const Pose p{{2, 3, 4}, UnitQuat::from_axis_angle({0, 0, 1}, 10.0 * k)};
    tt.push_back(p.position);
    ss.push_back(task::shaft_point(p, kConfig));
  }
  CHECK(ribbon_area(tt, ss) == doctest::Approx(0.0).epsilon(1e-12));
  test::require_code(ErrorCode::InvalidArgument, [&] { ribbon_area(tips, std::vector<Vec3>{{0, 0, 0}}); });
}

TEST_CASE("convex hull volume") {
  CHECK(convex_hull_volume(cube(10.0)) == 1000.0);
  CHECK(convex_hull_volume(transformed(cube(10.0), kRigid)) == doctest::Approx(1000.0).epsilon(1e-12));

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  auto filled = cube(10.0);
  for (int i = 0; i < 500; ++i) filled.push_back({u(rng), u(rng), u(rng)});
  std::shuffle(filled.begin(), filled.end(), rng);
  CHECK(convex_hull_volume(filled) == doctest::Approx(1000.0).epsilon(1e-12));

  std::vector<Vec3> flat;
  for (int i = 0; i < 50; ++i) flat.push_back({u(rng), u(rng), 2.0});
  CHECK(convex_hull_volume(flat) == 0.0);
  CHECK(convex_hull_volume(std::vector<Vec3>{{1, 2, 3}}) == 0.0);
  CHECK(convex_hull_volume(std::vector<Vec3>{}) == 0.0);

  // Regular octahedron with vertices at distance 5: (4/3) * 5^3.
  const std::vector<Vec3> oct{{5, 0, 0}, {-5, 0, 0}, {0, 5, 0}, {0, -5, 0}, {0, 0, 5}, {0, 0, -5}};
  CHECK(convex_hull_volume(oct) == doctest::Approx(4.0 / 3.0 * 125.0).epsilon(1e-12));

  // Random clouds: bounded by their box and rigid-invariant.
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Vec3> cloud;
    for (int i = 0; i < 200; ++i) cloud.push_back({u(rng), u(rng) * 0.5, u(rng) * 2.0});
    const double v = convex_hull_volume(cloud);
    CHECK(v > 0.0);
    CHECK(v <= 10.0 * 5.0 * 20.0);
    CHECK(convex_hull_volume(transformed(cloud, kRigid)) == doctest::Approx(v).epsilon(1e-9));
  }
}

TEST_CASE("force excess pairing") {
  using S = task::ForceSource;
  const std::vector<SimEvent> events{force(K::ForceExceedStart, 0, S::InstrumentLeft),
                                     force(K::ForceExceedEnd, 50, S::InstrumentLeft),
                                     force(K::ForceExceedStart, 100, S::InstrumentRight),
                                     force(K::ForceExceedEnd, 225, S::InstrumentRight),
                                     force(K::ForceExceedStart, 300, S::NeedleTissue)};
  const auto m = error_metrics(events, kConfig, 400);
  CHECK(m.instrument_force_count == 2);
  CHECK(m.instrument_force_time == doctest::Approx(3.5));
  // The open interval closes at the final tick.
  CHECK(m.needle_tissue_force_count == 1);
  CHECK(m.needle_tissue_force_time == doctest::Approx(2.0));
}

TEST_CASE("excess needle pierces") {
  std::vector<SimEvent> clean;
  for (int i = 0; i < 8; ++i)
    for (auto& e : test::clean_pass(i, 10 * i)) clean.push_back(e);
  CHECK(error_metrics(clean, kConfig, 100).excess_needle_pierces == 0);

  // Retract out of the entry, then pierce it again.
  std::vector<SimEvent> repierce{test::crossing(K::Pierce, 1, test::entry(0)),
                                 test::crossing(K::TipExit, 2, test::entry(0), true)};
  for (auto& e : test::clean_pass(0, 3)) repierce.push_back(e);
  const auto m = error_metrics(repierce, kConfig, 10);
  CHECK(m.excess_needle_pierces == 1);
  REQUIRE(m.excess_pierces_per_segment.size() >= 1);
  CHECK(m.excess_pierces_per_segment[0] == 1);

  const std::vector<SimEvent> off{test::crossing(K::Pierce, 1, std::nullopt)};
  CHECK(error_metrics(off, kConfig, 10).excess_needle_pierces == 1);
}

TEST_CASE("deficit metrics") {
  const std::vector<DriveGrasp> ideal{{0, 150.0, 0.0}, {1, 150.0, 0.0}};
  auto d = deficit_metrics({}, ideal, kConfig);
  CHECK(*d.grasp_position_dev == 0.0);
  CHECK(*d.grasp_orientation_dev == 0.0);
  CHECK_FALSE(d.in_plane_dev.has_value());

  const std::vector<DriveGrasp> spread{{0, 135.0, 10.0}, {1, 165.0, 30.0}};
  d = deficit_metrics({}, spread, kConfig);
  CHECK(*d.grasp_position_dev == doctest::Approx(15.0));
  CHECK(*d.grasp_orientation_dev == doctest::Approx(20.0));
  CHECK(d.grasp_count == 2);

  CHECK_FALSE(deficit_metrics({}, {}, kConfig).grasp_position_dev.has_value());

  // Tip driven along the ideal arc.
  const auto arc = task::ideal_arc(kConfig, 0);
  std::vector<MotionSample> on_arc;
  for (int k = 1; k < 100; ++k) {
    MotionSample s;
    s.tick = k;
    s.topo = tpm::Topo::S1;
    s.needle_tip = arc.point_at(arc.start_angle + (arc.end_angle - arc.start_angle) * k / 100.0);
    on_arc.push_back(s);
  }
  d = deficit_metrics(on_arc, {}, kConfig);
  CHECK(d.drive_samples == 99);
  CHECK(*d.in_plane_dev < 1e-9);
  CHECK(*d.out_plane_dev < 1e-9);

  // A constant 0.5 mm sideways offset is all out of plane.
  for (auto& s : on_arc) s.needle_tip += arc.plane_normal * 0.5;
  d = deficit_metrics(on_arc, {}, kConfig);
  CHECK(*d.out_plane_dev == doctest::Approx(0.5));
  CHECK(*d.in_plane_dev < 1e-9);
}

TEST_CASE("metric table") {
  const std::array<std::string_view, 15> names{
      "Completion Time (s)", "Path Length (mm)", "Movements (count/s)", "Ribbon Area (mm²)",
      "Master Path Length (mm)", "Master Workspace Volume (mm³)", "Exc. Needle Pierces",
      "Exc. Instrument Force (Count)", "Exc. Instrument Force (Time) (s)", "Exc. Needle Tissue Force (Count)",
      "Exc. Needle Tissue Force (Time) (s)", "Grasp Position Dev. (degree)", "Grasp Orientation Dev. (degree)",
      "Ideal Drive Path Dev. (In) (mm)", "Ideal Drive Path Dev. (Out) (mm)"};
  for (int i = 0; i < kMetricCount; ++i) {
    CHECK(kMetrics[i].name == names[i]);
    CHECK(metric_from_name(names[i]) == kMetrics[i].metric);
  }
  TaskMetrics m;
  for (int i = 0; i < kMetricCount; ++i) m.set(kMetrics[i].metric, 1.0 + i);
  for (int i = 0; i < kMetricCount; ++i) CHECK(*m.get(kMetrics[i].metric) == 1.0 + i);
}

TEST_CASE("synthetic operators match their injected deficits") {
  for (auto kind : {synth::ProfileKind::Expert, synth::ProfileKind::Novice}) {
    double gp = 0, go = 0, in = 0, out = 0;
    for (uint64_t seed = 1; seed <= 20; ++seed) {
      synth::SynthRequest req;
      req.profile = synth::default_profile(kind, seed);
      const auto m = *synth::synth_session(req).footer;
      gp += *m.grasp_position_dev / 20;
      go += *m.grasp_orientation_dev / 20;
      in += *m.in_plane_dev / 20;
      out += *m.out_plane_dev / 20;
      for (int i = 0; i < kMetricCount; ++i)
        if (auto v = m.get(kMetrics[i].metric)) CHECK(*v >= 0.0);
    }
    const auto p = synth::default_profile(kind, 1);
    const double wobble = synth::expected_wobble_deviation(p.wobble);
    CAPTURE(synth::to_string(kind));
    CHECK(std::abs(gp - p.grasp_bias) < 2.0);
    CHECK(std::abs(go - p.orientation_bias) < 2.0);
    CHECK(std::abs(in - wobble) < 0.3);
    CHECK(std::abs(out - wobble) < 0.3);
    if (kind == synth::ProfileKind::Expert) {
      CHECK(gp < 5.0);
      CHECK(go < 5.0);
      CHECK(in < 0.3);
      CHECK(out < 0.3);
    } else {
      CHECK(go > 15.0);
    }
  }
}
