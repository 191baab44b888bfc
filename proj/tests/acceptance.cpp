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

// Acceptance run: one PASS/FAIL line per primary criterion.
//
// Usage: acceptance <path-to-vcoach-binary>

#include <array>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "stats_oracle.hpp"
#include "tpm_fuzz.hpp"
#include "vcoach/analytics.hpp"
#include "vcoach/geometry.hpp"
#include "vcoach/json_io.hpp"
#include "vcoach/metrics.hpp"
#include "vcoach/service.hpp"
#include "vcoach/session.hpp"
#include "vcoach/synth.hpp"
#include "vcoach/tpm.hpp"
#include "ws_client.hpp"

using namespace vcoach;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

std::string g_cli;  // vcoach binary

// Collects failed expectations for one criterion.
class Checker {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok) failures_.push_back(what);
  }
  void note(const std::string& s) { notes_.push_back(s); }
  bool ok() const { return failures_.empty(); }
  const std::vector<std::string>& failures() const { return failures_; }
  std::string notes() const {
    std::string out;
    for (const auto& n : notes_) out += (out.empty() ? "" : "; ") + n;
    return out;
  }

 private:
  std::vector<std::string> failures_;
  std::vector<std::string> notes_;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

class Scratch {
 public:
  Scratch() {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("vcoach-accept-" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~Scratch() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

// ---- 1. Geometry -----------------------------------------------------------

void geometry_suite(Checker& c) {
  using namespace geometry;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2026);
  std::uniform_real_distribution<double> coord(-50.0, 50.0), unit(0.0, 1.0);
  double worst_end = 0.0, worst_h = 0.0, worst_dev = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Vec3 entry{coord(rng), coord(rng), coord(rng) * 0.1};
    const Vec3 dir = Vec3{coord(rng), coord(rng), coord(rng) * 0.2}.normalized();
    const double r = 2.0 + 10.0 * unit(rng);
    const double d = 2.0 * r * (0.05 + 0.95 * unit(rng));
    const Vec3 exit = entry + dir * d;
    const auto arc = chord_arc(entry, exit, r, {0, 0, 1});
    worst_end = std::max({worst_end, distance(arc.start_point(), entry), distance(arc.end_point(), exit)});
    worst_h = std::max(worst_h, std::abs(distance(arc.center, 0.5 * (entry + exit)) - std::sqrt(r * r - 0.25 * d * d)));
    for (int k = 0; k <= 10; ++k) {
      const double a = arc.start_angle + (arc.end_angle - arc.start_angle) * k / 10.0;
      const auto dev = arc_deviation(arc.point_at(a), arc);
      worst_dev = std::max({worst_dev, dev.in_plane, dev.out_plane});
    }
  }
  const double secs = seconds_since(t0);
  c.expect(worst_end < 1e-9, "chord endpoints off by " + fmt("%.3g", worst_end));
  c.expect(worst_h < 1e-9, "apothem off by " + fmt("%.3g", worst_h));
  c.expect(worst_dev < 1e-9, "on-arc deviation " + fmt("%.3g", worst_dev));
  c.expect(secs < 5.0, "runtime " + fmt("%.2f s", secs));
  c.note("1000 triples, max endpoint err " + fmt("%.1e", worst_end) + ", max on-arc dev " + fmt("%.1e", worst_dev) +
         ", " + fmt("%.2f s", secs));
}

// ---- 2. Task progress graph ------------------------------------------------

void tpm_suite(Checker& c) {
  using namespace tpm;
  using K = task::SimEventKind;
  const auto t0 = Clock::now();
  const auto config = task::default_task_config();
  auto ev = [](K kind, std::optional<task::TargetRef> target, bool upward = false) {
    task::SimEvent e;
    e.kind = kind;
    e.tick = 1;
    e.target = target;
    e.upward = upward;
    return e;
  };
  auto grasp = [](double theta) {
    task::SimEvent e;
    e.kind = K::GraspStart;
    e.tick = 1;
    e.theta = theta;
    e.side = task::Side::Right;
    return e;
  };
  const task::TargetRef entry{0, task::TargetRole::Entry}, exit{0, task::TargetRole::Exit};
  auto at = [](Topo t) {
    TaskProgress p;
    p.topo = t;
    p.phase = t == Topo::S0 ? Phase::Setup : Phase::Driving;
    return p;
  };

  struct EdgeCase {
    const char* name;
    Topo from;
    task::SimEvent event;
    TpmEventKind kind;
    Topo to;
    std::optional<DeviationKind> deviation;
  };
  const std::vector<EdgeCase> cases{
      {"S0->S1 pierce", Topo::S0, ev(K::Pierce, entry), TpmEventKind::Transition, Topo::S1, {}},
      {"S1->S2 tip exit", Topo::S1, ev(K::TipExit, exit, true), TpmEventKind::Transition, Topo::S2, {}},
      {"S2->S3 tail exit", Topo::S2, ev(K::TailExit, entry), TpmEventKind::Transition, Topo::S3, {}},
      {"S3->S0 needle free", Topo::S3, ev(K::NeedleFree, {}), TpmEventKind::Transition, Topo::S0, {}},
      {"S1->S0 tip back out", Topo::S1, ev(K::TipExit, entry, true), TpmEventKind::Retraction, Topo::S0, {}},
      {"S1->S0 needle free", Topo::S1, ev(K::NeedleFree, {}), TpmEventKind::Retraction, Topo::S0, {}},
      {"S2->S1 tip back in", Topo::S2, ev(K::Pierce, exit), TpmEventKind::Retraction, Topo::S1, {}},
      {"S3->S2 tail back in", Topo::S3, ev(K::TailExit, entry, true), TpmEventKind::Retraction, Topo::S2, {}},
      {"off-target pierce", Topo::S0, ev(K::Pierce, {}), TpmEventKind::Deviation, Topo::S0,
       DeviationKind::OffTargetPierce},
      {"wrong-order target", Topo::S0, ev(K::Pierce, task::TargetRef{3, task::TargetRole::Entry}),
       TpmEventKind::Deviation, Topo::S0, DeviationKind::WrongOrderTarget},
      {"reverse direction", Topo::S0, ev(K::Pierce, exit), TpmEventKind::Deviation, Topo::S0,
       DeviationKind::ReverseDirection},
      {"tip grasp", Topo::S0, grasp(5.0), TpmEventKind::Deviation, Topo::S0, DeviationKind::TipGrasp},
      {"out-of-range grasp", Topo::S0, grasp(60.0), TpmEventKind::Deviation, Topo::S0, DeviationKind::OutOfRangeGrasp},
  };
  std::set<std::pair<Topo, Topo>> forward, retraction;
  std::set<DeviationKind> deviations;
  for (const auto& k : cases) {
    const auto r = advance(at(k.from), std::span(&k.event, 1), config);
    const bool ok = !r.events.empty() && r.events[0].kind == k.kind && r.events[0].from == k.from &&
                    r.events[0].to == k.to && r.progress.topo == k.to &&
                    (!k.deviation || r.events[0].deviation == *k.deviation);
    c.expect(ok, std::string("edge ") + k.name);
    if (!ok) continue;
    if (k.kind == TpmEventKind::Transition) forward.insert({k.from, k.to});
    if (k.kind == TpmEventKind::Retraction) retraction.insert({k.from, k.to});
    if (k.deviation) deviations.insert(*k.deviation);
  }
  // Every declared edge of the graph is exercised.
  const std::array topos{Topo::S0, Topo::S1, Topo::S2, Topo::S3};
  for (auto a : topos)
    for (auto b : topos) {
      if (is_forward_edge(a, b)) c.expect(forward.contains({a, b}), "forward edge not covered");
      if (is_retraction_edge(a, b)) c.expect(retraction.contains({a, b}), "retraction edge not covered");
    }
  c.expect(deviations.size() == 5, "deviation kinds covered: " + std::to_string(deviations.size()));

  const auto fuzz = test::fuzz_tpm(100000, 97);
  const double secs = seconds_since(t0);
  c.expect(fuzz.violations == 0, std::to_string(fuzz.violations) + " graph violations in fuzz");
  c.expect(secs < 30.0, "runtime " + fmt("%.2f s", secs));
  c.note(std::to_string(cases.size()) + " scripted edges, 1e5 fuzz streams (" + std::to_string(fuzz.transitions) +
         " transitions, " + std::to_string(fuzz.retractions) + " retractions, 0 violations), " + fmt("%.2f s", secs));
}

// ---- 3. Cue lifecycle ------------------------------------------------------

void cue_lifecycle(Checker& c) {
  using cues::CueKind;
  const auto inputs = test::clean_pass_inputs();
  const auto tl = test::teach_timeline(inputs, 600);
  const double rate = task::default_task_config().tick_rate;
  c.expect(tl.pierce > 0 && tl.needle_free > tl.pierce, "clean pass has a pierce and a needle-free event");
  if (!c.ok()) return;
  const auto expected = test::expected_teach_timeline(tl.visible.size(), tl.pierce, tl.needle_free, rate);
  std::size_t first_mismatch = expected.size();
  long playback = 0;
  bool video_always = true;
  for (std::size_t t = 0; t < expected.size(); ++t) {
    if (!(tl.visible[t] == expected[t]) && first_mismatch == expected.size()) first_mismatch = t;
    playback += tl.visible[t].has(CueKind::TrajectoryPlayback);
    video_always = video_always && tl.visible[t].has(CueKind::VideoDemo);
  }
  c.expect(first_mismatch == expected.size(),
           "timeline differs at tick " + std::to_string(first_mismatch) + ": " +
               (first_mismatch < expected.size() ? test::cue_names(tl.visible[first_mismatch]) : ""));
  c.expect(playback == std::llround(10.0 * rate), "playback visible for " + std::to_string(playback) + " ticks");
  c.expect(video_always, "video demo hidden at some tick");
  const auto& before = tl.visible[tl.pierce - 1];
  int setup = 0;
  for (auto k : {CueKind::IdealInstrument, CueKind::GraspPosition, CueKind::GraspOrientation, CueKind::IdealDrivePath})
    setup += before.has(k);
  c.expect(setup == 4, "setup cues before pierce: " + std::to_string(setup));
  c.note(std::to_string(expected.size()) + " ticks exact match; pierce@" + std::to_string(tl.pierce) +
         ", needle-free@" + std::to_string(tl.needle_free) + ", playback " + std::to_string(playback) + " ticks");
}

// ---- 4. Determinism --------------------------------------------------------

synth::SynthRequest synthetic_request(int i) {
  synth::SynthRequest req;
  const auto kind = i % 2 == 0 ? synth::ProfileKind::Expert : synth::ProfileKind::Novice;
  req.profile = synth::default_profile(kind, 300 + static_cast<uint64_t>(i));
  static constexpr std::array modes{coach::Mode::None, coach::Mode::Teach, coach::Mode::Metrics, coach::Mode::User};
  req.mode = modes[static_cast<std::size_t>(i) % modes.size()];
  req.segments = 1;
  req.participant = "live" + std::to_string(i);
  return req;
}

void determinism(Checker& c) {
  const auto t0 = Clock::now();
  // Recorded sessions replay to a bitwise-identical footer.
  std::vector<session::SessionRecord> recorded;
  for (int i = 0; i < 10; ++i) {
    auto req = synthetic_request(i);
    req.segments = i < 2 ? -1 : 2;
    const auto rec = session::parse(session::serialize(synth::synth_session(req)));
    const auto footer = session::replay(rec);
    c.expect(session::serialize_footer(footer) == session::serialize_footer(*rec.footer),
             "replayed footer differs for session " + std::to_string(i));
    const auto again = session::rerun(rec);
    c.expect(again.ticks == rec.ticks && again.events == rec.events, "rerun differs for session " + std::to_string(i));
    recorded.push_back(rec);
  }

  // Live sessions through the service equal their replays.
  Scratch dir;
  service::ServiceOptions o;
  o.port = 0;
  o.data_dir = dir.path();
  o.token = "acceptance";
  o.speed = 20.0;
  service::Server server(o);
  server.start();
  int live_ok = 0;
  for (int i = 0; i < 10; ++i) {
    const auto req = synthetic_request(i);
    const auto rec = synth::synth_session(req);
    std::vector<task::InputTick> inputs;
    for (const auto& t : rec.ticks) inputs.push_back(t.input);
    test::WsClient ws;
    const std::string target = "/ws?token=acceptance&mode=" + std::string(coach::to_string(req.mode)) +
                               "&participant=" + req.participant;
    if (!ws.connect(server.port(), target)) {
      c.expect(false, "live session " + std::to_string(i) + " refused");
      continue;
    }
    const auto run = test::drive(ws, inputs, 400);
    const auto id = test::wait_for_stored(server.port(), req.participant);
    if (!id) {
      c.expect(false, "live session " + std::to_string(i) + " not stored");
      continue;
    }
    const auto live = session::read_file(dir.path() / "sessions" / (*id + ".vcs"));
    const auto replayed = session::rerun(live);
    bool ok = run.segment_complete;
    ok = ok && session::serialize_footer(session::replay(live)) == session::serialize_footer(*live.footer);
    ok = ok && replayed.ticks == live.ticks && replayed.events == live.events;
    // Events streamed during the live session are the replayed events.
    test::Json streamed = test::Json::array(), expected = test::Json::array();
    int64_t last_tick = -1;
    for (const auto& f : run.frames) {
      for (const auto& e : f.at("events")) streamed.push_back(e);
      last_tick = f.at("tick").get<int64_t>();
    }
    for (const auto& e : replayed.events)
      if (event_tick(e) <= last_tick) expected.push_back(io::to_json(e));
    ok = ok && streamed == expected;
    c.expect(ok, "live session " + std::to_string(i) + " differs from its replay");
    live_ok += ok;
  }
  server.stop();
  c.note("10 recorded sessions replay bitwise; " + std::to_string(live_ok) + "/10 live sessions match replay (" +
         fmt("%.1f s", seconds_since(t0)) + ")");
}

// ---- 5. Metrics ------------------------------------------------------------

void metrics_oracles(Checker& c) {
  std::vector<geometry::Vec3> circle;
  const double r = 7.0;
  for (int k = 0; k <= 360; ++k) {
    const double a = geometry::deg2rad(k);
    circle.push_back({r * std::cos(a), r * std::sin(a), 1.0});
  }
  const double rel = std::abs(metrics::path_length(circle) - 2 * geometry::kPi * r) / (2 * geometry::kPi * r);
  c.expect(rel < 1e-3, "circle path length rel. error " + fmt("%.2e", rel));

  std::vector<geometry::Vec3> cube;
  for (int i = 0; i < 8; ++i) cube.push_back({4.0 * (i & 1), 4.0 * ((i >> 1) & 1), 4.0 * ((i >> 2) & 1)});
  const double vol = metrics::convex_hull_volume(cube);
  c.expect(vol == 64.0, "cube hull volume " + fmt("%.17g", vol));

  std::string summary;
  for (auto kind : {synth::ProfileKind::Expert, synth::ProfileKind::Novice}) {
    double gp = 0, go = 0, in = 0, out = 0;
    for (uint64_t seed = 1; seed <= 20; ++seed) {
      synth::SynthRequest req;
      req.profile = synth::default_profile(kind, seed);
      const auto m = *synth::synth_session(req).footer;
      gp += m.grasp_position_dev.value_or(NAN) / 20;
      go += m.grasp_orientation_dev.value_or(NAN) / 20;
      in += m.in_plane_dev.value_or(NAN) / 20;
      out += m.out_plane_dev.value_or(NAN) / 20;
    }
    const auto p = synth::default_profile(kind, 1);
    const double wobble = synth::expected_wobble_deviation(p.wobble);
    const std::string name = synth::to_string(kind);
    c.expect(std::abs(gp - p.grasp_bias) < 2.0, name + " grasp position " + fmt("%.2f", gp));
    c.expect(std::abs(go - p.orientation_bias) < 2.0, name + " grasp orientation " + fmt("%.2f", go));
    c.expect(std::abs(in - wobble) < 0.3, name + " in-plane " + fmt("%.3f", in));
    c.expect(std::abs(out - wobble) < 0.3, name + " out-of-plane " + fmt("%.3f", out));
    if (kind == synth::ProfileKind::Expert) {
      c.expect(gp < 5.0 && go < 5.0, "expert grasp deviations not below 5 deg");
      c.expect(in < 0.3 && out < 0.3, "expert path deviations not below 0.3 mm");
    } else {
      c.expect(go > 15.0, "novice orientation deviation not above 15 deg");
    }
    summary += name + " grasp " + fmt("%.2f", gp) + "/" + fmt("%.2f", go) + " deg, path " + fmt("%.3f", in) + "/" +
               fmt("%.3f", out) + " mm; ";
  }
  c.note("circle err " + fmt("%.1e", rel) + ", cube " + fmt("%g", vol) + "; " + summary.substr(0, summary.size() - 2));
}

// ---- 6. Statistics ---------------------------------------------------------

void statistics_oracles(Checker& c) {
  using namespace analytics;
  const std::vector<double> a{1, 2, 3}, b{4, 5, 6};
  const auto ex = mann_whitney_u(a, b);
  c.expect(ex.exact && ex.p == 0.1, "exact p for [1,2,3] vs [4,5,6] is " + fmt("%.17g", ex.p));
  c.expect(test::oracle::exact_p(3, 3, 0.0) == 0.1, "oracle disagrees on the 3-vs-3 example");

  int splits = 0;
  double worst = 0.0, worst_oracle = 0.0;
  for (unsigned mask = 0; mask < (1u << 12); ++mask) {
    if (std::popcount(mask) != 6) continue;
    ++splits;
    std::vector<double> x, y;
    for (int r = 0; r < 12; ++r) ((mask >> r) & 1u ? x : y).push_back(r + 1.0);
    const auto e = mann_whitney_u(x, y, UMethod::Exact);
    const auto n = mann_whitney_u(x, y, UMethod::Normal);
    worst = std::max(worst, std::abs(e.p - n.p));
    if (splits % 37 == 0) worst_oracle = std::max(worst_oracle, std::abs(e.p - test::oracle::exact_p(6, 6, e.u)));
  }
  c.expect(splits == 924, "splits enumerated: " + std::to_string(splits));
  c.expect(worst < 0.02, "normal vs exact max gap " + fmt("%.4f", worst));
  c.expect(worst_oracle < 1e-12, "exact p vs brute force " + fmt("%.3g", worst_oracle));

  const std::vector<double> d1{2, 4}, d2{1, 3};
  const double d = cohens_d(d1, d2);
  c.expect(std::abs(d - 0.70711) < 1e-5, "cohens_d " + fmt("%.6f", d));

  using Row = std::vector<std::optional<double>>;
  const bool kinds[] = {false, true};
  const auto imp = impute({Row{2.0, 1.0}, Row{std::nullopt, std::nullopt}, Row{4.0, 2.0}, Row{9.0, 10.0}}, kinds);
  c.expect(imp[1][0] == 5.0, "continuous column imputed with " + fmt("%g", imp[1][0]) + ", want mean 5");
  c.expect(imp[1][1] == 2.0, "count column imputed with " + fmt("%g", imp[1][1]) + ", want median 2");
  c.expect(imp[0] == std::vector<double>{2.0, 1.0}, "observed values changed by imputation");
  c.note("p = 0.1 exact; 924 splits, max |normal - exact| = " + fmt("%.4f", worst) + "; d = " + fmt("%.5f", d) +
         "; mean/median imputation");
}

// ---- 7. Study rehearsal ----------------------------------------------------

constexpr int kExperimental = 14;
constexpr int kControl = 16;
constexpr int kMetaSeeds = 20;

uint64_t arm_seed(int meta, bool experimental) { return 1000u * static_cast<uint64_t>(meta) + (experimental ? 0 : 500); }

analytics::Report in_process_report(int meta) {
  std::vector<analytics::ParticipantSeries> all;
  for (bool experimental : {true, false}) {
    synth::CohortOptions o;
    o.plan = experimental ? synth::Plan::Study : synth::Plan::Control;
    o.participants = experimental ? kExperimental : kControl;
    o.seed = arm_seed(meta, experimental);
    o.participant_prefix = experimental ? "e" : "c";
    for (int i = 0; i < o.participants; ++i) {
      const auto ps = synth::participant_sessions(o, i);
      analytics::ParticipantSeries s;
      s.participant = ps.participant;
      s.arm = experimental ? analytics::Arm::Experimental : analytics::Arm::Control;
      for (std::size_t r = 0; r < ps.repetitions.size(); ++r)
        s.repetitions.push_back({std::string(analytics::kLabels[r]), *ps.repetitions[r].footer});
      all.push_back(std::move(s));
    }
  }
  return analytics::report(all);
}

int run_cli(const std::string& args) {
  const std::string cmd = "\"" + g_cli + "\" " + args + " > /dev/null";
  return std::system(cmd.c_str());
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void study_rehearsal(Checker& c) {
  const auto t0 = Clock::now();
  const int orientation = static_cast<int>(metrics::Metric::GraspOrientationDev);
  const int position = static_cast<int>(metrics::Metric::GraspPositionDev);
  int orientation_hits = 0, position_quiet = 0;

  // Meta-seed 1 through the command-line tool.
  Scratch dir;
  const std::string exp = (dir.path() / "exp").string(), ctl = (dir.path() / "ctl").string();
  const std::string out = (dir.path() / "report").string();
  int rc = run_cli("synth --profile novice --plan study --n " + std::to_string(kExperimental) + " --seed " +
                   std::to_string(arm_seed(1, true)) + " --participant e --out \"" + exp + "\"");
  rc |= run_cli("synth --profile novice --plan control --n " + std::to_string(kControl) + " --seed " +
                std::to_string(arm_seed(1, false)) + " --participant c --out \"" + ctl + "\"");
  rc |= run_cli("report --arm-a \"" + exp + "\" --arm-b \"" + ctl + "\" --out \"" + out + "\"");
  c.expect(rc == 0, "vcoach synth/report failed");
  if (rc != 0) return;

  const auto json = test::Json::parse(slurp(out + ".json"));
  const auto& rows = json.at("table").at("rows");
  c.expect(rows.size() == 15, "table rows: " + std::to_string(rows.size()));
  c.expect(json.at("table").at("n_experimental") == kExperimental && json.at("table").at("n_control") == kControl,
           "arm sizes in the table");
  const auto& grid = json.at("grid");
  bool grid_shape = grid.size() == 15;
  for (const auto& row : grid) grid_shape = grid_shape && row.at("cells").size() == 4;
  c.expect(grid_shape, "effect grid is not 15x4");

  // Text table: a header line, then one line per metric in table order.
  std::istringstream text(slurp(out + ".txt"));
  std::vector<std::string> lines;
  for (std::string l; std::getline(text, l);) lines.push_back(l);
  bool table_order = lines.size() > 15;
  for (int i = 0; table_order && i < metrics::kMetricCount; ++i)
    table_order = lines[static_cast<std::size_t>(i) + 1].starts_with(metrics::kMetrics[i].name);
  c.expect(table_order, "text table is not 15 metric rows in order");
  std::istringstream csv(slurp(out + "_grid.csv"));
  int csv_lines = 0;
  for (std::string l; std::getline(csv, l);) ++csv_lines;
  c.expect(csv_lines == 61, "grid csv lines: " + std::to_string(csv_lines));

  // The command-line path and the in-process path agree.
  const auto same = in_process_report(1);
  c.expect(test::Json::parse(analytics::report_json(same)) == json, "CLI report differs from the in-process report");

  const auto& o1 = rows[orientation];
  const bool o1_sig = o1.at("significant").get<bool>() && o1.at("p").get<double>() < 0.05;
  // Positive d = larger improvement (larger deviation drop) in the experimental arm.
  c.expect(!o1.at("d").is_null() && o1.at("d").get<double>() > 0.0, "orientation effect has the wrong sign");
  orientation_hits += o1_sig;
  position_quiet += !rows[position].at("significant").get<bool>();

  for (int meta = 2; meta <= kMetaSeeds; ++meta) {
    const auto r = in_process_report(meta);
    const auto& o = r.table.rows[orientation];
    orientation_hits += o.significant && o.test.p < 0.05 && o.d && *o.d > 0.0;
    position_quiet += !r.table.rows[position].significant;
  }
  const double secs = seconds_since(t0);
  const int need = (9 * kMetaSeeds + 9) / 10;
  c.expect(orientation_hits >= need, "orientation significant in " + std::to_string(orientation_hits) + "/20");
  c.expect(position_quiet >= need, "grasp position non-significant in " + std::to_string(position_quiet) + "/20");
  c.expect(secs < 120.0, "runtime " + fmt("%.1f s", secs));
  c.note("orientation significant " + std::to_string(orientation_hits) + "/20, grasp position quiet " +
         std::to_string(position_quiet) + "/20, " + fmt("%.1f s", secs));
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: acceptance <path-to-vcoach>\n";
    return 2;
  }
  g_cli = argv[1];
  const std::vector<std::pair<std::string, std::function<void(Checker&)>>> criteria{
      {"Geometry oracle suite", geometry_suite},
      {"State-machine suite", tpm_suite},
      {"Cue lifecycle fixture", cue_lifecycle},
      {"Determinism", determinism},
      {"Metrics oracles", metrics_oracles},
      {"Statistics oracles", statistics_oracles},
      {"End-to-end study rehearsal", study_rehearsal},
  };
  int passed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Checker c;
    try {
      criteria[i].second(c);
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    const std::string label = "[" + std::to_string(i + 1) + "] " + criteria[i].first;
    if (c.ok()) {
      ++passed;
      std::cout << "PASS " << label << ": " << c.notes() << std::endl;
    } else {
      std::string why;
      for (const auto& f : c.failures()) why += (why.empty() ? "" : "; ") + f;
      std::cout << "FAIL " << label << ": " << why << std::endl;
    }
  }
  std::cout << passed << "/" << criteria.size() << " criteria passed" << std::endl;
  return passed == static_cast<int>(criteria.size()) ? 0 : 1;
}
