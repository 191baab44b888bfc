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

#include "vcoach/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "vcoach/cues.hpp"
#include "vcoach/engine.hpp"
#include "vcoach/error.hpp"

namespace vcoach::synth {

using geometry::Pose;
using geometry::UnitQuat;
using geometry::Vec3;
using task::Side;

const char* to_string(ProfileKind k) { return k == ProfileKind::Expert ? "expert" : "novice"; }

std::optional<ProfileKind> profile_from_string(std::string_view s) {
  if (s == "expert") return ProfileKind::Expert;
  if (s == "novice") return ProfileKind::Novice;
  return std::nullopt;
}

void SynthProfile::validate() const {
  if (grasp_noise < 0.0 || orientation_noise < 0.0 || wobble < 0.0 || extra_movement_rate < 0.0)
    fail(ErrorCode::InvalidArgument, "profile noise parameters must be non-negative");
  if (!(pace > 0.0)) fail(ErrorCode::InvalidArgument, "profile pace must be positive");
  if (help_probability < 0.0 || help_probability > 1.0)
    fail(ErrorCode::InvalidArgument, "help probability must lie in [0, 1]");
}

SynthProfile expert_profile(uint64_t seed) {
  SynthProfile p;
  p.kind = ProfileKind::Expert;
  p.seed = seed;
  p.grasp_bias = 2.0;
  p.grasp_noise = 2.0;
  p.orientation_bias = 2.0;
  p.orientation_noise = 2.0;
  p.wobble = 0.2;
  p.extra_movement_rate = 0.02;
  p.pace = 1.0;
  p.help_probability = 0.0;
  return p;
}

SynthProfile novice_profile(uint64_t seed) {
  SynthProfile p;
  p.kind = ProfileKind::Novice;
  p.seed = seed;
  return p;
}

SynthProfile default_profile(ProfileKind kind, uint64_t seed) {
  return kind == ProfileKind::Expert ? expert_profile(seed) : novice_profile(seed);
}

double expected_wobble_deviation(double amplitude) { return amplitude * 2.0 / geometry::kPi; }

namespace {

constexpr double kApproachSpeed = 40.0;  // mm/s at pace 1
constexpr double kFineSpeed = 20.0;
constexpr double kTurnRate = 90.0;       // deg/s at pace 1
constexpr double kDriveRate = 40.0;      // deg/s at pace 1
constexpr double kPullRate = 60.0;
constexpr double kLift = 20.0;
constexpr double kStandoff = 10.0;
constexpr double kDriveEnd = -5.0;       // tip arc angle where the driver lets go
constexpr double kPullGrasp = 15.0;      // puller grasp, degrees from the tip
constexpr double kPullEnd = 10.0;        // degrees past the needle-free angle
constexpr double kFidgetAmplitude = 6.0;
constexpr double kFidgetDuration = 0.8;

double quat_angle(const UnitQuat& a, const UnitQuat& b) {
  const double c = std::abs(a.w() * b.w() + a.x() * b.x() + a.y() * b.y() + a.z() * b.z());
  return geometry::rad2deg(2.0 * std::acos(std::min(1.0, c)));
}

class Operator {
 public:
  Operator(Engine& engine, const SynthProfile& profile, coach::Mode mode, Side handedness)
      : eng_(engine),
        cfg_(engine.record().header.config.task),
        prof_(profile),
        mode_(mode),
        hand_(handedness),
        rng_(profile.seed) {
    for (Side s : task::kSides) {
      const int i = task::index_of(s);
      cmd_[i].pose = engine.world().instruments[i].tip_pose;
      cmd_[i].jaw = 1.0;
    }
  }

  void run(int segments) {
    const int first = eng_.progress().segment_index;
    for (int k = first; k < first + segments; ++k) segment(k);
  }

 private:
  struct Fidget {
    int64_t start = -1;
    int64_t length = 0;
    Vec3 dir;
  };

  Pose rest_pose(Side s) const {
    const int i = task::index_of(s);
    return {cfg_.rest_position[i], UnitQuat::from_to({0, 0, 1}, cfg_.base_direction[i])};
  }

  Vec3 fidget_offset(int i, int64_t t) const {
    const Fidget& f = fidget_[i];
    if (f.start < 0) return {};
    const double s = static_cast<double>(t - f.start) / static_cast<double>(f.length);
    return f.dir * (kFidgetAmplitude * std::sin(geometry::kPi * s));
  }

  void tick() {
    const int64_t t = eng_.next_tick();
    if (t - segment_start_ > static_cast<int64_t>(kSegmentTimeLimit * cfg_.tick_rate))
      fail(ErrorCode::Generation, "synthetic operator could not finish segment " + std::to_string(segment_) +
                                      " within " + std::to_string(static_cast<int>(kSegmentTimeLimit)) + " s");
    task::InputTick in;
    in.tick = t;
    for (int i = 0; i < 2; ++i) {
      Fidget& f = fidget_[i];
      if (f.start >= 0 && t - f.start >= f.length) f.start = -1;
      if (!busy_[i] && f.start < 0 && prof_.extra_movement_rate > 0.0 &&
          unit_(rng_) < prof_.extra_movement_rate / cfg_.tick_rate) {
        f.start = t;
        f.length = std::max<int64_t>(2, std::llround(kFidgetDuration * cfg_.tick_rate));
        const double a = unit_(rng_) * 2.0 * geometry::kPi;
        f.dir = {std::cos(a), std::sin(a), 0.0};
      }
      in.instruments[i] = cmd_[i];
      in.instruments[i].pose.position += fidget_offset(i, t);
      in.master[i] = in.instruments[i].pose.position * 3.0;
    }
    eng_.step(in);
  }

  void claim(Side s) {
    const int i = task::index_of(s);
    while (fidget_[i].start >= 0) tick();
    busy_[i] = true;
  }

  void release(Side s) { busy_[task::index_of(s)] = false; }

  void hold(double seconds) {
    const int n = static_cast<int>(std::ceil(seconds * cfg_.tick_rate));
    for (int i = 0; i < n; ++i) tick();
  }

  void move(Side s, const Pose& target, double speed) {
    const int i = task::index_of(s);
    const Pose from = cmd_[i].pose;
    const double dist = geometry::distance(from.position, target.position);
    const double turn = quat_angle(from.orientation, target.orientation);
    const double duration =
        std::max({dist / (speed * prof_.pace), turn / (kTurnRate * prof_.pace), 2.0 / cfg_.tick_rate});
    const int n = static_cast<int>(std::ceil(duration * cfg_.tick_rate));
    for (int k = 1; k <= n; ++k) {
      const double u = static_cast<double>(k) / n;
      const double e = 0.5 * (1.0 - std::cos(geometry::kPi * u));
      cmd_[i].pose.position = from.position + (target.position - from.position) * e;
      cmd_[i].pose.orientation = UnitQuat::slerp(from.orientation, target.orientation, e);
      tick();
    }
    cmd_[i].pose = target;
  }

  void set_jaw(Side s, double target, double seconds) {
    const int i = task::index_of(s);
    const double from = cmd_[i].jaw;
    const int n = std::max(1, static_cast<int>(std::ceil(seconds * cfg_.tick_rate)));
    for (int k = 1; k <= n; ++k) {
      cmd_[i].jaw = from + (target - from) * static_cast<double>(k) / n;
      tick();
    }
  }

  Pose grasp_pose(Side s, double theta, double tilt) const {
    const Pose& needle = eng_.world().needle_pose;
    const Vec3 p = geometry::needle_point(needle, cfg_.needle, theta);
    const Vec3 t = geometry::needle_tangent(needle, cfg_.needle, theta);
    Vec3 n = geometry::needle_plane_normal(needle);
    if (n.dot(cfg_.base_direction[task::index_of(s)]) < 0.0) n = -n;
    const Vec3 z = UnitQuat::from_axis_angle(t, tilt).rotate(n);
    return {p, UnitQuat::from_basis(t, z.cross(t), z)};
  }

  void grasp(Side s, double theta, double tilt) {
    const Pose g = grasp_pose(s, theta, tilt);
    move(s, {g.position + g.axis_z() * kStandoff, g.orientation}, kApproachSpeed);
    move(s, g, kFineSpeed);
    set_jaw(s, 0.0, 0.3);
    const auto& held = eng_.world().grasp;
    if (!held || held->side != s)
      fail(ErrorCode::Generation, std::string("synthetic grasp missed the needle with the ") + task::to_string(s) +
                                      " instrument");
  }

  void let_go_and_retract(Side s) {
    set_jaw(s, 1.0, 0.2);
    const Pose& at = cmd_[task::index_of(s)].pose;
    move(s, {at.position + at.axis_z() * 15.0, at.orientation}, kApproachSpeed);
    move(s, rest_pose(s), kApproachSpeed);
    release(s);
  }

  bool segment_done() const { return eng_.progress().segment_index > segment_ || eng_.complete(); }

  // Moves the needle held by `s` along `arc`, tip angle from `from` to `to`.
  void carry(Side s, const geometry::ArcPath& arc, double from, double to, double rate, double amplitude,
             double sign_in, double sign_out) {
    const int i = task::index_of(s);
    const Pose inv_offset = eng_.world().grasp->offset.inverse();
    const int n = static_cast<int>(std::ceil(std::abs(to - from) / (rate * prof_.pace) * cfg_.tick_rate));
    const double span = arc.end_angle - arc.start_angle;
    for (int k = 1; k <= n; ++k) {
      const double phi = from + (to - from) * static_cast<double>(k) / n;
      Pose needle = geometry::needle_pose_on_arc(arc, phi);
      const double s = (phi - arc.start_angle) / span;
      if (amplitude > 0.0 && s > 0.0 && s < 1.0) {
        const double a = geometry::deg2rad(phi);
        const Vec3 radial = arc.ref_axis * std::cos(a) + arc.in_plane_y() * std::sin(a);
        const double d = amplitude * std::sin(geometry::kPi * s);
        needle.position += radial * (sign_in * d) + arc.plane_normal * (sign_out * d);
      }
      cmd_[i].pose = needle * inv_offset;
      tick();
      if (segment_done()) return;
    }
  }

  void transport(Side h, int k) {
    claim(h);
    const Pose target = task::staging_needle_pose(cfg_, k) * eng_.world().grasp->offset.inverse();
    const Vec3 up = cfg_.surface_normal * kLift;
    const Pose& at = cmd_[task::index_of(h)].pose;
    move(h, {at.position + up, at.orientation}, kApproachSpeed);
    move(h, {target.position + up, target.orientation}, kApproachSpeed);
    move(h, target, kFineSpeed);
    let_go_and_retract(h);
  }

  void visit_icon(Side s, task::IconId icon) {
    claim(s);
    const Pose& at = cmd_[task::index_of(s)].pose;
    move(s, {cfg_.icons[static_cast<int>(icon)], at.orientation}, kApproachSpeed);
    move(s, rest_pose(s), kApproachSpeed);
    release(s);
  }

  void segment(int k) {
    segment_ = k;
    segment_start_ = eng_.next_tick();
    if (eng_.world().grasp) transport(eng_.world().grasp->side, k);

    const auto ctx = tpm::current_context(eng_.progress(), cfg_);
    const Side driver = cues::ideal_instrument(ctx, cfg_, hand_);
    const Side puller = task::other(driver);

    if (mode_ == coach::Mode::User && unit_(rng_) < prof_.help_probability) visit_icon(driver, task::IconId::Help);

    const double theta = std::clamp(150.0 + prof_.grasp_bias + prof_.grasp_noise * normal_(rng_), 20.0,
                                    cfg_.needle.span - 2.0);
    const double tilt = prof_.orientation_bias + prof_.orientation_noise * normal_(rng_);
    const double sign_in = unit_(rng_) < 0.5 ? -1.0 : 1.0;
    const double sign_out = unit_(rng_) < 0.5 ? -1.0 : 1.0;

    claim(driver);
    grasp(driver, theta, tilt);
    const auto& arc = ctx.ideal_arc;
    carry(driver, arc, arc.start_angle - task::kStagingLead, kDriveEnd, kDriveRate, prof_.wobble, sign_in, sign_out);
    if (eng_.progress().topo != tpm::Topo::S2)
      fail(ErrorCode::Generation, "synthetic drive did not bring the tip out at the exit target");
    let_go_and_retract(driver);

    claim(puller);
    grasp(puller, kPullGrasp, 0.0);
    const double free_angle = arc.end_angle + cfg_.needle.span;
    carry(puller, arc, kDriveEnd, free_angle + kPullEnd, kPullRate, 0.0, 1.0, 1.0);
    if (!segment_done()) fail(ErrorCode::Generation, "synthetic pull did not free the needle");
    release(puller);
  }

  Engine& eng_;
  const task::TaskConfig cfg_;
  SynthProfile prof_;
  coach::Mode mode_;
  Side hand_;
  std::mt19937_64 rng_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::array<task::InstrumentCommand, 2> cmd_;
  std::array<bool, 2> busy_{false, false};
  std::array<Fidget, 2> fidget_;
  int segment_ = 0;
  int64_t segment_start_ = 0;
};

}  // namespace

session::SessionRecord synth_session(const SynthRequest& request) {
  request.profile.validate();
  session::SessionHeader header;
  header.config = request.config;
  header.mode = request.mode;
  header.participant = request.participant;
  header.handedness = request.handedness;
  header.seed = request.profile.seed;
  Engine engine(header);
  const int first = request.config.start_segment;
  const int available = request.config.task.n_pairs - first;
  const int count = request.segments < 0 ? available : std::min(request.segments, available);
  if (count <= 0) fail(ErrorCode::InvalidArgument, "no segments to perform");
  Operator op(engine, request.profile, request.mode, request.handedness);
  op.run(count);
  return engine.finish();
}

void build_clip_store(const session::ClipStore& store, const session::SessionConfig& config, uint64_t seed) {
  for (int k = 0; k < config.task.n_pairs; ++k) {
    SynthRequest req;
    req.profile = expert_profile(seed + static_cast<uint64_t>(k));
    req.profile.extra_movement_rate = 0.0;
    req.config = config;
    req.config.start_segment = k;
    req.mode = coach::Mode::None;
    req.participant = "expert";
    req.segments = 1;
    store.put(synth_session(req));
  }
}

const char* to_string(Plan p) { return p == Plan::Study ? "study" : "control"; }

std::optional<Plan> plan_from_string(std::string_view s) {
  if (s == "study") return Plan::Study;
  if (s == "control") return Plan::Control;
  return std::nullopt;
}

std::array<coach::Mode, 5> plan_modes(Plan plan) {
  using coach::Mode;
  if (plan == Plan::Study) return {Mode::None, Mode::Teach, Mode::Metrics, Mode::User, Mode::None};
  return {Mode::None, Mode::None, Mode::None, Mode::None, Mode::None};
}

ParticipantSessions participant_sessions(const CohortOptions& options, int index) {
  const uint64_t pseed = options.seed + static_cast<uint64_t>(index);
  std::mt19937_64 rng(pseed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> normal(0.0, 1.0);

  // Stable per-participant traits.
  SynthProfile base = default_profile(options.kind, pseed);
  base.grasp_bias += 3.0 * normal(rng);
  base.orientation_bias += 3.0 * normal(rng);
  base.wobble *= std::exp(0.15 * normal(rng));
  base.pace *= std::exp(0.1 * normal(rng));

  // Share of the coached gain reached by each repetition.
  constexpr std::array<double, 5> kCoached{0.0, 0.5, 0.75, 1.0, 1.0};
  const auto modes = plan_modes(options.plan);

  ParticipantSessions out;
  char name[64];
  std::snprintf(name, sizeof name, "%s%03d", options.participant_prefix.c_str(), index + 1);
  out.participant = name;
  for (int r = 0; r < 5; ++r) {
    SynthProfile p = base;
    p.seed = pseed * 8 + static_cast<uint64_t>(r);
    const double practice = 1.0 - 0.05 * r;
    p.grasp_bias *= practice;
    p.orientation_bias *= practice;
    p.wobble *= practice;
    p.pace *= 1.0 + 0.05 * r;
    if (options.plan == Plan::Study)
      p.orientation_bias = std::max(0.0, p.orientation_bias - options.coached_orientation_gain * kCoached[r]);
    SynthRequest req;
    req.profile = p;
    req.config = options.config;
    req.mode = modes[r];
    req.participant = out.participant;
    out.repetitions[r] = synth_session(req);
  }
  return out;
}

void write_cohort(const std::filesystem::path& dir, const CohortOptions& options) {
  for (int i = 0; i < options.participants; ++i) {
    const auto ps = participant_sessions(options, i);
    for (int r = 0; r < 5; ++r)
      session::write_file(dir / ps.participant / (std::string(kRepetitionLabels[r]) + ".vcs"), ps.repetitions[r]);
  }
}

}  // namespace vcoach::synth
