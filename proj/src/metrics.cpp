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

#include "vcoach/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>

#include "vcoach/error.hpp"

namespace vcoach::metrics {

using task::SimEvent;
using task::SimEventKind;

std::optional<Metric> metric_from_name(std::string_view name) {
  for (const auto& info : kMetrics)
    if (info.name == name) return info.metric;
  return std::nullopt;
}

std::optional<double> TaskMetrics::get(Metric m) const {
  switch (m) {
    case Metric::CompletionTime: return completion_time;
    case Metric::PathLength: return path_length;
    case Metric::Movements: return movements;
    case Metric::RibbonArea: return ribbon_area;
    case Metric::MasterPathLength: return master_path_length;
    case Metric::MasterWorkspaceVolume: return master_workspace_volume;
    case Metric::ExcessNeedlePierces: return excess_needle_pierces;
    case Metric::ExcessInstrumentForceCount: return excess_instrument_force_count;
    case Metric::ExcessInstrumentForceTime: return excess_instrument_force_time;
    case Metric::ExcessNeedleTissueForceCount: return excess_needle_tissue_force_count;
    case Metric::ExcessNeedleTissueForceTime: return excess_needle_tissue_force_time;
    case Metric::GraspPositionDev: return grasp_position_dev;
    case Metric::GraspOrientationDev: return grasp_orientation_dev;
    case Metric::DrivePathDevIn: return in_plane_dev;
    case Metric::DrivePathDevOut: return out_plane_dev;
  }
  return std::nullopt;
}

void TaskMetrics::set(Metric m, std::optional<double> v) {
  auto req = [&]() {
    if (!v) fail(ErrorCode::InvalidArgument, "metric requires a value");
    return *v;
  };
  switch (m) {
    case Metric::CompletionTime: completion_time = req(); break;
    case Metric::PathLength: path_length = req(); break;
    case Metric::Movements: movements = req(); break;
    case Metric::RibbonArea: ribbon_area = req(); break;
    case Metric::MasterPathLength: master_path_length = req(); break;
    case Metric::MasterWorkspaceVolume: master_workspace_volume = req(); break;
    case Metric::ExcessNeedlePierces: excess_needle_pierces = req(); break;
    case Metric::ExcessInstrumentForceCount: excess_instrument_force_count = req(); break;
    case Metric::ExcessInstrumentForceTime: excess_instrument_force_time = req(); break;
    case Metric::ExcessNeedleTissueForceCount: excess_needle_tissue_force_count = req(); break;
    case Metric::ExcessNeedleTissueForceTime: excess_needle_tissue_force_time = req(); break;
    case Metric::GraspPositionDev: grasp_position_dev = v; break;
    case Metric::GraspOrientationDev: grasp_orientation_dev = v; break;
    case Metric::DrivePathDevIn: in_plane_dev = v; break;
    case Metric::DrivePathDevOut: out_plane_dev = v; break;
  }
}

double path_length(std::span<const Vec3> positions) {
  if (positions.size() < 2) fail(ErrorCode::Domain, "path length needs at least two samples");
  double sum = 0.0;
  for (std::size_t i = 1; i < positions.size(); ++i) sum += geometry::distance(positions[i], positions[i - 1]);
  return sum;
}

double path_length(std::span<const MotionSample> samples) {
  if (samples.size() < 2) fail(ErrorCode::Domain, "path length needs at least two samples");
  double sum = 0.0;
  for (int side = 0; side < 2; ++side)
    for (std::size_t i = 1; i < samples.size(); ++i)
      sum += geometry::distance(samples[i].tip[side], samples[i - 1].tip[side]);
  return sum;
}

int movement_onsets(std::span<const Vec3> positions, double tick_rate, const MovementThresholds& th) {
  if (positions.size() < 2) return 0;
  std::deque<double> window;
  bool armed = true;
  int count = 0;
  for (std::size_t i = 1; i < positions.size(); ++i) {
    window.push_back(geometry::distance(positions[i], positions[i - 1]) * tick_rate);
    if (static_cast<int>(window.size()) > th.smoothing) window.pop_front();
    double sum = 0.0;
    for (double v : window) sum += v;
    const double speed = sum / static_cast<double>(window.size());
    if (armed && speed > th.v_hi) {
      ++count;
      armed = false;
    } else if (!armed && speed < th.v_lo) {
      armed = true;
    }
  }
  return count;
}

double movements_rate(std::span<const MotionSample> samples, double tick_rate, double duration_s,
                      const MovementThresholds& th) {
  if (samples.size() < 2) fail(ErrorCode::Domain, "movements need at least two samples");
  int onsets = 0;
  std::vector<Vec3> track(samples.size());
  for (int side = 0; side < 2; ++side) {
    for (std::size_t i = 0; i < samples.size(); ++i) track[i] = samples[i].tip[side];
    onsets += movement_onsets(track, tick_rate, th);
  }
  return duration_s > 0.0 ? onsets / duration_s : 0.0;
}

namespace {

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) { return 0.5 * (b - a).cross(c - a).norm(); }

double ribbon_step(const Vec3& t0, const Vec3& s0, const Vec3& t1, const Vec3& s1) {
  return triangle_area(t0, s0, s1) + triangle_area(t0, s1, t1);
}

}  // namespace

double ribbon_area(std::span<const Vec3> tips, std::span<const Vec3> shafts) {
  if (tips.size() != shafts.size()) fail(ErrorCode::InvalidArgument, "tip and shaft streams differ in length");
  if (tips.size() < 2) fail(ErrorCode::Domain, "ribbon area needs at least two samples");
  double sum = 0.0;
  for (std::size_t k = 0; k + 1 < tips.size(); ++k) sum += ribbon_step(tips[k], shafts[k], tips[k + 1], shafts[k + 1]);
  return sum;
}

double ribbon_area(std::span<const MotionSample> samples) {
  if (samples.size() < 2) fail(ErrorCode::Domain, "ribbon area needs at least two samples");
  double sum = 0.0;
  for (int side = 0; side < 2; ++side)
    for (std::size_t k = 0; k + 1 < samples.size(); ++k)
      sum += ribbon_step(samples[k].tip[side], samples[k].shaft[side], samples[k + 1].tip[side],
                         samples[k + 1].shaft[side]);
  return sum;
}

double master_workspace_volume(std::span<const MotionSample> samples) {
  std::vector<Vec3> pts;
  pts.reserve(samples.size() * 2);
  for (const auto& s : samples) {
    pts.push_back(s.master[0]);
    pts.push_back(s.master[1]);
  }
  return convex_hull_volume(pts);
}

ErrorMetrics error_metrics(std::span<const SimEvent> events, const task::TaskConfig& config, int64_t final_tick,
                           int start_segment) {
  ErrorMetrics out;
  tpm::TaskProgress progress;
  progress.segment_index = start_segment;
  bool entry_made = false, exit_made = false;
  std::array<std::optional<int64_t>, 3> open{};
  std::array<int, 3> count{};
  std::array<int64_t, 3> ticks{};

  auto bump = [&](int seg) {
    if (seg < 0) return;
    if (static_cast<int>(out.excess_pierces_per_segment.size()) <= seg)
      out.excess_pierces_per_segment.resize(seg + 1, 0);
    ++out.excess_pierces_per_segment[seg];
    ++out.excess_needle_pierces;
  };

  for (const SimEvent& e : events) {
    if (e.tick > final_tick) break;
    const int seg = progress.segment_index;
    const bool active = progress.phase != tpm::Phase::Complete;
    if (active && e.target && e.target->index == seg) {
      if (e.kind == SimEventKind::Pierce) {
        bool& made = e.target->role == task::TargetRole::Entry ? entry_made : exit_made;
        if (made) bump(seg);
        made = true;
      } else if (e.kind == SimEventKind::TipExit && e.target->role == task::TargetRole::Exit) {
        exit_made = true;
      }
    }
    if (e.kind == SimEventKind::ForceExceedStart || e.kind == SimEventKind::ForceExceedEnd) {
      const int k = static_cast<int>(e.source);
      if (e.kind == SimEventKind::ForceExceedStart && !open[k]) {
        open[k] = e.tick;
        ++count[k];
      } else if (e.kind == SimEventKind::ForceExceedEnd && open[k]) {
        ticks[k] += e.tick - *open[k];
        open[k].reset();
      }
    }
    const auto adv = tpm::advance(progress, std::span<const SimEvent>(&e, 1), config);
    for (const auto& te : adv.events) {
      if (te.kind == tpm::TpmEventKind::Deviation && te.deviation == tpm::DeviationKind::OffTargetPierce)
        bump(te.segment);
      if (te.kind == tpm::TpmEventKind::SegmentComplete) entry_made = exit_made = false;
    }
    progress = adv.progress;
  }
  for (int k = 0; k < 3; ++k)
    if (open[k]) ticks[k] += final_tick - *open[k];

  out.instrument_force_count = count[0] + count[1];
  out.instrument_force_time = static_cast<double>(ticks[0] + ticks[1]) / config.tick_rate;
  out.needle_tissue_force_count = count[2];
  out.needle_tissue_force_time = static_cast<double>(ticks[2]) / config.tick_rate;
  return out;
}

DeficitMetrics deficit_metrics(std::span<const MotionSample> samples, std::span<const DriveGrasp> grasps,
                               const task::TaskConfig& config) {
  DeficitMetrics d;
  if (!grasps.empty()) {
    double pos = 0.0, ori = 0.0;
    for (const auto& g : grasps) {
      pos += std::abs(g.theta - kIdealGraspAngle);
      ori += g.orientation_dev;
    }
    d.grasp_count = static_cast<int>(grasps.size());
    d.grasp_position_dev = pos / d.grasp_count;
    d.grasp_orientation_dev = ori / d.grasp_count;
  }
  std::map<int, geometry::ArcPath> arcs;
  double in = 0.0, out = 0.0;
  int n = 0;
  for (const auto& s : samples) {
    if (s.topo != tpm::Topo::S1 || task::surface_height(s.needle_tip, config) >= 0.0) continue;
    if (s.segment < 0 || s.segment >= config.n_pairs) continue;
    auto it = arcs.find(s.segment);
    if (it == arcs.end()) it = arcs.emplace(s.segment, task::ideal_arc(config, s.segment)).first;
    const auto dev = geometry::arc_deviation(s.needle_tip, it->second);
    in += dev.in_plane;
    out += dev.out_plane;
    ++n;
  }
  if (n > 0) {
    d.drive_samples = n;
    d.in_plane_dev = in / n;
    d.out_plane_dev = out / n;
  }
  return d;
}

std::vector<MotionSample> annotate(const task::TaskConfig& config, std::span<const TickRecord> ticks,
                                   std::span<const SimEvent> events, int start_segment,
                                   std::vector<DriveGrasp>* drive_grasps, int64_t* completion_tick) {
  std::vector<MotionSample> samples;
  samples.reserve(ticks.size());
  tpm::TaskProgress progress;
  progress.segment_index = start_segment;
  std::optional<DriveGrasp> held;
  std::size_t cursor = 0;
  std::vector<SimEvent> batch;

  for (const TickRecord& tr : ticks) {
    MotionSample s;
    s.tick = tr.t;
    for (int side = 0; side < 2; ++side) {
      const auto& pose = tr.input.instruments[side].pose;
      s.tip[side] = pose.position;
      s.shaft[side] = task::shaft_point(pose, config);
      s.master[side] = tr.input.master[side];
    }
    s.needle_tip = geometry::needle_point(tr.needle, config.needle, 0.0);
    s.segment = progress.segment_index;

    batch.clear();
    while (cursor < events.size() && events[cursor].tick <= tr.t) batch.push_back(events[cursor++]);
    bool done = false;
    for (const SimEvent& e : batch) {
      if (e.kind == SimEventKind::GraspStart)
        held = DriveGrasp{progress.segment_index, e.theta, e.orientation_dev};
      else if (e.kind == SimEventKind::GraspEnd)
        held.reset();
      const auto adv = tpm::advance(progress, std::span<const SimEvent>(&e, 1), config);
      for (const auto& te : adv.events) {
        if (te.kind == tpm::TpmEventKind::Transition && te.from == tpm::Topo::S0 && te.to == tpm::Topo::S1 && held &&
            drive_grasps) {
          DriveGrasp g = *held;
          g.segment = te.segment;
          drive_grasps->push_back(g);
        }
        if (te.kind == tpm::TpmEventKind::TaskComplete) done = true;
      }
      progress = adv.progress;
    }
    s.topo = progress.topo;
    if (held) {
      s.grasp_theta = held->theta;
      s.grasp_orientation_dev = held->orientation_dev;
    }
    samples.push_back(s);
    if (done) {
      if (completion_tick) *completion_tick = tr.t;
      return samples;
    }
  }
  if (completion_tick) *completion_tick = samples.empty() ? 0 : samples.back().tick;
  return samples;
}

MetricsReport evaluate(const task::TaskConfig& config, std::span<const TickRecord> ticks,
                       std::span<const SimEvent> events, int start_segment, bool task_level) {
  MetricsReport rep;
  int64_t end_tick = 0;
  rep.samples = annotate(config, ticks, events, start_segment, &rep.drive_grasps, &end_tick);
  const auto& samples = rep.samples;
  if (samples.size() < 2) fail(ErrorCode::Domain, "empty session: need at least two ticks");

  const double rate = config.tick_rate;
  TaskMetrics& tm = rep.task;
  tm.completion_time = static_cast<double>(samples.back().tick - samples.front().tick) / rate;

  const auto errors = error_metrics(events, config, end_tick, start_segment);
  tm.excess_needle_pierces = errors.excess_needle_pierces;
  tm.excess_instrument_force_count = errors.instrument_force_count;
  tm.excess_instrument_force_time = errors.instrument_force_time;
  tm.excess_needle_tissue_force_count = errors.needle_tissue_force_count;
  tm.excess_needle_tissue_force_time = errors.needle_tissue_force_time;

  // Per-segment accumulation; step (j-1 -> j) belongs to sample j's segment.
  struct Acc {
    int64_t first_tick = 0, last_tick = 0;
    double path = 0.0, ribbon = 0.0, master = 0.0;
    std::size_t begin = 0, end = 0;
  };
  std::map<int, Acc> acc;
  int64_t prev_end = samples.front().tick;
  for (std::size_t j = 0; j < samples.size(); ++j) {
    const auto& s = samples[j];
    auto [it, inserted] = acc.try_emplace(s.segment);
    Acc& a = it->second;
    if (inserted) {
      a.first_tick = prev_end;
      a.begin = j;
    }
    a.last_tick = s.tick;
    a.end = j + 1;
    prev_end = s.tick;
    if (j == 0) continue;
    const auto& p = samples[j - 1];
    for (int side = 0; side < 2; ++side) {
      a.path += geometry::distance(s.tip[side], p.tip[side]);
      a.ribbon += ribbon_step(p.tip[side], p.shaft[side], s.tip[side], s.shaft[side]);
      a.master += geometry::distance(s.master[side], p.master[side]);
    }
  }

  const int final_segment = samples.back().segment;
  for (auto& [seg, a] : acc) {
    SegmentMetrics sm;
    sm.segment = seg;
    sm.time = static_cast<double>(a.last_tick - a.first_tick) / rate;
    sm.path_length = a.path;
    std::vector<DriveGrasp> gs;
    for (const auto& g : rep.drive_grasps)
      if (g.segment == seg) gs.push_back(g);
    const auto d = deficit_metrics(std::span(samples).subspan(a.begin, a.end - a.begin), gs, config);
    sm.grasp_position_dev = d.grasp_position_dev;
    sm.grasp_orientation_dev = d.grasp_orientation_dev;
    sm.in_plane_dev = d.in_plane_dev;
    sm.out_plane_dev = d.out_plane_dev;
    sm.grasp_count = d.grasp_count;
    sm.drive_samples = d.drive_samples;
    sm.excess_pierces =
        seg < static_cast<int>(errors.excess_pierces_per_segment.size()) ? errors.excess_pierces_per_segment[seg] : 0;
    sm.complete = seg < final_segment;
    rep.segments.push_back(sm);

    tm.path_length += a.path;
    tm.ribbon_area += a.ribbon;
    tm.master_path_length += a.master;
  }
  // The last segment is complete when the log ended on its completion.
  if (!rep.segments.empty()) {
    tpm::TaskProgress probe;
    probe.segment_index = start_segment;
    for (const auto& e : events) {
      if (e.tick > end_tick) break;
      probe = tpm::advance(probe, std::span<const SimEvent>(&e, 1), config).progress;
    }
    if (probe.segment_index > rep.segments.back().segment) rep.segments.back().complete = true;
  }

  if (!task_level) return rep;
  tm.movements = movements_rate(samples, rate, tm.completion_time);
  tm.master_workspace_volume = master_workspace_volume(samples);

  const auto d = deficit_metrics(samples, rep.drive_grasps, config);
  tm.grasp_position_dev = d.grasp_position_dev;
  tm.grasp_orientation_dev = d.grasp_orientation_dev;
  tm.in_plane_dev = d.in_plane_dev;
  tm.out_plane_dev = d.out_plane_dev;
  return rep;
}

}  // namespace vcoach::metrics
