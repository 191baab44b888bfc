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

#include "vcoach/tpm.hpp"

#include <cstdio>

#include "vcoach/error.hpp"

namespace vcoach::tpm {

using task::SimEvent;
using task::SimEventKind;
using task::TargetRef;
using task::TargetRole;

namespace {

std::string describe(const std::optional<TargetRef>& t) {
  if (!t) return "off-target";
  return "target " + std::to_string(t->index) + " " + task::to_string(t->role);
}

std::string format_angle(double theta) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "theta %.1f", theta);
  return buf;
}

class Machine {
 public:
  Machine(const TaskProgress& p, const task::TaskConfig& c, const ProtocolRules& r) : p_(p), config_(c), rules_(r) {}

  void apply(const SimEvent& e) {
    if (e.target && (e.target->index < 0 || e.target->index >= config_.n_pairs))
      fail(ErrorCode::Internal, "event references unknown target " + std::to_string(e.target->index));
    if (p_.phase == Phase::Complete) return;
    const int seg = p_.segment_index;
    const auto is = [&](TargetRole role) {
      return e.target && e.target->index == seg && e.target->role == role;
    };

    switch (e.kind) {
      case SimEventKind::GraspStart:
        if (p_.topo != Topo::S0) break;
        if (e.theta < rules_.tip_grasp_limit)
          deviate(DeviationKind::TipGrasp, e.tick, format_angle(e.theta));
        else if (e.theta < rules_.grasp_range_lo - rules_.out_of_range_slack ||
                 e.theta > rules_.grasp_range_hi + rules_.out_of_range_slack)
          deviate(DeviationKind::OutOfRangeGrasp, e.tick, format_angle(e.theta));
        break;
      case SimEventKind::Pierce:
        if (!e.target) {
          deviate(DeviationKind::OffTargetPierce, e.tick, describe(e.target));
        } else if (e.target->index != seg) {
          deviate(DeviationKind::WrongOrderTarget, e.tick, describe(e.target));
        } else if (is(TargetRole::Entry)) {
          if (p_.topo == Topo::S0) move(TpmEventKind::Transition, Topo::S1, e.tick);
        } else if (p_.topo == Topo::S0) {
          deviate(DeviationKind::ReverseDirection, e.tick, describe(e.target));
        } else if (p_.topo == Topo::S2) {
          move(TpmEventKind::Retraction, Topo::S1, e.tick);
        }
        break;
      case SimEventKind::TipExit:
        if (p_.topo != Topo::S1) break;
        if (is(TargetRole::Exit))
          move(TpmEventKind::Transition, Topo::S2, e.tick);
        else if (is(TargetRole::Entry))
          move(TpmEventKind::Retraction, Topo::S0, e.tick);
        break;
      case SimEventKind::TailExit:
        if (!is(TargetRole::Entry)) break;
        if (!e.upward && p_.topo == Topo::S2)
          move(TpmEventKind::Transition, Topo::S3, e.tick);
        else if (e.upward && p_.topo == Topo::S3)
          move(TpmEventKind::Retraction, Topo::S2, e.tick);
        break;
      case SimEventKind::NeedleFree:
        if (p_.topo == Topo::S3) {
          move(TpmEventKind::Transition, Topo::S0, e.tick);
          complete_segment(e.tick);
        } else if (p_.topo == Topo::S1) {
          move(TpmEventKind::Retraction, Topo::S0, e.tick);
        }
        break;
      default:
        break;
    }
  }

  AdvanceResult result() && { return {std::move(p_), std::move(events_)}; }

 private:
  void move(TpmEventKind kind, Topo to, int64_t tick) {
    TpmEvent ev;
    ev.kind = kind;
    ev.tick = tick;
    ev.segment = p_.segment_index;
    ev.from = p_.topo;
    ev.to = to;
    events_.push_back(ev);
    p_.topo = to;
    if (kind == TpmEventKind::Retraction) ++p_.retractions;
    if (to != Topo::S0)
      p_.phase = Phase::Driving;
    else
      p_.phase = kind == TpmEventKind::Retraction ? Phase::Withdrawn : Phase::Setup;
  }

  void deviate(DeviationKind kind, int64_t tick, std::string detail) {
    p_.deviations.push_back({kind, tick, detail});
    TpmEvent ev;
    ev.kind = TpmEventKind::Deviation;
    ev.tick = tick;
    ev.segment = p_.segment_index;
    ev.from = ev.to = p_.topo;
    ev.deviation = kind;
    ev.detail = std::move(detail);
    events_.push_back(std::move(ev));
  }

  void complete_segment(int64_t tick) {
    TpmEvent ev;
    ev.kind = TpmEventKind::SegmentComplete;
    ev.tick = tick;
    ev.segment = p_.segment_index;
    events_.push_back(ev);
    ++p_.segment_index;
    if (p_.segment_index >= config_.n_pairs) {
      p_.phase = Phase::Complete;
      TpmEvent done;
      done.kind = TpmEventKind::TaskComplete;
      done.tick = tick;
      done.segment = p_.segment_index;
      events_.push_back(done);
    }
  }

  TaskProgress p_;
  const task::TaskConfig& config_;
  const ProtocolRules& rules_;
  std::vector<TpmEvent> events_;
};

}  // namespace

AdvanceResult advance(const TaskProgress& progress, std::span<const SimEvent> events, const task::TaskConfig& config,
                      const ProtocolRules& rules) {
  Machine m(progress, config, rules);
  for (const auto& e : events) m.apply(e);
  return std::move(m).result();
}

SegmentContext current_context(const TaskProgress& progress, const task::TaskConfig& config) {
  if (progress.phase == Phase::Complete || progress.segment_index >= config.n_pairs)
    fail(ErrorCode::Domain, "task complete: no active segment");
  SegmentContext ctx;
  ctx.pair = task::target_pair(config, progress.segment_index);
  ctx.ideal_arc = geometry::chord_arc(ctx.pair.entry, ctx.pair.exit, config.needle.radius, config.surface_normal);
  ctx.drive_direction = (ctx.pair.exit - ctx.pair.entry).normalized();
  ctx.phase = progress.phase;
  return ctx;
}

bool is_forward_edge(Topo from, Topo to) {
  return (from == Topo::S0 && to == Topo::S1) || (from == Topo::S1 && to == Topo::S2) ||
         (from == Topo::S2 && to == Topo::S3) || (from == Topo::S3 && to == Topo::S0);
}

bool is_retraction_edge(Topo from, Topo to) {
  return (from == Topo::S1 && to == Topo::S0) || (from == Topo::S2 && to == Topo::S1) ||
         (from == Topo::S3 && to == Topo::S2);
}

const char* to_string(Topo t) {
  switch (t) {
    case Topo::S0: return "S0";
    case Topo::S1: return "S1";
    case Topo::S2: return "S2";
    case Topo::S3: return "S3";
  }
  return "?";
}

const char* to_string(Phase p) {
  switch (p) {
    case Phase::Setup: return "Setup";
    case Phase::Driving: return "Driving";
    case Phase::Withdrawn: return "Withdrawn";
    case Phase::Complete: return "Complete";
  }
  return "?";
}

const char* to_string(DeviationKind k) {
  switch (k) {
    case DeviationKind::OffTargetPierce: return "OffTargetPierce";
    case DeviationKind::WrongOrderTarget: return "WrongOrderTarget";
    case DeviationKind::ReverseDirection: return "ReverseDirection";
    case DeviationKind::TipGrasp: return "TipGrasp";
    case DeviationKind::OutOfRangeGrasp: return "OutOfRangeGrasp";
  }
  return "?";
}

const char* to_string(TpmEventKind k) {
  switch (k) {
    case TpmEventKind::Transition: return "Transition";
    case TpmEventKind::Retraction: return "Retraction";
    case TpmEventKind::Deviation: return "Deviation";
    case TpmEventKind::SegmentComplete: return "SegmentComplete";
    case TpmEventKind::TaskComplete: return "TaskComplete";
  }
  return "?";
}

}  // namespace vcoach::tpm
