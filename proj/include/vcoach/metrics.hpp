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

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "vcoach/geometry.hpp"
#include "vcoach/record.hpp"
#include "vcoach/task.hpp"
#include "vcoach/tpm.hpp"

namespace vcoach::metrics {

using geometry::Vec3;

// Kinematic sample annotated with task progress at that tick.
struct MotionSample {
  int64_t tick = 0;
  std::array<Vec3, 2> tip;
  std::array<Vec3, 2> shaft;
  std::array<Vec3, 2> master;
  Vec3 needle_tip;
  int segment = 0;               // segment active over (tick-1, tick]
  tpm::Topo topo = tpm::Topo::S0;  // after this tick's events
  std::optional<double> grasp_theta;
  std::optional<double> grasp_orientation_dev;
};

struct SegmentMetrics {
  int segment = 0;
  double time = 0.0;  // s
  std::optional<double> grasp_position_dev;     // degrees
  std::optional<double> grasp_orientation_dev;  // degrees
  std::optional<double> in_plane_dev;           // mm
  std::optional<double> out_plane_dev;          // mm
  int excess_pierces = 0;
  double path_length = 0.0;  // mm
  int grasp_count = 0;
  int drive_samples = 0;
  bool complete = false;
};

// Report rows, in table order.
enum class Metric : int {
  CompletionTime,
  PathLength,
  Movements,
  RibbonArea,
  MasterPathLength,
  MasterWorkspaceVolume,
  ExcessNeedlePierces,
  ExcessInstrumentForceCount,
  ExcessInstrumentForceTime,
  ExcessNeedleTissueForceCount,
  ExcessNeedleTissueForceTime,
  GraspPositionDev,
  GraspOrientationDev,
  DrivePathDevIn,
  DrivePathDevOut,
};

inline constexpr int kMetricCount = 15;

struct MetricInfo {
  Metric metric;
  std::string_view name;
  bool count_based;
};

inline constexpr std::array<MetricInfo, kMetricCount> kMetrics{{
    {Metric::CompletionTime, "Completion Time (s)", false},
    {Metric::PathLength, "Path Length (mm)", false},
    {Metric::Movements, "Movements (count/s)", false},
    {Metric::RibbonArea, "Ribbon Area (mm²)", false},
    {Metric::MasterPathLength, "Master Path Length (mm)", false},
    {Metric::MasterWorkspaceVolume, "Master Workspace Volume (mm³)", false},
    {Metric::ExcessNeedlePierces, "Exc. Needle Pierces", true},
    {Metric::ExcessInstrumentForceCount, "Exc. Instrument Force (Count)", true},
    {Metric::ExcessInstrumentForceTime, "Exc. Instrument Force (Time) (s)", false},
    {Metric::ExcessNeedleTissueForceCount, "Exc. Needle Tissue Force (Count)", true},
    {Metric::ExcessNeedleTissueForceTime, "Exc. Needle Tissue Force (Time) (s)", false},
    {Metric::GraspPositionDev, "Grasp Position Dev. (degree)", false},
    {Metric::GraspOrientationDev, "Grasp Orientation Dev. (degree)", false},
    {Metric::DrivePathDevIn, "Ideal Drive Path Dev. (In) (mm)", false},
    {Metric::DrivePathDevOut, "Ideal Drive Path Dev. (Out) (mm)", false},
}};

std::optional<Metric> metric_from_name(std::string_view name);

struct TaskMetrics {
  double completion_time = 0.0;
  double path_length = 0.0;
  double movements = 0.0;
  double ribbon_area = 0.0;
  double master_path_length = 0.0;
  double master_workspace_volume = 0.0;
  double excess_needle_pierces = 0.0;
  double excess_instrument_force_count = 0.0;
  double excess_instrument_force_time = 0.0;
  double excess_needle_tissue_force_count = 0.0;
  double excess_needle_tissue_force_time = 0.0;
  std::optional<double> grasp_position_dev;
  std::optional<double> grasp_orientation_dev;
  std::optional<double> in_plane_dev;
  std::optional<double> out_plane_dev;

  std::optional<double> get(Metric m) const;
  void set(Metric m, std::optional<double> v);
  bool operator==(const TaskMetrics&) const = default;
};

struct MovementThresholds {
  double v_lo = 2.0;  // mm/s
  double v_hi = 5.0;  // mm/s
  int smoothing = 5;  // samples
};

// Polyline length; throws Domain on fewer than two points.
double path_length(std::span<const Vec3> positions);
// Summed over both instruments' tips.
double path_length(std::span<const MotionSample> samples);
int movement_onsets(std::span<const Vec3> positions, double tick_rate, const MovementThresholds& th = {});
// Onsets over both instruments divided by `duration_s`.
double movements_rate(std::span<const MotionSample> samples, double tick_rate, double duration_s,
                      const MovementThresholds& th = {});
double ribbon_area(std::span<const Vec3> tips, std::span<const Vec3> shafts);
double ribbon_area(std::span<const MotionSample> samples);
// Volume of the convex hull; 0 for degenerate (flat, collinear, tiny) sets.
double convex_hull_volume(std::span<const Vec3> points);
double master_workspace_volume(std::span<const MotionSample> samples);

struct ErrorMetrics {
  int excess_needle_pierces = 0;
  int instrument_force_count = 0;
  double instrument_force_time = 0.0;
  int needle_tissue_force_count = 0;
  double needle_tissue_force_time = 0.0;
  std::vector<int> excess_pierces_per_segment;
};

// Sim events must be in log order. Open force intervals close at `final_tick`.
ErrorMetrics error_metrics(std::span<const task::SimEvent> events, const task::TaskConfig& config,
                           int64_t final_tick, int start_segment = 0);

// A grasp that was held when the needle first entered the current entry target.
struct DriveGrasp {
  int segment = 0;
  double theta = 0.0;
  double orientation_dev = 0.0;
};

struct DeficitMetrics {
  std::optional<double> grasp_position_dev;
  std::optional<double> grasp_orientation_dev;
  std::optional<double> in_plane_dev;
  std::optional<double> out_plane_dev;
  int grasp_count = 0;
  int drive_samples = 0;
};

inline constexpr double kIdealGraspAngle = 150.0;

// Samples count toward path deviation while the tip is below the surface in S1.
DeficitMetrics deficit_metrics(std::span<const MotionSample> samples, std::span<const DriveGrasp> grasps,
                               const task::TaskConfig& config);

// Full offline evaluation of a logged session.
struct MetricsReport {
  TaskMetrics task;
  std::vector<SegmentMetrics> segments;
  std::vector<MotionSample> samples;
  std::vector<DriveGrasp> drive_grasps;
};

// With `task_level` false only per-segment metrics are filled in.
MetricsReport evaluate(const task::TaskConfig& config, std::span<const TickRecord> ticks,
                       std::span<const task::SimEvent> events, int start_segment = 0, bool task_level = true);

// Builds annotated samples from a tick log; also returns drive-initiating grasps.
std::vector<MotionSample> annotate(const task::TaskConfig& config, std::span<const TickRecord> ticks,
                                   std::span<const task::SimEvent> events, int start_segment,
                                   std::vector<DriveGrasp>* drive_grasps = nullptr,
                                   int64_t* completion_tick = nullptr);

}  // namespace vcoach::metrics
