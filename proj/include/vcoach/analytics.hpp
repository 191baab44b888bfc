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
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vcoach/metrics.hpp"
#include "vcoach/session.hpp"

// Between-group study analysis over per-participant repetition series.
namespace vcoach::analytics {

using metrics::kMetricCount;
using metrics::Metric;
using metrics::TaskMetrics;

enum class Arm { Experimental, Control };
const char* to_string(Arm a);

inline constexpr std::array<std::string_view, 5> kLabels{"baseline", "rep2", "rep3", "rep4", "final"};
inline constexpr std::array<std::string_view, 4> kPostBaseline{"rep2", "rep3", "rep4", "final"};

struct Repetition {
  std::string label;
  TaskMetrics metrics;
};

struct ParticipantSeries {
  std::string participant;
  Arm arm = Arm::Experimental;
  std::vector<Repetition> repetitions;

  // Throws InvalidArgument when the baseline is missing or labels repeat.
  void validate() const;
  // Throws NotFound when the label is absent.
  const TaskMetrics& at(std::string_view label) const;
};

using MetricRow = std::array<std::optional<double>, kMetricCount>;

// value(label) - value(baseline) per metric; empty where either side is missing.
MetricRow improvement(const ParticipantSeries& series, std::string_view label);

// Fills missing entries with the column mean, or the column median for
// count-based columns. Throws Domain when a column has no observed value.
std::vector<std::vector<double>> impute(const std::vector<std::vector<std::optional<double>>>& matrix,
                                        std::span<const bool> count_based);

enum class UMethod { Auto, Exact, Normal };

struct UTest {
  double u = 0.0;  // min(U_a, U_b)
  double p = 1.0;  // two-sided
  bool exact = false;
};

// Auto uses exact enumeration when |a|+|b| <= 12 and there are no ties.
// Throws InvalidArgument on empty input; Exact with ties is also rejected.
UTest mann_whitney_u(std::span<const double> a, std::span<const double> b, UMethod method = UMethod::Auto);

// Throws InvalidArgument for fewer than two values per group and Domain when
// the pooled SD is zero.
double cohens_d(std::span<const double> a, std::span<const double> b);

struct Summary {
  double mean = 0.0;
  double sd = 0.0;  // sample SD; 0 for a single value
};
Summary summarize(std::span<const double> xs);

struct MetricComparison {
  Metric metric = Metric::CompletionTime;
  Summary experimental;
  Summary control;
  UTest test;
  std::optional<double> d;  // positive = larger improvement in the experimental arm
  bool significant = false;
};

struct GroupComparison {
  std::string label;
  int n_experimental = 0;
  int n_control = 0;
  std::array<MetricComparison, kMetricCount> rows;
};

struct EffectCell {
  std::optional<double> d;
  double p = 1.0;
  bool significant = false;
};

struct EffectGrid {
  std::array<std::array<EffectCell, kPostBaseline.size()>, kMetricCount> cells;
};

struct Report {
  GroupComparison table;  // final repetition
  std::array<GroupComparison, kPostBaseline.size()> repetitions;
  EffectGrid grid;
};

inline constexpr double kAlpha = 0.05;

// Both arms must be non-empty, participant ids unique, and every series must
// carry all five labels.
Report report(std::span<const ParticipantSeries> series);

std::string format_table(const Report& r);
// Metric rows by post-baseline repetition columns; '*' marks p < kAlpha.
std::string format_grid(const Report& r);
std::string report_json(const Report& r);
std::string grid_csv(const Report& r);
// "-14.53 (12.99)"
std::string format_mean_sd(const Summary& s);

// Groups session records by participant; labels come from file stems.
std::vector<ParticipantSeries> load_series(std::span<const std::filesystem::path> files, Arm arm);
// Every *.vcs file below `dir`.
std::vector<ParticipantSeries> load_arm(const std::filesystem::path& dir, Arm arm);

}  // namespace vcoach::analytics
