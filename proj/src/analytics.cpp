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

#include "vcoach/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <set>

#include "vcoach/error.hpp"
#include "vcoach/json_io.hpp"

namespace vcoach::analytics {

const char* to_string(Arm a) { return a == Arm::Experimental ? "experimental" : "control"; }

void ParticipantSeries::validate() const {
  bool baseline = false;
  for (std::size_t i = 0; i < repetitions.size(); ++i) {
    if (repetitions[i].label == "baseline") baseline = true;
    for (std::size_t j = 0; j < i; ++j)
      if (repetitions[j].label == repetitions[i].label)
        fail(ErrorCode::InvalidArgument, participant + ": duplicate repetition '" + repetitions[i].label + "'");
  }
  if (!baseline) fail(ErrorCode::InvalidArgument, participant + ": missing baseline");
}

const TaskMetrics& ParticipantSeries::at(std::string_view label) const {
  for (const auto& r : repetitions)
    if (r.label == label) return r.metrics;
  fail(ErrorCode::NotFound, participant + ": missing repetition '" + std::string(label) + "'");
}

MetricRow improvement(const ParticipantSeries& series, std::string_view label) {
  const TaskMetrics& base = series.at("baseline");
  const TaskMetrics& rep = series.at(label);
  MetricRow out;
  for (int i = 0; i < kMetricCount; ++i) {
    const auto m = static_cast<Metric>(i);
    const auto a = rep.get(m), b = base.get(m);
    if (a && b) out[i] = *a - *b;
  }
  return out;
}

namespace {

double median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

double mean(std::span<const double> xs) { return std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size(); }

double sample_variance(std::span<const double> xs) {
  const double m = mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return s / (xs.size() - 1);
}

}  // namespace

std::vector<std::vector<double>> impute(const std::vector<std::vector<std::optional<double>>>& matrix,
                                        std::span<const bool> count_based) {
  const std::size_t cols = count_based.size();
  for (const auto& row : matrix)
    if (row.size() != cols) fail(ErrorCode::InvalidArgument, "impute: ragged matrix");
  std::vector<double> fill(cols);
  for (std::size_t c = 0; c < cols; ++c) {
    std::vector<double> seen;
    for (const auto& row : matrix)
      if (row[c]) seen.push_back(*row[c]);
    if (seen.empty()) {
      if (matrix.empty()) continue;
      fail(ErrorCode::Domain, "impute: column " + std::to_string(c) + " has no observed values");
    }
    fill[c] = count_based[c] ? median(seen) : mean(seen);
  }
  std::vector<std::vector<double>> out;
  out.reserve(matrix.size());
  for (const auto& row : matrix) {
    std::vector<double> r(cols);
    for (std::size_t c = 0; c < cols; ++c) r[c] = row[c] ? *row[c] : fill[c];
    out.push_back(std::move(r));
  }
  return out;
}

namespace {

// Number of arrangements of n a-values and m b-values giving each U_a.
std::vector<double> u_distribution(int n, int m) {
  // f[i][j][k]: arrangements of i a's and j b's with U = k.
  std::vector<std::vector<std::vector<double>>> f(n + 1, std::vector<std::vector<double>>(m + 1));
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= m; ++j) {
      f[i][j].assign(i * j + 1, 0.0);
      if (i == 0 || j == 0) {
        f[i][j][0] = 1.0;
        continue;
      }
      // Largest value is an a (beats all j b's) or a b.
      for (int k = 0; k <= i * j; ++k) {
        const double with_a = k >= j ? f[i - 1][j][k - j] : 0.0;
        const double with_b = k <= i * (j - 1) ? f[i][j - 1][k] : 0.0;
        f[i][j][k] = with_a + with_b;
      }
    }
  }
  return f[n][m];
}

}  // namespace

UTest mann_whitney_u(std::span<const double> a, std::span<const double> b, UMethod method) {
  if (a.empty() || b.empty()) fail(ErrorCode::InvalidArgument, "mann_whitney_u: empty sample");
  const std::size_t n = a.size(), m = b.size(), total = n + m;
  struct Item {
    double v;
    bool from_a;
  };
  std::vector<Item> pooled;
  pooled.reserve(total);
  for (double x : a) pooled.push_back({x, true});
  for (double x : b) pooled.push_back({x, false});
  for (const auto& it : pooled)
    if (!std::isfinite(it.v)) fail(ErrorCode::InvalidArgument, "mann_whitney_u: non-finite value");
  std::sort(pooled.begin(), pooled.end(), [](const Item& x, const Item& y) { return x.v < y.v; });

  double rank_sum_a = 0.0, tie_term = 0.0;
  bool ties = false;
  for (std::size_t i = 0; i < total;) {
    std::size_t j = i;
    while (j < total && pooled[j].v == pooled[i].v) ++j;
    const double t = static_cast<double>(j - i);
    const double midrank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
    for (std::size_t k = i; k < j; ++k)
      if (pooled[k].from_a) rank_sum_a += midrank;
    if (t > 1) {
      ties = true;
      tie_term += t * t * t - t;
    }
    i = j;
  }
  const double nd = static_cast<double>(n), md = static_cast<double>(m);
  const double u_a = rank_sum_a - nd * (nd + 1.0) / 2.0;
  const double u_b = nd * md - u_a;
  UTest res;
  res.u = std::min(u_a, u_b);

  if (method == UMethod::Exact && ties) fail(ErrorCode::InvalidArgument, "mann_whitney_u: exact test with ties");
  const bool exact = method == UMethod::Exact || (method == UMethod::Auto && total <= 12 && !ties);
  if (exact) {
    const auto dist = u_distribution(static_cast<int>(n), static_cast<int>(m));
    const double all = std::accumulate(dist.begin(), dist.end(), 0.0);
    double lower = 0.0;
    for (int k = 0; k <= static_cast<int>(std::llround(res.u)); ++k) lower += dist[k];
    res.p = std::min(1.0, 2.0 * lower / all);
    res.exact = true;
    return res;
  }
  const double mu = nd * md / 2.0;
  const double nt = static_cast<double>(total);
  const double var = nd * md / 12.0 * ((nt + 1.0) - tie_term / (nt * (nt - 1.0)));
  if (var <= 0.0) {
    res.p = 1.0;
    return res;
  }
  const double z = std::max(0.0, std::abs(u_a - mu) - 0.5) / std::sqrt(var);
  res.p = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
  return res;
}

double cohens_d(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) fail(ErrorCode::InvalidArgument, "cohens_d: need at least two values per group");
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  const double pooled = std::sqrt(((na - 1.0) * sample_variance(a) + (nb - 1.0) * sample_variance(b)) / (na + nb - 2.0));
  if (!(pooled > 0.0)) fail(ErrorCode::Domain, "cohens_d: pooled SD is zero");
  return (mean(a) - mean(b)) / pooled;
}

Summary summarize(std::span<const double> xs) {
  if (xs.empty()) fail(ErrorCode::InvalidArgument, "summarize: empty sample");
  return {mean(xs), xs.size() > 1 ? std::sqrt(sample_variance(xs)) : 0.0};
}

namespace {

GroupComparison compare(std::span<const ParticipantSeries> series, std::string_view label) {
  // Deltas for all participants, imputed over the pooled cohort.
  std::vector<std::vector<std::optional<double>>> raw;
  for (const auto& s : series) {
    const auto row = improvement(s, label);
    raw.emplace_back(row.begin(), row.end());
  }
  std::array<bool, kMetricCount> count_based{};
  for (int i = 0; i < kMetricCount; ++i) count_based[i] = metrics::kMetrics[i].count_based;
  const auto filled = impute(raw, count_based);

  GroupComparison g;
  g.label = std::string(label);
  for (int i = 0; i < kMetricCount; ++i) {
    std::vector<double> exp, ctl;
    for (std::size_t p = 0; p < series.size(); ++p)
      (series[p].arm == Arm::Experimental ? exp : ctl).push_back(filled[p][i]);
    MetricComparison& row = g.rows[i];
    row.metric = static_cast<Metric>(i);
    row.experimental = summarize(exp);
    row.control = summarize(ctl);
    row.test = mann_whitney_u(exp, ctl);
    row.significant = row.test.p < kAlpha;
    // Every metric improves downward, so the control arm goes first.
    if (exp.size() >= 2 && ctl.size() >= 2) {
      try {
        row.d = cohens_d(ctl, exp);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::Domain) throw;
      }
    }
    g.n_experimental = static_cast<int>(exp.size());
    g.n_control = static_cast<int>(ctl.size());
  }
  return g;
}

std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

// Display width of UTF-8 text.
std::size_t width(std::string_view s) {
  std::size_t w = 0;
  for (unsigned char c : s)
    if ((c & 0xC0) != 0x80) ++w;
  return w;
}

void pad(std::string& out, std::string_view s, std::size_t w) {
  out += s;
  out.append(w > width(s) ? w - width(s) : 0, ' ');
}

}  // namespace

Report report(std::span<const ParticipantSeries> series) {
  bool has_exp = false, has_ctl = false;
  std::set<std::string_view> ids;
  for (const auto& s : series) {
    s.validate();
    if (!ids.insert(s.participant).second)
      fail(ErrorCode::InvalidArgument, "report: participant '" + s.participant + "' appears more than once");
    (s.arm == Arm::Experimental ? has_exp : has_ctl) = true;
  }
  if (!has_exp || !has_ctl) fail(ErrorCode::InvalidArgument, "report: both arms need at least one participant");
  Report r;
  for (std::size_t k = 0; k < kPostBaseline.size(); ++k) {
    r.repetitions[k] = compare(series, kPostBaseline[k]);
    for (int i = 0; i < kMetricCount; ++i) {
      const auto& row = r.repetitions[k].rows[i];
      r.grid.cells[i][k] = {row.d, row.test.p, row.significant};
    }
  }
  r.table = r.repetitions.back();
  return r;
}

std::string format_mean_sd(const Summary& s) { return fixed2(s.mean) + " (" + fixed2(s.sd) + ")"; }

std::string format_table(const Report& r) {
  const auto& t = r.table;
  const std::string h_exp = "Experimental (N = " + std::to_string(t.n_experimental) + ")";
  const std::string h_ctl = "Control (N = " + std::to_string(t.n_control) + ")";
  std::size_t w0 = width("Metric"), w1 = width(h_exp), w2 = width(h_ctl);
  for (const auto& row : t.rows) {
    w0 = std::max(w0, width(metrics::kMetrics[static_cast<int>(row.metric)].name) + 1);
    w1 = std::max(w1, width(format_mean_sd(row.experimental)));
    w2 = std::max(w2, width(format_mean_sd(row.control)));
  }
  std::string out;
  pad(out, "Metric", w0 + 2);
  pad(out, h_exp, w1 + 2);
  pad(out, h_ctl, w2 + 2);
  out += "P value\n";
  for (const auto& row : t.rows) {
    std::string name(metrics::kMetrics[static_cast<int>(row.metric)].name);
    if (row.significant) name += '*';
    pad(out, name, w0 + 2);
    pad(out, format_mean_sd(row.experimental), w1 + 2);
    pad(out, format_mean_sd(row.control), w2 + 2);
    out += fixed2(row.test.p);
    out += '\n';
  }
  return out;
}

std::string format_grid(const Report& r) {
  std::size_t w0 = width("Metric");
  for (const auto& m : metrics::kMetrics) w0 = std::max(w0, width(m.name));
  constexpr std::size_t kCell = 10;
  std::string out;
  pad(out, "Metric", w0 + 2);
  for (auto label : kPostBaseline) pad(out, label, kCell);
  while (out.back() == ' ') out.pop_back();
  out += '\n';
  char buf[32];
  for (int i = 0; i < kMetricCount; ++i) {
    pad(out, metrics::kMetrics[i].name, w0 + 2);
    for (const auto& c : r.grid.cells[i]) {
      if (c.d)
        std::snprintf(buf, sizeof buf, "%.2f%s", *c.d, c.significant ? "*" : "");
      else
        std::snprintf(buf, sizeof buf, "n/a%s", c.significant ? "*" : "");
      pad(out, buf, kCell);
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    out += '\n';
  }
  return out;
}

std::string report_json(const Report& r) {
  using io::Json;
  auto group = [](const GroupComparison& g) {
    Json rows = Json::array();
    for (const auto& row : g.rows) {
      rows.push_back({{"metric", metrics::kMetrics[static_cast<int>(row.metric)].name},
                      {"experimental", {{"mean", row.experimental.mean}, {"sd", row.experimental.sd}}},
                      {"control", {{"mean", row.control.mean}, {"sd", row.control.sd}}},
                      {"u", row.test.u},
                      {"p", row.test.p},
                      {"exact", row.test.exact},
                      {"d", row.d ? Json(*row.d) : Json(nullptr)},
                      {"significant", row.significant}});
    }
    return Json{{"repetition", g.label},
                {"n_experimental", g.n_experimental},
                {"n_control", g.n_control},
                {"rows", rows}};
  };
  Json reps = Json::array();
  for (const auto& g : r.repetitions) reps.push_back(group(g));
  Json grid = Json::array();
  for (int i = 0; i < kMetricCount; ++i) {
    Json cells = Json::array();
    for (std::size_t k = 0; k < kPostBaseline.size(); ++k) {
      const auto& c = r.grid.cells[i][k];
      cells.push_back({{"repetition", kPostBaseline[k]},
                       {"d", c.d ? Json(*c.d) : Json(nullptr)},
                       {"p", c.p},
                       {"significant", c.significant}});
    }
    grid.push_back({{"metric", metrics::kMetrics[i].name}, {"cells", cells}});
  }
  return Json{{"table", group(r.table)}, {"repetitions", reps}, {"grid", grid}}.dump(2);
}

std::string grid_csv(const Report& r) {
  std::string out = "metric,repetition,d,p,significant\n";
  char buf[64];
  for (int i = 0; i < kMetricCount; ++i) {
    for (std::size_t k = 0; k < kPostBaseline.size(); ++k) {
      const auto& c = r.grid.cells[i][k];
      out += '"';
      out += metrics::kMetrics[i].name;
      out += "\",";
      out += kPostBaseline[k];
      out += ',';
      if (c.d) {
        std::snprintf(buf, sizeof buf, "%.6f", *c.d);
        out += buf;
      }
      std::snprintf(buf, sizeof buf, ",%.6f,%d\n", c.p, c.significant ? 1 : 0);
      out += buf;
    }
  }
  return out;
}

std::vector<ParticipantSeries> load_series(std::span<const std::filesystem::path> files, Arm arm) {
  std::map<std::string, ParticipantSeries> by_id;
  for (const auto& f : files) {
    const std::string label = f.stem().string();
    if (std::find(kLabels.begin(), kLabels.end(), label) == kLabels.end())
      fail(ErrorCode::InvalidArgument, f.string() + ": unknown repetition label '" + label + "'");
    auto rec = session::read_file(f);
    if (!rec.footer) fail(ErrorCode::Integrity, f.string() + ": no footer");
    auto& s = by_id[rec.header.participant];
    s.participant = rec.header.participant;
    s.arm = arm;
    s.repetitions.push_back({label, *rec.footer});
  }
  std::vector<ParticipantSeries> out;
  for (auto& [id, s] : by_id) {
    std::sort(s.repetitions.begin(), s.repetitions.end(), [](const Repetition& a, const Repetition& b) {
      return std::find(kLabels.begin(), kLabels.end(), a.label) < std::find(kLabels.begin(), kLabels.end(), b.label);
    });
    s.validate();
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<ParticipantSeries> load_arm(const std::filesystem::path& dir, Arm arm) {
  if (!std::filesystem::is_directory(dir)) fail(ErrorCode::NotFound, "no such directory: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::recursive_directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".vcs") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) fail(ErrorCode::NotFound, "no session files under " + dir.string());
  return load_series(files, arm);
}

}  // namespace vcoach::analytics
