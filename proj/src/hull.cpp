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

// Incremental 3-D convex hull used for workspace volumes.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "vcoach/metrics.hpp"

namespace vcoach::metrics {

namespace {

struct Face {
  int a, b, c;
  Vec3 normal;  // unit, outward
  double offset;
  bool alive = true;
  std::vector<int> outside;
};

class Hull {
 public:
  Hull(std::span<const Vec3> pts, double eps) : pts_(pts), eps_(eps) {}

  bool init() {
    const int n = static_cast<int>(pts_.size());
    int i0 = 0;
    for (int i = 1; i < n; ++i)
      if (pts_[i].x < pts_[i0].x) i0 = i;
    int i1 = farthest([&](const Vec3& p) { return geometry::distance(p, pts_[i0]); });
    if (geometry::distance(pts_[i1], pts_[i0]) <= eps_) return false;
    const Vec3 dir = (pts_[i1] - pts_[i0]).normalized();
    int i2 = farthest([&](const Vec3& p) {
      const Vec3 r = p - pts_[i0];
      return (r - dir * r.dot(dir)).norm();
    });
    {
      const Vec3 r = pts_[i2] - pts_[i0];
      if ((r - dir * r.dot(dir)).norm() <= eps_) return false;
    }
    const Vec3 pn = (pts_[i1] - pts_[i0]).cross(pts_[i2] - pts_[i0]).normalized();
    int i3 = farthest([&](const Vec3& p) { return std::abs((p - pts_[i0]).dot(pn)); });
    if (std::abs((pts_[i3] - pts_[i0]).dot(pn)) <= eps_) return false;

    interior_ = (pts_[i0] + pts_[i1] + pts_[i2] + pts_[i3]) / 4.0;
    faces_.reserve(64);
    add_face(i0, i1, i2);
    add_face(i0, i1, i3);
    add_face(i0, i2, i3);
    add_face(i1, i2, i3);
    seed_ = {i0, i1, i2, i3};
    return true;
  }

  // Quickhull-style expansion: every pending point is parked on one face it
  // sees; points that see no face are inside and dropped.
  void build() {
    const int n = static_cast<int>(pts_.size());
    std::vector<int> all;
    all.reserve(n);
    for (int i = 0; i < n; ++i)
      if (std::find(seed_.begin(), seed_.end(), i) == seed_.end()) all.push_back(i);
    assign(all, 0);

    std::vector<int> visible;
    std::vector<int> orphans;
    std::unordered_map<std::uint64_t, int> edges;
    for (std::size_t f = 0; f < faces_.size(); ++f) {
      while (faces_[f].alive && !faces_[f].outside.empty()) {
        // Farthest pending point of this face.
        const Face& F = faces_[f];
        int best = F.outside.front();
        double bd = -1.0;
        for (int q : F.outside) {
          const double d = F.normal.dot(pts_[q]) - F.offset;
          if (d > bd) {
            bd = d;
            best = q;
          }
        }
        const Vec3& p = pts_[best];

        visible.clear();
        for (int g = 0; g < static_cast<int>(faces_.size()); ++g) {
          const Face& G = faces_[g];
          if (G.alive && G.normal.dot(p) - G.offset > eps_) visible.push_back(g);
        }
        edges.clear();
        for (int g : visible) {
          const Face& G = faces_[g];
          const int v[3] = {G.a, G.b, G.c};
          for (int k = 0; k < 3; ++k) edges[key(v[k], v[(k + 1) % 3])] = 1;
        }
        std::vector<std::pair<int, int>> horizon;
        orphans.clear();
        for (int g : visible) {
          Face& G = faces_[g];
          const int v[3] = {G.a, G.b, G.c};
          for (int k = 0; k < 3; ++k) {
            const int a = v[k], b = v[(k + 1) % 3];
            if (!edges.count(key(b, a))) horizon.emplace_back(a, b);
          }
          for (int q : G.outside)
            if (q != best) orphans.push_back(q);
          G.outside.clear();
          G.outside.shrink_to_fit();
          G.alive = false;
        }
        const std::size_t first_new = faces_.size();
        for (auto [a, b] : horizon) add_face(a, b, best);
        assign(orphans, first_new);
      }
    }
  }

  double volume() const {
    double v = 0.0;
    for (const Face& F : faces_) {
      if (!F.alive) continue;
      const Vec3 a = pts_[F.a] - interior_;
      const Vec3 b = pts_[F.b] - interior_;
      const Vec3 c = pts_[F.c] - interior_;
      v += a.dot(b.cross(c));
    }
    return v / 6.0;
  }

 private:
  template <class Fn>
  int farthest(Fn&& dist) const {
    int best = 0;
    double bd = -1.0;
    for (int i = 0; i < static_cast<int>(pts_.size()); ++i) {
      const double d = dist(pts_[i]);
      if (d > bd) {
        bd = d;
        best = i;
      }
    }
    return best;
  }

  static std::uint64_t key(int a, int b) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
  }

  void add_face(int a, int b, int c) {
    Vec3 nrm = (pts_[b] - pts_[a]).cross(pts_[c] - pts_[a]);
    double len = nrm.norm();
    if (nrm.dot(interior_ - pts_[a]) > 0.0) {
      std::swap(b, c);
      nrm = -nrm;
    }
    nrm = len > 0.0 ? nrm / len : Vec3{0, 0, 0};
    faces_.push_back({a, b, c, nrm, nrm.dot(pts_[a]), true, {}});
  }

  void assign(const std::vector<int>& points, std::size_t from_face) {
    for (int q : points) {
      for (std::size_t g = from_face; g < faces_.size(); ++g) {
        Face& G = faces_[g];
        if (G.alive && G.normal.dot(pts_[q]) - G.offset > eps_) {
          G.outside.push_back(q);
          break;
        }
      }
    }
  }

  std::span<const Vec3> pts_;
  double eps_;
  Vec3 interior_;
  std::vector<Face> faces_;
  std::vector<int> seed_;
};

}  // namespace

double convex_hull_volume(std::span<const Vec3> points) {
  if (points.size() < 4) return 0.0;
  Vec3 lo = points[0], hi = points[0];
  for (const Vec3& p : points) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
  }
  const double scale = (hi - lo).norm();
  if (!(scale > 0.0)) return 0.0;
  Hull hull(points, 1e-9 * scale);
  if (!hull.init()) return 0.0;
  hull.build();
  return std::max(0.0, hull.volume());
}

}  // namespace vcoach::metrics
