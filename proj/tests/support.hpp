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

#include <doctest.h>

#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <optional>

#include "vcoach/error.hpp"
#include "vcoach/geometry.hpp"
#include "vcoach/task.hpp"

namespace vcoach::test {

// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("vcoach-test-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline bool near(const geometry::Vec3& a, const geometry::Vec3& b, double tol) {
  return geometry::distance(a, b) <= tol;
}

// Runs fn and checks that it throws vcoach::Error with the given code.
inline void require_code(ErrorCode code, const std::function<void()>& fn) {
  try {
    fn();
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(static_cast<int>(e.code()) == static_cast<int>(code));
  }
}

inline task::SimEvent sim(task::SimEventKind kind, int64_t tick) {
  task::SimEvent e;
  e.kind = kind;
  e.tick = tick;
  return e;
}

inline task::SimEvent crossing(task::SimEventKind kind, int64_t tick, std::optional<task::TargetRef> target,
                               bool upward = false) {
  auto e = sim(kind, tick);
  e.target = target;
  e.upward = upward;
  return e;
}

inline task::TargetRef entry(int i) { return {i, task::TargetRole::Entry}; }
inline task::TargetRef exit(int i) { return {i, task::TargetRole::Exit}; }

inline task::SimEvent grasp(int64_t tick, double theta, task::Side side = task::Side::Right) {
  auto e = sim(task::SimEventKind::GraspStart, tick);
  e.theta = theta;
  e.side = side;
  return e;
}

// The four events of a correct pass through pair i.
inline std::vector<task::SimEvent> clean_pass(int i, int64_t tick) {
  using K = task::SimEventKind;
  return {crossing(K::Pierce, tick, entry(i)), crossing(K::TipExit, tick + 1, exit(i)),
          crossing(K::TailExit, tick + 2, entry(i)), crossing(K::NeedleFree, tick + 3, exit(i))};
}

}  // namespace vcoach::test
