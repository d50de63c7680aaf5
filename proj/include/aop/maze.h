// Copyright 2026 The aoplab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef AOP_MAZE_H_
#define AOP_MAZE_H_

#include <array>
#include <cstdint>
#include <vector>

#include "aop/world.h"

namespace aop {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point2&, const Point2&) = default;
};

// Axis-aligned wall, closed on all sides.
struct Rect {
  double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;
  bool Contains(double x, double y) const {
    return x >= x0 && x <= x1 && y >= y0 && y <= y1;
  }
  friend bool operator==(const Rect&, const Rect&) = default;
};

enum class RewardMode { kDense, kSparse };

struct MazeParams {
  double dt = 0.05;
  double velocity_limit = 1.0;
  double action_bound = 1.0;
  double goal_radius = 0.1;
  // consecutive in-goal steps before the goal moves to the other location;
  // 0 keeps the goal until the schedule switches it
  int swap_after = 0;
  RewardMode reward_mode = RewardMode::kDense;
};

struct MazeLayout {
  std::vector<Rect> walls;
  std::array<Point2, 2> goals{};
  friend bool operator==(const MazeLayout&, const MazeLayout&) = default;
};

// 2D point mass in the unit square. State layout:
//   [x, y, vx, vy, goal_index, steps_inside_goal]
// Observation: [x, y, goal_x, goal_y].
class MazeWorld final : public World {
 public:
  enum StateIndex { kX = 0, kY, kVx, kVy, kGoal, kDwell };

  MazeWorld(MazeLayout layout, MazeParams params);

  int action_dim() const override { return 2; }
  int observation_dim() const override { return 4; }
  double action_bound() const override { return params_.action_bound; }

  Transition Step(const StateVec& state,
                  const ActionVec& action) const override;
  void Observe(const StateVec& state, std::span<double> out) const override;
  StateVec Admit(const StateVec& state, bool task_switch) const override;
  nlohmann::json ToJson() const override;

  const MazeLayout& layout() const { return layout_; }
  const MazeParams& params() const { return params_; }

  // Agent parked on goal 0, heading for goal 1, at rest.
  StateVec InitialState() const;
  // max possible distance inside the unit square
  static double Diameter();
  bool Blocked(double x, double y) const;

 private:
  MazeLayout layout_;
  MazeParams params_;
};

struct MazeGenOptions {
  int wall_count = 4;
  double wall_thickness = 0.04;
  double min_wall_length = 0.25;
  double max_wall_length = 0.55;
  // grid resolution for the start->goal connectivity flood fill
  int grid = 64;
};

// True if goals[0] and goals[1] are connected through free space.
bool GoalsConnected(const MazeLayout& layout, int grid = 64);

// Random walls that keep both goals reachable; deterministic in `seed`.
std::vector<Rect> GenerateWalls(const std::array<Point2, 2>& goals,
                                const MazeGenOptions& options,
                                std::uint64_t seed);

}  // namespace aop

#endif  // AOP_MAZE_H_
