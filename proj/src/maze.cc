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

#include "aop/maze.h"

#include <algorithm>
#include <cmath>
#include <queue>
#include <random>

#include "aop/errors.h"

namespace aop {

MazeWorld::MazeWorld(MazeLayout layout, MazeParams params)
    : layout_(std::move(layout)), params_(params) {
  if (params_.dt <= 0.0 || params_.velocity_limit <= 0.0 ||
      params_.goal_radius <= 0.0 || params_.swap_after < 0) {
    throw Error(ErrorCode::kInvalidArgument, "MazeWorld: invalid parameters");
  }
}

double MazeWorld::Diameter() { return std::sqrt(2.0); }

bool MazeWorld::Blocked(double x, double y) const {
  if (x < 0.0 || x > 1.0 || y < 0.0 || y > 1.0) return true;
  for (const Rect& w : layout_.walls) {
    if (w.Contains(x, y)) return true;
  }
  return false;
}

namespace {

// Does the axis-aligned sweep from `from` to `to` along one axis (the other
// coordinate fixed at `fixed`) touch any wall or leave the unit square?
bool SweepBlocked(const std::vector<Rect>& walls, double from, double to,
                  double fixed, bool along_x) {
  if (to < 0.0 || to > 1.0) return true;
  const double lo = std::min(from, to);
  const double hi = std::max(from, to);
  for (const Rect& w : walls) {
    const double a0 = along_x ? w.x0 : w.y0;
    const double a1 = along_x ? w.x1 : w.y1;
    const double b0 = along_x ? w.y0 : w.x0;
    const double b1 = along_x ? w.y1 : w.x1;
    if (fixed >= b0 && fixed <= b1 && hi >= a0 && lo <= a1) return true;
  }
  return false;
}

}  // namespace

Transition MazeWorld::Step(const StateVec& state,
                           const ActionVec& action) const {
  Transition tr;
  ActionVec a = action;
  tr.clamped = ClampAction(a, 2, params_.action_bound);

  StateVec s = state;
  const double vlim = params_.velocity_limit;
  s[kVx] = std::clamp(s[kVx] + a[0] * params_.dt, -vlim, vlim);
  s[kVy] = std::clamp(s[kVy] + a[1] * params_.dt, -vlim, vlim);

  const double nx = s[kX] + s[kVx] * params_.dt;
  if (SweepBlocked(layout_.walls, s[kX], nx, s[kY], true)) {
    s[kVx] = 0.0;
    tr.contact = true;
  } else {
    s[kX] = nx;
  }
  const double ny = s[kY] + s[kVy] * params_.dt;
  if (SweepBlocked(layout_.walls, s[kY], ny, s[kX], false)) {
    s[kVy] = 0.0;
    tr.contact = true;
  } else {
    s[kY] = ny;
  }

  const Point2& goal = layout_.goals[static_cast<int>(s[kGoal]) & 1];
  const double dist = std::hypot(s[kX] - goal.x, s[kY] - goal.y);
  const bool inside = dist <= params_.goal_radius;
  const double contact_penalty = tr.contact ? 1.0 : 0.0;
  if (params_.reward_mode == RewardMode::kDense) {
    tr.reward = -dist - contact_penalty;
  } else {
    tr.reward = (inside ? 1.0 : 0.0) - contact_penalty;
  }

  if (inside) {
    s[kDwell] += 1.0;
    if (params_.swap_after > 0 && s[kDwell] >= params_.swap_after) {
      s[kGoal] = s[kGoal] == 0.0 ? 1.0 : 0.0;
      s[kDwell] = 0.0;
    }
  } else {
    s[kDwell] = 0.0;
  }
  tr.next = s;
  return tr;
}

void MazeWorld::Observe(const StateVec& state, std::span<double> out) const {
  const Point2& goal = layout_.goals[static_cast<int>(state[kGoal]) & 1];
  out[0] = state[kX];
  out[1] = state[kY];
  out[2] = goal.x;
  out[3] = goal.y;
}

StateVec MazeWorld::Admit(const StateVec& state, bool task_switch) const {
  StateVec s = state;
  for (const Rect& w : layout_.walls) {
    if (!w.Contains(s[kX], s[kY])) continue;
    // push out through the nearest face
    const double margin = 1e-6;
    const double left = s[kX] - w.x0, right = w.x1 - s[kX];
    const double down = s[kY] - w.y0, up = w.y1 - s[kY];
    const double best = std::min({left, right, down, up});
    if (best == left && w.x0 - margin >= 0.0) {
      s[kX] = w.x0 - margin;
    } else if (best == right && w.x1 + margin <= 1.0) {
      s[kX] = w.x1 + margin;
    } else if (best == down && w.y0 - margin >= 0.0) {
      s[kY] = w.y0 - margin;
    } else {
      s[kY] = w.y1 + margin;
    }
    s[kVx] = 0.0;
    s[kVy] = 0.0;
  }
  if (task_switch) {
    s[kGoal] = s[kGoal] == 0.0 ? 1.0 : 0.0;
    s[kDwell] = 0.0;
  }
  return s;
}

StateVec MazeWorld::InitialState() const {
  StateVec s{};
  s[kX] = layout_.goals[0].x;
  s[kY] = layout_.goals[0].y;
  s[kGoal] = 1.0;
  return s;
}

nlohmann::json MazeWorld::ToJson() const {
  nlohmann::json walls = nlohmann::json::array();
  for (const Rect& w : layout_.walls) walls.push_back({w.x0, w.y0, w.x1, w.y1});
  return {
      {"kind", "maze"},
      {"walls", walls},
      {"goals",
       {{layout_.goals[0].x, layout_.goals[0].y},
        {layout_.goals[1].x, layout_.goals[1].y}}},
      {"dt", params_.dt},
      {"velocity_limit", params_.velocity_limit},
      {"action_bound", params_.action_bound},
      {"goal_radius", params_.goal_radius},
      {"swap_after", params_.swap_after},
      {"reward_mode",
       params_.reward_mode == RewardMode::kDense ? "dense" : "sparse"},
  };
}

bool GoalsConnected(const MazeLayout& layout, int grid) {
  MazeWorld world(layout, MazeParams{});
  auto cell_of = [grid](double v) {
    return std::clamp(static_cast<int>(v * grid), 0, grid - 1);
  };
  auto free_cell = [&](int i, int j) {
    return !world.Blocked((i + 0.5) / grid, (j + 0.5) / grid);
  };
  const int si = cell_of(layout.goals[0].x), sj = cell_of(layout.goals[0].y);
  const int ti = cell_of(layout.goals[1].x), tj = cell_of(layout.goals[1].y);
  if (!free_cell(si, sj) || !free_cell(ti, tj)) return false;
  std::vector<char> seen(static_cast<std::size_t>(grid) * grid, 0);
  std::queue<std::pair<int, int>> frontier;
  frontier.push({si, sj});
  seen[static_cast<std::size_t>(si) * grid + sj] = 1;
  while (!frontier.empty()) {
    auto [i, j] = frontier.front();
    frontier.pop();
    if (i == ti && j == tj) return true;
    constexpr int kDi[] = {1, -1, 0, 0};
    constexpr int kDj[] = {0, 0, 1, -1};
    for (int k = 0; k < 4; ++k) {
      const int ni = i + kDi[k], nj = j + kDj[k];
      if (ni < 0 || nj < 0 || ni >= grid || nj >= grid) continue;
      auto& mark = seen[static_cast<std::size_t>(ni) * grid + nj];
      if (mark || !free_cell(ni, nj)) continue;
      mark = 1;
      frontier.push({ni, nj});
    }
  }
  return false;
}

std::vector<Rect> GenerateWalls(const std::array<Point2, 2>& goals,
                                const MazeGenOptions& options,
                                std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double clearance = 0.15;  // keep walls off the goal disks
  auto clear_of_goals = [&](const Rect& r) {
    for (const Point2& g : goals) {
      const double dx = std::max({r.x0 - g.x, 0.0, g.x - r.x1});
      const double dy = std::max({r.y0 - g.y, 0.0, g.y - r.y1});
      if (std::hypot(dx, dy) < clearance) return false;
    }
    return true;
  };
  auto make_wall = [&](double cx, double cy, double length, bool vertical) {
    const double h = options.wall_thickness / 2.0;
    Rect r = vertical ? Rect{cx - h, cy - length / 2, cx + h, cy + length / 2}
                      : Rect{cx - length / 2, cy - h, cx + length / 2, cy + h};
    r.x0 = std::max(r.x0, 0.0);
    r.y0 = std::max(r.y0, 0.0);
    r.x1 = std::min(r.x1, 1.0);
    r.y1 = std::min(r.y1, 1.0);
    return r;
  };

  const int max_attempts = 10000;
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    std::vector<Rect> walls;
    // The first wall crosses the segment between the goals so every layout
    // forces a detour that differs between layouts.
    {
      const double mx = 0.5 * (goals[0].x + goals[1].x);
      const double my = 0.5 * (goals[0].y + goals[1].y);
      const bool vertical =
          std::abs(goals[1].x - goals[0].x) >= std::abs(goals[1].y - goals[0].y);
      const double length =
          options.min_wall_length +
          unit(rng) * (options.max_wall_length - options.min_wall_length);
      const double offset = (unit(rng) - 0.5) * length * 0.8;
      walls.push_back(vertical ? make_wall(mx, my + offset, length, true)
                               : make_wall(mx + offset, my, length, false));
    }
    while (static_cast<int>(walls.size()) < options.wall_count) {
      const double length =
          options.min_wall_length +
          unit(rng) * (options.max_wall_length - options.min_wall_length);
      const bool vertical = unit(rng) < 0.5;
      walls.push_back(make_wall(unit(rng), unit(rng), length, vertical));
    }
    if (!std::all_of(walls.begin(), walls.end(), clear_of_goals)) continue;
    if (!GoalsConnected(MazeLayout{walls, goals}, options.grid)) continue;
    return walls;
  }
  throw Error(ErrorCode::kInvalidArgument,
              "GenerateWalls: could not place connected walls");
}

}  // namespace aop
