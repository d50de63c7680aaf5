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

#ifndef AOP_WORLD_H_
#define AOP_WORLD_H_

#include <array>
#include <memory>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

namespace aop {

inline constexpr int kMaxStateDim = 6;
inline constexpr int kMaxActionDim = 2;
inline constexpr int kMaxObservationDim = 4;

using StateVec = std::array<double, kMaxStateDim>;
using ActionVec = std::array<double, kMaxActionDim>;

enum class ObservationMode { kNovelStates, kChangingWorlds };

struct Transition {
  StateVec next{};
  double reward = 0.0;
  bool contact = false;
  bool clamped = false;
};

// One fixed (T, R) pair. Worlds are immutable once built, so a
// shared_ptr<const World> doubles as the agent's ground-truth local model and
// may be rolled out from any number of threads.
class World {
 public:
  virtual ~World() = default;

  virtual int action_dim() const = 0;
  virtual int observation_dim() const = 0;
  virtual double action_bound() const { return 1.0; }

  virtual Transition Step(const StateVec& state,
                          const ActionVec& action) const = 0;
  virtual void Observe(const StateVec& state, std::span<double> out) const = 0;

  // Carries a physical state over from the previous world when this world
  // becomes active. `task_switch` is set when the schedule also switches the
  // task (e.g. the maze goal).
  virtual StateVec Admit(const StateVec& state, bool task_switch) const = 0;

  virtual nlohmann::json ToJson() const = 0;
};

using EnvModel = std::shared_ptr<const World>;

// Rebuilds a world from World::ToJson output.
EnvModel WorldFromJson(const nlohmann::json& j);

// Clamps every component of `action` to [-bound, bound]; returns true if any
// component changed.
bool ClampAction(ActionVec& action, int action_dim, double bound);

}  // namespace aop

#endif  // AOP_WORLD_H_
