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

#ifndef AOP_ANALYSIS_H_
#define AOP_ANALYSIS_H_

#include <cstdint>
#include <vector>

#include "aop/agent.h"

namespace aop {

// A maximal run of consecutive steps produced by the same world.
struct WorldSegment {
  int world_index = 0;
  std::size_t begin = 0;  // index into the log
  std::size_t end = 0;    // one past the last step
};

std::vector<WorldSegment> WorldSegments(const LifetimeLog& log);

struct QuartilePlanning {
  int world_index = 0;
  double first = 0.0;  // mean rolled timesteps, first quarter of the segment
  double last = 0.0;   // mean rolled timesteps, last quarter
};

// Segments shorter than 4 steps are skipped.
std::vector<QuartilePlanning> PlanningByQuartile(const LifetimeLog& log);

// Fraction of segments whose last-quarter planning is below `ratio` times
// the first-quarter planning.
double QuartileReductionShare(const std::vector<QuartilePlanning>& q,
                              double ratio);

struct ChangeWindow {
  std::size_t step = 0;  // first step under the new world
  double before = 0.0;   // mean logged Bellman error over `window` steps
  double after = 0.0;
};

// One entry per world change with a full window on both sides.
std::vector<ChangeWindow> BellmanAroundChanges(const LifetimeLog& log,
                                               int window = 50);

// Fraction of changes where after > ratio * before.
double SpikeShare(const std::vector<ChangeWindow>& changes, double ratio);

// Trailing moving average (shorter prefix windows at the start).
std::vector<double> MovingAverage(const std::vector<double>& xs, int window);

}  // namespace aop

#endif  // AOP_ANALYSIS_H_
