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

#include "aop/analysis.h"

#include "aop/errors.h"

namespace aop {

std::vector<WorldSegment> WorldSegments(const LifetimeLog& log) {
  std::vector<WorldSegment> out;
  for (std::size_t i = 0; i < log.steps.size(); ++i) {
    const int w = log.steps[i].world_index;
    if (out.empty() || out.back().world_index != w) {
      out.push_back({w, i, i + 1});
    } else {
      out.back().end = i + 1;
    }
  }
  return out;
}

std::vector<QuartilePlanning> PlanningByQuartile(const LifetimeLog& log) {
  std::vector<QuartilePlanning> out;
  for (const WorldSegment& seg : WorldSegments(log)) {
    const std::size_t n = seg.end - seg.begin;
    const std::size_t q = n / 4;
    if (q == 0) continue;
    double first = 0.0, last = 0.0;
    for (std::size_t i = 0; i < q; ++i) {
      first += static_cast<double>(log.steps[seg.begin + i].rolled_timesteps);
      last += static_cast<double>(log.steps[seg.end - q + i].rolled_timesteps);
    }
    out.push_back({seg.world_index, first / q, last / q});
  }
  return out;
}

double QuartileReductionShare(const std::vector<QuartilePlanning>& q,
                              double ratio) {
  if (q.empty()) return 0.0;
  int hits = 0;
  for (const auto& w : q) hits += w.last < ratio * w.first;
  return static_cast<double>(hits) / static_cast<double>(q.size());
}

std::vector<ChangeWindow> BellmanAroundChanges(const LifetimeLog& log,
                                               int window) {
  if (window <= 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "BellmanAroundChanges: window must be positive");
  }
  const std::size_t w = static_cast<std::size_t>(window);
  std::vector<ChangeWindow> out;
  const auto segments = WorldSegments(log);
  for (std::size_t k = 1; k < segments.size(); ++k) {
    const std::size_t c = segments[k].begin;
    if (c < w || c + w > log.steps.size()) continue;
    ChangeWindow cw;
    cw.step = c;
    for (std::size_t i = 0; i < w; ++i) {
      cw.before += log.steps[c - w + i].bellman_error;
      cw.after += log.steps[c + i].bellman_error;
    }
    cw.before /= static_cast<double>(w);
    cw.after /= static_cast<double>(w);
    out.push_back(cw);
  }
  return out;
}

double SpikeShare(const std::vector<ChangeWindow>& changes, double ratio) {
  if (changes.empty()) return 0.0;
  int hits = 0;
  for (const auto& c : changes) hits += c.after > ratio * c.before;
  return static_cast<double>(hits) / static_cast<double>(changes.size());
}

std::vector<double> MovingAverage(const std::vector<double>& xs, int window) {
  if (window <= 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "MovingAverage: window must be positive");
  }
  std::vector<double> out(xs.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sum += xs[i];
    if (i >= static_cast<std::size_t>(window)) sum -= xs[i - window];
    const std::size_t n = std::min<std::size_t>(i + 1, window);
    out[i] = sum / static_cast<double>(n);
  }
  return out;
}

}  // namespace aop
