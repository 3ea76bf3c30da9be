// SPDX-License-Identifier: Apache-2.0

#include "urnlab/occupancy.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>
#include <utility>

namespace urnlab {

OccupancyState::OccupancyState(std::uint32_t kmax_) : kmax(kmax_) {
  if (kmax == 0) throw std::invalid_argument("occupancy kmax must be >= 1");
  count_of_counts.assign(kmax + 1, 0);
}

void place_ball(OccupancyState& state, std::uint64_t urn) {
  auto [it, inserted] = state.urn_counts.try_emplace(urn, 0);
  std::uint64_t old_count = it->second;
  it->second = old_count + 1;
  if (inserted) ++state.distinct_urns;

  // Move the urn between histogram cells. A cell is either an exact-count
  // slot (k <= kmax) or the aggregate overflow cell.
  if (old_count >= 1 && old_count <= state.kmax)
    --state.count_of_counts[old_count];
  std::uint64_t new_count = old_count + 1;
  if (new_count <= state.kmax) {
    ++state.count_of_counts[new_count];
  } else if (old_count == state.kmax) {
    // The urn crosses into the overflow cell carrying all its balls.
    ++state.overflow_urns;
    state.overflow_balls += new_count;
  } else {
    ++state.overflow_balls;
  }
  ++state.total_balls;
}

std::vector<std::uint64_t> cumulative_counts(const OccupancyState& state,
                                             std::uint32_t kmax) {
  if (kmax == 0) throw std::invalid_argument("cumulative_counts kmax must be >= 1");
  std::vector<std::uint64_t> out(kmax, 0);
  for (const auto& [urn, count] : state.urn_counts) {
    std::uint64_t top = std::min<std::uint64_t>(count, kmax);
    for (std::uint64_t k = 1; k <= top; ++k) ++out[k - 1];
  }
  return out;
}

const Checkpoint* Trajectory::at(std::uint64_t n) const {
  auto it = std::lower_bound(
      checkpoints.begin(), checkpoints.end(), n,
      [](const Checkpoint& c, std::uint64_t v) { return c.n < v; });
  if (it == checkpoints.end() || it->n != n) return nullptr;
  return &*it;
}

std::vector<std::uint64_t> checkpoint_schedule(std::uint64_t n,
                                               ScheduleKind kind) {
  if (n == 0) return {0};
  std::vector<std::uint64_t> points;
  if (kind != ScheduleKind::uniform) {
    // ceil(n / 2^i) until it reaches 1. At most 64 points.
    std::uint64_t v = n;
    for (;;) {
      points.push_back(v);
      if (v == 1) break;
      v = (v + 1) / 2;
    }
  }
  if (kind != ScheduleKind::geometric) {
    for (std::uint64_t j = 1; j <= 100; ++j) {
      // floor(j*n/100) without overflow for any n the models can reach.
      std::uint64_t pt = (n / 100) * j + (n % 100) * j / 100;
      if (pt >= 1) points.push_back(pt);
    }
  }
  // The half-sample estimator reads these two exact indices.
  points.push_back(n / 2 >= 1 ? n / 2 : 1);
  points.push_back(n);
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  return points;
}

CheckpointRecorder::CheckpointRecorder(std::vector<std::uint64_t> schedule,
                                       std::uint32_t kmax)
    : schedule_(std::move(schedule)) {
  out_.kmax = kmax;
  out_.checkpoints.reserve(schedule_.size());
  for (std::size_t i = 1; i < schedule_.size(); ++i)
    if (schedule_[i] <= schedule_[i - 1])
      throw std::invalid_argument("checkpoint schedule must be strictly increasing");
}

void CheckpointRecorder::record(const OccupancyState& state, std::uint64_t n) {
  Checkpoint cp;
  cp.n = n;
  cp.distinct = state.distinct_urns;
  cp.exact_counts.assign(state.count_of_counts.begin() + 1,
                         state.count_of_counts.end());
  cp.overflow_urns = state.overflow_urns;
  cp.overflow_balls = state.overflow_balls;
  out_.checkpoints.push_back(std::move(cp));
  ++next_;
}

Trajectory CheckpointRecorder::take(std::string model_echo) {
  out_.model = std::move(model_echo);
  return std::move(out_);
}

Trajectory record_checkpoints(std::uint64_t n_balls,
                              const std::function<std::uint64_t()>& next_urn,
                              const std::vector<std::uint64_t>& schedule,
                              std::uint32_t kmax) {
  OccupancyState state(kmax);
  CheckpointRecorder rec(schedule, kmax);
  if (rec.due(0)) rec.record(state, 0);
  for (std::uint64_t k = 1; k <= n_balls; ++k) {
    place_ball(state, next_urn());
    if (rec.due(k)) rec.record(state, k);
  }
  return rec.take("");
}

void write_trajectory_csv(const Trajectory& traj, std::ostream& out) {
  out << "n,R";
  for (std::uint32_t k = 1; k <= traj.kmax; ++k) out << ",R" << k;
  out << ",Roverflow\n";
  for (const Checkpoint& cp : traj.checkpoints) {
    out << cp.n << ',' << cp.distinct;
    for (std::uint64_t v : cp.exact_counts) out << ',' << v;
    out << ',' << cp.overflow_urns << '\n';
  }
}

}  // namespace urnlab
