// SPDX-License-Identifier: Apache-2.0
//
// Occupancy bookkeeping for urn processes: per-urn ball counts plus an
// incrementally maintained histogram of counts-of-counts, and checkpointed
// trajectories of that histogram along a growing sample.

#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

namespace urnlab {

// State of an urn scheme after some number of placements.
//
// count_of_counts[k] (1 <= k <= kmax) is the number of urns holding exactly
// k balls. Urns holding more than kmax balls are tracked in aggregate:
// overflow_urns many of them, overflow_balls balls in total. The invariant
//
//   sum_k k * count_of_counts[k] + overflow_balls == total_balls
//
// holds after every placement, so no mass is lost to the cutoff.
struct OccupancyState {
  explicit OccupancyState(std::uint32_t kmax = 10);

  std::unordered_map<std::uint64_t, std::uint64_t> urn_counts;
  std::vector<std::uint64_t> count_of_counts;  // index 0 unused
  std::uint64_t overflow_urns = 0;
  std::uint64_t overflow_balls = 0;
  std::uint64_t total_balls = 0;
  std::uint64_t distinct_urns = 0;
  std::uint32_t kmax = 10;
};

// Adds one ball to `urn`, updating all derived tallies in O(1).
void place_ball(OccupancyState& state, std::uint64_t urn);

// Cumulative occupancy counts: result[k-1] is the number of urns holding at
// least k balls, for k = 1..kmax. Recomputed from the per-urn map, so any
// kmax is valid regardless of the histogram cutoff in `state`.
std::vector<std::uint64_t> cumulative_counts(const OccupancyState& state,
                                             std::uint32_t kmax);

// Snapshot of the histogram after ball number `n`.
struct Checkpoint {
  std::uint64_t n = 0;
  std::uint64_t distinct = 0;                // R_n
  std::vector<std::uint64_t> exact_counts;   // R_{n,k}, k = 1..kmax
  std::uint64_t overflow_urns = 0;           // urns with more than kmax balls
  std::uint64_t overflow_balls = 0;          // balls inside those urns
};

// A recorded run: checkpoints strictly increasing in n. `model` is a short
// human-readable echo of the generating configuration.
struct Trajectory {
  std::uint32_t kmax = 10;
  std::string model;
  std::vector<Checkpoint> checkpoints;

  const Checkpoint& final() const { return checkpoints.back(); }
  // Checkpoint with exactly this n, or nullptr.
  const Checkpoint* at(std::uint64_t n) const;
};

// Which placement indices a run snapshots.
enum class ScheduleKind { geometric, uniform, both };

// Builds the checkpoint schedule for a horizon of n balls: a geometric grid
// ceil(n / 2^i) and/or a uniform grid of 100 points, always including
// floor(n/2) and n. Sorted, unique, no zeros. n == 0 yields {0} so that an
// empty run still produces one (all-zero) snapshot.
std::vector<std::uint64_t> checkpoint_schedule(std::uint64_t n,
                                               ScheduleKind kind);

// Streaming recorder. Drive it alongside the placement loop:
//
//   if (rec.due(k)) rec.record(state, k);
//
// where k is the 1-based index of the ball just placed. The schedule must be
// sorted and duplicate-free.
class CheckpointRecorder {
 public:
  CheckpointRecorder(std::vector<std::uint64_t> schedule, std::uint32_t kmax);

  bool due(std::uint64_t n) const {
    return next_ < schedule_.size() && schedule_[next_] == n;
  }
  void record(const OccupancyState& state, std::uint64_t n);
  bool done() const { return next_ == schedule_.size(); }

  // Hands over the finished trajectory; the recorder is spent afterwards.
  Trajectory take(std::string model_echo);

 private:
  std::vector<std::uint64_t> schedule_;
  std::size_t next_ = 0;
  Trajectory out_;
};

// Runs `next_urn` once per ball and snapshots at the scheduled indices.
// Convenience wrapper over CheckpointRecorder for callers that do not need
// to own the loop.
Trajectory record_checkpoints(std::uint64_t n_balls,
                              const std::function<std::uint64_t()>& next_urn,
                              const std::vector<std::uint64_t>& schedule,
                              std::uint32_t kmax);

// CSV with header n,R,R1,...,Rkmax,Roverflow and one row per checkpoint.
// Plain integers, comma separated, locale independent.
void write_trajectory_csv(const Trajectory& traj, std::ostream& out);

}  // namespace urnlab
