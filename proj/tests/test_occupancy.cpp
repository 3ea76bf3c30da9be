// SPDX-License-Identifier: Apache-2.0

#include "urnlab/occupancy.hpp"

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "urnlab/rng.hpp"

using namespace urnlab;

namespace {

// Naive recount of every derived tally from a raw placement list.
struct Recount {
  std::map<std::uint64_t, std::uint64_t> urns;
  std::vector<std::uint64_t> count_of_counts;
  std::uint64_t overflow_urns = 0;
  std::uint64_t overflow_balls = 0;
  std::uint64_t distinct = 0;

  Recount(const std::vector<std::uint64_t>& balls, std::uint32_t kmax)
      : count_of_counts(kmax + 1, 0) {
    for (std::uint64_t u : balls) ++urns[u];
    distinct = urns.size();
    for (const auto& [u, c] : urns) {
      if (c <= kmax) {
        ++count_of_counts[c];
      } else {
        ++overflow_urns;
        overflow_balls += c;
      }
    }
  }
};

}  // namespace

TEST_CASE("incremental histogram matches a from-scratch recount") {
  Rng rng(20240517);
  for (int seq = 0; seq < 1000; ++seq) {
    std::uint32_t kmax = 1 + static_cast<std::uint32_t>(rng.below(6));
    std::uint64_t len = 1 + rng.below(300);
    std::uint64_t pool = 1 + rng.below(40);
    std::vector<std::uint64_t> balls;
    balls.reserve(len);
    OccupancyState state(kmax);
    for (std::uint64_t i = 0; i < len; ++i) {
      // Skewed ids so some urns pile far past kmax.
      std::uint64_t urn = rng.below(pool);
      if (rng.below(4) == 0) urn = 0;
      balls.push_back(urn);
      place_ball(state, urn);
    }
    Recount ref(balls, kmax);
    REQUIRE(state.total_balls == len);
    REQUIRE(state.distinct_urns == ref.distinct);
    REQUIRE(state.overflow_urns == ref.overflow_urns);
    REQUIRE(state.overflow_balls == ref.overflow_balls);
    REQUIRE(std::vector<std::uint64_t>(state.count_of_counts.begin() + 1,
                                       state.count_of_counts.end()) ==
            std::vector<std::uint64_t>(ref.count_of_counts.begin() + 1,
                                       ref.count_of_counts.end()));
    for (const auto& [u, c] : ref.urns) REQUIRE(state.urn_counts.at(u) == c);

    // Mass conservation across the histogram cutoff.
    std::uint64_t mass = state.overflow_balls;
    for (std::uint32_t k = 1; k <= kmax; ++k)
      mass += k * state.count_of_counts[k];
    REQUIRE(mass == len);
  }
}

TEST_CASE("small worked example") {
  OccupancyState st(3);
  for (std::uint64_t u : {7ULL, 7ULL, 7ULL, 9ULL}) place_ball(st, u);
  CHECK(st.total_balls == 4);
  CHECK(st.distinct_urns == 2);
  CHECK(st.count_of_counts[1] == 1);
  CHECK(st.count_of_counts[2] == 0);
  CHECK(st.count_of_counts[3] == 1);
  CHECK(st.overflow_urns == 0);
  CHECK(cumulative_counts(st, 3) == std::vector<std::uint64_t>{2, 1, 1});

  place_ball(st, 7);  // crosses the kmax cutoff
  CHECK(st.count_of_counts[3] == 0);
  CHECK(st.overflow_urns == 1);
  CHECK(st.overflow_balls == 4);
  place_ball(st, 7);  // already in overflow
  CHECK(st.overflow_urns == 1);
  CHECK(st.overflow_balls == 5);
  CHECK(cumulative_counts(st, 6) ==
        std::vector<std::uint64_t>{2, 1, 1, 1, 1, 0});
}

TEST_CASE("constructor and query guards") {
  CHECK_THROWS_AS(OccupancyState(0), std::invalid_argument);
  OccupancyState st(2);
  CHECK_THROWS_AS(cumulative_counts(st, 0), std::invalid_argument);
}

TEST_CASE("cumulative counts ignore the histogram cutoff") {
  OccupancyState st(1);
  for (int i = 0; i < 5; ++i) place_ball(st, 42);
  place_ball(st, 43);
  CHECK(cumulative_counts(st, 5) ==
        std::vector<std::uint64_t>{2, 1, 1, 1, 1});
}

TEST_CASE("checkpoint schedules") {
  SUBCASE("zero horizon") {
    CHECK(checkpoint_schedule(0, ScheduleKind::both) ==
          std::vector<std::uint64_t>{0});
  }
  SUBCASE("tiny horizons stay sorted and unique") {
    for (std::uint64_t n = 1; n <= 64; ++n) {
      for (ScheduleKind kind : {ScheduleKind::geometric, ScheduleKind::uniform,
                                ScheduleKind::both}) {
        auto s = checkpoint_schedule(n, kind);
        REQUIRE(!s.empty());
        REQUIRE(std::is_sorted(s.begin(), s.end()));
        REQUIRE(std::adjacent_find(s.begin(), s.end()) == s.end());
        REQUIRE(s.front() >= 1);
        REQUIRE(s.back() == n);
        REQUIRE(std::binary_search(s.begin(), s.end(),
                                   n / 2 >= 1 ? n / 2 : 1));
      }
    }
  }
  SUBCASE("geometric grid is the halving sequence") {
    auto s = checkpoint_schedule(1000, ScheduleKind::geometric);
    std::vector<std::uint64_t> expect = {1, 2, 4, 8, 16, 32, 63,
                                         125, 250, 500, 1000};
    CHECK(s == expect);
  }
  SUBCASE("uniform grid has the percentile points") {
    auto s = checkpoint_schedule(100000, ScheduleKind::uniform);
    CHECK(s.size() == 100);
    CHECK(s.front() == 1000);
    CHECK(std::binary_search(s.begin(), s.end(), 50000));
    CHECK(s.back() == 100000);
  }
  SUBCASE("combined grid is the union of the two") {
    std::uint64_t n = 12345;
    auto g = checkpoint_schedule(n, ScheduleKind::geometric);
    auto u = checkpoint_schedule(n, ScheduleKind::uniform);
    auto b = checkpoint_schedule(n, ScheduleKind::both);
    std::vector<std::uint64_t> merged(g);
    merged.insert(merged.end(), u.begin(), u.end());
    std::sort(merged.begin(), merged.end());
    merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
    CHECK(b == merged);
  }
}

TEST_CASE("recorder matches recomputation at every scheduled index") {
  Rng rng(77);
  std::uint64_t n = 400;
  std::vector<std::uint64_t> balls(n);
  for (auto& b : balls) b = rng.below(25);

  auto schedule = checkpoint_schedule(n, ScheduleKind::both);
  std::size_t cursor = 0;
  Trajectory traj = record_checkpoints(
      n, [&]() { return balls[cursor++]; }, schedule, 4);

  REQUIRE(traj.checkpoints.size() == schedule.size());
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    std::uint64_t at = schedule[i];
    const Checkpoint& cp = traj.checkpoints[i];
    REQUIRE(cp.n == at);
    Recount ref(std::vector<std::uint64_t>(balls.begin(), balls.begin() + at),
                4);
    CHECK(cp.distinct == ref.distinct);
    CHECK(cp.overflow_urns == ref.overflow_urns);
    CHECK(cp.overflow_balls == ref.overflow_balls);
    CHECK(cp.exact_counts ==
          std::vector<std::uint64_t>(ref.count_of_counts.begin() + 1,
                                     ref.count_of_counts.end()));
    std::uint64_t mass = cp.overflow_balls;
    for (std::size_t k = 0; k < cp.exact_counts.size(); ++k)
      mass += (k + 1) * cp.exact_counts[k];
    CHECK(mass == at);
  }

  // Distinct-urn counts never decrease along a trajectory.
  for (std::size_t i = 1; i < traj.checkpoints.size(); ++i)
    CHECK(traj.checkpoints[i].distinct >= traj.checkpoints[i - 1].distinct);

  CHECK(traj.at(schedule.front()) == &traj.checkpoints.front());
  CHECK(traj.at(n) == &traj.checkpoints.back());
  CHECK(traj.at(n + 1) == nullptr);
  CHECK(traj.final().n == n);
}

TEST_CASE("recorder rejects unsorted schedules") {
  CHECK_THROWS_AS(CheckpointRecorder({5, 5}, 3), std::invalid_argument);
  CHECK_THROWS_AS(CheckpointRecorder({5, 4}, 3), std::invalid_argument);
}

TEST_CASE("csv serialization golden") {
  std::vector<std::uint64_t> balls = {1, 1, 2, 1, 3, 3, 1, 1};
  std::size_t cursor = 0;
  Trajectory traj = record_checkpoints(
      balls.size(), [&]() { return balls[cursor++]; },
      checkpoint_schedule(8, ScheduleKind::geometric), 3);
  std::ostringstream out;
  write_trajectory_csv(traj, out);
  CHECK(out.str() ==
        "n,R,R1,R2,R3,Roverflow\n"
        "1,1,1,0,0,0\n"
        "2,1,0,1,0,0\n"
        "4,2,1,0,1,0\n"
        "8,3,1,1,0,1\n");
}
