// SPDX-License-Identifier: Apache-2.0
//
// Estimators, the replication harness, and theory-vs-simulation reports.
//
// Reports are plain rows (name, empirical, target, se, z, pass). A row with
// no meaningful target (tabulated-only quantities) carries NaN there, which
// the JSON writer emits as null. Every report is deterministic given the
// model config and the master seed, including bootstrap resampling.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "urnlab/models.hpp"
#include "urnlab/occupancy.hpp"
#include "urnlab/theory.hpp"

namespace urnlab::analysis {

struct EstimatorResult {
  double theta_hat = 0.0;   // log2 R_n - log2 R_{n/2}
  double theta_star = 0.0;  // R_n1 / R_n
  std::uint64_t n = 0;
  std::uint64_t R_n = 0;
  std::uint64_t R_half = 0;
  std::uint64_t R_n1 = 0;
};

// Requires checkpoints at floor(n/2) and n; R_half must be positive.
EstimatorResult estimate_theta(const Trajectory& traj);

struct ReplicateSet {
  ModelConfig config;  // seed field holds the master seed
  std::uint64_t master_seed = 0;
  std::vector<Trajectory> trajs;
};

// Runs `reps` independent replicates; replicate r uses the derived seed
// child_seed(master_seed, r) and is reproducible in isolation. `jobs` = 0
// picks the hardware thread count; results are independent of `jobs`.
ReplicateSet run_replicates(const ModelConfig& config, std::uint64_t reps,
                            std::uint64_t master_seed, unsigned jobs = 0);

struct ReportRow {
  std::string name;  // carries the tolerance convention, e.g. "(15%)"
  double empirical = 0.0;
  double target = 0.0;  // NaN when the row is tabulated without a target
  double se = 0.0;
  double z = 0.0;
  bool pass = false;
};

struct MomentReport {
  std::string model;
  std::string params;
  std::uint64_t reps = 0;
  std::uint64_t seed = 0;
  std::vector<ReportRow> rows;

  bool all_pass() const;
  const ReportRow* row(const std::string& name) const;
};

// Distinct-count moments against the Poisson-horizon oracle and the
// asymptotic variance scale, plus normality indicators. Needs >= 100
// replicates; throws on a degenerate (zero-variance) sample.
MomentReport compare_variance(const ReplicateSet& set,
                              const theory::TheoryParams& params);

// Scaled covariance matrix of the exact-size counts at the final time
// against the limiting covariances. Needs >= 500 replicates. Off-diagonal
// rows pass on the bootstrap sign criterion (>= 95% negative resamples).
MomentReport compare_covariance(const ReplicateSet& set, double theta,
                                const std::vector<std::uint32_t>& r_list);

// Per-size occupancy fractions of the copy model against their limits,
// plus sqrt(n)-scaled fluctuation variances at n = 1e4/1e5/1e6 when those
// checkpoints exist (their consecutive ratios must sit in [0.5, 2]).
MomentReport compare_simon_limits(const ReplicateSet& set, double p,
                                  std::uint32_t m);

// Tabulates both estimators for a re-toss model and for an elementary
// control at theta = beta, and checks that the estimators disagree (z > 3)
// under the re-toss model while agreeing (z < 3) under the control.
MomentReport divergence_report(const ModelConfig& config_mod,
                               std::uint64_t reps, std::uint64_t master_seed,
                               unsigned jobs = 0);

std::string report_to_json(const MomentReport& report);
std::string report_to_csv(const MomentReport& report);

}  // namespace urnlab::analysis
