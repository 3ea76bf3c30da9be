// SPDX-License-Identifier: Apache-2.0
//
// Generative urn models. Every runner maps a ModelConfig to a checkpointed
// Trajectory deterministically: one seed, one trajectory.
//
// Random stream layout per run (see rng.hpp): the urn-selection draws come
// from substream child_seed(seed, 0) and all branching decisions (Poisson
// horizon, re-toss coin, uniform ball index) from child_seed(seed, 1). The
// split keeps a degenerate branching parameter (q == 0) from perturbing the
// urn-selection stream, so boundary cases collapse to the elementary model
// bit for bit.

#pragma once

#include <cstdint>
#include <string>

#include "urnlab/occupancy.hpp"

namespace urnlab {

enum class ModelKind {
  elementary,             // i.i.d. power-law urn per ball
  poissonized_elementary, // elementary with Poisson(n) horizon
  simon,                  // new urn w.p. p, else copy a uniform previous ball
  mod1,                   // power-law draw, then re-toss w.p. q = 1-p
  mod2,                   // power-law draw, re-toss only from empty urns
};

const char* model_kind_name(ModelKind kind);

struct ModelConfig {
  ModelKind kind = ModelKind::elementary;
  double theta = 0.0;  // power-law exponent parameter, elementary/poissonized
  double beta = 0.0;   // power-law exponent parameter, mod1/mod2
  double p = 0.0;      // innovation probability, simon/mod1/mod2
  std::uint64_t n = 0; // ball horizon, or Poisson mean for poissonized
  std::uint64_t seed = 0;
  std::uint32_t kmax = 10;
  ScheduleKind schedule = ScheduleKind::both;
  // Alternative mod2 reading: a ball landing in an empty urn is always
  // re-tossed instead of with probability q.
  bool mod2_always_retoss = false;
  // Permits p == 1 (pure innovation), used to cross-check that mod1/mod2
  // degenerate to the elementary model. Not a production setting.
  bool allow_boundary_p = false;
};

// Throws std::invalid_argument naming the offending parameter if the config
// mixes parameters across kinds or holds an out-of-range value.
void validate(const ModelConfig& config);

// Dispatch on config.kind.
Trajectory run_model(const ModelConfig& config);

// Per-kind runners. Each requires config.kind to match.
Trajectory run_elementary(const ModelConfig& config);
Trajectory run_poissonized(const ModelConfig& config);
Trajectory run_simon(const ModelConfig& config);
Trajectory run_mod1(const ModelConfig& config);
Trajectory run_mod2(const ModelConfig& config);

// One-line human-readable echo of the configuration, embedded in the
// trajectory and in report files.
std::string describe(const ModelConfig& config);

}  // namespace urnlab
