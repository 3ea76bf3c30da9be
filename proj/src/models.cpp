// SPDX-License-Identifier: Apache-2.0

#include "urnlab/models.hpp"

#include <bit>
#include <stdexcept>
#include <vector>

#include "text_util.hpp"
#include "urnlab/distributions.hpp"
#include "urnlab/rng.hpp"

namespace urnlab {
namespace {

// Power-law draws are integer-valued doubles; the support can exceed 2^53 at
// high exponents, so the bit pattern is the urn identity, not a cast.
inline std::uint64_t urn_label(double draw) {
  return std::bit_cast<std::uint64_t>(draw);
}

struct Streams {
  Rng place;
  Rng aux;
  explicit Streams(std::uint64_t seed)
      : place(child_seed(seed, 0)), aux(child_seed(seed, 1)) {}
};

void require_kind(const ModelConfig& config, ModelKind kind) {
  if (config.kind != kind) throw std::invalid_argument("model kind mismatch");
}

void check_unit_interval(double v, const char* name, bool allow_one) {
  if (v > 0.0 && (v < 1.0 || (allow_one && v == 1.0))) return;
  std::string msg(name);
  msg += allow_one ? " must lie in (0,1) (1 allowed in boundary test mode)"
                   : " must lie in (0,1)";
  throw std::invalid_argument(msg);
}

void check_unset(double v, const char* name, const char* kind) {
  if (v != 0.0) {
    std::string msg(name);
    msg += " is not a parameter of the ";
    msg += kind;
    msg += " model";
    throw std::invalid_argument(msg);
  }
}

}  // namespace

const char* model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::elementary: return "elementary";
    case ModelKind::poissonized_elementary: return "poissonized";
    case ModelKind::simon: return "simon";
    case ModelKind::mod1: return "mod1";
    case ModelKind::mod2: return "mod2";
  }
  throw std::invalid_argument("unknown model kind");
}

void validate(const ModelConfig& config) {
  const char* kind = model_kind_name(config.kind);
  if (config.kmax == 0) throw std::invalid_argument("kmax must be >= 1");
  bool uses_theta = config.kind == ModelKind::elementary ||
                    config.kind == ModelKind::poissonized_elementary;
  bool uses_beta =
      config.kind == ModelKind::mod1 || config.kind == ModelKind::mod2;
  bool uses_p = config.kind == ModelKind::simon || uses_beta;

  if (uses_theta) check_unit_interval(config.theta, "theta", false);
  else check_unset(config.theta, "theta", kind);
  if (uses_beta) check_unit_interval(config.beta, "beta", false);
  else check_unset(config.beta, "beta", kind);
  if (uses_p) check_unit_interval(config.p, "p", config.allow_boundary_p);
  else check_unset(config.p, "p", kind);

  if (config.mod2_always_retoss && config.kind != ModelKind::mod2)
    throw std::invalid_argument(
        "mod2-always-retoss applies to the mod2 model only");
  if (config.n == 0 && config.kind != ModelKind::poissonized_elementary)
    throw std::invalid_argument("n must be >= 1");
}

std::string describe(const ModelConfig& config) {
  std::string out = model_kind_name(config.kind);
  switch (config.kind) {
    case ModelKind::elementary:
    case ModelKind::poissonized_elementary:
      out += " theta=" + format_double(config.theta);
      break;
    case ModelKind::simon:
      out += " p=" + format_double(config.p);
      break;
    case ModelKind::mod1:
    case ModelKind::mod2:
      out += " beta=" + format_double(config.beta);
      out += " p=" + format_double(config.p);
      if (config.mod2_always_retoss) out += " always-retoss";
      break;
  }
  out += " n=" + std::to_string(config.n);
  out += " seed=" + std::to_string(config.seed);
  out += " kmax=" + std::to_string(config.kmax);
  return out;
}

namespace {

// Shared body for the fixed-horizon and Poisson-horizon i.i.d. models.
Trajectory run_iid(const ModelConfig& config, std::uint64_t horizon,
                   Rng& place) {
  ZipfLaw law(config.theta);
  ZipfSampler sampler(law);
  OccupancyState state(config.kmax);
  CheckpointRecorder rec(checkpoint_schedule(horizon, config.schedule),
                         config.kmax);
  if (rec.due(0)) rec.record(state, 0);
  for (std::uint64_t k = 1; k <= horizon; ++k) {
    place_ball(state, urn_label(sampler.next(place)));
    if (rec.due(k)) rec.record(state, k);
  }
  return rec.take(describe(config));
}

}  // namespace

Trajectory run_elementary(const ModelConfig& config) {
  require_kind(config, ModelKind::elementary);
  validate(config);
  Streams s(config.seed);
  return run_iid(config, config.n, s.place);
}

Trajectory run_poissonized(const ModelConfig& config) {
  require_kind(config, ModelKind::poissonized_elementary);
  validate(config);
  Streams s(config.seed);
  std::uint64_t horizon =
      poisson_sample(static_cast<double>(config.n), s.aux);
  Trajectory traj = run_iid(config, horizon, s.place);
  traj.model += " realized=" + std::to_string(horizon);
  return traj;
}

Trajectory run_simon(const ModelConfig& config) {
  require_kind(config, ModelKind::simon);
  validate(config);
  Streams s(config.seed);
  OccupancyState state(config.kmax);
  CheckpointRecorder rec(checkpoint_schedule(config.n, config.schedule),
                         config.kmax);
  std::vector<std::uint64_t> ball_urn(config.n);
  std::uint64_t next_id = 1;

  // Ball 1 always opens the first urn. All of this model's randomness is
  // branching (innovation coin, uniform ball index), so it lives on the aux
  // substream and the selection substream goes unused.
  ball_urn[0] = next_id++;
  place_ball(state, ball_urn[0]);
  if (rec.due(1)) rec.record(state, 1);
  for (std::uint64_t k = 2; k <= config.n; ++k) {
    std::uint64_t urn;
    if (s.aux.u01() < config.p) {
      urn = next_id++;
    } else {
      urn = ball_urn[s.aux.below(k - 1)];
    }
    ball_urn[k - 1] = urn;
    place_ball(state, urn);
    if (rec.due(k)) rec.record(state, k);
  }
  return rec.take(describe(config));
}

Trajectory run_mod1(const ModelConfig& config) {
  require_kind(config, ModelKind::mod1);
  validate(config);
  Streams s(config.seed);
  ZipfLaw law(config.beta);
  ZipfSampler sampler(law);
  OccupancyState state(config.kmax);
  CheckpointRecorder rec(checkpoint_schedule(config.n, config.schedule),
                         config.kmax);
  std::vector<std::uint64_t> ball_urn(config.n);
  const double q = 1.0 - config.p;

  for (std::uint64_t k = 1; k <= config.n; ++k) {
    // The power-law draw happens first and unconditionally; a re-tossed ball
    // abandons it. The first ball has nobody to join, so it always stays.
    std::uint64_t urn = urn_label(sampler.next(s.place));
    if (k > 1 && q != 0.0 && s.aux.u01() < q) {
      urn = ball_urn[s.aux.below(k - 1)];
    }
    ball_urn[k - 1] = urn;
    place_ball(state, urn);
    if (rec.due(k)) rec.record(state, k);
  }
  return rec.take(describe(config));
}

Trajectory run_mod2(const ModelConfig& config) {
  require_kind(config, ModelKind::mod2);
  validate(config);
  Streams s(config.seed);
  ZipfLaw law(config.beta);
  ZipfSampler sampler(law);
  OccupancyState state(config.kmax);
  CheckpointRecorder rec(checkpoint_schedule(config.n, config.schedule),
                         config.kmax);
  std::vector<std::uint64_t> ball_urn(config.n);
  const double q = 1.0 - config.p;

  for (std::uint64_t k = 1; k <= config.n; ++k) {
    std::uint64_t urn = urn_label(sampler.next(s.place));
    // Occupancy is checked before this ball lands. Balls falling into an
    // occupied urn always stay.
    if (k > 1 && !state.urn_counts.contains(urn)) {
      if (config.mod2_always_retoss) {
        urn = ball_urn[s.aux.below(k - 1)];
      } else if (q != 0.0 && s.aux.u01() < q) {
        urn = ball_urn[s.aux.below(k - 1)];
      }
    }
    ball_urn[k - 1] = urn;
    place_ball(state, urn);
    if (rec.due(k)) rec.record(state, k);
  }
  return rec.take(describe(config));
}

Trajectory run_model(const ModelConfig& config) {
  switch (config.kind) {
    case ModelKind::elementary: return run_elementary(config);
    case ModelKind::poissonized_elementary: return run_poissonized(config);
    case ModelKind::simon: return run_simon(config);
    case ModelKind::mod1: return run_mod1(config);
    case ModelKind::mod2: return run_mod2(config);
  }
  throw std::invalid_argument("unknown model kind");
}

}  // namespace urnlab
