// SPDX-License-Identifier: Apache-2.0

#include "urnlab/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "text_util.hpp"
#include "urnlab/math.hpp"
#include "urnlab/rng.hpp"

namespace urnlab::analysis {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInvLn2 = 1.4426950408889634074;

struct Moments {
  double mean = 0.0;
  double var = 0.0;   // unbiased
  double skew = 0.0;  // of the standardized sample
  double kurt = 0.0;
  std::uint64_t count = 0;
};

Moments sample_moments(const std::vector<double>& xs) {
  Moments m;
  m.count = xs.size();
  if (xs.empty()) return m;
  double sum = 0.0;
  for (double x : xs) sum += x;
  m.mean = sum / static_cast<double>(xs.size());
  if (xs.size() < 2) return m;
  double s2 = 0.0, s3 = 0.0, s4 = 0.0;
  for (double x : xs) {
    double d = x - m.mean;
    s2 += d * d;
    s3 += d * d * d;
    s4 += d * d * d * d;
  }
  double n = static_cast<double>(xs.size());
  m.var = s2 / (n - 1.0);
  double sd = std::sqrt(s2 / n);
  if (sd > 0.0) {
    m.skew = (s3 / n) / (sd * sd * sd);
    m.kurt = (s4 / n) / (sd * sd * sd * sd);
  }
  return m;
}

double safe_z(double empirical, double target, double se) {
  if (!(se > 0.0) || std::isnan(target)) return kNaN;
  return (empirical - target) / se;
}

ReportRow make_row(std::string name, double empirical, double target,
                   double se, bool pass) {
  return ReportRow{std::move(name), empirical, target, se,
                   safe_z(empirical, target, se), pass};
}

MomentReport report_shell(const ReplicateSet& set) {
  MomentReport report;
  report.model = model_kind_name(set.config.kind);
  report.params = describe(set.config);
  report.reps = set.trajs.size();
  report.seed = set.master_seed;
  return report;
}

std::vector<double> final_distinct(const ReplicateSet& set) {
  std::vector<double> xs;
  xs.reserve(set.trajs.size());
  for (const Trajectory& t : set.trajs)
    xs.push_back(static_cast<double>(t.final().distinct));
  return xs;
}

bool within_ratio(double empirical, double target, double rel) {
  return std::abs(empirical - target) <= rel * std::abs(target);
}

}  // namespace

EstimatorResult estimate_theta(const Trajectory& traj) {
  if (traj.checkpoints.empty())
    throw std::invalid_argument("trajectory has no checkpoints");
  const Checkpoint& last = traj.final();
  const Checkpoint* half = traj.at(last.n / 2);
  if (half == nullptr)
    throw std::invalid_argument(
        "trajectory lacks a checkpoint at floor(n/2)");
  if (half->distinct == 0)
    throw std::invalid_argument(
        "distinct count at floor(n/2) is zero; estimator undefined");
  EstimatorResult r;
  r.n = last.n;
  r.R_n = last.distinct;
  r.R_half = half->distinct;
  r.R_n1 = last.exact_counts.empty() ? 0 : last.exact_counts[0];
  r.theta_hat = (pmath::log(static_cast<double>(r.R_n)) -
                 pmath::log(static_cast<double>(r.R_half))) *
                kInvLn2;
  r.theta_star =
      static_cast<double>(r.R_n1) / static_cast<double>(r.R_n);
  return r;
}

ReplicateSet run_replicates(const ModelConfig& config, std::uint64_t reps,
                            std::uint64_t master_seed, unsigned jobs) {
  if (reps < 1) throw std::invalid_argument("reps must be at least 1");
  validate(config);
  ReplicateSet set;
  set.config = config;
  set.config.seed = master_seed;
  set.master_seed = master_seed;
  set.trajs.resize(reps);

  if (jobs == 0) jobs = std::thread::hardware_concurrency();
  if (jobs == 0) jobs = 1;
  if (jobs > reps) jobs = static_cast<unsigned>(reps);

  std::atomic<std::uint64_t> next{0};
  auto worker = [&]() {
    for (;;) {
      std::uint64_t r = next.fetch_add(1, std::memory_order_relaxed);
      if (r >= reps) return;
      ModelConfig local = config;
      local.seed = child_seed(master_seed, r);
      set.trajs[r] = run_model(local);
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  return set;
}

bool MomentReport::all_pass() const {
  for (const ReportRow& r : rows)
    if (!r.pass) return false;
  return true;
}

const ReportRow* MomentReport::row(const std::string& name) const {
  for (const ReportRow& r : rows)
    if (r.name == name) return &r;
  return nullptr;
}

MomentReport compare_variance(const ReplicateSet& set,
                              const theory::TheoryParams& params) {
  if (set.trajs.size() < 100)
    throw std::invalid_argument(
        "compare_variance needs at least 100 replicates");
  std::vector<double> xs = final_distinct(set);
  Moments m = sample_moments(xs);
  if (!(m.var > 0.0))
    throw std::runtime_error(
        "degenerate sample: replicate variance of the distinct count is 0");

  double reps = static_cast<double>(xs.size());
  double n = static_cast<double>(set.config.n);
  theory::PoissonizedMoments pois =
      theory::poissonized_moments(params, n, 1);
  double bn = theory::karlin_variance(params, n);

  MomentReport report = report_shell(set);
  {
    double se = std::sqrt(m.var / reps);
    bool pass = std::abs(m.mean - pois.mean[0]) <= 4.0 * se;
    report.rows.push_back(
        make_row("mean_Rn_vs_poisson_horizon(4se)", m.mean, pois.mean[0],
                 se, pass));
  }
  double se_var = m.var * std::sqrt(2.0 / (reps - 1.0));
  if (set.config.kind == ModelKind::poissonized_elementary) {
    report.rows.push_back(
        make_row("var_Rn_vs_exact_oracle(15%)", m.var, pois.variance[0],
                 se_var, within_ratio(m.var, pois.variance[0], 0.15)));
  }
  report.rows.push_back(make_row("var_Rn_vs_asymptotic_scale(25%)", m.var,
                                 bn, se_var,
                                 within_ratio(m.var, bn, 0.25)));
  report.rows.push_back(make_row("skewness_standardized(|.|<=0.5)", m.skew,
                                 0.0, std::sqrt(6.0 / reps),
                                 std::abs(m.skew) <= 0.5));
  report.rows.push_back(make_row("kurtosis_standardized(3+-0.5)", m.kurt,
                                 3.0, std::sqrt(24.0 / reps),
                                 std::abs(m.kurt - 3.0) <= 0.5));
  return report;
}

MomentReport compare_covariance(const ReplicateSet& set, double theta,
                                const std::vector<std::uint32_t>& r_list) {
  const std::uint64_t reps = set.trajs.size();
  if (reps < 500)
    throw std::invalid_argument(
        "compare_covariance needs at least 500 replicates");
  if (r_list.empty()) throw std::invalid_argument("r_list is empty");
  const std::size_t nu = r_list.size();
  for (std::uint32_t r : r_list)
    if (r < 1 || r > set.config.kmax)
      throw std::invalid_argument(
          "r_list entry outside the tracked exact-count range");

  // Per-replicate exact-size counts at the final time.
  std::vector<std::vector<double>> x(reps, std::vector<double>(nu));
  for (std::uint64_t i = 0; i < reps; ++i) {
    const Checkpoint& fin = set.trajs[i].final();
    for (std::size_t a = 0; a < nu; ++a)
      x[i][a] = static_cast<double>(fin.exact_counts[r_list[a] - 1]);
  }
  std::vector<double> mean(nu, 0.0);
  for (std::uint64_t i = 0; i < reps; ++i)
    for (std::size_t a = 0; a < nu; ++a) mean[a] += x[i][a];
  for (std::size_t a = 0; a < nu; ++a)
    mean[a] /= static_cast<double>(reps);

  theory::TheoryParams params(theta);
  double scale = static_cast<double>(
      theory::alpha(params, static_cast<double>(set.config.n)));

  // Covariance of the counts scaled by 1/alpha(n), centered at the
  // replicate mean (covariance is translation invariant).
  std::vector<std::vector<double>> cov(nu, std::vector<double>(nu, 0.0));
  for (std::uint64_t i = 0; i < reps; ++i)
    for (std::size_t a = 0; a < nu; ++a)
      for (std::size_t b = 0; b < nu; ++b)
        cov[a][b] += (x[i][a] - mean[a]) * (x[i][b] - mean[b]);
  for (std::size_t a = 0; a < nu; ++a)
    for (std::size_t b = 0; b < nu; ++b)
      cov[a][b] /= static_cast<double>(reps - 1) * scale;

  // Bootstrap sign check for the off-diagonal entries.
  const int B = 1000;
  std::vector<std::vector<int>> negative(nu, std::vector<int>(nu, 0));
  Rng boot(child_seed(set.master_seed, 0xB007));
  std::vector<double> bmean(nu), bcov(nu * nu);
  std::vector<std::uint64_t> idx(reps);
  for (int b = 0; b < B; ++b) {
    for (std::uint64_t i = 0; i < reps; ++i) idx[i] = boot.below(reps);
    std::fill(bmean.begin(), bmean.end(), 0.0);
    std::fill(bcov.begin(), bcov.end(), 0.0);
    for (std::uint64_t i = 0; i < reps; ++i)
      for (std::size_t a = 0; a < nu; ++a) bmean[a] += x[idx[i]][a];
    for (std::size_t a = 0; a < nu; ++a)
      bmean[a] /= static_cast<double>(reps);
    for (std::uint64_t i = 0; i < reps; ++i)
      for (std::size_t a = 0; a < nu; ++a)
        for (std::size_t c = a + 1; c < nu; ++c)
          bcov[a * nu + c] +=
              (x[idx[i]][a] - bmean[a]) * (x[idx[i]][c] - bmean[c]);
    for (std::size_t a = 0; a < nu; ++a)
      for (std::size_t c = a + 1; c < nu; ++c)
        if (bcov[a * nu + c] < 0.0) ++negative[a][c];
  }

  MomentReport report = report_shell(set);
  for (std::size_t a = 0; a < nu; ++a) {
    for (std::size_t b = 0; b < nu; ++b) {
      double target = theory::karlin_covariance(theta, r_list[a], r_list[b]);
      double caa = cov[a][a], cbb = cov[b][b], cab = cov[a][b];
      double se = std::sqrt((caa * cbb + cab * cab) /
                            static_cast<double>(reps - 1));
      char name[64];
      if (a == b) {
        std::snprintf(name, sizeof name, "cov_r%u_r%u(15%%)", r_list[a],
                      r_list[b]);
        report.rows.push_back(
            make_row(name, cab, target, se, within_ratio(cab, target, 0.15)));
      } else {
        double frac =
            static_cast<double>(negative[std::min(a, b)][std::max(a, b)]) / B;
        std::snprintf(name, sizeof name, "cov_r%u_r%u(boot_neg>=95%%)",
                      r_list[a], r_list[b]);
        ReportRow row = make_row(name, cab, target, se, frac >= 0.95);
        report.rows.push_back(row);
        std::snprintf(name, sizeof name, "boot_neg_frac_r%u_r%u",
                      r_list[a], r_list[b]);
        report.rows.push_back(make_row(name, frac, kNaN, 0.0, frac >= 0.95));
      }
    }
  }
  return report;
}

MomentReport compare_simon_limits(const ReplicateSet& set, double p,
                                  std::uint32_t m) {
  if (m < 2) throw std::invalid_argument("m must be at least 2");
  if (m - 1 > set.config.kmax)
    throw std::invalid_argument(
        "m exceeds the tracked exact-count range of the trajectories");
  const std::uint64_t reps = set.trajs.size();
  if (reps == 0) throw std::invalid_argument("no trajectories");
  double n = static_cast<double>(set.config.n);

  MomentReport report = report_shell(set);
  {
    std::vector<double> xs = final_distinct(set);
    for (double& v : xs) v /= n;
    Moments mo = sample_moments(xs);
    double se = reps > 1 ? std::sqrt(mo.var / static_cast<double>(reps)) : 0.0;
    report.rows.push_back(make_row("distinct_over_n(+-0.005)", mo.mean, p,
                                   se, std::abs(mo.mean - p) <= 0.005));
  }
  for (std::uint32_t j = 1; j < m; ++j) {
    std::vector<double> xs;
    xs.reserve(reps);
    for (const Trajectory& t : set.trajs)
      xs.push_back(static_cast<double>(t.final().exact_counts[j - 1]) / n);
    Moments mo = sample_moments(xs);
    double target = theory::simon_limit_fraction(p, j);
    double tol = j == 1 ? 0.01 : 0.005;
    double se = reps > 1 ? std::sqrt(mo.var / static_cast<double>(reps)) : 0.0;
    char name[48];
    std::snprintf(name, sizeof name, "fraction_r%u(+-%s)", j,
                  j == 1 ? "0.01" : "0.005");
    report.rows.push_back(
        make_row(name, mo.mean, target, se, std::abs(mo.mean - target) <= tol));
  }

  // sqrt(n)-scaled fluctuation variance of the singleton count at the
  // decade checkpoints that exist in the trajectories.
  double target1 = theory::simon_limit_fraction(p, 1);
  std::vector<std::pair<std::uint64_t, double>> fluct;
  for (std::uint64_t nn : {std::uint64_t{10000}, std::uint64_t{100000},
                           std::uint64_t{1000000}}) {
    if (nn > set.config.n) continue;
    std::vector<double> xs;
    xs.reserve(reps);
    bool have_all = true;
    for (const Trajectory& t : set.trajs) {
      const Checkpoint* c = t.at(nn);
      if (c == nullptr) {
        have_all = false;
        break;
      }
      double dev = static_cast<double>(c->exact_counts[0]) -
                   static_cast<double>(nn) * target1;
      xs.push_back(dev / std::sqrt(static_cast<double>(nn)));
    }
    if (!have_all) continue;
    Moments mo = sample_moments(xs);
    fluct.emplace_back(nn, mo.var);
    char name[48];
    std::snprintf(name, sizeof name, "fluct_var_n%llu",
                  static_cast<unsigned long long>(nn));
    report.rows.push_back(make_row(name, mo.var, kNaN, 0.0,
                                   mo.var > 0.0 && std::isfinite(mo.var)));
  }
  for (std::size_t i = 1; i < fluct.size(); ++i) {
    double ratio = fluct[i].second / fluct[i - 1].second;
    char name[64];
    std::snprintf(name, sizeof name, "fluct_ratio_n%llu_n%llu(0.5..2)",
                  static_cast<unsigned long long>(fluct[i].first),
                  static_cast<unsigned long long>(fluct[i - 1].first));
    report.rows.push_back(
        make_row(name, ratio, 1.0, 0.0, ratio >= 0.5 && ratio <= 2.0));
  }
  return report;
}

MomentReport divergence_report(const ModelConfig& config_mod,
                               std::uint64_t reps, std::uint64_t master_seed,
                               unsigned jobs) {
  if (config_mod.kind != ModelKind::mod1 &&
      config_mod.kind != ModelKind::mod2)
    throw std::invalid_argument(
        "divergence_report applies to the re-toss models only");

  ModelConfig control;
  control.kind = ModelKind::elementary;
  control.theta = config_mod.beta;
  control.n = config_mod.n;
  control.kmax = config_mod.kmax;
  control.schedule = config_mod.schedule;

  ReplicateSet mod_set =
      run_replicates(config_mod, reps, child_seed(master_seed, 0), jobs);
  ReplicateSet ctl_set =
      run_replicates(control, reps, child_seed(master_seed, 1), jobs);

  auto collect = [](const ReplicateSet& set, std::vector<double>& hat,
                    std::vector<double>& star, std::vector<double>& gap) {
    for (const Trajectory& t : set.trajs) {
      EstimatorResult e = estimate_theta(t);
      hat.push_back(e.theta_hat);
      star.push_back(e.theta_star);
      gap.push_back(e.theta_hat - e.theta_star);
    }
  };
  std::vector<double> mh, ms, mg, ch, cs, cg;
  collect(mod_set, mh, ms, mg);
  collect(ctl_set, ch, cs, cg);

  MomentReport report;
  report.model = model_kind_name(config_mod.kind);
  report.params = describe(mod_set.config) + " | control " +
                  describe(ctl_set.config);
  report.reps = reps;
  report.seed = master_seed;

  auto tab = [&](const char* name, const std::vector<double>& xs) {
    Moments mo = sample_moments(xs);
    double se =
        xs.size() > 1 ? std::sqrt(mo.var / static_cast<double>(xs.size())) : 0.0;
    report.rows.push_back(make_row(name, mo.mean, kNaN, se, true));
  };
  tab("mod_theta_hat(tabulated)", mh);
  tab("mod_theta_star(tabulated)", ms);
  tab("control_theta_hat(tabulated)", ch);
  tab("control_theta_star(tabulated)", cs);

  auto gap_row = [&](const char* name, const std::vector<double>& gaps,
                     bool expect_diverge) {
    Moments mo = sample_moments(gaps);
    double se = std::sqrt(mo.var / static_cast<double>(gaps.size()));
    double z = safe_z(mo.mean, 0.0, se);
    bool pass = expect_diverge ? std::abs(z) > 3.0 : std::abs(z) < 3.0;
    report.rows.push_back(ReportRow{name, mo.mean, 0.0, se, z, pass});
  };
  gap_row("mod_estimator_gap(z>3)", mg, true);
  gap_row("control_estimator_gap(z<3)", cg, false);
  return report;
}

std::string report_to_json(const MomentReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const ReportRow& r : report.rows) {
    rows.push_back({{"name", r.name},
                    {"empirical", r.empirical},
                    {"target", r.target},
                    {"se", r.se},
                    {"z", r.z},
                    {"pass", r.pass}});
  }
  nlohmann::json j{{"model", report.model},
                   {"params", report.params},
                   {"reps", report.reps},
                   {"seed", report.seed},
                   {"rows", rows}};
  return j.dump(2);
}

std::string report_to_csv(const MomentReport& report) {
  std::ostringstream out;
  out << "name,empirical,target,se,z,pass\n";
  for (const ReportRow& r : report.rows) {
    out << r.name << ',' << format_double(r.empirical) << ','
        << format_double(r.target) << ',' << format_double(r.se) << ','
        << format_double(r.z) << ',' << (r.pass ? "true" : "false") << '\n';
  }
  return out.str();
}

}  // namespace urnlab::analysis
