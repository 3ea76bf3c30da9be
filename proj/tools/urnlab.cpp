// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end. Subcommands:
//   simulate  run model replicates, write per-replicate trajectory CSVs
//   theory    evaluate closed-form quantities, print JSON
//   compare   run replicates and check them against theory, write a report
//   analyze   tokenize text files and run the estimator pipeline
//
// Every file-writing subcommand drops a manifest.json beside its outputs;
// data files carry a "# manifest:" comment (CSV) or a "manifest" key
// (JSON). Exit codes: 0 success, 1 failed comparison rows, 2 usage or
// runtime error.

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "text_util.hpp"
#include "urnlab/analysis.hpp"
#include "urnlab/corpus.hpp"
#include "urnlab/models.hpp"
#include "urnlab/rng.hpp"
#include "urnlab/simd.hpp"
#include "urnlab/theory.hpp"
#include "urnlab/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace urnlab;

namespace {

std::uint64_t resolve_seed(bool seed_given, std::uint64_t seed_value) {
  if (seed_given) return seed_value;
  if (const char* env = std::getenv("URNLAB_SEED")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0')
      throw std::invalid_argument(
          "URNLAB_SEED is not an unsigned integer: " + std::string(env));
    return static_cast<std::uint64_t>(v);
  }
  return 0;
}

void apply_simd_choice(const std::string& simd) {
  if (simd == "auto") return;
  SimdTier tier = simd == "avx2" ? SimdTier::avx2 : SimdTier::scalar;
  if (!set_simd_tier(tier))
    throw std::invalid_argument("--simd " + simd +
                                " is not available on this host");
}

void write_text_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

// Flags shared by `simulate` and `compare`.
struct ModelFlags {
  std::string model;
  std::uint64_t n = 0;
  double theta = 0.0;
  double beta = 0.0;
  double p = 0.0;
  std::uint32_t kmax = 10;
  std::uint64_t reps = 1;
  std::uint64_t seed = 0;
  std::string checkpoints = "both";
  std::string simd = "auto";
  std::string out = ".";
  unsigned jobs = 0;
  bool mod2_always_retoss = false;

  CLI::Option* theta_opt = nullptr;
  CLI::Option* beta_opt = nullptr;
  CLI::Option* p_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* retoss_opt = nullptr;
};

void add_model_flags(CLI::App* sub, ModelFlags& f) {
  sub->add_option("--model", f.model, "model kind")
      ->required()
      ->check(CLI::IsMember(
          {"elementary", "poissonized", "simon", "mod1", "mod2"}));
  sub->add_option("--n", f.n, "number of balls (horizon mean when poissonized)")
      ->required();
  f.theta_opt =
      sub->add_option("--theta", f.theta, "power-law exponent in (0,1)");
  f.beta_opt =
      sub->add_option("--beta", f.beta, "placement exponent of mod1/mod2");
  f.p_opt = sub->add_option("--p", f.p, "innovation probability in (0,1)");
  sub->add_option("--kmax", f.kmax, "largest tracked exact count");
  sub->add_option("--reps", f.reps, "replicate count");
  f.seed_opt = sub->add_option("--seed", f.seed,
                               "master seed (fallback: URNLAB_SEED, then 0)");
  sub->add_option("--checkpoints", f.checkpoints, "checkpoint schedule")
      ->check(CLI::IsMember({"geometric", "uniform", "both"}));
  sub->add_option("--jobs", f.jobs,
                  "worker threads across replicates (0 = processors)");
  sub->add_option("--simd", f.simd, "vector backend")
      ->check(CLI::IsMember({"auto", "scalar", "avx2"}));
  sub->add_option("--out", f.out, "output directory");
  f.retoss_opt = sub->add_flag("--mod2-always-retoss", f.mod2_always_retoss,
                               "mod2 re-tosses every empty-urn ball");
}

ModelConfig build_config(const ModelFlags& f) {
  ModelConfig c;
  if (f.model == "elementary") c.kind = ModelKind::elementary;
  else if (f.model == "poissonized") c.kind = ModelKind::poissonized_elementary;
  else if (f.model == "simon") c.kind = ModelKind::simon;
  else if (f.model == "mod1") c.kind = ModelKind::mod1;
  else c.kind = ModelKind::mod2;

  const bool wants_theta = c.kind == ModelKind::elementary ||
                           c.kind == ModelKind::poissonized_elementary;
  const bool wants_beta =
      c.kind == ModelKind::mod1 || c.kind == ModelKind::mod2;
  const bool wants_p = c.kind == ModelKind::simon || wants_beta;

  // A stray flag is reported before a missing one, so the diagnostic names
  // the flag the user actually typed.
  auto stray = [&](CLI::Option* opt, bool wanted, const char* name) {
    if (opt->count() > 0 && !wanted)
      throw std::invalid_argument(std::string(name) +
                                  " is not a parameter of the " + f.model +
                                  " model");
  };
  auto missing = [&](CLI::Option* opt, bool wanted, const char* name) {
    if (opt->count() == 0 && wanted)
      throw std::invalid_argument(std::string(name) + " is required for the " +
                                  f.model + " model");
  };
  stray(f.theta_opt, wants_theta, "--theta");
  stray(f.beta_opt, wants_beta, "--beta");
  stray(f.p_opt, wants_p, "--p");
  missing(f.theta_opt, wants_theta, "--theta");
  missing(f.beta_opt, wants_beta, "--beta");
  missing(f.p_opt, wants_p, "--p");
  if (f.retoss_opt->count() > 0 && c.kind != ModelKind::mod2)
    throw std::invalid_argument(
        "--mod2-always-retoss applies to the mod2 model only");

  c.theta = f.theta;
  c.beta = f.beta;
  c.p = f.p;
  c.n = f.n;
  c.kmax = f.kmax;
  c.mod2_always_retoss = f.mod2_always_retoss;
  if (f.checkpoints == "geometric") c.schedule = ScheduleKind::geometric;
  else if (f.checkpoints == "uniform") c.schedule = ScheduleKind::uniform;
  else c.schedule = ScheduleKind::both;
  validate(c);
  return c;
}

json model_parameters_json(const ModelFlags& f, std::uint64_t seed) {
  json params{{"model", f.model},     {"n", f.n},
              {"kmax", f.kmax},       {"reps", f.reps},
              {"seed", seed},         {"checkpoints", f.checkpoints},
              {"jobs", f.jobs},       {"simd", f.simd}};
  if (f.theta_opt->count() > 0) params["theta"] = f.theta;
  if (f.beta_opt->count() > 0) params["beta"] = f.beta;
  if (f.p_opt->count() > 0) params["p"] = f.p;
  if (f.retoss_opt->count() > 0)
    params["mod2_always_retoss"] = f.mod2_always_retoss;
  return params;
}

void write_manifest(const fs::path& dir, const std::string& subcommand,
                    json parameters, std::uint64_t seed,
                    const std::vector<std::string>& outputs,
                    std::chrono::steady_clock::time_point start) {
  auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                std::chrono::steady_clock::now() - start)
                .count();
  json manifest{{"schema_version", kSchemaVersion},
                {"tool", "urnlab"},
                {"version", kVersion},
                {"subcommand", subcommand},
                {"parameters", std::move(parameters)},
                {"master_seed", seed},
                {"outputs", outputs},
                {"duration_ms", ms}};
  write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

constexpr char kManifestComment[] = "# manifest: manifest.json\n";

std::string estimator_columns(const Trajectory& traj) {
  try {
    analysis::EstimatorResult e = analysis::estimate_theta(traj);
    return format_double(e.theta_hat) + "," + format_double(e.theta_star);
  } catch (const std::exception&) {
    return "nan,nan";  // horizon too short for the doubling estimator
  }
}

int cmd_simulate(const ModelFlags& f,
                 std::chrono::steady_clock::time_point start) {
  ModelConfig config = build_config(f);
  std::uint64_t seed = resolve_seed(f.seed_opt->count() > 0, f.seed);
  apply_simd_choice(f.simd);

  fs::path dir(f.out);
  fs::create_directories(dir);
  analysis::ReplicateSet set =
      analysis::run_replicates(config, f.reps, seed, f.jobs);

  std::vector<std::string> outputs;
  std::ostringstream summary;
  summary << kManifestComment
          << "replicate,seed,n,distinct,singletons,theta_hat,theta_star\n";
  for (std::uint64_t r = 0; r < f.reps; ++r) {
    const Trajectory& traj = set.trajs[r];
    char name[32];
    std::snprintf(name, sizeof name, "replicate_%03llu.csv",
                  static_cast<unsigned long long>(r));
    std::ostringstream body;
    body << kManifestComment;
    write_trajectory_csv(traj, body);
    write_text_file(dir / name, body.str());
    outputs.push_back(name);

    const Checkpoint& fin = traj.final();
    summary << r << ',' << child_seed(seed, r) << ',' << fin.n << ','
            << fin.distinct << ','
            << (fin.exact_counts.empty() ? 0 : fin.exact_counts[0]) << ','
            << estimator_columns(traj) << '\n';
  }
  write_text_file(dir / "summary.csv", summary.str());
  outputs.push_back("summary.csv");
  write_manifest(dir, "simulate", model_parameters_json(f, seed), seed,
                 outputs, start);
  std::cout << "wrote " << outputs.size() + 1 << " files to " << dir.string()
            << "\n";
  return 0;
}

// ---- theory ----

struct TheoryFlags {
  std::string quantity;
  double theta = 0.0, p = 0.0, tau = 0.0, t = 0.0, n = 0.0;
  std::uint32_t i = 0, j = 0, ri = 0, rj = 0, m = 0, kmax = 10;
  CLI::Option *theta_opt, *p_opt, *tau_opt, *t_opt, *n_opt, *i_opt, *j_opt,
      *ri_opt, *rj_opt, *m_opt;
};

void require_flags(const std::string& quantity,
                   std::initializer_list<std::pair<CLI::Option*, const char*>>
                       needed) {
  for (auto [opt, name] : needed)
    if (opt->count() == 0)
      throw std::invalid_argument(std::string(name) + " is required for --quantity " +
                                  quantity);
}

int cmd_theory(const TheoryFlags& f) {
  json out{{"quantity", f.quantity}};
  if (f.quantity == "yule-pmf") {
    require_flags(f.quantity, {{f.p_opt, "--p"}, {f.i_opt, "--i"}});
    out["params"] = {{"p", f.p}, {"i", f.i}};
    out["value"] = theory::yule_simon_pmf(f.p, f.i);
  } else if (f.quantity == "simon-limits") {
    require_flags(f.quantity, {{f.p_opt, "--p"}});
    if (f.j_opt->count() > 0) {
      out["params"] = {{"p", f.p}, {"j", f.j}};
      out["value"] = theory::simon_limit_fraction(f.p, f.j);
    } else {
      out["params"] = {{"p", f.p}, {"j", nullptr}};
      json values = json::array();
      for (std::uint32_t j = 1; j <= f.kmax; ++j)
        values.push_back(theory::simon_limit_fraction(f.p, j));
      out["values"] = values;
    }
  } else if (f.quantity == "karlin-var") {
    require_flags(f.quantity, {{f.theta_opt, "--theta"}, {f.n_opt, "--n"}});
    out["params"] = {{"theta", f.theta}, {"n", f.n}};
    out["value"] = theory::karlin_variance(theory::TheoryParams(f.theta), f.n);
  } else if (f.quantity == "karlin-cov") {
    require_flags(f.quantity, {{f.theta_opt, "--theta"},
                               {f.ri_opt, "--ri"},
                               {f.rj_opt, "--rj"}});
    out["params"] = {{"theta", f.theta}, {"ri", f.ri}, {"rj", f.rj}};
    out["value"] = theory::karlin_covariance(f.theta, f.ri, f.rj);
  } else if (f.quantity == "fclt-cov") {
    require_flags(f.quantity, {{f.theta_opt, "--theta"},
                               {f.i_opt, "--i"},
                               {f.j_opt, "--j"},
                               {f.tau_opt, "--tau"},
                               {f.t_opt, "--t"}});
    out["params"] = {
        {"theta", f.theta}, {"i", f.i}, {"j", f.j}, {"tau", f.tau}, {"t", f.t}};
    out["value"] = theory::fclt_covariance(f.theta, f.i, f.j, f.tau, f.t);
  } else if (f.quantity == "poisson-moments") {
    require_flags(f.quantity, {{f.theta_opt, "--theta"}, {f.n_opt, "--n"}});
    out["params"] = {{"theta", f.theta}, {"n", f.n}, {"kmax", f.kmax}};
    theory::PoissonizedMoments pm = theory::poissonized_moments(
        theory::TheoryParams(f.theta, 0.5, f.kmax), f.n, f.kmax);
    out["values"] = {{"mean", pm.mean}, {"variance", pm.variance}};
    out["truncation_bound"] = pm.tail_bound;
  } else if (f.quantity == "janson") {
    require_flags(f.quantity, {{f.m_opt, "--m"}, {f.p_opt, "--p"}});
    out["params"] = {{"m", f.m}, {"p", f.p}};
    theory::JansonEmbedding e = theory::janson_embedding(f.m, f.p);
    out["value"] = {e.lambda1, e.lambda2};
    out["lambda_imag"] = {e.lambda1_imag, e.lambda2_imag};
    out["spectral_gap_ok"] = e.spectral_gap_ok;
  } else {
    throw std::invalid_argument("unknown --quantity " + f.quantity);
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

// ---- compare ----

int cmd_compare(const ModelFlags& f, const std::string& against,
                const std::vector<std::uint32_t>& r_list, std::uint32_t m,
                std::chrono::steady_clock::time_point start) {
  ModelConfig config = build_config(f);
  std::uint64_t seed = resolve_seed(f.seed_opt->count() > 0, f.seed);
  apply_simd_choice(f.simd);

  analysis::MomentReport report;
  if (against == "divergence") {
    report = analysis::divergence_report(config, f.reps, seed, f.jobs);
  } else {
    analysis::ReplicateSet set =
        analysis::run_replicates(config, f.reps, seed, f.jobs);
    if (against == "variance") {
      double theta = config.kind == ModelKind::mod1 ||
                             config.kind == ModelKind::mod2
                         ? config.beta
                         : config.theta;
      report = analysis::compare_variance(
          set, theory::TheoryParams(theta, 0.5, f.kmax));
    } else if (against == "covariance") {
      double theta = config.kind == ModelKind::mod1 ||
                             config.kind == ModelKind::mod2
                         ? config.beta
                         : config.theta;
      report = analysis::compare_covariance(set, theta, r_list);
    } else {  // simon-limits
      report = analysis::compare_simon_limits(set, config.p, m);
    }
  }

  fs::path dir(f.out);
  fs::create_directories(dir);
  json j = json::parse(analysis::report_to_json(report));
  j["schema_version"] = kSchemaVersion;
  j["manifest"] = "manifest.json";
  write_text_file(dir / "report.json", j.dump(2) + "\n");
  write_text_file(dir / "report.csv",
                  std::string(kManifestComment) +
                      analysis::report_to_csv(report));
  json params = model_parameters_json(f, seed);
  params["against"] = against;
  if (against == "covariance") params["r_list"] = r_list;
  if (against == "simon-limits") params["m"] = m;
  write_manifest(dir, "compare", params, seed,
                 {"report.json", "report.csv"}, start);

  std::size_t failed = 0;
  for (const analysis::ReportRow& row : report.rows)
    if (!row.pass) ++failed;
  if (failed > 0) {
    std::cerr << failed << " of " << report.rows.size()
              << " comparison rows failed; see "
              << (dir / "report.json").string() << "\n";
    return 1;
  }
  std::cout << "all " << report.rows.size() << " comparison rows pass\n";
  return 0;
}

// ---- analyze ----

int cmd_analyze(const std::vector<std::string>& paths, std::uint32_t kmax,
                const std::string& out, unsigned jobs,
                std::chrono::steady_clock::time_point start) {
  fs::path dir(out);
  fs::create_directories(dir);

  std::vector<corpus::TextAnalysis> results(paths.size());
  std::vector<std::string> errors(paths.size());
  if (jobs == 0) jobs = std::thread::hardware_concurrency();
  if (jobs == 0) jobs = 1;
  if (jobs > paths.size()) jobs = static_cast<unsigned>(paths.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= paths.size()) return;
      try {
        results[i] = corpus::analyze_file(paths[i], kmax);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  for (std::size_t i = 0; i < paths.size(); ++i)
    if (!errors[i].empty())
      throw std::runtime_error(paths[i] + ": " + errors[i]);

  std::vector<std::string> outputs;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    const corpus::TextAnalysis& a = results[i];
    std::string stem = fs::path(paths[i]).stem().string();

    std::ostringstream csv;
    csv << kManifestComment;
    write_trajectory_csv(a.trajectory, csv);
    write_text_file(dir / (stem + ".trajectory.csv"), csv.str());
    outputs.push_back(stem + ".trajectory.csv");

    json est{{"schema_version", kSchemaVersion},
             {"manifest", "manifest.json"},
             {"source", paths[i]},
             {"n", a.estimators.n},
             {"R_n", a.estimators.R_n},
             {"R_half", a.estimators.R_half},
             {"R_n1", a.estimators.R_n1},
             {"theta_hat", a.estimators.theta_hat},
             {"theta_star", a.estimators.theta_star},
             {"vocabulary", a.vocabulary}};
    write_text_file(dir / (stem + ".estimators.json"), est.dump(2) + "\n");
    outputs.push_back(stem + ".estimators.json");

    std::cout << paths[i] << ": n=" << a.estimators.n
              << " R=" << a.estimators.R_n
              << " theta_hat=" << format_double(a.estimators.theta_hat)
              << " theta_star=" << format_double(a.estimators.theta_star)
              << "\n";
  }
  json params{{"paths", paths}, {"kmax", kmax}, {"jobs", jobs}};
  write_manifest(dir, "analyze", params, 0, outputs, start);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  auto start = std::chrono::steady_clock::now();
  CLI::App app{"infinite-urn occupancy laboratory"};
  app.set_version_flag("--version", std::string("urnlab ") + kVersion);
  app.require_subcommand(1);

  ModelFlags sim;
  CLI::App* simulate =
      app.add_subcommand("simulate", "run replicates, write trajectories");
  add_model_flags(simulate, sim);

  TheoryFlags th;
  CLI::App* theory_cmd =
      app.add_subcommand("theory", "evaluate closed-form quantities");
  theory_cmd
      ->add_option("--quantity", th.quantity,
                   "yule-pmf|simon-limits|karlin-var|karlin-cov|fclt-cov|"
                   "poisson-moments|janson")
      ->required();
  th.theta_opt = theory_cmd->add_option("--theta", th.theta);
  th.p_opt = theory_cmd->add_option("--p", th.p);
  th.tau_opt = theory_cmd->add_option("--tau", th.tau);
  th.t_opt = theory_cmd->add_option("--t", th.t);
  th.n_opt = theory_cmd->add_option("--n", th.n);
  th.i_opt = theory_cmd->add_option("--i", th.i);
  th.j_opt = theory_cmd->add_option("--j", th.j);
  th.ri_opt = theory_cmd->add_option("--ri", th.ri);
  th.rj_opt = theory_cmd->add_option("--rj", th.rj);
  th.m_opt = theory_cmd->add_option("--m", th.m);
  theory_cmd->add_option("--kmax", th.kmax);

  ModelFlags cmp;
  std::string against;
  std::vector<std::uint32_t> r_list{1, 2};
  std::uint32_t cmp_m = 3;
  CLI::App* compare =
      app.add_subcommand("compare", "check simulations against theory");
  add_model_flags(compare, cmp);
  compare
      ->add_option("--against", against,
                   "variance|covariance|simon-limits|divergence")
      ->required()
      ->check(CLI::IsMember(
          {"variance", "covariance", "simon-limits", "divergence"}));
  compare->add_option("--r", r_list, "exact-count sizes for covariance mode");
  compare->add_option("--m", cmp_m, "sizes 1..m-1 for simon-limits mode");

  std::vector<std::string> paths;
  std::uint32_t an_kmax = 10;
  std::string an_out = ".";
  unsigned an_jobs = 0;
  CLI::App* analyze =
      app.add_subcommand("analyze", "estimator pipeline on text files");
  analyze->add_option("paths", paths, "UTF-8 text files")->required();
  analyze->add_option("--kmax", an_kmax, "largest tracked exact count");
  analyze->add_option("--out", an_out, "output directory");
  analyze->add_option("--jobs", an_jobs, "worker threads across files");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) return cmd_simulate(sim, start);
    if (theory_cmd->parsed()) return cmd_theory(th);
    if (compare->parsed())
      return cmd_compare(cmp, against, r_list, cmp_m, start);
    return cmd_analyze(paths, an_kmax, an_out, an_jobs, start);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
