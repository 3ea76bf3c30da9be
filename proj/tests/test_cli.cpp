// SPDX-License-Identifier: Apache-2.0
//
// Drives the installed binary end to end through a shell; URNLAB_BIN and
// URNLAB_FIXTURE_DIR are injected by the build.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::temp_directory_path() / "urnlab_test_cli";

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

RunResult run(const std::string& args) {
  fs::create_directories(kWork);
  fs::path out = kWork / "stdout.txt";
  fs::path err = kWork / "stderr.txt";
  std::string cmd = std::string(URNLAB_BIN) + " " + args + " > " +
                    out.string() + " 2> " + err.string();
  int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

fs::path fresh_dir(const char* name) {
  fs::path dir = kWork / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::size_t count_lines(const std::string& text) {
  std::size_t n = 0;
  for (char c : text)
    if (c == '\n') ++n;
  return n;
}

}  // namespace

TEST_CASE("version flag") {
  RunResult r = run("--version");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("urnlab") != std::string::npos);
}

TEST_CASE("simulate is reproducible and writes the promised files") {
  fs::path a = fresh_dir("sim_a");
  fs::path b = fresh_dir("sim_b");
  RunResult ra = run("simulate --model simon --n 1000 --p 0.5 --reps 1 "
                     "--seed 42 --out " + a.string());
  RunResult rb = run("simulate --model simon --n 1000 --p 0.5 --reps 1 "
                     "--seed 42 --out " + b.string());
  REQUIRE(ra.exit_code == 0);
  REQUIRE(rb.exit_code == 0);
  CHECK(slurp(a / "replicate_000.csv") == slurp(b / "replicate_000.csv"));
  CHECK(slurp(a / "summary.csv") == slurp(b / "summary.csv"));
  CHECK(fs::exists(a / "manifest.json"));
  CHECK(slurp(a / "replicate_000.csv").rfind("# manifest: manifest.json\n",
                                             0) == 0);

  nlohmann::json manifest = nlohmann::json::parse(slurp(a / "manifest.json"));
  CHECK(manifest["subcommand"] == "simulate");
  CHECK(manifest["master_seed"] == 42);
  CHECK(manifest["parameters"]["model"] == "simon");
  CHECK(manifest["outputs"].size() == 2);  // replicate + summary
}

TEST_CASE("simulate rejects flags the model does not take") {
  RunResult r = run("simulate --model elementary --n 100 --p 0.5 --out " +
                    fresh_dir("sim_bad").string());
  CHECK(r.exit_code != 0);
  CHECK(r.err.find("--p is not a parameter of the elementary model") !=
        std::string::npos);
  CHECK(count_lines(r.err) == 1);
}

TEST_CASE("simulate writes one trajectory per replicate plus a summary") {
  fs::path dir = fresh_dir("sim_multi");
  RunResult r = run("simulate --model mod1 --beta 0.5 --p 0.5 --n 2000 "
                    "--reps 5 --seed 9 --out " + dir.string());
  REQUIRE(r.exit_code == 0);
  std::size_t csvs = 0;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".csv") ++csvs;
  CHECK(csvs == 6);  // 5 replicates + summary
  // comment + header + 5 data rows
  CHECK(count_lines(slurp(dir / "summary.csv")) == 7);
}

TEST_CASE("seed falls back to the environment variable") {
  fs::path a = fresh_dir("seed_env");
  fs::path b = fresh_dir("seed_flag");
  std::string cmd = "URNLAB_SEED=4242 " + std::string(URNLAB_BIN) +
                    " simulate --model elementary --theta 0.5 --n 500 "
                    "--reps 1 --out " + a.string() + " > /dev/null 2>&1";
  REQUIRE(std::system(cmd.c_str()) == 0);
  RunResult rb = run("simulate --model elementary --theta 0.5 --n 500 "
                     "--reps 1 --seed 4242 --out " + b.string());
  REQUIRE(rb.exit_code == 0);
  CHECK(slurp(a / "replicate_000.csv") == slurp(b / "replicate_000.csv"));
}

TEST_CASE("theory subcommand emits closed-form values") {
  SUBCASE("pmf value") {
    RunResult r = run("theory --quantity yule-pmf --p 0.5 --i 1");
    REQUIRE(r.exit_code == 0);
    nlohmann::json j = nlohmann::json::parse(r.out);
    CHECK(std::abs(j["value"].get<double>() - 2.0 / 3.0) < 1e-9);
  }
  SUBCASE("variance scale") {
    RunResult r = run("theory --quantity karlin-var --theta 0.5 --n 10000");
    REQUIRE(r.exit_code == 0);
    nlohmann::json j = nlohmann::json::parse(r.out);
    CHECK(std::abs(j["value"].get<double>() - 57.2433) < 1e-3);
  }
  SUBCASE("embedding eigenvalues") {
    RunResult r = run("theory --quantity janson --m 2 --p 0.5");
    REQUIRE(r.exit_code == 0);
    nlohmann::json j = nlohmann::json::parse(r.out);
    REQUIRE(j["value"].size() == 2);
    CHECK(std::abs(j["value"][0].get<double>() - 1.0) < 1e-8);
    CHECK(std::abs(j["value"][1].get<double>() + 0.5) < 1e-8);
    CHECK(j["spectral_gap_ok"] == true);
  }
  SUBCASE("poisson moments carry a certified truncation bound") {
    RunResult r =
        run("theory --quantity poisson-moments --theta 0.5 --n 10000 "
            "--kmax 3");
    REQUIRE(r.exit_code == 0);
    nlohmann::json j = nlohmann::json::parse(r.out);
    double mean1 = j["values"]["mean"][0].get<double>();
    CHECK(std::abs(mean1 - 137.69766) < 1e-4);
    CHECK(j["truncation_bound"].get<double>() < 1e-9 * mean1);
  }
  SUBCASE("unknown quantity") {
    RunResult r = run("theory --quantity entropy --p 0.5");
    CHECK(r.exit_code != 0);
  }
  SUBCASE("missing parameter names the flag") {
    RunResult r = run("theory --quantity yule-pmf --p 0.5");
    CHECK(r.exit_code != 0);
    CHECK(r.err.find("--i") != std::string::npos);
  }
}

TEST_CASE("compare gates on its report rows") {
  SUBCASE("copy-model limits pass") {
    fs::path dir = fresh_dir("cmp_simon");
    RunResult r = run("compare --model simon --p 0.5 --n 50000 --reps 30 "
                      "--seed 7 --against simon-limits --out " + dir.string());
    REQUIRE(r.exit_code == 0);
    nlohmann::json report = nlohmann::json::parse(slurp(dir / "report.json"));
    CHECK(report["model"] == "simon");
    CHECK(report["rows"].size() >= 4);
    for (const auto& row : report["rows"]) CHECK(row["pass"] == true);
    CHECK(fs::exists(dir / "report.csv"));
    CHECK(fs::exists(dir / "manifest.json"));
  }
  SUBCASE("estimator divergence under mod1") {
    fs::path dir = fresh_dir("cmp_div");
    RunResult r = run("compare --model mod1 --beta 0.5 --p 0.5 --n 30000 "
                      "--reps 40 --seed 11 --against divergence --out " +
                      dir.string());
    REQUIRE(r.exit_code == 0);
    nlohmann::json report = nlohmann::json::parse(slurp(dir / "report.json"));
    bool found = false;
    for (const auto& row : report["rows"]) {
      if (row["name"] == "mod_estimator_gap(z>3)") {
        found = true;
        CHECK(row["pass"] == true);
        CHECK(std::abs(row["z"].get<double>()) > 3.0);
      }
    }
    CHECK(found);
  }
  SUBCASE("covariance mode refuses a thin sample") {
    fs::path dir = fresh_dir("cmp_thin");
    RunResult r = run("compare --model elementary --theta 0.5 --n 1000 "
                      "--reps 10 --against covariance --out " + dir.string());
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("500") != std::string::npos);
  }
}

TEST_CASE("analyze reproduces the committed fixture goldens") {
  fs::path dir = fresh_dir("an_fix");
  std::string fixture =
      std::string(URNLAB_FIXTURE_DIR) + "/fixture.txt";
  RunResult r = run("analyze " + fixture + " --out " + dir.string());
  REQUIRE(r.exit_code == 0);

  nlohmann::json got =
      nlohmann::json::parse(slurp(dir / "fixture.estimators.json"));
  nlohmann::json want = nlohmann::json::parse(
      slurp(std::string(URNLAB_FIXTURE_DIR) + "/fixture_golden.json"));
  CHECK(got["n"] == want["n"]);
  CHECK(got["R_n"] == want["R_n"]);
  CHECK(got["R_half"] == want["R_half"]);
  CHECK(got["R_n1"] == want["R_n1"]);
  CHECK(std::abs(got["theta_hat"].get<double>() -
                 want["theta_hat"].get<double>()) < 1e-12);
  CHECK(got["theta_star"].get<double>() ==
        want["theta_star"].get<double>());

  std::string traj = slurp(dir / "fixture.trajectory.csv");
  CHECK(traj.rfind("# manifest: manifest.json\n", 0) == 0);

  fs::path dir2 = fresh_dir("an_fix2");
  RunResult r2 = run("analyze " + fixture + " --out " + dir2.string());
  REQUIRE(r2.exit_code == 0);
  CHECK(slurp(dir2 / "fixture.trajectory.csv") == traj);
}

TEST_CASE("analyze reports missing files") {
  RunResult r = run("analyze /nonexistent/file.txt --out " +
                    fresh_dir("an_miss").string());
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("error:") != std::string::npos);
}
