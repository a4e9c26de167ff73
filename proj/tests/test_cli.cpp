#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>
#include <sys/wait.h>
#include <unistd.h>

#include "glspec/config.hpp"
#include "glspec/io.hpp"

using namespace glspec;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static std::atomic<int> counter{0};
    path = fs::temp_directory_path() /
           ("glspec_cli_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter.fetch_add(1)));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

int run_cli(const std::string& args, const fs::path& capture = {}) {
  std::string cmd = std::string(GLSPEC_CLI_PATH) + " " + args;
  if (capture.empty())
    cmd += " > /dev/null 2>&1";
  else
    cmd += " > " + capture.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

fs::path write_config(const fs::path& dir, const std::string& name, const json& j) {
  const fs::path p = dir / name;
  write_text_file(p, j.dump(2) + "\n");
  return p;
}

json circle_base() {
  return json{{"space", {{"kind", "circle"}, {"circumference", 6.283185307179586}}},
              {"kernel",
               {{"form", "ball"}, {"r", 0.7853981633974483}, {"M", 1.0}, {"a", 0.2},
                {"C_omega", 2.0}, {"m_prime", 1.0}}},
              {"seed", 5}};
}

json constant_base() {
  return json{{"space", {{"kind", "circle"}, {"circumference", 6.283185307179586}}},
              {"kernel",
               {{"form", "constant"}, {"value", 1.0}, {"M", 1.0}, {"a", 0.5},
                {"C_omega", 2.0}, {"m_prime", 1.0}}},
              {"seed", 5}};
}

}  // namespace

TEST_CASE("cli help and parse errors") {
  TempDir tmp;
  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("matrices --help") == 0);
  CHECK(run_cli("") == 2);  // a subcommand is required
  CHECK(run_cli("matrices --config " + (tmp.path / "absent.json").string()) == 2);
  CHECK(run_cli("frobnicate --config x.json") == 2);
}

TEST_CASE("matrices outputs are parseable, checksummed and reproducible") {
  TempDir tmp;
  json cfg = constant_base();
  cfg["matrices"] = json{{"n", 8}, {"format", "both"}};
  const auto cfg_path = write_config(tmp.path, "cfg.json", cfg);

  const fs::path out1 = tmp.path / "run1";
  REQUIRE(run_cli("matrices --config " + cfg_path.string() + " --out " + out1.string()) == 0);

  for (const char* base : {"K", "D", "M_diag", "L", "L_prime", "L_unnormalized",
                           "L_normalized_sym", "L_random_walk"}) {
    CHECK(fs::exists(out1 / (std::string(base) + ".csv")));
    CHECK(fs::exists(out1 / (std::string(base) + ".bin")));
  }

  // Constant kernel: K = J/n, D = 1, L' = I - J/n, all exactly representable.
  const Eigen::MatrixXd K = read_csv_matrix(out1 / "K.csv");
  REQUIRE(K.rows() == 8);
  REQUIRE(K.cols() == 8);
  CHECK((K.array() - 0.125).abs().maxCoeff() == 0.0);
  const Eigen::MatrixXd D = read_csv_matrix(out1 / "D.csv");
  REQUIRE(D.rows() == 8);
  REQUIRE(D.cols() == 1);
  CHECK((D.array() - 1.0).abs().maxCoeff() == 0.0);
  const Eigen::MatrixXd Lp = read_csv_matrix(out1 / "L_prime.csv");
  const Eigen::MatrixXd expected =
      Eigen::MatrixXd::Identity(8, 8) - Eigen::MatrixXd::Constant(8, 8, 0.125);
  CHECK((Lp - expected).cwiseAbs().maxCoeff() == 0.0);

  // Binary and CSV hold the same payload.
  const Eigen::MatrixXd Kbin = read_binary_matrix(out1 / "K.bin");
  CHECK((Kbin - K).cwiseAbs().maxCoeff() == 0.0);
  const Eigen::MatrixXd Dbin = read_binary_matrix(out1 / "D.bin");
  REQUIRE(Dbin.cols() == 1);
  CHECK((Dbin - D).cwiseAbs().maxCoeff() == 0.0);

  // Manifest checksums refer to the actual files.
  const json manifest = json::parse(read_text_file(out1 / "manifest.json"));
  CHECK(manifest.at("command") == "matrices");
  CHECK(manifest.at("seed") == 5);
  CHECK(manifest.at("n") == 8);
  CHECK(manifest.at("min_degree").get<double>() == 1.0);
  CHECK(manifest.at("config_hash") == config_hash_hex(load_config(cfg_path)));
  const auto& outputs = manifest.at("outputs");
  REQUIRE(outputs.contains("K.csv"));
  CHECK(outputs.at("K.csv") == file_checksum_hex(out1 / "K.csv"));
  CHECK(outputs.at("L_prime.bin") == file_checksum_hex(out1 / "L_prime.bin"));
  CHECK_FALSE(outputs.contains("manifest.json"));

  // A rerun reproduces every data file byte for byte.
  const fs::path out2 = tmp.path / "run2";
  REQUIRE(run_cli("matrices --config " + cfg_path.string() + " --out " + out2.string()) == 0);
  CHECK(read_text_file(out1 / "K.csv") == read_text_file(out2 / "K.csv"));
  CHECK(read_text_file(out1 / "L_random_walk.bin") == read_text_file(out2 / "L_random_walk.bin"));
}

TEST_CASE("seed override and thread count behave as documented") {
  TempDir tmp;
  json cfg = circle_base();
  cfg["matrices"] = json{{"n", 16}, {"format", "csv"}};
  const auto cfg_path = write_config(tmp.path, "cfg.json", cfg);

  const fs::path base = tmp.path / "base";
  const fs::path reseeded = tmp.path / "reseeded";
  const fs::path threaded = tmp.path / "threaded";
  const fs::path env_threaded = tmp.path / "env";
  REQUIRE(run_cli("matrices --config " + cfg_path.string() + " --out " + base.string()) == 0);
  REQUIRE(run_cli("matrices --config " + cfg_path.string() + " --out " + reseeded.string() +
                  " --seed 6") == 0);
  REQUIRE(run_cli("matrices --config " + cfg_path.string() + " --out " + threaded.string() +
                  " --threads 1") == 0);
  const std::string env_cmd = "GLSPEC_THREADS=3 " + std::string(GLSPEC_CLI_PATH) +
                              " matrices --config " + cfg_path.string() + " --out " +
                              env_threaded.string() + " > /dev/null 2>&1";
  const int status = std::system(env_cmd.c_str());
  REQUIRE(status != -1);
  REQUIRE(WEXITSTATUS(status) == 0);

  const std::string base_K = read_text_file(base / "K.csv");
  CHECK(base_K != read_text_file(reseeded / "K.csv"));
  CHECK(base_K == read_text_file(threaded / "K.csv"));
  CHECK(base_K == read_text_file(env_threaded / "K.csv"));

  const json m1 = json::parse(read_text_file(base / "manifest.json"));
  const json m2 = json::parse(read_text_file(reseeded / "manifest.json"));
  CHECK(m1.at("seed") == 5);
  CHECK(m2.at("seed") == 6);
  CHECK(m1.at("config_hash") == m2.at("config_hash"));
}

TEST_CASE("spectrum command writes the eigenvalue table and reference matching") {
  TempDir tmp;
  json cfg = circle_base();
  cfg["spectrum"] = json{{"n", 64},
                         {"op", "Lprime"},
                         {"with_reference", true},
                         {"reference_max_frequency", 3},
                         {"write_vectors", true}};
  const auto cfg_path = write_config(tmp.path, "cfg.json", cfg);
  const fs::path out = tmp.path / "spectrum_out";
  REQUIRE(run_cli("spectrum --config " + cfg_path.string() + " --out " + out.string()) == 0);

  const Eigen::MatrixXd table = read_csv_matrix(out / "spectrum.csv");
  REQUIRE(table.rows() == 64);
  REQUIRE(table.cols() == 3);
  for (Eigen::Index i = 0; i + 1 < table.rows(); ++i) {
    CHECK(table(i, 1) <= table(i + 1, 1) + 1e-15);   // ascending eigenvalues
    CHECK(table(i, 2) <= table(i + 1, 2));           // group ids nondecreasing
  }

  const Eigen::MatrixXd vectors = read_csv_matrix(out / "vectors.csv");
  CHECK(vectors.rows() == 64);
  CHECK(vectors.cols() == 64);

  const Eigen::MatrixXd matched = read_csv_matrix(out / "reference_matched.csv");
  REQUIRE(matched.rows() == 4);  // frequencies 0..3
  REQUIRE(matched.cols() == 6);
  CHECK(matched(0, 0) == 0.0);
  CHECK(matched(0, 1) == 0.0);  // constant eigenfunction level of I - T
  CHECK(matched(1, 2) == 2.0);  // first oscillating level has multiplicity two
  for (Eigen::Index r = 0; r < matched.rows(); ++r) CHECK(matched(r, 5) >= 0.0);
}

TEST_CASE("spectrum reference demands the matching space and kernel") {
  TempDir tmp;
  json cfg = constant_base();
  cfg["spectrum"] = json{{"n", 16}, {"with_reference", true}};
  const auto cfg_path = write_config(tmp.path, "cfg.json", cfg);
  CHECK(run_cli("spectrum --config " + cfg_path.string() + " --out " +
                (tmp.path / "o").string()) == 2);
}

TEST_CASE("missing section and unknown key exit with the config code") {
  TempDir tmp;
  const auto bare = write_config(tmp.path, "bare.json", circle_base());
  CHECK(run_cli("matrices --config " + bare.string() + " --out " + (tmp.path / "a").string()) ==
        2);
  json bad = circle_base();
  bad["mystery"] = 1;
  const auto bad_path = write_config(tmp.path, "bad.json", bad);
  CHECK(run_cli("gc --config " + bad_path.string() + " --out " + (tmp.path / "b").string()) == 2);
  write_text_file(tmp.path / "broken.json", "{oops");
  CHECK(run_cli("verify --config " + (tmp.path / "broken.json").string()) == 2);
}

TEST_CASE("degenerate sample degree exits with code 3") {
  TempDir tmp;
  // Point 2 is unreachable under the precomputed metric (distance 9 to
  // everything, itself included), so its ball degree is zero once sampled.
  json cfg = circle_base();
  cfg["space"] = json{{"kind", "point_cloud"},
                      {"points", {{0.0}, {0.1}, {0.2}}},
                      {"distances",
                       {{0.0, 0.1, 9.0}, {0.1, 0.0, 9.0}, {9.0, 9.0, 9.0}}}};
  cfg["kernel"] = json{{"form", "ball"}, {"r", 0.5}, {"M", 1.0}, {"a", 0.2}, {"C_omega", 2.0},
                       {"m_prime", 1.0}};
  cfg["matrices"] = json{{"n", 32}, {"format", "csv"}};
  const auto cfg_path = write_config(tmp.path, "cfg.json", cfg);
  CHECK(run_cli("matrices --config " + cfg_path.string() + " --out " +
                (tmp.path / "o").string()) == 3);
}

TEST_CASE("ill-posed spectral window exits with code 4") {
  TempDir tmp;
  json cfg = constant_base();
  // The constant-kernel spectrum is exactly {0, 1}, so this window is empty.
  cfg["spectrum"] = json{{"n", 24}, {"window", {{"lo", 0.3}, {"hi", 0.7}}}};
  const auto cfg_path = write_config(tmp.path, "cfg.json", cfg);
  CHECK(run_cli("spectrum --config " + cfg_path.string() + " --out " +
                (tmp.path / "o").string()) == 4);
}

TEST_CASE("unwritable manifest exits with the io code") {
  TempDir tmp;
  json cfg = constant_base();
  cfg["matrices"] = json{{"n", 4}, {"format", "csv"}};
  const auto cfg_path = write_config(tmp.path, "cfg.json", cfg);
  const fs::path out = tmp.path / "blocked";
  fs::create_directories(out / "manifest.json");  // a directory squats on the manifest name
  CHECK(run_cli("matrices --config " + cfg_path.string() + " --out " + out.string()) == 5);
}

TEST_CASE("constants command reports the closed-form values") {
  TempDir tmp;
  json cfg = circle_base();
  cfg["kernel"]["a"] = 0.5;
  cfg["constants"] = json{{"C_L", 1.0}, {"m", 1.0}, {"alpha", 1000.0}, {"N_ladder", {10, 100}}};
  const auto cfg_path = write_config(tmp.path, "cfg.json", cfg);
  const fs::path out = tmp.path / "c";
  const fs::path captured = tmp.path / "stdout.json";
  REQUIRE(run_cli("constants --config " + cfg_path.string() + " --out " + out.string(),
                  captured) == 0);

  const json stdout_json = json::parse(read_text_file(captured));
  CHECK(stdout_json.at("gamma").get<double>() == doctest::Approx(400.0 / 3.0).epsilon(1e-14));
  CHECK(stdout_json.at("gamma_tilde").get<double>() ==
        doctest::Approx(800.0 / 3.0).epsilon(1e-14));
  CHECK(stdout_json.at("admissible").get<bool>());
  REQUIRE(stdout_json.contains("probability_bounds"));

  const json file_json = json::parse(read_text_file(out / "constants.json"));
  CHECK(file_json.at("gamma") == stdout_json.at("gamma"));
  const Eigen::MatrixXd bounds = read_csv_matrix(out / "probability_bounds.csv");
  REQUIRE(bounds.rows() == 2);
  CHECK(bounds(0, 0) == 10.0);
  CHECK(bounds(1, 0) == 100.0);
}

TEST_CASE("gc command writes trials, medians and the report") {
  TempDir tmp;
  json cfg = circle_base();
  cfg["gc"] = json{{"ladder", {16, 32}},
                   {"seeds", 3},
                   {"g", {"one", "cos1"}},
                   {"probe_grid", 64},
                   {"quadrature", 1024}};
  const auto cfg_path = write_config(tmp.path, "cfg.json", cfg);
  const fs::path out = tmp.path / "gc";
  REQUIRE(run_cli("gc --config " + cfg_path.string() + " --out " + out.string()) == 0);

  const Eigen::MatrixXd trials = read_csv_matrix(out / "gc_trials.csv");
  CHECK(trials.rows() == 2 * 2 * 3);  // g values x rungs x seeds
  CHECK(trials.cols() == 4);
  const Eigen::MatrixXd medians = read_csv_matrix(out / "gc_medians.csv");
  CHECK(medians.rows() == 4);
  const json report = json::parse(read_text_file(out / "gc_report.json"));
  CHECK(report.at("g") == json::array({"one", "cos1"}));
  CHECK(report.at("medians").size() == 4);
  CHECK(fs::exists(out / "gc_plot.svg"));
}

TEST_CASE("verify command exit code follows the membership verdict") {
  TempDir tmp;
  json pass_cfg = circle_base();  // a = 0.2 < 0.25 = min degree, C_omega = 2 covers 2/pi
  pass_cfg["verify"] = json{{"grid", 512}, {"delta_ladder", {0.05, 0.1}}, {"probe_count", 8}};
  const auto pass_path = write_config(tmp.path, "pass.json", pass_cfg);
  const fs::path out = tmp.path / "v";
  const fs::path captured = tmp.path / "verify_stdout.json";
  REQUIRE(run_cli("verify --config " + pass_path.string() + " --out " + out.string(),
                  captured) == 0);
  const json report = json::parse(read_text_file(captured));
  CHECK(report.at("pass").get<bool>());
  CHECK(report.at("lower_bound").at("ok").get<bool>());
  const json file_report = json::parse(read_text_file(out / "verify_report.json"));
  CHECK(file_report.at("pass") == report.at("pass"));

  json fail_cfg = circle_base();
  fail_cfg["kernel"]["a"] = 0.5;  // min degree is only 1/4
  fail_cfg["verify"] = json{{"grid", 512}, {"delta_ladder", {0.05}}, {"probe_count", 8}};
  const auto fail_path = write_config(tmp.path, "fail.json", fail_cfg);
  const fs::path captured2 = tmp.path / "verify_fail.json";
  CHECK(run_cli("verify --config " + fail_path.string() + " --out " + (tmp.path / "v2").string(),
                captured2) == 1);
  const json fail_report = json::parse(read_text_file(captured2));
  CHECK_FALSE(fail_report.at("pass").get<bool>());
  CHECK_FALSE(fail_report.at("lower_bound").at("ok").get<bool>());
  CHECK(fail_report.at("lower_bound").at("margin").get<double>() < 0.0);
}

TEST_CASE("rates command produces the full artifact set") {
  TempDir tmp;
  json cfg = circle_base();
  cfg["rates"] = json{{"ladder", {128, 192}},
                      {"trials", 3},
                      {"window", {{"lo", 0.02}, {"hi", 0.25}}},
                      {"op", "Lprime"},
                      {"u", "cos1"},
                      {"dense_threshold", 4096}};
  const auto cfg_path = write_config(tmp.path, "cfg.json", cfg);
  const fs::path out = tmp.path / "r";
  REQUIRE(run_cli("rates --config " + cfg_path.string() + " --out " + out.string()) == 0);

  const Eigen::MatrixXd trials = read_csv_matrix(out / "rates_trials.csv");
  CHECK(trials.rows() == 6);
  CHECK(trials.cols() == 4);
  const Eigen::MatrixXd medians = read_csv_matrix(out / "rates_medians.csv");
  CHECK(medians.rows() == 2);
  CHECK(medians.cols() == 6);
  const json report = json::parse(read_text_file(out / "rates_report.json"));
  CHECK(report.at("u") == "cos1");
  CHECK(report.at("ladder").size() == 2);
  CHECK(report.at("envelope").at("shape") == "scale*sqrt(log(n))/sqrt(n)");

  // Determinism across reruns covers the threaded assembly path too.
  const fs::path out2 = tmp.path / "r2";
  REQUIRE(run_cli("rates --config " + cfg_path.string() + " --out " + out2.string() +
                  " --threads 2") == 0);
  CHECK(read_text_file(out / "rates_trials.csv") == read_text_file(out2 / "rates_trials.csv"));
  CHECK(read_text_file(out / "rates_plot.svg") == read_text_file(out2 / "rates_plot.svg"));
}
