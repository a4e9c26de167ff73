#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>
#include <unistd.h>

#include "glspec/config.hpp"
#include "glspec/errors.hpp"
#include "glspec/io.hpp"
#include "glspec/rng.hpp"

using namespace glspec;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static std::atomic<int> counter{0};
    path = fs::temp_directory_path() /
           ("glspec_io_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter.fetch_add(1)));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

json minimal_config_json() {
  return json{
      {"space", {{"kind", "circle"}, {"circumference", 6.283185307179586}}},
      {"kernel",
       {{"form", "ball"}, {"r", 0.7853981633974483}, {"M", 1.0}, {"a", 0.2}, {"C_omega", 2.0},
        {"m_prime", 1.0}}},
      {"seed", 42}};
}

}  // namespace

TEST_CASE("fnv1a64 known answers") {
  // Standard FNV-1a test vectors.
  CHECK(fnv1a64("", 0) == 14695981039346656037ull);
  CHECK(fnv1a64(std::string("a")) == 0xaf63dc4c8601ec8cull);
  CHECK(fnv1a64(std::string("foobar")) == 0x85944171f73967e8ull);
  CHECK(to_hex(0xaf63dc4c8601ec8cull) == "af63dc4c8601ec8c");
  CHECK(to_hex(0x1ull) == "0000000000000001");
}

TEST_CASE("csv matrices round-trip at full precision") {
  TempDir tmp;
  CounterRng rng(1);
  Eigen::MatrixXd m(7, 3);
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      m(i, j) = (rng.next_double() - 0.5) * std::pow(10.0, static_cast<double>(j * 5) - 5.0);
  m(0, 0) = 0.1;  // not representable exactly: %.17g must preserve it
  m(1, 1) = -1.0 / 3.0;

  const auto path = tmp.path / "m.csv";
  write_csv_matrix(path, m);
  const Eigen::MatrixXd back = read_csv_matrix(path);
  REQUIRE(back.rows() == m.rows());
  REQUIRE(back.cols() == m.cols());
  CHECK((back - m).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("csv reader rejects ragged and non-numeric input") {
  TempDir tmp;
  const auto ragged = tmp.path / "ragged.csv";
  write_text_file(ragged, "1,2,3\n4,5\n");
  CHECK_THROWS_AS(read_csv_matrix(ragged), io_error);

  const auto words = tmp.path / "words.csv";
  write_text_file(words, "1,2\n3,abc\n");
  CHECK_THROWS_AS(read_csv_matrix(words), io_error);

  CHECK_THROWS_AS(read_csv_matrix(tmp.path / "missing.csv"), io_error);
}

TEST_CASE("binary matrices round-trip for squares and vectors") {
  TempDir tmp;
  CounterRng rng(2);
  Eigen::MatrixXd square(9, 9);
  for (Eigen::Index i = 0; i < 81; ++i) square(i / 9, i % 9) = rng.next_double();
  const auto spath = tmp.path / "square.bin";
  write_binary_matrix(spath, square);
  const Eigen::MatrixXd sback = read_binary_matrix(spath);
  REQUIRE(sback.rows() == 9);
  REQUIRE(sback.cols() == 9);
  CHECK((sback - square).cwiseAbs().maxCoeff() == 0.0);

  Eigen::VectorXd vec(11);
  for (Eigen::Index i = 0; i < 11; ++i) vec(i) = rng.next_double() - 0.5;
  const auto vpath = tmp.path / "vec.bin";
  write_binary_matrix(vpath, vec);
  const Eigen::MatrixXd vback = read_binary_matrix(vpath);
  REQUIRE(vback.rows() == 11);
  REQUIRE(vback.cols() == 1);
  CHECK((vback - vec).cwiseAbs().maxCoeff() == 0.0);

  // Non-square, non-vector shapes have no header encoding.
  CHECK_THROWS_AS(write_binary_matrix(tmp.path / "bad.bin", Eigen::MatrixXd(3, 2)),
                  std::invalid_argument);
}

TEST_CASE("binary reader detects truncation") {
  TempDir tmp;
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(4, 4);
  const auto path = tmp.path / "m.bin";
  write_binary_matrix(path, m);
  const std::string full = read_text_file(path);
  write_text_file(tmp.path / "cut.bin", full.substr(0, full.size() - 5));
  CHECK_THROWS_AS(read_binary_matrix(tmp.path / "cut.bin"), io_error);
  write_text_file(tmp.path / "tiny.bin", full.substr(0, 4));
  CHECK_THROWS_AS(read_binary_matrix(tmp.path / "tiny.bin"), io_error);
}

TEST_CASE("file checksum is content-determined") {
  TempDir tmp;
  write_text_file(tmp.path / "a.txt", "hello world\n");
  write_text_file(tmp.path / "b.txt", "hello world\n");
  write_text_file(tmp.path / "c.txt", "hello worlds\n");
  CHECK(file_checksum_hex(tmp.path / "a.txt") == file_checksum_hex(tmp.path / "b.txt"));
  CHECK(file_checksum_hex(tmp.path / "a.txt") != file_checksum_hex(tmp.path / "c.txt"));
}

TEST_CASE("loglog svg embeds the data and axes") {
  std::vector<SvgSeries> series(1);
  series[0].label = "median";
  series[0].points = {{64.0, 0.5}, {256.0, 0.22}, {1024.0, 0.1}};
  const std::string svg = render_loglog_svg("t", "n", "err", series);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("median") != std::string::npos);
  // Data embedded as comments for later recovery.
  CHECK(svg.find("64") != std::string::npos);
  CHECK(svg.find("<!--") != std::string::npos);
  CHECK(svg.find("polyline") != std::string::npos);
}

TEST_CASE("config round-trips through json") {
  json j = minimal_config_json();
  j["matrices"] = json{{"n", 32}, {"format", "both"}};
  j["spectrum"] = json{{"n", 64},
                       {"op", "L"},
                       {"window", {{"lo", 0.05}, {"hi", 0.2}}},
                       {"write_vectors", true},
                       {"with_reference", true},
                       {"reference_max_frequency", 5},
                       {"extension_grid", 32}};
  j["rates"] = json{{"ladder", {64, 128}},
                    {"trials", 4},
                    {"window", {{"lo", 0.02}, {"hi", 0.3}}},
                    {"op", "Lprime"},
                    {"u", "cos2"},
                    {"dense_threshold", 512},
                    {"off_sample_grid", 128}};
  j["constants"] = json{{"C_L", 1.0}, {"m", 1.0}, {"alpha", 1000.0}, {"N_ladder", {10, 100}}};
  j["gc"] = json{{"ladder", {64, 256}},
                 {"seeds", 6},
                 {"g", {"one", "cos1", "sin3"}},
                 {"probe_grid", 128},
                 {"quadrature", 2048}};
  j["verify"] = json{{"grid", 256}, {"delta_ladder", {0.01, 0.1}}, {"probe_count", 8}};

  const ExperimentConfig config = config_from_json(j);
  CHECK(config.seed == 42);
  REQUIRE(config.rates.has_value());
  CHECK(config.rates->u.label() == "cos2");
  REQUIRE(config.gc.has_value());
  CHECK(config.gc->g.size() == 3);
  CHECK(config.gc->g[2].label() == "sin3");

  // Round trip: serialize and re-parse, the canonical dumps must agree.
  const json j2 = config_to_json(config);
  const ExperimentConfig config2 = config_from_json(j2);
  CHECK(config_to_json(config2).dump() == j2.dump());
  CHECK(config_hash_hex(config) == config_hash_hex(config2));
}

TEST_CASE("config hash is sensitive to every section") {
  const ExperimentConfig base = config_from_json(minimal_config_json());
  json j = minimal_config_json();
  j["seed"] = 43;
  CHECK(config_hash_hex(base) != config_hash_hex(config_from_json(j)));
  j = minimal_config_json();
  j["kernel"]["r"] = 0.5;
  CHECK(config_hash_hex(base) != config_hash_hex(config_from_json(j)));
}

TEST_CASE("unknown keys are rejected everywhere") {
  json j = minimal_config_json();
  j["surprise"] = 1;
  CHECK_THROWS_AS(config_from_json(j), config_error);

  j = minimal_config_json();
  j["kernel"]["extra"] = 1;
  CHECK_THROWS_AS(config_from_json(j), config_error);

  j = minimal_config_json();
  j["space"]["bonus"] = 2;
  CHECK_THROWS_AS(config_from_json(j), config_error);

  j = minimal_config_json();
  j["matrices"] = json{{"n", 8}, {"formats", "csv"}};  // misspelled key
  CHECK_THROWS_AS(config_from_json(j), config_error);

  j = minimal_config_json();
  j["rates"] = json{{"ladder", {4, 8}},
                    {"window", {{"lo", 0.0}, {"hi", 1.0}, {"mid", 0.5}}}};
  CHECK_THROWS_AS(config_from_json(j), config_error);
}

TEST_CASE("config type and range errors") {
  json j = minimal_config_json();
  j["seed"] = -1;
  CHECK_THROWS_AS(config_from_json(j), config_error);

  j = minimal_config_json();
  j["matrices"] = json{{"n", 0}};
  CHECK_THROWS_AS(config_from_json(j), config_error);

  j = minimal_config_json();
  j["matrices"] = json{{"n", 8}, {"format", "yaml"}};
  CHECK_THROWS_AS(config_from_json(j), config_error);

  j = minimal_config_json();
  j["rates"] = json{{"ladder", {64, 1}}, {"window", {{"lo", 0.0}, {"hi", 1.0}}}};
  CHECK_THROWS_AS(config_from_json(j), config_error);  // rung below the minimum sample size

  j = minimal_config_json();
  j["rates"] = json{{"ladder", json::array()}, {"window", {{"lo", 0.0}, {"hi", 1.0}}}};
  CHECK_THROWS_AS(config_from_json(j), config_error);

  j = minimal_config_json();
  j["rates"] = json{{"ladder", {64, 128}}, {"window", {{"lo", 1.0}, {"hi", 0.0}}}};
  CHECK_THROWS_AS(config_from_json(j), config_error);

  j = minimal_config_json();
  j["gc"] = json{{"ladder", {64, 128}}, {"g", {"tan1"}}};
  CHECK_THROWS_AS(config_from_json(j), config_error);

  j = minimal_config_json();
  j["kernel"] = json{{"form", "ball"}, {"r", -1.0}};
  CHECK_THROWS_AS(config_from_json(j), config_error);

  j = minimal_config_json();
  j["space"] = json{{"kind", "klein_bottle"}};
  CHECK_THROWS_AS(config_from_json(j), config_error);
}

TEST_CASE("load_config distinguishes io and parse failures") {
  TempDir tmp;
  CHECK_THROWS_AS(load_config(tmp.path / "nope.json"), io_error);
  write_text_file(tmp.path / "broken.json", "{not json");
  CHECK_THROWS_AS(load_config(tmp.path / "broken.json"), config_error);
  write_text_file(tmp.path / "ok.json", minimal_config_json().dump());
  const auto config = load_config(tmp.path / "ok.json");
  CHECK(config.seed == 42);
}

TEST_CASE("point cloud spaces round-trip through config json") {
  json j = minimal_config_json();
  j["space"] = json{{"kind", "point_cloud"},
                    {"points", {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}}}};
  j["kernel"] = json{{"form", "gaussian"}, {"bandwidth", 0.5}, {"M", 1.0}, {"a", 0.1},
                     {"C_omega", 2.0}, {"m_prime", 1.0}};
  const auto config = config_from_json(j);
  CHECK(config.space.kind == SpaceKind::PointCloud);
  CHECK(config.space.cloud.rows() == 3);
  const json j2 = config_to_json(config);
  const auto config2 = config_from_json(j2);
  CHECK(config2.space.cloud.rows() == 3);
  CHECK(config_hash_hex(config) == config_hash_hex(config2));
}
