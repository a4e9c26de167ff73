#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "glspec/rates.hpp"

namespace glspec {

struct MatricesSection {
  std::size_t n = 0;
  std::string format = "csv";  // csv | binary | both
};

struct SpectrumSection {
  std::size_t n = 0;
  std::string op = "Lprime";  // Lprime | L
  std::optional<Window> window;
  bool write_vectors = false;
  bool with_reference = false;
  int reference_max_frequency = 8;
  std::size_t extension_grid = 0;  // evaluate extended window eigenfunctions
};

struct RatesSection {
  std::vector<std::size_t> ladder;
  int trials = 10;
  Window window;
  std::string op = "Lprime";
  USpec u;
  std::size_t dense_threshold = 2048;
  std::size_t off_sample_grid = 0;
};

struct ConstantsSection {
  double C_L = 1.0;
  double m = 1.0;
  double alpha = 1.0;
  std::vector<std::uint64_t> N_ladder;
};

struct GcSection {
  std::vector<std::size_t> ladder;
  int seeds = 20;
  std::vector<USpec> g;
  std::size_t probe_grid = 512;
  std::size_t quadrature = 32768;
};

struct VerifySection {
  std::size_t grid = 4096;
  std::vector<double> delta_ladder;
  std::size_t probe_count = 32;
};

// One config file drives every subcommand; the section for the invoked
// command must be present. Parsing is strict: unknown keys anywhere are
// config errors.
struct ExperimentConfig {
  SpaceDescriptor space;
  KernelDescriptor kernel;
  std::uint64_t seed = 0;
  std::optional<MatricesSection> matrices;
  std::optional<SpectrumSection> spectrum;
  std::optional<RatesSection> rates;
  std::optional<ConstantsSection> constants;
  std::optional<GcSection> gc;
  std::optional<VerifySection> verify;
};

nlohmann::json space_to_json(const SpaceDescriptor& space);
SpaceDescriptor space_from_json(const nlohmann::json& j);
nlohmann::json kernel_to_json(const KernelDescriptor& kernel);
KernelDescriptor kernel_from_json(const nlohmann::json& j);

nlohmann::json config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

// FNV-1a hash of the canonical serialization (nlohmann objects order keys, so
// the dump is canonical); echoed into every output for reproducibility.
std::string config_hash_hex(const ExperimentConfig& config);

}  // namespace glspec
