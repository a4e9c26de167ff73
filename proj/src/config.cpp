#include "glspec/config.hpp"

#include <string>

#include "glspec/errors.hpp"
#include "glspec/io.hpp"

namespace glspec {

namespace {

using nlohmann::json;

void require_keys(const json& j, std::initializer_list<const char*> allowed,
                  const std::string& where) {
  if (!j.is_object()) throw config_error(where + " must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* key : allowed)
      if (it.key() == key) {
        known = true;
        break;
      }
    if (!known) throw config_error("unknown key '" + it.key() + "' in " + where);
  }
}

const json& require_field(const json& j, const char* key, const std::string& where) {
  const auto it = j.find(key);
  if (it == j.end()) throw config_error(where + " is missing required key '" + key + "'");
  return *it;
}

double get_double(const json& j, const char* key, const std::string& where) {
  const json& v = require_field(j, key, where);
  if (!v.is_number()) throw config_error(where + "." + key + " must be a number");
  return v.get<double>();
}

double get_double_or(const json& j, const char* key, const std::string& where, double def) {
  if (!j.contains(key)) return def;
  return get_double(j, key, where);
}

std::uint64_t get_uint(const json& j, const char* key, const std::string& where) {
  const json& v = require_field(j, key, where);
  if (!v.is_number_integer() && !v.is_number_unsigned())
    throw config_error(where + "." + key + " must be a nonnegative integer");
  if (v.is_number_integer() && v.get<std::int64_t>() < 0)
    throw config_error(where + "." + key + " must be a nonnegative integer");
  return v.get<std::uint64_t>();
}

std::uint64_t get_uint_or(const json& j, const char* key, const std::string& where,
                          std::uint64_t def) {
  if (!j.contains(key)) return def;
  return get_uint(j, key, where);
}

int get_int_or(const json& j, const char* key, const std::string& where, int def) {
  if (!j.contains(key)) return def;
  const json& v = j.at(key);
  if (!v.is_number_integer() && !v.is_number_unsigned())
    throw config_error(where + "." + key + " must be an integer");
  return v.get<int>();
}

bool get_bool_or(const json& j, const char* key, const std::string& where, bool def) {
  if (!j.contains(key)) return def;
  const json& v = j.at(key);
  if (!v.is_boolean()) throw config_error(where + "." + key + " must be a boolean");
  return v.get<bool>();
}

std::string get_string(const json& j, const char* key, const std::string& where) {
  const json& v = require_field(j, key, where);
  if (!v.is_string()) throw config_error(where + "." + key + " must be a string");
  return v.get<std::string>();
}

std::string get_string_or(const json& j, const char* key, const std::string& where,
                          const std::string& def) {
  if (!j.contains(key)) return def;
  return get_string(j, key, where);
}

std::vector<std::size_t> get_size_ladder(const json& j, const char* key,
                                         const std::string& where) {
  const json& v = require_field(j, key, where);
  if (!v.is_array()) throw config_error(where + "." + key + " must be an array");
  std::vector<std::size_t> out;
  for (const auto& e : v) {
    if (!e.is_number_integer() && !e.is_number_unsigned())
      throw config_error(where + "." + key + " entries must be integers");
    const auto n = e.get<std::int64_t>();
    if (n < 1) throw config_error(where + "." + key + " entries must be >= 1");
    out.push_back(static_cast<std::size_t>(n));
  }
  if (out.empty()) throw config_error(where + "." + key + " must not be empty");
  return out;
}

Eigen::MatrixXd matrix_from_json(const json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) throw config_error(where + " must be a nonempty array of rows");
  const std::size_t cols = v.front().is_array() ? v.front().size() : 0;
  if (cols == 0) throw config_error(where + " rows must be nonempty arrays");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(v.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto& row = v[i];
    if (!row.is_array() || row.size() != cols) throw config_error(where + " rows must be equal length");
    for (std::size_t c = 0; c < cols; ++c) {
      if (!row[c].is_number()) throw config_error(where + " entries must be numbers");
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = row[c].get<double>();
    }
  }
  return m;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Window window_from_json(const json& v, const std::string& where) {
  require_keys(v, {"lo", "hi"}, where);
  Window w;
  w.lo = get_double(v, "lo", where);
  w.hi = get_double(v, "hi", where);
  if (!(w.lo < w.hi)) throw config_error(where + " needs lo < hi");
  return w;
}

json window_to_json(const Window& w) { return json{{"lo", w.lo}, {"hi", w.hi}}; }

USpec u_spec_from_string(const std::string& s, const std::string& where) {
  USpec u;
  if (s == "one") {
    u.type = USpec::Type::One;
    return u;
  }
  std::string rest;
  if (s.rfind("cos", 0) == 0) {
    u.type = USpec::Type::Cos;
    rest = s.substr(3);
  } else if (s.rfind("sin", 0) == 0) {
    u.type = USpec::Type::Sin;
    rest = s.substr(3);
  } else {
    throw config_error(where + ": unrecognized test function '" + s + "'");
  }
  if (rest.empty()) {
    u.frequency = 1;
    return u;
  }
  for (const char c : rest)
    if (c < '0' || c > '9')
      throw config_error(where + ": unrecognized test function '" + s + "'");
  u.frequency = std::stoi(rest);
  if (u.frequency < 1) throw config_error(where + ": frequency must be >= 1");
  return u;
}

std::string check_op_name(const std::string& op, const std::string& where) {
  if (op != "Lprime" && op != "L")
    throw config_error(where + ".op must be 'Lprime' or 'L'");
  return op;
}

MatricesSection matrices_from_json(const json& j) {
  require_keys(j, {"n", "format"}, "matrices");
  MatricesSection s;
  s.n = static_cast<std::size_t>(get_uint(j, "n", "matrices"));
  if (s.n < 1) throw config_error("matrices.n must be >= 1");
  s.format = get_string_or(j, "format", "matrices", "csv");
  if (s.format != "csv" && s.format != "binary" && s.format != "both")
    throw config_error("matrices.format must be 'csv', 'binary' or 'both'");
  return s;
}

SpectrumSection spectrum_from_json(const json& j) {
  require_keys(j,
               {"n", "op", "window", "write_vectors", "with_reference",
                "reference_max_frequency", "extension_grid"},
               "spectrum");
  SpectrumSection s;
  s.n = static_cast<std::size_t>(get_uint(j, "n", "spectrum"));
  if (s.n < 1) throw config_error("spectrum.n must be >= 1");
  s.op = check_op_name(get_string_or(j, "op", "spectrum", "Lprime"), "spectrum");
  if (j.contains("window")) s.window = window_from_json(j.at("window"), "spectrum.window");
  s.write_vectors = get_bool_or(j, "write_vectors", "spectrum", false);
  s.with_reference = get_bool_or(j, "with_reference", "spectrum", false);
  s.reference_max_frequency = get_int_or(j, "reference_max_frequency", "spectrum", 8);
  if (s.reference_max_frequency < 0)
    throw config_error("spectrum.reference_max_frequency must be >= 0");
  s.extension_grid = static_cast<std::size_t>(get_uint_or(j, "extension_grid", "spectrum", 0));
  return s;
}

RatesSection rates_from_json(const json& j) {
  require_keys(j, {"ladder", "trials", "window", "op", "u", "dense_threshold", "off_sample_grid"},
               "rates");
  RatesSection s;
  s.ladder = get_size_ladder(j, "ladder", "rates");
  for (const auto n : s.ladder)
    if (n < 2) throw config_error("rates.ladder entries must be >= 2");
  s.trials = get_int_or(j, "trials", "rates", 10);
  if (s.trials < 1) throw config_error("rates.trials must be >= 1");
  s.window = window_from_json(require_field(j, "window", "rates"), "rates.window");
  s.op = check_op_name(get_string_or(j, "op", "rates", "Lprime"), "rates");
  s.u = u_spec_from_string(get_string_or(j, "u", "rates", "cos1"), "rates.u");
  s.dense_threshold =
      static_cast<std::size_t>(get_uint_or(j, "dense_threshold", "rates", 2048));
  s.off_sample_grid =
      static_cast<std::size_t>(get_uint_or(j, "off_sample_grid", "rates", 0));
  return s;
}

ConstantsSection constants_from_json(const json& j) {
  require_keys(j, {"C_L", "m", "alpha", "N_ladder"}, "constants");
  ConstantsSection s;
  s.C_L = get_double_or(j, "C_L", "constants", 1.0);
  s.m = get_double_or(j, "m", "constants", 1.0);
  s.alpha = get_double(j, "alpha", "constants");
  if (j.contains("N_ladder")) {
    const auto ladder = get_size_ladder(j, "N_ladder", "constants");
    s.N_ladder.assign(ladder.begin(), ladder.end());
    for (const auto n : s.N_ladder)
      if (n < 2) throw config_error("constants.N_ladder entries must be >= 2");
  }
  return s;
}

GcSection gc_from_json(const json& j) {
  require_keys(j, {"ladder", "seeds", "g", "probe_grid", "quadrature"}, "gc");
  GcSection s;
  s.ladder = get_size_ladder(j, "ladder", "gc");
  s.seeds = get_int_or(j, "seeds", "gc", 20);
  if (s.seeds < 1) throw config_error("gc.seeds must be >= 1");
  const json& g = require_field(j, "g", "gc");
  if (!g.is_array() || g.empty()) throw config_error("gc.g must be a nonempty array of strings");
  for (const auto& e : g) {
    if (!e.is_string()) throw config_error("gc.g entries must be strings");
    s.g.push_back(u_spec_from_string(e.get<std::string>(), "gc.g"));
  }
  s.probe_grid = static_cast<std::size_t>(get_uint_or(j, "probe_grid", "gc", 512));
  s.quadrature = static_cast<std::size_t>(get_uint_or(j, "quadrature", "gc", 32768));
  if (s.quadrature < 1) throw config_error("gc.quadrature must be >= 1");
  return s;
}

VerifySection verify_from_json(const json& j) {
  require_keys(j, {"grid", "delta_ladder", "probe_count"}, "verify");
  VerifySection s;
  s.grid = static_cast<std::size_t>(get_uint_or(j, "grid", "verify", 4096));
  if (s.grid < 1) throw config_error("verify.grid must be >= 1");
  if (j.contains("delta_ladder")) {
    const json& v = j.at("delta_ladder");
    if (!v.is_array()) throw config_error("verify.delta_ladder must be an array");
    for (const auto& e : v) {
      if (!e.is_number()) throw config_error("verify.delta_ladder entries must be numbers");
      const double d = e.get<double>();
      if (!(d > 0.0)) throw config_error("verify.delta_ladder entries must be positive");
      s.delta_ladder.push_back(d);
    }
  }
  s.probe_count = static_cast<std::size_t>(get_uint_or(j, "probe_count", "verify", 32));
  if (s.probe_count < 1) throw config_error("verify.probe_count must be >= 1");
  return s;
}

}  // namespace

nlohmann::json space_to_json(const SpaceDescriptor& space) {
  switch (space.kind) {
    case SpaceKind::Interval:
      return json{{"kind", "interval"}, {"length", space.length}};
    case SpaceKind::Circle:
      return json{{"kind", "circle"}, {"circumference", space.length}};
    case SpaceKind::Torus2:
      return json{{"kind", "torus2"},
                  {"circumference1", space.length},
                  {"circumference2", space.length2}};
    case SpaceKind::PointCloud: {
      json j{{"kind", "point_cloud"}, {"points", matrix_to_json(space.cloud)}};
      if (space.cloud_metric == CloudMetric::Precomputed)
        j["distances"] = matrix_to_json(space.cloud_distances);
      return j;
    }
  }
  throw config_error("unhandled space kind");
}

SpaceDescriptor space_from_json(const nlohmann::json& j) {
  const std::string kind = get_string(j, "kind", "space");
  try {
    if (kind == "interval") {
      require_keys(j, {"kind", "length"}, "space");
      return make_interval(get_double(j, "length", "space"));
    }
    if (kind == "circle") {
      require_keys(j, {"kind", "circumference"}, "space");
      return make_circle(get_double(j, "circumference", "space"));
    }
    if (kind == "torus2") {
      require_keys(j, {"kind", "circumference1", "circumference2"}, "space");
      return make_torus2(get_double(j, "circumference1", "space"),
                         get_double(j, "circumference2", "space"));
    }
    if (kind == "point_cloud") {
      require_keys(j, {"kind", "points", "distances"}, "space");
      Eigen::MatrixXd pts = matrix_from_json(require_field(j, "points", "space"), "space.points");
      if (j.contains("distances"))
        return make_point_cloud_with_distances(
            std::move(pts), matrix_from_json(j.at("distances"), "space.distances"));
      return make_point_cloud(std::move(pts));
    }
  } catch (const std::domain_error& e) {
    throw config_error(std::string("space: ") + e.what());
  }
  throw config_error("space.kind must be 'interval', 'circle', 'torus2' or 'point_cloud'");
}

nlohmann::json kernel_to_json(const KernelDescriptor& kernel) {
  json j;
  switch (kernel.form) {
    case KernelForm::BallIndicator:
      j = json{{"form", "ball"}, {"r", kernel.radius}};
      break;
    case KernelForm::Gaussian:
      j = json{{"form", "gaussian"}, {"bandwidth", kernel.bandwidth}};
      break;
    case KernelForm::TruncatedGaussian:
      j = json{{"form", "truncated_gaussian"},
               {"bandwidth", kernel.bandwidth},
               {"cutoff", kernel.cutoff}};
      break;
    case KernelForm::Constant:
      j = json{{"form", "constant"}, {"value", kernel.value}};
      break;
  }
  j["M"] = kernel.M;
  j["a"] = kernel.a;
  j["C_omega"] = kernel.C_omega;
  j["m_prime"] = kernel.m_prime;
  return j;
}

KernelDescriptor kernel_from_json(const nlohmann::json& j) {
  const std::string form = get_string(j, "form", "kernel");
  const double M = get_double_or(j, "M", "kernel", 1.0);
  const double a = get_double_or(j, "a", "kernel", 0.5);
  const double C_omega = get_double_or(j, "C_omega", "kernel", 0.0);
  const double m_prime = get_double_or(j, "m_prime", "kernel", 1.0);
  try {
    if (form == "ball") {
      require_keys(j, {"form", "r", "M", "a", "C_omega", "m_prime"}, "kernel");
      return make_ball_kernel(get_double(j, "r", "kernel"), M, a, C_omega, m_prime);
    }
    if (form == "gaussian") {
      require_keys(j, {"form", "bandwidth", "M", "a", "C_omega", "m_prime"}, "kernel");
      return make_gaussian_kernel(get_double(j, "bandwidth", "kernel"), M, a, C_omega, m_prime);
    }
    if (form == "truncated_gaussian") {
      require_keys(j, {"form", "bandwidth", "cutoff", "M", "a", "C_omega", "m_prime"}, "kernel");
      return make_truncated_gaussian_kernel(get_double(j, "bandwidth", "kernel"),
                                            get_double(j, "cutoff", "kernel"), M, a, C_omega,
                                            m_prime);
    }
    if (form == "constant") {
      require_keys(j, {"form", "value", "M", "a", "C_omega", "m_prime"}, "kernel");
      return make_constant_kernel(get_double(j, "value", "kernel"), M, a, C_omega, m_prime);
    }
  } catch (const std::domain_error& e) {
    throw config_error(std::string("kernel: ") + e.what());
  }
  throw config_error(
      "kernel.form must be 'ball', 'gaussian', 'truncated_gaussian' or 'constant'");
}

nlohmann::json config_to_json(const ExperimentConfig& config) {
  json j;
  j["space"] = space_to_json(config.space);
  j["kernel"] = kernel_to_json(config.kernel);
  j["seed"] = config.seed;
  if (config.matrices) {
    j["matrices"] = json{{"n", config.matrices->n}, {"format", config.matrices->format}};
  }
  if (config.spectrum) {
    json s{{"n", config.spectrum->n},
           {"op", config.spectrum->op},
           {"write_vectors", config.spectrum->write_vectors},
           {"with_reference", config.spectrum->with_reference},
           {"reference_max_frequency", config.spectrum->reference_max_frequency},
           {"extension_grid", config.spectrum->extension_grid}};
    if (config.spectrum->window) s["window"] = window_to_json(*config.spectrum->window);
    j["spectrum"] = std::move(s);
  }
  if (config.rates) {
    j["rates"] = json{{"ladder", config.rates->ladder},
                      {"trials", config.rates->trials},
                      {"window", window_to_json(config.rates->window)},
                      {"op", config.rates->op},
                      {"u", config.rates->u.label()},
                      {"dense_threshold", config.rates->dense_threshold},
                      {"off_sample_grid", config.rates->off_sample_grid}};
  }
  if (config.constants) {
    j["constants"] = json{{"C_L", config.constants->C_L},
                          {"m", config.constants->m},
                          {"alpha", config.constants->alpha},
                          {"N_ladder", config.constants->N_ladder}};
  }
  if (config.gc) {
    json labels = json::array();
    for (const auto& u : config.gc->g) labels.push_back(u.label());
    j["gc"] = json{{"ladder", config.gc->ladder},
                   {"seeds", config.gc->seeds},
                   {"g", std::move(labels)},
                   {"probe_grid", config.gc->probe_grid},
                   {"quadrature", config.gc->quadrature}};
  }
  if (config.verify) {
    j["verify"] = json{{"grid", config.verify->grid},
                       {"delta_ladder", config.verify->delta_ladder},
                       {"probe_count", config.verify->probe_count}};
  }
  return j;
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  try {
    require_keys(
        j, {"space", "kernel", "seed", "matrices", "spectrum", "rates", "constants", "gc", "verify"},
        "config");
    ExperimentConfig c;
    c.space = space_from_json(require_field(j, "space", "config"));
    c.kernel = kernel_from_json(require_field(j, "kernel", "config"));
    c.seed = get_uint_or(j, "seed", "config", 0);
    if (j.contains("matrices")) c.matrices = matrices_from_json(j.at("matrices"));
    if (j.contains("spectrum")) c.spectrum = spectrum_from_json(j.at("spectrum"));
    if (j.contains("rates")) c.rates = rates_from_json(j.at("rates"));
    if (j.contains("constants")) c.constants = constants_from_json(j.at("constants"));
    if (j.contains("gc")) c.gc = gc_from_json(j.at("gc"));
    if (j.contains("verify")) c.verify = verify_from_json(j.at("verify"));
    return c;
  } catch (const config_error&) {
    throw;
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("config parse: ") + e.what());
  }
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("config parse: ") + e.what());
  }
  return config_from_json(j);
}

std::string config_hash_hex(const ExperimentConfig& config) {
  return to_hex(fnv1a64(config_to_json(config).dump()));
}

}  // namespace glspec
