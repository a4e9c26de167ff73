#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "glspec/config.hpp"
#include "glspec/empirical.hpp"
#include "glspec/errors.hpp"
#include "glspec/io.hpp"
#include "glspec/rates.hpp"
#include "glspec/reference.hpp"
#include "glspec/rng.hpp"
#include "glspec/spectral.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kTwoPi = 6.28318530717958647692;

struct CliOptions {
  std::string config_path;
  std::string out_dir = "glspec_out";
  std::optional<std::uint64_t> seed_override;
  int threads = 0;
};

int effective_threads(int flag_value) {
  const char* env = std::getenv("GLSPEC_THREADS");
  if (env != nullptr && *env != '\0') {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != nullptr && *end == '\0' && v > 0) return static_cast<int>(v);
  }
  return flag_value;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return std::string(buf);
}

// Collects output files so the manifest can checksum each one; the timestamp
// lives only in the manifest, keeping the data files byte-reproducible.
class OutputSet {
 public:
  OutputSet(fs::path dir, std::string command, std::string config_hash, std::uint64_t seed)
      : dir_(std::move(dir)),
        command_(std::move(command)),
        config_hash_(std::move(config_hash)),
        seed_(seed) {
    fs::create_directories(dir_);
  }

  const fs::path& dir() const { return dir_; }
  const std::string& config_hash() const { return config_hash_; }
  std::uint64_t seed() const { return seed_; }

  fs::path reserve(const std::string& name) {
    names_.push_back(name);
    return dir_ / name;
  }

  void write_csv(const std::string& name, const Eigen::MatrixXd& m) {
    glspec::write_csv_matrix(reserve(name), m);
  }

  void write_binary(const std::string& name, const Eigen::MatrixXd& m) {
    glspec::write_binary_matrix(reserve(name), m);
  }

  void write_json(const std::string& name, const json& j) {
    glspec::write_text_file(reserve(name), j.dump(2) + "\n");
  }

  void write_text(const std::string& name, const std::string& text) {
    glspec::write_text_file(reserve(name), text);
  }

  void set_extra(const std::string& key, const json& value) { extra_[key] = value; }

  void finish() {
    json manifest;
    manifest["command"] = command_;
    manifest["config_hash"] = config_hash_;
    manifest["seed"] = seed_;
    manifest["timestamp_utc"] = utc_timestamp();
    for (const auto& [k, v] : extra_.items()) manifest[k] = v;
    json outputs = json::object();
    for (const auto& name : names_) outputs[name] = glspec::file_checksum_hex(dir_ / name);
    manifest["outputs"] = std::move(outputs);
    glspec::write_text_file(dir_ / "manifest.json", manifest.dump(2) + "\n");
  }

 private:
  fs::path dir_;
  std::string command_;
  std::string config_hash_;
  std::uint64_t seed_;
  std::vector<std::string> names_;
  json extra_ = json::object();
};

void write_matrix_formats(OutputSet& out, const std::string& base, const Eigen::MatrixXd& m,
                          const std::string& format) {
  if (format == "csv" || format == "both") out.write_csv(base + ".csv", m);
  if (format == "binary" || format == "both") out.write_binary(base + ".bin", m);
}

glspec::UVariant op_variant(const std::string& op) {
  return op == "L" ? glspec::UVariant::AMV : glspec::UVariant::Identity;
}

json window_json(const glspec::Window& w) { return json{{"lo", w.lo}, {"hi", w.hi}}; }

int cmd_matrices(const glspec::ExperimentConfig& config, const CliOptions& cli,
                 std::uint64_t seed, int threads) {
  if (!config.matrices) throw glspec::config_error("config has no 'matrices' section");
  const auto& sec = *config.matrices;

  const glspec::PointSet pts = glspec::sample_uniform(config.space, sec.n, seed);
  glspec::BundleOptions opts;
  opts.threads = threads;
  const glspec::OperatorBundle bundle = glspec::build_bundle(config.kernel, pts, opts);
  if (!bundle.laplacians_available)
    throw glspec::degenerate_degree_error("a sample point has empirical degree zero");

  OutputSet out(cli.out_dir, "matrices", glspec::config_hash_hex(config), seed);
  write_matrix_formats(out, "K", bundle.K, sec.format);
  write_matrix_formats(out, "D", bundle.D, sec.format);
  write_matrix_formats(out, "M_diag", bundle.Mdiag, sec.format);
  write_matrix_formats(out, "L", bundle.L, sec.format);
  write_matrix_formats(out, "L_prime", bundle.Lprime, sec.format);
  write_matrix_formats(out, "L_unnormalized", glspec::unnormalized_laplacian(bundle), sec.format);
  write_matrix_formats(out, "L_normalized_sym", glspec::normalized_laplacian_sym(bundle),
                       sec.format);
  write_matrix_formats(out, "L_random_walk", glspec::normalized_laplacian_rw(bundle), sec.format);
  out.set_extra("n", sec.n);
  out.set_extra("min_degree", bundle.min_degree);
  out.finish();
  std::cout << "wrote matrices for n=" << sec.n << " to " << out.dir().string()
            << " (min_degree=" << bundle.min_degree << ")\n";
  return 0;
}

int cmd_spectrum(const glspec::ExperimentConfig& config, const CliOptions& cli,
                 std::uint64_t seed, int threads) {
  if (!config.spectrum) throw glspec::config_error("config has no 'spectrum' section");
  const auto& sec = *config.spectrum;

  const glspec::PointSet pts = glspec::sample_uniform(config.space, sec.n, seed);
  glspec::BundleOptions opts;
  opts.threads = threads;
  const glspec::OperatorBundle bundle = glspec::build_bundle(config.kernel, pts, opts);
  if (!bundle.laplacians_available)
    throw glspec::degenerate_degree_error("a sample point has empirical degree zero");

  const glspec::Spectrum spectrum = sec.op == "L"
                                        ? glspec::decompose_amv_laplacian(bundle)
                                        : glspec::decompose_identity_laplacian(bundle);

  OutputSet out(cli.out_dir, "spectrum", glspec::config_hash_hex(config), seed);

  const auto n = spectrum.values.size();
  Eigen::MatrixXd table(n, 3);
  for (Eigen::Index g = 0; g < static_cast<Eigen::Index>(spectrum.groups.size()); ++g) {
    const auto [begin, end] = spectrum.groups[static_cast<std::size_t>(g)];
    for (Eigen::Index i = begin; i < end; ++i) {
      table(i, 0) = static_cast<double>(i);
      table(i, 1) = spectrum.values(i);
      table(i, 2) = static_cast<double>(g);
    }
  }
  out.write_csv("spectrum.csv", table);
  if (sec.write_vectors) out.write_csv("vectors.csv", spectrum.vectors);

  if (sec.with_reference) {
    if (config.space.kind != glspec::SpaceKind::Circle ||
        std::abs(config.space.length - kTwoPi) > 1e-12 ||
        config.kernel.form != glspec::KernelForm::BallIndicator)
      throw glspec::config_error(
          "reference spectrum needs the ball kernel on the circumference-2pi circle");
    const auto ref = glspec::circle_ball_spectrum(
        config.kernel.radius, sec.reference_max_frequency,
        sec.op == "L" ? glspec::RefOperator::U : glspec::RefOperator::Uprime);

    // Pair each reference level with the nearest empirical group mean.
    Eigen::MatrixXd matched(static_cast<Eigen::Index>(ref.levels.size()), 6);
    for (std::size_t r = 0; r < ref.levels.size(); ++r) {
      const auto& level = ref.levels[r];
      Eigen::Index best = 0;
      double best_err = std::numeric_limits<double>::infinity();
      double best_mean = 0.0;
      for (std::size_t g = 0; g < spectrum.groups.size(); ++g) {
        const auto [begin, end] = spectrum.groups[g];
        const double mean =
            spectrum.values.segment(begin, end - begin).mean();
        const double err = std::abs(mean - level.value);
        if (err < best_err) {
          best_err = err;
          best = static_cast<Eigen::Index>(g);
          best_mean = mean;
        }
      }
      const auto row = static_cast<Eigen::Index>(r);
      matched(row, 0) = static_cast<double>(level.kappa);
      matched(row, 1) = level.value;
      matched(row, 2) = static_cast<double>(level.multiplicity);
      matched(row, 3) = static_cast<double>(best);
      matched(row, 4) = best_mean;
      matched(row, 5) = best_err;
    }
    out.write_csv("reference_matched.csv", matched);
  }

  if (sec.window) {
    const Eigen::MatrixXd basis = glspec::spectral_window_basis(spectrum, *sec.window);
    std::vector<Eigen::Index> selected;
    for (Eigen::Index i = 0; i < spectrum.values.size(); ++i)
      if (spectrum.values(i) > sec.window->lo && spectrum.values(i) < sec.window->hi)
        selected.push_back(i);
    Eigen::MatrixXd wtable(static_cast<Eigen::Index>(selected.size()), 2);
    for (std::size_t c = 0; c < selected.size(); ++c) {
      wtable(static_cast<Eigen::Index>(c), 0) = static_cast<double>(selected[c]);
      wtable(static_cast<Eigen::Index>(c), 1) = spectrum.values(selected[c]);
    }
    out.write_csv("window_values.csv", wtable);
    out.write_csv("window_basis.csv", basis);

    if (sec.extension_grid > 0) {
      const auto grid = glspec::uniform_grid(config.space, sec.extension_grid);
      const int coord_cols = config.space.kind == glspec::SpaceKind::Torus2 ? 2 : 1;
      Eigen::MatrixXd ext(static_cast<Eigen::Index>(grid.size()),
                          coord_cols + static_cast<Eigen::Index>(selected.size()));
      std::vector<glspec::ExtendedEigenfunction> fs;
      for (const auto idx : selected) {
        const Eigen::VectorXd v = spectrum.vectors.col(idx);
        fs.push_back(sec.op == "L"
                         ? glspec::nystrom_extend_amv(bundle, v, spectrum.values(idx))
                         : glspec::nystrom_extend_identity(bundle, v, spectrum.values(idx)));
      }
      for (std::size_t r = 0; r < grid.size(); ++r) {
        const auto row = static_cast<Eigen::Index>(r);
        ext(row, 0) = grid[r].c0;
        if (coord_cols == 2) ext(row, 1) = grid[r].c1;
        for (std::size_t c = 0; c < fs.size(); ++c)
          ext(row, coord_cols + static_cast<Eigen::Index>(c)) = fs[c](grid[r]);
      }
      out.write_csv("window_extensions.csv", ext);
    }
  } else if (sec.extension_grid > 0) {
    throw glspec::config_error("spectrum.extension_grid needs spectrum.window");
  }

  out.set_extra("n", sec.n);
  out.set_extra("op", sec.op);
  out.set_extra("min_degree", bundle.min_degree);
  out.set_extra("groups", spectrum.groups.size());
  out.finish();
  std::cout << "wrote spectrum (" << sec.op << ", n=" << sec.n << ", "
            << spectrum.groups.size() << " groups) to " << out.dir().string() << "\n";
  return 0;
}

int cmd_rates(const glspec::ExperimentConfig& config, const CliOptions& cli, std::uint64_t seed,
              int threads) {
  if (!config.rates) throw glspec::config_error("config has no 'rates' section");
  const auto& sec = *config.rates;

  glspec::RateExperimentConfig rc;
  rc.space = config.space;
  rc.kernel = config.kernel;
  rc.window = sec.window;
  rc.op = op_variant(sec.op);
  rc.u = sec.u;
  rc.ladder = sec.ladder;
  rc.trials = sec.trials;
  rc.seed = seed;
  rc.dense_threshold = static_cast<Eigen::Index>(sec.dense_threshold);
  rc.off_sample_grid = sec.off_sample_grid;
  rc.threads = threads;
  const glspec::RateReport report = glspec::run_rate_experiment(rc);

  OutputSet out(cli.out_dir, "rates", glspec::config_hash_hex(config), seed);

  Eigen::MatrixXd trials(static_cast<Eigen::Index>(report.rows.size()), 4);
  for (std::size_t r = 0; r < report.rows.size(); ++r) {
    const auto& row = report.rows[r];
    const auto i = static_cast<Eigen::Index>(r);
    trials(i, 0) = static_cast<double>(row.n);
    trials(i, 1) = static_cast<double>(row.trial);
    trials(i, 2) = row.excluded ? 0.0 : row.error;
    trials(i, 3) = row.excluded ? 1.0 : 0.0;
  }
  out.write_csv("rates_trials.csv", trials);

  Eigen::MatrixXd medians(static_cast<Eigen::Index>(report.stats.size()), 6);
  for (std::size_t r = 0; r < report.stats.size(); ++r) {
    const auto& s = report.stats[r];
    const auto i = static_cast<Eigen::Index>(r);
    medians(i, 0) = static_cast<double>(s.n);
    medians(i, 1) = s.median;
    medians(i, 2) = s.q1;
    medians(i, 3) = s.q3;
    medians(i, 4) = static_cast<double>(s.included);
    medians(i, 5) = static_cast<double>(s.excluded);
  }
  out.write_csv("rates_medians.csv", medians);

  json jr;
  jr["config_hash"] = out.config_hash();
  jr["seed"] = seed;
  jr["u"] = report.u_label;
  jr["op"] = sec.op;
  jr["window"] = window_json(report.window);
  jr["total_excluded"] = report.total_excluded;
  jr["fit_done"] = report.fit_done;
  if (report.fit_done) {
    jr["fitted_exponent"] = report.fitted_exponent;
    jr["fit_intercept"] = report.fit_intercept;
  }
  jr["envelope"] = json{{"shape", "scale*sqrt(log(n))/sqrt(n)"},
                        {"scale", report.envelope_scale}};
  json stats = json::array();
  for (const auto& s : report.stats)
    stats.push_back(json{{"n", s.n},
                         {"median", s.included > 0 ? json(s.median) : json()},
                         {"q1", s.included > 0 ? json(s.q1) : json()},
                         {"q3", s.included > 0 ? json(s.q3) : json()},
                         {"included", s.included},
                         {"excluded", s.excluded}});
  jr["ladder"] = std::move(stats);
  json exclusions = json::array();
  for (const auto& row : report.rows)
    if (row.excluded)
      exclusions.push_back(json{{"n", row.n}, {"trial", row.trial}, {"reason", row.reason}});
  jr["exclusions"] = std::move(exclusions);
  out.write_json("rates_report.json", jr);

  std::vector<glspec::SvgSeries> series;
  glspec::SvgSeries med;
  med.label = "median error (" + report.u_label + ")";
  for (const auto& s : report.stats)
    if (s.included > 0 && s.median > 0.0)
      med.points.emplace_back(static_cast<double>(s.n), s.median);
  glspec::SvgSeries env;
  env.label = "envelope";
  env.color = "#c0392b";
  for (const auto& s : report.stats) {
    const double x = static_cast<double>(s.n);
    const double y = report.envelope_scale * std::sqrt(std::log(x)) / std::sqrt(x);
    if (y > 0.0) env.points.emplace_back(x, y);
  }
  if (!med.points.empty()) {
    series.push_back(std::move(med));
    if (!env.points.empty()) series.push_back(std::move(env));
    out.write_text("rates_plot.svg",
                   glspec::render_loglog_svg("projection error vs n [cfg " + out.config_hash() +
                                                 "]",
                                             "n", "sup error", series));
  }

  out.finish();
  std::cout << "rates: " << report.rows.size() << " trials, " << report.total_excluded
            << " excluded";
  if (report.fit_done)
    std::cout << ", fitted exponent " << report.fitted_exponent;
  std::cout << "; outputs in " << out.dir().string() << "\n";
  return 0;
}

int cmd_constants(const glspec::ExperimentConfig& config, const CliOptions& cli,
                  std::uint64_t seed) {
  if (!config.constants) throw glspec::config_error("config has no 'constants' section");
  const auto& sec = *config.constants;

  glspec::RateConstantInputs in;
  in.M = config.kernel.M;
  in.a = config.kernel.a;
  in.C_L = sec.C_L;
  in.m = sec.m;
  in.C_omega = config.kernel.C_omega;
  in.m_prime = config.kernel.m_prime;
  in.alpha = sec.alpha;
  const glspec::RateConstants c = glspec::rate_constants(in);

  json j;
  j["config_hash"] = glspec::config_hash_hex(config);
  j["seed"] = seed;
  j["inputs"] = json{{"M", in.M},       {"a", in.a},
                     {"C_L", in.C_L},   {"m", in.m},
                     {"C_omega", in.C_omega}, {"m_prime", in.m_prime},
                     {"alpha", in.alpha}};
  j["gamma"] = c.gamma;
  j["gamma_tilde"] = c.gamma_tilde;
  j["C_e"] = c.C_e;
  j["C_a"] = c.C_a;
  j["C_tilde"] = c.C_tilde;
  j["admissible"] = c.admissible;
  j["admissibility_excess"] = c.admissibility_excess;

  const double denom =
      in.alpha * in.m_prime - c.gamma_tilde * in.m - c.gamma_tilde * in.m_prime;
  if (!sec.N_ladder.empty()) {
    if (c.admissible && denom > 0.0) {
      json bounds = json::array();
      for (const auto N : sec.N_ladder)
        bounds.push_back(json{{"N", N}, {"lower_bound", c.probability_lower_bound(N)}});
      j["probability_bounds"] = std::move(bounds);
    } else {
      j["probability_bounds_omitted"] =
          c.admissible ? "alpha m' - gamma~ (m + m') is not positive" : "inadmissible parameters";
    }
  }

  std::cout << j.dump(2) << "\n";
  if (!cli.out_dir.empty()) {
    OutputSet out(cli.out_dir, "constants", glspec::config_hash_hex(config), seed);
    out.write_json("constants.json", j);
    if (j.contains("probability_bounds")) {
      Eigen::MatrixXd table(static_cast<Eigen::Index>(sec.N_ladder.size()), 2);
      for (std::size_t r = 0; r < sec.N_ladder.size(); ++r) {
        table(static_cast<Eigen::Index>(r), 0) = static_cast<double>(sec.N_ladder[r]);
        table(static_cast<Eigen::Index>(r), 1) = c.probability_lower_bound(sec.N_ladder[r]);
      }
      out.write_csv("probability_bounds.csv", table);
    }
    out.finish();
  }
  return 0;
}

int cmd_gc(const glspec::ExperimentConfig& config, const CliOptions& cli, std::uint64_t seed) {
  if (!config.gc) throw glspec::config_error("config has no 'gc' section");
  const auto& sec = *config.gc;

  const auto degrees = glspec::make_degree_field(config.kernel, config.space, sec.quadrature);

  struct GcRow {
    std::size_t g_index;
    std::size_t n;
    int seed_index;
    double error;
  };
  std::vector<GcRow> rows;
  std::map<std::pair<std::size_t, std::size_t>, std::vector<double>> samples;

  for (std::size_t gi = 0; gi < sec.g.size(); ++gi) {
    const glspec::SpaceFunction g_eval = sec.g[gi].evaluator(config.space);
    const std::uint64_t g_stream = glspec::derive_stream(seed, gi);
    for (const auto n : sec.ladder) {
      for (int s = 0; s < sec.seeds; ++s) {
        const std::uint64_t stream = glspec::derive_stream(
            g_stream, (static_cast<std::uint64_t>(n) << 32) | static_cast<std::uint64_t>(s));
        const double err = glspec::gc_sup_error(config.kernel, config.space, degrees, g_eval, n,
                                                stream, sec.probe_grid);
        rows.push_back({gi, n, s, err});
        samples[{gi, n}].push_back(err);
      }
    }
  }

  OutputSet out(cli.out_dir, "gc", glspec::config_hash_hex(config), seed);

  Eigen::MatrixXd table(static_cast<Eigen::Index>(rows.size()), 4);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto i = static_cast<Eigen::Index>(r);
    table(i, 0) = static_cast<double>(rows[r].g_index);
    table(i, 1) = static_cast<double>(rows[r].n);
    table(i, 2) = static_cast<double>(rows[r].seed_index);
    table(i, 3) = rows[r].error;
  }
  out.write_csv("gc_trials.csv", table);

  json jmed = json::array();
  Eigen::MatrixXd med_table(static_cast<Eigen::Index>(samples.size()), 3);
  Eigen::Index mi = 0;
  std::vector<glspec::SvgSeries> series;
  std::map<std::size_t, glspec::SvgSeries> per_g;
  const char* palette[] = {"#1f6fb2", "#c0392b", "#27ae60", "#8e44ad"};
  for (auto& [key, vals] : samples) {
    std::sort(vals.begin(), vals.end());
    const double median = vals.size() % 2 == 1
                              ? vals[vals.size() / 2]
                              : 0.5 * (vals[vals.size() / 2 - 1] + vals[vals.size() / 2]);
    med_table(mi, 0) = static_cast<double>(key.first);
    med_table(mi, 1) = static_cast<double>(key.second);
    med_table(mi, 2) = median;
    ++mi;
    jmed.push_back(
        json{{"g", sec.g[key.first].label()}, {"n", key.second}, {"median", median}});
    auto& s = per_g[key.first];
    if (s.points.empty()) {
      s.label = sec.g[key.first].label();
      s.color = palette[key.first % 4];
    }
    if (median > 0.0) s.points.emplace_back(static_cast<double>(key.second), median);
  }
  out.write_csv("gc_medians.csv", med_table);

  json jr;
  jr["config_hash"] = out.config_hash();
  jr["seed"] = seed;
  json glabels = json::array();
  for (const auto& u : sec.g) glabels.push_back(u.label());
  jr["g"] = std::move(glabels);
  jr["seeds"] = sec.seeds;
  jr["probe_grid"] = sec.probe_grid;
  jr["quadrature"] = sec.quadrature;
  jr["medians"] = std::move(jmed);
  out.write_json("gc_report.json", jr);

  for (auto& [gi, s] : per_g)
    if (!s.points.empty()) series.push_back(std::move(s));
  if (!series.empty())
    out.write_text("gc_plot.svg",
                   glspec::render_loglog_svg(
                       "Glivenko-Cantelli sup error [cfg " + out.config_hash() + "]", "n",
                       "median sup error", series));

  out.finish();
  std::cout << "gc: " << rows.size() << " runs; outputs in " << out.dir().string() << "\n";
  return 0;
}

int cmd_verify(const glspec::ExperimentConfig& config, const CliOptions& cli,
               std::uint64_t seed) {
  if (!config.verify) throw glspec::config_error("config has no 'verify' section");
  const auto& sec = *config.verify;

  const glspec::MembershipReport report = glspec::verify_membership(
      config.kernel, config.space, sec.grid, sec.delta_ladder, sec.probe_count);

  json j;
  j["config_hash"] = glspec::config_hash_hex(config);
  j["seed"] = seed;
  j["upper_bound"] = json{{"ok", report.upper_bound_ok},
                          {"max_kernel_value", report.max_kernel_value},
                          {"M", config.kernel.M}};
  j["lower_bound"] = json{{"ok", report.lower_bound_ok},
                          {"min_degree", report.min_degree},
                          {"a", config.kernel.a},
                          {"margin", report.lower_margin}};
  json rows = json::array();
  for (const auto& row : report.modulus_rows)
    rows.push_back(json{{"delta", row.delta},
                        {"estimate", row.estimate},
                        {"declared_bound", row.declared_bound},
                        {"ok", row.ok}});
  j["modulus"] = json{{"ok", report.modulus_ok}, {"rows", std::move(rows)}};
  j["pass"] = report.pass;

  std::cout << j.dump(2) << "\n";
  if (!cli.out_dir.empty()) {
    OutputSet out(cli.out_dir, "verify", glspec::config_hash_hex(config), seed);
    out.write_json("verify_report.json", j);
    out.finish();
  }
  return report.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph-Laplacian operator toolkit: sample matrices, spectra, reference "
               "operators, convergence-rate experiments and kernel-class checks"};
  app.require_subcommand(1);

  CliOptions cli;
  const auto add_common = [&cli](CLI::App* sub) {
    sub->add_option("--config", cli.config_path, "JSON experiment config")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", cli.out_dir, "output directory (default glspec_out)");
    sub->add_option("--seed", cli.seed_override, "override the config seed");
    sub->add_option("--threads", cli.threads,
                    "worker threads, 0 = all cores (GLSPEC_THREADS overrides)");
  };

  CLI::App* c_matrices = app.add_subcommand("matrices", "export K, D, M, L, L' and the classical Laplacians");
  CLI::App* c_spectrum = app.add_subcommand("spectrum", "eigendecomposition with multiplicity groups");
  CLI::App* c_rates = app.add_subcommand("rates", "seeded projection-error rate experiment");
  CLI::App* c_constants = app.add_subcommand("constants", "rate-theorem constants and probability bounds");
  CLI::App* c_gc = app.add_subcommand("gc", "Glivenko-Cantelli sup-error experiment");
  CLI::App* c_verify = app.add_subcommand("verify", "check the kernel-class membership bounds");
  for (CLI::App* sub : {c_matrices, c_spectrum, c_rates, c_constants, c_gc, c_verify})
    add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    const glspec::ExperimentConfig config = glspec::load_config(cli.config_path);
    const std::uint64_t seed = cli.seed_override.value_or(config.seed);
    const int threads = effective_threads(cli.threads);

    if (c_matrices->parsed()) return cmd_matrices(config, cli, seed, threads);
    if (c_spectrum->parsed()) return cmd_spectrum(config, cli, seed, threads);
    if (c_rates->parsed()) return cmd_rates(config, cli, seed, threads);
    if (c_constants->parsed()) return cmd_constants(config, cli, seed);
    if (c_gc->parsed()) return cmd_gc(config, cli, seed);
    if (c_verify->parsed()) return cmd_verify(config, cli, seed);
    std::cerr << "no subcommand selected\n";
    return 2;
  } catch (const glspec::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const glspec::degenerate_degree_error& e) {
    std::cerr << "degenerate degree: " << e.what() << "\n";
    return 3;
  } catch (const glspec::ill_posed_window_error& e) {
    std::cerr << "ill-posed window: " << e.what() << "\n";
    return 4;
  } catch (const glspec::io_error& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return 5;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
