#include "glspec/rates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "glspec/errors.hpp"
#include "glspec/rng.hpp"

namespace glspec {

namespace {

constexpr double kTau = 6.28318530717958647692;  // 2 pi

double power_m_ratio(double base, double m, double m_prime) { return std::pow(base, m / m_prime); }

}  // namespace

RateConstants rate_constants(const RateConstantInputs& in) {
  if (!(in.M >= 1.0) || !(in.a > 0.0) || in.a > 1.0)
    throw std::domain_error("rate constants need 0 < a <= 1 <= M");
  if (!(in.C_L > 0.0) || !(in.m > 0.0) || !(in.C_omega >= 0.0) || !(in.m_prime > 0.0))
    throw std::domain_error("rate constants need C_L > 0, m > 0, C_omega >= 0, m' > 0");
  if (!(in.alpha > 0.0)) throw std::domain_error("rate constants need alpha > 0");

  RateConstants c;
  c.in = in;
  c.gamma = 32.0 * in.M * in.M / (in.a * in.a) + (8.0 / 3.0) * in.M / in.a;
  c.gamma_tilde = in.M * in.M * c.gamma / in.a;
  const double half_a = 0.5 * in.a;
  c.C_e = half_a * half_a / (32.0 * in.M * in.M + (8.0 / 3.0) * in.M * half_a);
  c.C_a = in.C_L * power_m_ratio(16.0 * in.C_omega / in.a, in.m, in.m_prime);
  c.C_tilde = in.C_L * power_m_ratio((8.0 * in.M * in.C_omega / (in.a * std::log(2.0))) *
                                         (1.0 / in.a + 2.0 * in.M / in.a),
                                     in.m, in.m_prime);
  c.admissibility_excess = in.alpha / c.gamma_tilde - in.m / (2.0 * in.m_prime) - 1.0;
  c.admissible = c.admissibility_excess > 0.0;
  return c;
}

double RateConstants::probability_lower_bound(std::uint64_t N) const {
  if (!admissible)
    throw std::domain_error("probability bound requires the admissible regime");
  if (N < 2) throw std::domain_error("probability bound requires N >= 2");
  const double denom = in.alpha * in.m_prime - gamma_tilde * in.m - gamma_tilde * in.m_prime;
  if (!(denom > 0.0))
    throw std::domain_error("probability bound requires alpha m' > gamma~ (m + m')");
  const double exponent = in.alpha / gamma_tilde - in.m / (2.0 * in.m_prime);
  const double poly = (16.0 * C_tilde / std::pow(in.alpha, 2.0 * in.m / in.m_prime)) *
                      (gamma_tilde * in.m_prime / denom) *
                      std::pow(static_cast<double>(N - 1), -exponent);
  const double expo = 4.0 * (C_a / C_e) * std::exp(-static_cast<double>(N - 1) * C_e);
  return 1.0 - poly + expo;
}

double bernstein_bound(double M_abs, double V, std::uint64_t n, double eps) {
  if (!(M_abs >= 0.0) || !(V >= 0.0) || !(eps >= 0.0) || n < 1)
    throw std::domain_error("bernstein bound needs nonnegative parameters and n >= 1");
  const double denom = 2.0 * V + (2.0 / 3.0) * eps * M_abs;
  if (denom == 0.0) return eps > 0.0 ? 0.0 : 1.0;
  const double bound = 2.0 * std::exp(-static_cast<double>(n) * eps * eps / denom);
  return std::min(1.0, bound);
}

double sum_tail_bound(double sigma, std::uint64_t N) {
  if (!(sigma > 1.0)) throw std::domain_error("sum tail bound needs sigma > 1");
  if (N < 2) throw std::domain_error("sum tail bound needs N >= 2");
  return 1.0 / ((sigma - 1.0) * std::pow(static_cast<double>(N - 1), sigma - 1.0));
}

double exp_tail(double c, std::uint64_t N) {
  if (!(c > 0.0)) throw std::domain_error("exponential tail needs c > 0");
  if (N < 1) throw std::domain_error("exponential tail needs N >= 1");
  return (1.0 / c) * std::exp(-static_cast<double>(N - 1) * c);
}

double gc_sup_error(const KernelDescriptor& kernel, const SpaceDescriptor& space,
                    const DegreeField& degrees, const SpaceFunction& g, std::size_t n,
                    std::uint64_t seed, std::size_t probe_grid) {
  if (n < 1) throw std::domain_error("gc sup error needs n >= 1");
  const PointSet samples = sample_uniform(space, n, seed);
  const std::vector<Point> probes = uniform_grid(space, probe_grid);
  double sup = 0.0;
  for (const auto& x : probes) {
    double emp = 0.0;
    for (const auto& p : samples.points) {
      const double k = kernel_eval(kernel, space, x, p);
      if (k != 0.0) emp += k * g(p);
    }
    emp /= static_cast<double>(n);
    const double cont = integrate_kernel_against(kernel, space, g, x, degrees.resolution);
    sup = std::max(sup, std::abs(emp - cont));
  }
  return sup;
}

std::string USpec::label() const {
  switch (type) {
    case Type::One:
      return "one";
    case Type::Cos:
      return "cos" + std::to_string(frequency);
    case Type::Sin:
      return "sin" + std::to_string(frequency);
  }
  return "one";
}

SpaceFunction USpec::evaluator(const SpaceDescriptor& space) const {
  if (type == Type::One) return [](const Point&) { return 1.0; };
  if (frequency < 1) throw std::domain_error("oscillatory test functions need frequency >= 1");
  const bool cos_type = type == Type::Cos;
  const int k = frequency;
  switch (space.kind) {
    case SpaceKind::Interval: {
      // Neumann modes, so the frequency-k function is smooth on the interval.
      const double w = k * 3.14159265358979323846 / space.length;
      return [w, cos_type](const Point& x) { return cos_type ? std::cos(w * x.c0) : std::sin(w * x.c0); };
    }
    case SpaceKind::Circle: {
      const double w = k * kTau / space.length;
      return [w, cos_type](const Point& x) { return cos_type ? std::cos(w * x.c0) : std::sin(w * x.c0); };
    }
    case SpaceKind::Torus2: {
      const double w = k * kTau / space.length;
      return [w, cos_type](const Point& x) { return cos_type ? std::cos(w * x.c0) : std::sin(w * x.c0); };
    }
    case SpaceKind::PointCloud: {
      const double m = static_cast<double>(space.cloud.size());
      const double w = k * kTau / m;
      return [w, cos_type](const Point& x) {
        const double t = w * (x.c0 + 0.5);
        return cos_type ? std::cos(t) : std::sin(t);
      };
    }
  }
  return [](const Point&) { return 1.0; };
}

namespace {

double quantile_sorted(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) return std::numeric_limits<double>::quiet_NaN();
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double lanczos_projection_error(const OperatorBundle& bundle, const Eigen::MatrixXd& basis,
                                const Eigen::VectorXd& lambdas, UVariant variant,
                                const SpaceFunction& u, const std::vector<Point>* off_grid) {
  const Eigen::VectorXd u_samples = restrict_to_samples(u, bundle.points);
  const Eigen::VectorXd coeffs = basis.transpose() * u_samples;
  const Eigen::VectorXd proj = basis * coeffs;
  double err = (u_samples - proj).lpNorm<Eigen::Infinity>();
  if (off_grid != nullptr && !off_grid->empty()) {
    std::vector<ExtendedEigenfunction> extensions;
    extensions.reserve(static_cast<std::size_t>(basis.cols()));
    for (Eigen::Index c = 0; c < basis.cols(); ++c)
      extensions.push_back(variant == UVariant::Identity
                               ? nystrom_extend_identity(bundle, basis.col(c), lambdas(c))
                               : nystrom_extend_amv(bundle, basis.col(c), lambdas(c)));
    for (const auto& x : *off_grid) {
      double fx = 0.0;
      for (Eigen::Index c = 0; c < basis.cols(); ++c) fx += coeffs(c) * extensions[static_cast<std::size_t>(c)](x);
      err = std::max(err, std::abs(u(x) - fx));
    }
  }
  return err;
}

}  // namespace

RateReport run_rate_experiment(const RateExperimentConfig& config) {
  if (config.ladder.empty()) throw std::domain_error("rate experiment needs a nonempty ladder");
  if (config.trials < 1) throw std::domain_error("rate experiment needs at least one trial");
  for (const auto n : config.ladder)
    if (n < 2) throw std::domain_error("rate experiment ladder entries must be >= 2");

  RateReport report;
  report.seed = config.seed;
  report.u_label = config.u.label();
  report.window = config.window;
  const SpaceFunction u_eval = config.u.evaluator(config.space);

  std::vector<Point> off_grid;
  const std::vector<Point>* off_grid_ptr = nullptr;
  if (config.off_sample_grid > 0) {
    off_grid = uniform_grid(config.space, config.off_sample_grid);
    off_grid_ptr = &off_grid;
  }

  for (const auto n : config.ladder) {
    std::vector<double> included_errors;
    int excluded = 0;
    for (int trial = 0; trial < config.trials; ++trial) {
      const std::uint64_t stream =
          derive_stream(config.seed, (static_cast<std::uint64_t>(n) << 32) |
                                         static_cast<std::uint64_t>(trial));
      RateTrialRow row;
      row.n = n;
      row.trial = trial;
      try {
        const PointSet pts = sample_uniform(config.space, n, stream);
        const bool dense = static_cast<Eigen::Index>(n) <= config.dense_threshold;
        BundleOptions opts;
        opts.build_laplacians = dense;
        opts.threads = config.threads;
        const OperatorBundle bundle = build_bundle(config.kernel, pts, opts);
        if (!bundle.laplacians_available)
          throw degenerate_degree_error("bundle has a sample point of empirical degree zero");

        if (dense) {
          const Spectrum spectrum = config.op == UVariant::Identity
                                        ? decompose_identity_laplacian(bundle)
                                        : decompose_amv_laplacian(bundle);
          row.error = projection_error(bundle, spectrum, config.window, u_eval, off_grid_ptr,
                                       config.margin);
        } else {
          Eigen::VectorXd lambdas;
          const Eigen::MatrixXd basis =
              config.op == UVariant::Identity
                  ? window_basis_lanczos(bundle, config.window, config.margin, &lambdas)
                  : amv_window_basis_lanczos(bundle, config.window, config.margin, &lambdas);
          row.error = lanczos_projection_error(bundle, basis, lambdas, config.op, u_eval,
                                               off_grid_ptr);
        }
        included_errors.push_back(row.error);
      } catch (const degenerate_degree_error&) {
        row.excluded = true;
        row.reason = "degenerate_degree";
      } catch (const ill_posed_window_error&) {
        row.excluded = true;
        row.reason = "ill_posed_window";
      } catch (const std::domain_error&) {
        row.excluded = true;
        row.reason = "extension_singular";
      }
      if (row.excluded) ++excluded;
      report.rows.push_back(std::move(row));
    }

    std::sort(included_errors.begin(), included_errors.end());
    RateLadderStat stat;
    stat.n = n;
    stat.included = static_cast<int>(included_errors.size());
    stat.excluded = excluded;
    stat.median = quantile_sorted(included_errors, 0.5);
    stat.q1 = quantile_sorted(included_errors, 0.25);
    stat.q3 = quantile_sorted(included_errors, 0.75);
    report.stats.push_back(stat);
    report.total_excluded += excluded;
  }

  bool fittable = report.stats.size() >= 2;
  for (const auto& s : report.stats)
    if (!(s.included > 0) || !std::isfinite(s.median) || !(s.median > 0.0)) fittable = false;
  if (fittable) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double count = static_cast<double>(report.stats.size());
    for (const auto& s : report.stats) {
      const double x = std::log(static_cast<double>(s.n));
      const double y = std::log(s.median);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double det = count * sxx - sx * sx;
    if (det > 0.0) {
      report.fitted_exponent = (count * sxy - sx * sy) / det;
      report.fit_intercept = (sy - report.fitted_exponent * sx) / count;
      report.fit_done = true;
    }
  }

  double scale = 0.0;
  for (const auto& s : report.stats) {
    if (!(s.included > 0) || !std::isfinite(s.median)) continue;
    const double envelope_shape =
        std::sqrt(std::log(static_cast<double>(s.n))) / std::sqrt(static_cast<double>(s.n));
    if (envelope_shape > 0.0) scale = std::max(scale, s.median / envelope_shape);
  }
  report.envelope_scale = scale;
  return report;
}

}  // namespace glspec
