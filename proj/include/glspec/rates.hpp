#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "glspec/spectral.hpp"

namespace glspec {

struct RateConstantInputs {
  double M = 1.0;
  double a = 0.5;
  double C_L = 1.0;      // covering bound: N(X, delta) <= C_L delta^-m
  double m = 1.0;        // covering dimension
  double C_omega = 1.0;  // modulus bound: w(delta) <= C_omega delta^m_prime
  double m_prime = 1.0;
  double alpha = 1.0;
};

// Constants of the rate theorem, computed verbatim from its statement:
//   gamma   = 32 M^2/a^2 + (8/3) M/a
//   gamma~  = M^2 gamma / a
//   C_e     = (a/2)^2 / (32 M^2 + (8/3) M (a/2))
//   C_a     = C_L (16 C_omega / a)^(m/m')
//   C~      = C_L ((8 M C_omega / (a ln 2)) (1/a + 2M/a))^(m/m')
//   admissible iff alpha/gamma~ - m/(2m') > 1
//   bound(N) = 1 - (16 C~ / alpha^(2m/m'))
//                  * (gamma~ m' / (alpha m' - gamma~ m - gamma~ m'))
//                  * (N-1)^-(alpha/gamma~ - m/(2m'))
//              + 4 (C_a/C_e) exp(-(N-1) C_e)
struct RateConstants {
  RateConstantInputs in;
  double gamma = 0.0;
  double gamma_tilde = 0.0;
  double C_e = 0.0;
  double C_a = 0.0;
  double C_tilde = 0.0;
  bool admissible = false;
  double admissibility_excess = 0.0;  // alpha/gamma~ - m/(2m') - 1

  // Requires admissible and N >= 2.
  double probability_lower_bound(std::uint64_t N) const;
};

RateConstants rate_constants(const RateConstantInputs& in);

// min(1, 2 exp(-n eps^2 / (2V + (2/3) eps M_abs))), the Bernstein tail bound
// for the mean of n centered variables bounded by M_abs with variance <= V.
double bernstein_bound(double M_abs, double V, std::uint64_t n, double eps);

// sum_{n >= N} n^-sigma <= 1/((sigma-1) (N-1)^(sigma-1)), sigma > 1, N >= 2.
double sum_tail_bound(double sigma, std::uint64_t N);

// sum_{n >= N} exp(-n c) <= (1/c) exp(-(N-1) c).
double exp_tail(double c, std::uint64_t N);

// sup over a deterministic probe grid of |P_n g (x) - P_mu g (x)|, the
// Glivenko-Cantelli sup error; the continuous side is quadrature at the
// degree field's resolution. A certified lower bound of the true sup.
double gc_sup_error(const KernelDescriptor& kernel, const SpaceDescriptor& space,
                    const DegreeField& degrees, const SpaceFunction& g, std::size_t n,
                    std::uint64_t seed, std::size_t probe_grid = 512);

struct USpec {
  enum class Type { One, Cos, Sin };
  Type type = Type::Cos;
  int frequency = 1;

  std::string label() const;
  SpaceFunction evaluator(const SpaceDescriptor& space) const;
};

struct RateExperimentConfig {
  SpaceDescriptor space;
  KernelDescriptor kernel;
  Window window;
  UVariant op = UVariant::Identity;
  USpec u;
  std::vector<std::size_t> ladder;
  int trials = 10;
  std::uint64_t seed = 0;
  Eigen::Index dense_threshold = 2048;  // above this, matrix-free Lanczos path
  double margin = 1e-3;
  std::size_t off_sample_grid = 0;  // 0: error over sample points only
  int threads = 0;
};

struct RateTrialRow {
  std::size_t n = 0;
  int trial = 0;
  double error = 0.0;
  bool excluded = false;
  std::string reason;
};

struct RateLadderStat {
  std::size_t n = 0;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  int included = 0;
  int excluded = 0;
};

struct RateReport {
  std::vector<RateTrialRow> rows;
  std::vector<RateLadderStat> stats;
  bool fit_done = false;
  double fitted_exponent = 0.0;
  double fit_intercept = 0.0;
  // envelope(n) = envelope_scale * sqrt(ln n) / sqrt(n), scaled to dominate
  // the medians (the theorem's constant is not numerically exhibited).
  double envelope_scale = 0.0;
  std::uint64_t seed = 0;
  std::string u_label;
  Window window;
  int total_excluded = 0;
};

// For each n in the ladder and each trial: sample with the (seed, trial)
// stream, build the bundle, project rho_n u onto the window eigenspace of the
// chosen Laplacian, and record the sup-norm error. Trials hitting degenerate
// degrees or ill-posed windows are recorded with a reason and excluded from
// the medians. Fits log(median) against log(n) by least squares when every
// median is meaningfully positive.
RateReport run_rate_experiment(const RateExperimentConfig& config);

}  // namespace glspec
