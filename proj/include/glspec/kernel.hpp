#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "glspec/space.hpp"

namespace glspec {

enum class KernelForm { BallIndicator, Gaussian, TruncatedGaussian, Constant };

// A symmetric non-negative kernel together with its declared constants:
// M bounds k from above (UB), a bounds the degree d_mu from below (LB), and
// (C_omega, m_prime) bound the L1 continuity modulus, w(delta) <=
// C_omega * delta^m_prime (C). The constants are hypotheses supplied by the
// caller and checked by verify_membership, not inferred.
struct KernelDescriptor {
  KernelForm form = KernelForm::BallIndicator;
  double radius = 0.0;     // BallIndicator: ball radius r
  double bandwidth = 0.0;  // Gaussian / TruncatedGaussian: t in exp(-d^2/t)
  double cutoff = 0.0;     // TruncatedGaussian: support cutoff
  double value = 1.0;      // Constant: c
  double M = 1.0;
  double a = 0.5;
  double C_omega = 0.0;
  double m_prime = 1.0;
};

KernelDescriptor make_ball_kernel(double radius, double M, double a, double C_omega,
                                  double m_prime);
KernelDescriptor make_gaussian_kernel(double bandwidth, double M, double a, double C_omega,
                                      double m_prime);
KernelDescriptor make_truncated_gaussian_kernel(double bandwidth, double cutoff, double M,
                                                double a, double C_omega, double m_prime);
KernelDescriptor make_constant_kernel(double value, double M, double a, double C_omega,
                                      double m_prime);

double kernel_eval(const KernelDescriptor& kernel, const SpaceDescriptor& space, const Point& x,
                   const Point& y);

enum class DegreeMethod { ClosedForm, Quadrature };

// Evaluator of the continuous degree d_mu(x) = integral of k(x, .) d mu.
// Closed form where one exists (Constant everywhere; BallIndicator on the
// analytic kinds via ball_measure; every form on PointCloud by exact finite
// sum); composite midpoint quadrature otherwise.
struct DegreeField {
  KernelDescriptor kernel;
  SpaceDescriptor space;
  DegreeMethod method = DegreeMethod::Quadrature;
  std::size_t resolution = 4096;
  std::vector<Point> quad_nodes;  // cached quadrature grid (Quadrature method)

  double eval(const Point& x) const;
};

DegreeField make_degree_field(const KernelDescriptor& kernel, const SpaceDescriptor& space,
                              std::size_t resolution = 4096);
double degree(const KernelDescriptor& kernel, const SpaceDescriptor& space, const Point& x,
              std::size_t resolution = 4096);

// h_mu(x,y) = k(x,y)/2 * (1/d_mu(x) + 1/d_mu(y)).
double h_kernel(const KernelDescriptor& kernel, const DegreeField& degrees, const Point& x,
                const Point& y);

// m_mu(x) = integral of h_mu(x, .) d mu, by the same quadrature rules as
// DegreeField.
double m_function(const KernelDescriptor& kernel, const SpaceDescriptor& space,
                  const DegreeField& degrees, const Point& x);

// integral of k(x, .) g(.) d mu by quadrature at the given resolution
// (P_mu g(x), the continuous counterpart of apply_P_n).
double integrate_kernel_against(const KernelDescriptor& kernel, const SpaceDescriptor& space,
                                const std::function<double(const Point&)>& g, const Point& x,
                                std::size_t resolution = 4096);

// Probe-based lower-bound estimate of the continuity modulus
// sup_x integral of sup_{y in B_delta(x)} |k(x,z) - k(y,z)| d mu(z):
// probe_count deterministic centers, a fan of 32 perturbations inside each
// B_delta(x), fine-grid z integration.
double modulus_estimate(const KernelDescriptor& kernel, const SpaceDescriptor& space, double delta,
                        std::size_t probe_count = 32);

struct ModulusRow {
  double delta = 0.0;
  double estimate = 0.0;
  double declared_bound = 0.0;
  bool ok = false;
};

struct MembershipReport {
  bool upper_bound_ok = false;  // k <= M on probe pairs
  double max_kernel_value = 0.0;
  bool lower_bound_ok = false;  // inf d_mu > a on a grid
  double min_degree = 0.0;
  double lower_margin = 0.0;  // min_degree - a
  std::vector<ModulusRow> modulus_rows;
  bool modulus_ok = false;
  bool pass = false;
};

// Numerically checks (UB), (LB), (C) for the kernel/space pair; failures are
// report entries, not exceptions. An empty delta ladder selects a default
// log-spaced ladder in [1e-3, 1e-1].
MembershipReport verify_membership(const KernelDescriptor& kernel, const SpaceDescriptor& space,
                                   std::size_t grid, const std::vector<double>& delta_ladder = {},
                                   std::size_t probe_count = 32);

}  // namespace glspec
