#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "glspec/kernel.hpp"

namespace glspec {

enum class RefOperator { T, U, Uprime };

struct ReferenceLevel {
  int kappa = 0;
  double value = 0.0;
  int multiplicity = 1;
};

// Analytic spectrum of the continuous operators for the ball kernel on the
// uniform circle of circumference 2*pi, where d_mu = r/pi and
// T f(x) = (1/2r) * integral of f over [x-r, x+r]:
//   T eigenvalues: 1 (constants) and sin(kr)/(kr) with multiplicity 2;
//   U' = I - T and (since m_mu = 1 here) U eigenvalues coincide with U'.
struct ReferenceSpectrum {
  RefOperator op = RefOperator::T;
  double radius = 0.0;
  std::vector<ReferenceLevel> levels;

  // kappa = 0: constant 1; otherwise which = 0 -> cos(kappa theta),
  // which = 1 -> sin(kappa theta), theta the circle coordinate.
  static double eigenfunction(int kappa, int which, const Point& x);
};

ReferenceSpectrum circle_ball_spectrum(double r, int max_frequency,
                                       RefOperator op = RefOperator::T);

// Node layout used by dense_grid_operator (midpoint grid; Torus2 product
// grid; PointCloud returns the cloud itself).
std::vector<Point> dense_grid_nodes(const SpaceDescriptor& space, std::size_t grid_n);

// Brute-force discretization of T_mu / U_mu / U'_mu on grid_n nodes. Entries
// are product-integration weights: T_ij = integral of h_mu(x_i, .) over cell
// j, with the kernel's support boundary clipped analytically on the 1-D kinds
// (a plain midpoint sample of a discontinuous kernel costs three orders of
// magnitude in eigenvalue accuracy). The result is symmetrized; U uses the
// grid's own row sums as m so that U 1 = 0 holds exactly.
Eigen::MatrixXd dense_grid_operator(const KernelDescriptor& kernel, const SpaceDescriptor& space,
                                    const DegreeField& degrees, std::size_t grid_n,
                                    RefOperator op);

// [min, max] of m_mu over the grid; validates windows against rg(m_mu) for
// U_mu eigenvalue claims.
std::pair<double, double> m_range(const KernelDescriptor& kernel, const SpaceDescriptor& space,
                                  const DegreeField& degrees, std::size_t grid_n);

}  // namespace glspec
