#pragma once

#include <Eigen/Dense>
#include <functional>

#include "glspec/kernel.hpp"

namespace glspec {

using SpaceFunction = std::function<double(const Point&)>;

struct BundleOptions {
  // When false only K, D, Mdiag are assembled (enough for matrix-free work
  // with L' at large n).
  bool build_laplacians = true;
  int threads = 0;  // 0 = one thread per hardware core
};

// Sample matrices of the graph-Laplacian construction:
//   K_ij    = (1/n) k(X_i, X_j)
//   D_ii    = (1/n) sum_j k(X_i, X_j) = d_n(X_i)          (stored as a vector)
//   M_ii    = (1/n) sum_j k(X_i, X_j) / d_n(X_j)           (stored as a vector)
//   L       = (I + M - D^-1 K - K D^-1) / 2
//   L'      = I - (D^-1 K + K D^-1) / 2
// When min_degree == 0 the Laplacians are unavailable (K and D stay valid).
struct OperatorBundle {
  PointSet points;
  KernelDescriptor kernel;
  Eigen::MatrixXd K;
  Eigen::VectorXd D;
  Eigen::VectorXd Mdiag;
  Eigen::MatrixXd L;
  Eigen::MatrixXd Lprime;
  double min_degree = 0.0;
  bool laplacians_available = false;

  Eigen::Index n() const { return K.rows(); }
};

OperatorBundle build_bundle(const KernelDescriptor& kernel, const PointSet& points,
                            const BundleOptions& options = {});

// d_n(x) = (1/n) sum_j k(x, X_j), defined anywhere in the space.
double empirical_degree(const OperatorBundle& bundle, const Point& x);

// m_n(x) = (1/n) sum_j h_n(x, X_j); needs d_n(x) > 0.
double empirical_m(const OperatorBundle& bundle, const Point& x);

// P_n g(x) = (1/n) sum_j k(x, X_j) g(X_j).
double apply_P_n(const OperatorBundle& bundle, const SpaceFunction& g, const Point& x);

// T^ g(x) = (1/n) sum_j k(x,X_j)/2 (1/d_n(x) + 1/d_n(X_j)) g(X_j).
double apply_T_hat_n(const OperatorBundle& bundle, const SpaceFunction& g, const Point& x);

// T_n g(x) = (1/n) sum_j h_mu(x, X_j) g(X_j), with the continuous h_mu.
double apply_T_n(const OperatorBundle& bundle, const DegreeField& degrees, const SpaceFunction& g,
                 const Point& x);

enum class UVariant { AMV, Identity };

// AMV:      U_n g(x)  = m_n(x) g(x) - T^ g(x)
// Identity: U'_n g(x) = g(x) - T^ g(x)
double apply_U_n(const OperatorBundle& bundle, const SpaceFunction& g, const Point& x,
                 UVariant variant);

// rho_n f = (f(X_1), ..., f(X_n)).
Eigen::VectorXd restrict_to_samples(const SpaceFunction& f, const PointSet& points);

// Classical graph Laplacians, built for export/comparison only.
Eigen::MatrixXd unnormalized_laplacian(const OperatorBundle& bundle);          // D - K
Eigen::MatrixXd normalized_laplacian_sym(const OperatorBundle& bundle);        // I - D^-1/2 K D^-1/2
Eigen::MatrixXd normalized_laplacian_rw(const OperatorBundle& bundle);         // I - D^-1 K

}  // namespace glspec
