#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "glspec/empirical.hpp"

namespace glspec {

enum class OperatorTag { Generic, LaplacianAMV, LaplacianIdentity };

// Full eigendecomposition of a symmetric matrix: ascending eigenvalues,
// orthonormal eigenvectors, and multiplicity groups clustered with an
// absolute gap tolerance. For the Laplacian tags the essential-spectrum
// interval is carried along so window validation can honor it ({1} for the
// identity variant, the sampled range of m_n for AMV).
struct Spectrum {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> groups;  // [begin, end) index ranges
  double gap_tol = 0.0;
  OperatorTag tag = OperatorTag::Generic;
  bool has_essential = false;
  double essential_lo = 0.0;
  double essential_hi = 0.0;
};

// Decomposes a symmetric matrix (symmetry checked to 1e-12). Gap tolerance is
// gap_tol_scale * max(1, max |A_ij|). Eigenvector sign convention: the
// largest-magnitude entry (first such index on ties) is made positive.
Spectrum eig_sym(const Eigen::MatrixXd& A, double gap_tol_scale = 1e-6,
                 OperatorTag tag = OperatorTag::Generic);

Spectrum decompose_identity_laplacian(const OperatorBundle& bundle, double gap_tol_scale = 1e-6);
Spectrum decompose_amv_laplacian(const OperatorBundle& bundle, double gap_tol_scale = 1e-6);

struct Window {
  double lo = 0.0;
  double hi = 0.0;
};

// Orthonormal basis of the span of eigenvectors with eigenvalues inside the
// open window. Throws ill_posed_window_error if any eigenvalue lies within
// `margin` of a window endpoint, or if the window meets the essential
// spectrum carried by the Spectrum tag.
Eigen::MatrixXd spectral_window_basis(const Spectrum& spectrum, const Window& window,
                                      double margin = 1e-3);

// Orthogonal projection of `target` onto that span (Pr_n applied to a vector).
Eigen::VectorXd spectral_window_project(const Spectrum& spectrum, const Window& window,
                                        const Eigen::VectorXd& target, double margin = 1e-3);

// sup_i |u(X_i) - (Pr rho_n u)_i|; when an off-sample grid is supplied the
// Nystrom-extended projection is also compared with u there and the larger
// sup is returned.
double projection_error(const OperatorBundle& bundle, const Spectrum& spectrum,
                        const Window& window, const SpaceFunction& u,
                        const std::vector<Point>* off_sample_grid = nullptr,
                        double margin = 1e-3);

// Eigenvector v of L or L' extended to an eigenfunction of U_n / U'_n on the
// whole space:
//   Identity: f(x) = (1/n) sum_j h_n(X_j, x) v_j / (1 - lambda)
//   AMV:      f(x) = (1/n) sum_j h_n(X_j, x) v_j / (m_n(x) - lambda)
// Both satisfy f(X_i) = v_i.
struct ExtendedEigenfunction {
  UVariant variant = UVariant::Identity;
  double lambda = 0.0;
  Eigen::VectorXd v;
  PointSet points;
  KernelDescriptor kernel;
  Eigen::VectorXd D;

  double operator()(const Point& x) const;
};

ExtendedEigenfunction nystrom_extend_identity(const OperatorBundle& bundle,
                                              const Eigen::VectorXd& v, double lambda);
ExtendedEigenfunction nystrom_extend_amv(const OperatorBundle& bundle, const Eigen::VectorXd& v,
                                         double lambda);

// Lanczos with full reorthogonalization for the largest eigenpairs of a
// symmetric operator given by its matvec. Deterministic start vector.
struct LanczosOptions {
  int max_iterations = 400;
  double tol = 1e-10;
  std::uint64_t start_seed = 0x6c616e637aull;
};

struct LanczosResult {
  Eigen::VectorXd values;   // descending, length = converged count requested
  Eigen::MatrixXd vectors;  // matching columns
  bool converged = false;
  int iterations = 0;
};

using LinearOperator = std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>;

LanczosResult lanczos_largest(const LinearOperator& apply, Eigen::Index n, int want,
                              const LanczosOptions& options = {});

// Window eigenbasis of L' computed without materializing it, via Lanczos on
// A = I - L' = (D^-1 K + K D^-1)/2 (window eigenpairs of L' are extreme
// eigenpairs of A). Same validation semantics as spectral_window_basis.
// Outputs the matched eigenvalues of L' through `values_out` when non-null.
Eigen::MatrixXd window_basis_lanczos(const OperatorBundle& bundle, const Window& window,
                                     double margin = 1e-3, Eigen::VectorXd* values_out = nullptr,
                                     const LanczosOptions& options = {});

// Same matrix-free window basis for L (the AMV variant), via Lanczos on
// 2I - L.
Eigen::MatrixXd amv_window_basis_lanczos(const OperatorBundle& bundle, const Window& window,
                                         double margin = 1e-3,
                                         Eigen::VectorXd* values_out = nullptr,
                                         const LanczosOptions& options = {});

}  // namespace glspec
