#include "glspec/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "glspec/errors.hpp"
#include "glspec/rng.hpp"

namespace glspec {

namespace {

void fix_column_signs(Eigen::MatrixXd& vectors) {
  for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
    Eigen::Index arg = 0;
    double best = -1.0;
    for (Eigen::Index r = 0; r < vectors.rows(); ++r) {
      const double mag = std::abs(vectors(r, c));
      if (mag > best) {
        best = mag;
        arg = r;
      }
    }
    if (vectors(arg, c) < 0.0) vectors.col(c) = -vectors.col(c);
  }
}

std::vector<std::pair<Eigen::Index, Eigen::Index>> cluster_groups(const Eigen::VectorXd& values,
                                                                  double gap_tol) {
  std::vector<std::pair<Eigen::Index, Eigen::Index>> groups;
  const Eigen::Index n = values.size();
  Eigen::Index begin = 0;
  for (Eigen::Index i = 1; i <= n; ++i) {
    if (i == n || values(i) - values(i - 1) > gap_tol) {
      groups.emplace_back(begin, i);
      begin = i;
    }
  }
  return groups;
}

void validate_window_shape(const Window& window) {
  if (!(window.lo < window.hi))
    throw ill_posed_window_error("window endpoints must satisfy lo < hi");
}

void validate_against_essential(const Spectrum& spectrum, const Window& window) {
  if (!spectrum.has_essential) return;
  if (window.lo < spectrum.essential_hi && window.hi > spectrum.essential_lo)
    throw ill_posed_window_error("window meets the essential spectrum of the operator");
}

std::vector<Eigen::Index> window_indices(const Spectrum& spectrum, const Window& window,
                                         double margin) {
  validate_window_shape(window);
  validate_against_essential(spectrum, window);
  std::vector<Eigen::Index> selected;
  for (Eigen::Index i = 0; i < spectrum.values.size(); ++i) {
    const double v = spectrum.values(i);
    if (std::abs(v - window.lo) < margin || std::abs(v - window.hi) < margin)
      throw ill_posed_window_error("an eigenvalue lies within the margin of a window endpoint");
    if (v > window.lo && v < window.hi) selected.push_back(i);
  }
  if (selected.empty()) throw ill_posed_window_error("window contains no eigenvalues");
  return selected;
}

}  // namespace

Spectrum eig_sym(const Eigen::MatrixXd& A, double gap_tol_scale, OperatorTag tag) {
  if (A.rows() != A.cols()) throw std::invalid_argument("eig_sym expects a square matrix");
  const double asym = (A - A.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12) throw std::invalid_argument("eig_sym expects a symmetric matrix (to 1e-12)");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(A);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("symmetric eigendecomposition failed to converge");

  Spectrum s;
  s.values = solver.eigenvalues();
  s.vectors = solver.eigenvectors();
  fix_column_signs(s.vectors);
  s.gap_tol = gap_tol_scale * std::max(1.0, A.cwiseAbs().maxCoeff());
  s.groups = cluster_groups(s.values, s.gap_tol);
  s.tag = tag;
  return s;
}

Spectrum decompose_identity_laplacian(const OperatorBundle& bundle, double gap_tol_scale) {
  if (!bundle.laplacians_available)
    throw degenerate_degree_error("bundle has a sample point of empirical degree zero");
  Spectrum s = eig_sym(bundle.Lprime, gap_tol_scale, OperatorTag::LaplacianIdentity);
  s.has_essential = true;
  s.essential_lo = 1.0;
  s.essential_hi = 1.0;
  return s;
}

Spectrum decompose_amv_laplacian(const OperatorBundle& bundle, double gap_tol_scale) {
  if (!bundle.laplacians_available)
    throw degenerate_degree_error("bundle has a sample point of empirical degree zero");
  Spectrum s = eig_sym(bundle.L, gap_tol_scale, OperatorTag::LaplacianAMV);
  s.has_essential = true;
  // m_n(X_i) = (1 + M_ii)/2 samples the range of m_n.
  s.essential_lo = 0.5 * (1.0 + bundle.Mdiag.minCoeff());
  s.essential_hi = 0.5 * (1.0 + bundle.Mdiag.maxCoeff());
  return s;
}

Eigen::MatrixXd spectral_window_basis(const Spectrum& spectrum, const Window& window,
                                      double margin) {
  const auto idx = window_indices(spectrum, window, margin);
  Eigen::MatrixXd basis(spectrum.vectors.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t c = 0; c < idx.size(); ++c) basis.col(static_cast<Eigen::Index>(c)) =
      spectrum.vectors.col(idx[c]);
  return basis;
}

Eigen::VectorXd spectral_window_project(const Spectrum& spectrum, const Window& window,
                                        const Eigen::VectorXd& target, double margin) {
  if (target.size() != spectrum.vectors.rows())
    throw std::invalid_argument("projection target has mismatched dimension");
  const Eigen::MatrixXd basis = spectral_window_basis(spectrum, window, margin);
  return basis * (basis.transpose() * target);
}

double projection_error(const OperatorBundle& bundle, const Spectrum& spectrum,
                        const Window& window, const SpaceFunction& u,
                        const std::vector<Point>* off_sample_grid, double margin) {
  const Eigen::VectorXd u_samples = restrict_to_samples(u, bundle.points);
  if (u_samples.size() != spectrum.vectors.rows())
    throw std::invalid_argument("spectrum and bundle have mismatched dimension");
  const auto idx = window_indices(spectrum, window, margin);
  Eigen::VectorXd proj = Eigen::VectorXd::Zero(u_samples.size());
  std::vector<double> coeffs(idx.size());
  for (std::size_t c = 0; c < idx.size(); ++c) {
    coeffs[c] = spectrum.vectors.col(idx[c]).dot(u_samples);
    proj += coeffs[c] * spectrum.vectors.col(idx[c]);
  }
  double err = (u_samples - proj).lpNorm<Eigen::Infinity>();

  if (off_sample_grid != nullptr && !off_sample_grid->empty()) {
    if (spectrum.tag == OperatorTag::Generic)
      throw std::invalid_argument("off-sample projection error requires a Laplacian spectrum");
    std::vector<ExtendedEigenfunction> extensions;
    extensions.reserve(idx.size());
    for (const auto i : idx) {
      const Eigen::VectorXd v = spectrum.vectors.col(i);
      extensions.push_back(spectrum.tag == OperatorTag::LaplacianIdentity
                               ? nystrom_extend_identity(bundle, v, spectrum.values(i))
                               : nystrom_extend_amv(bundle, v, spectrum.values(i)));
    }
    for (const auto& x : *off_sample_grid) {
      double fx = 0.0;
      for (std::size_t c = 0; c < extensions.size(); ++c) fx += coeffs[c] * extensions[c](x);
      err = std::max(err, std::abs(u(x) - fx));
    }
  }
  return err;
}

double ExtendedEigenfunction::operator()(const Point& x) const {
  const auto& pts = points.points;
  const auto n = static_cast<Eigen::Index>(pts.size());
  Eigen::VectorXd k(n);
  for (Eigen::Index j = 0; j < n; ++j)
    k(j) = kernel_eval(kernel, points.space, x, pts[static_cast<std::size_t>(j)]);
  const double dx = k.mean();
  if (!(dx > 0.0))
    throw degenerate_degree_error("empirical degree vanishes at the extension point");

  double numer = 0.0;
  double m_x = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (k(j) == 0.0) continue;
    const double h = 0.5 * k(j) * (1.0 / dx + 1.0 / D(j));
    numer += h * v(j);
    m_x += h;
  }
  numer /= static_cast<double>(n);
  m_x /= static_cast<double>(n);

  const double denom = (variant == UVariant::Identity) ? (1.0 - lambda) : (m_x - lambda);
  if (std::abs(denom) < 1e-14)
    throw std::domain_error("eigenfunction extension denominator vanishes at this point");
  return numer / denom;
}

namespace {

ExtendedEigenfunction make_extension(const OperatorBundle& bundle, const Eigen::VectorXd& v,
                                     double lambda, UVariant variant) {
  if (v.size() != static_cast<Eigen::Index>(bundle.n()))
    throw std::invalid_argument("eigenvector dimension does not match the bundle");
  if (!(bundle.min_degree > 0.0))
    throw degenerate_degree_error("bundle has a sample point of empirical degree zero");
  ExtendedEigenfunction f;
  f.variant = variant;
  f.lambda = lambda;
  f.v = v;
  f.points = bundle.points;
  f.kernel = bundle.kernel;
  f.D = bundle.D;
  return f;
}

}  // namespace

ExtendedEigenfunction nystrom_extend_identity(const OperatorBundle& bundle,
                                              const Eigen::VectorXd& v, double lambda) {
  if (std::abs(1.0 - lambda) < 1e-12)
    throw std::domain_error("identity-variant extension undefined at eigenvalue 1");
  return make_extension(bundle, v, lambda, UVariant::Identity);
}

ExtendedEigenfunction nystrom_extend_amv(const OperatorBundle& bundle, const Eigen::VectorXd& v,
                                         double lambda) {
  return make_extension(bundle, v, lambda, UVariant::AMV);
}

namespace {

struct TridiagonalRitz {
  Eigen::VectorXd values;    // ascending
  Eigen::MatrixXd vectors;   // columns match values
};

TridiagonalRitz solve_tridiagonal(const std::vector<double>& alpha,
                                  const std::vector<double>& beta) {
  const auto m = static_cast<Eigen::Index>(alpha.size());
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    t(i, i) = alpha[static_cast<std::size_t>(i)];
    if (i + 1 < m) {
      t(i, i + 1) = beta[static_cast<std::size_t>(i)];
      t(i + 1, i) = beta[static_cast<std::size_t>(i)];
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(t);
  return {solver.eigenvalues(), solver.eigenvectors()};
}

Eigen::VectorXd random_unit_vector(Eigen::Index n, std::uint64_t stream) {
  CounterRng rng(stream);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = 2.0 * rng.next_double() - 1.0;
  const double norm = v.norm();
  if (norm == 0.0) return Eigen::VectorXd::Unit(n, 0);
  return v / norm;
}

void reorthogonalize(Eigen::VectorXd& w, const std::vector<Eigen::VectorXd>& basis) {
  for (int pass = 0; pass < 2; ++pass)
    for (const auto& q : basis) w -= q.dot(w) * q;
}

}  // namespace

LanczosResult lanczos_largest(const LinearOperator& apply, Eigen::Index n, int want,
                              const LanczosOptions& options) {
  if (n < 1) throw std::invalid_argument("lanczos needs a positive dimension");
  const auto want_n = std::min<Eigen::Index>(std::max(want, 1), n);

  std::vector<Eigen::VectorXd> basis;
  std::vector<double> alpha;
  std::vector<double> beta;  // beta[i] links basis[i] and basis[i+1]
  int restarts = 0;
  basis.push_back(random_unit_vector(n, derive_stream(options.start_seed, 0)));

  Eigen::VectorXd w(n);
  LanczosResult result;
  TridiagonalRitz ritz;
  double last_beta = 0.0;

  const auto converged_count = [&](const TridiagonalRitz& r, double beta_m) {
    Eigen::Index ok = 0;
    const Eigen::Index m = r.values.size();
    for (Eigen::Index i = m - 1; i >= 0 && ok < want_n; --i) {
      const double residual = std::abs(beta_m * r.vectors(m - 1, i));
      if (residual > options.tol * std::max(1.0, std::abs(r.values(i)))) break;
      ++ok;
    }
    return ok;
  };

  const int max_iter = std::max(options.max_iterations, static_cast<int>(want_n) + 2);
  for (int it = 0; it < max_iter; ++it) {
    const auto m = basis.size();
    apply(basis[m - 1], w);
    if (m > 1 && beta[m - 2] != 0.0) w -= beta[m - 2] * basis[m - 2];
    const double a = basis[m - 1].dot(w);
    alpha.push_back(a);
    w -= a * basis[m - 1];
    reorthogonalize(w, basis);
    const double b = w.norm();
    last_beta = b;
    result.iterations = it + 1;

    const bool invariant = b < 1e-13;
    const bool basis_full = static_cast<Eigen::Index>(m) >= want_n;
    const bool check_now =
        invariant ||
        (basis_full && ((it % 4 == 3) || it + 1 == max_iter || static_cast<Eigen::Index>(m) == n));
    if (check_now) {
      ritz = solve_tridiagonal(alpha, beta);
      if (converged_count(ritz, invariant ? 0.0 : b) >= want_n) {
        result.converged = true;
        break;
      }
    }
    if (static_cast<Eigen::Index>(m) == n) break;

    if (invariant) {
      // Krylov space exhausted before enough pairs converged; inject a fresh
      // direction orthogonal to everything found so far.
      if (++restarts > 8) break;
      Eigen::VectorXd fresh =
          random_unit_vector(n, derive_stream(options.start_seed, static_cast<std::uint64_t>(restarts)));
      reorthogonalize(fresh, basis);
      const double norm = fresh.norm();
      if (norm < 1e-13) break;
      beta.push_back(0.0);
      basis.push_back(fresh / norm);
    } else {
      beta.push_back(b);
      basis.push_back(w / b);
    }
  }

  if (ritz.values.size() == 0 || !result.converged) {
    ritz = solve_tridiagonal(alpha, beta);
    if (!result.converged)
      result.converged = converged_count(ritz, basis.size() == static_cast<std::size_t>(n)
                                                   ? 0.0
                                                   : last_beta) >= want_n;
  }

  const Eigen::Index m = ritz.values.size();
  const Eigen::Index take = std::min(want_n, m);
  result.values.resize(take);
  result.vectors.resize(n, take);
  for (Eigen::Index c = 0; c < take; ++c) {
    const Eigen::Index src = m - 1 - c;  // descending
    result.values(c) = ritz.values(src);
    Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
    for (Eigen::Index j = 0; j < m; ++j) y += ritz.vectors(j, src) * basis[static_cast<std::size_t>(j)];
    const double norm = y.norm();
    if (norm > 0.0) y /= norm;
    result.vectors.col(c) = y;
  }
  fix_column_signs(result.vectors);
  return result;
}

namespace {

// Shared matrix-free window solve: the target operator's eigenvalue lambda
// relates to the Lanczos operator's theta by lambda = shift - theta, so
// window eigenpairs are extreme pairs of the applied operator. Converging
// Ritz values strictly below shift - window.hi - margin certifies that no
// window eigenvalue was missed.
Eigen::MatrixXd window_basis_lanczos_impl(const LinearOperator& apply, Eigen::Index n,
                                          const Window& window, double margin, double shift,
                                          Eigen::VectorXd* values_out,
                                          const LanczosOptions& options) {
  const double floor_theta = shift - window.hi - margin;
  LanczosResult res;
  int want = 8;
  for (;;) {
    res = lanczos_largest(apply, n, want, options);
    if (!res.converged)
      throw std::runtime_error("lanczos failed to converge while resolving the window");
    if (res.values(res.values.size() - 1) < floor_theta || want >= n) break;
    want = static_cast<int>(std::min<Eigen::Index>(n, 2 * want));
  }

  std::vector<Eigen::Index> selected;
  for (Eigen::Index i = 0; i < res.values.size(); ++i) {
    const double lambda = shift - res.values(i);
    if (lambda > window.hi + margin) continue;  // below the certified floor
    if (std::abs(lambda - window.lo) < margin || std::abs(lambda - window.hi) < margin)
      throw ill_posed_window_error("an eigenvalue lies within the margin of a window endpoint");
    if (lambda > window.lo && lambda < window.hi) selected.push_back(i);
  }
  if (selected.empty()) throw ill_posed_window_error("window contains no eigenvalues");

  Eigen::MatrixXd out(n, static_cast<Eigen::Index>(selected.size()));
  Eigen::VectorXd lambdas(static_cast<Eigen::Index>(selected.size()));
  for (std::size_t c = 0; c < selected.size(); ++c) {
    out.col(static_cast<Eigen::Index>(c)) = res.vectors.col(selected[c]);
    lambdas(static_cast<Eigen::Index>(c)) = shift - res.values(selected[c]);
  }
  if (values_out != nullptr) *values_out = lambdas;
  return out;
}

}  // namespace

Eigen::MatrixXd window_basis_lanczos(const OperatorBundle& bundle, const Window& window,
                                     double margin, Eigen::VectorXd* values_out,
                                     const LanczosOptions& options) {
  validate_window_shape(window);
  if (!(bundle.min_degree > 0.0))
    throw degenerate_degree_error("bundle has a sample point of empirical degree zero");
  if (window.lo < 1.0 && window.hi > 1.0)
    throw ill_posed_window_error("window meets the essential spectrum of the operator");

  const auto n = static_cast<Eigen::Index>(bundle.n());
  const Eigen::VectorXd inv_d = bundle.D.cwiseInverse();
  const LinearOperator apply = [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
    y.noalias() = bundle.K * x;
    y = 0.5 * (inv_d.cwiseProduct(y) + bundle.K * inv_d.cwiseProduct(x));
  };
  return window_basis_lanczos_impl(apply, n, window, margin, 1.0, values_out, options);
}

Eigen::MatrixXd amv_window_basis_lanczos(const OperatorBundle& bundle, const Window& window,
                                         double margin, Eigen::VectorXd* values_out,
                                         const LanczosOptions& options) {
  validate_window_shape(window);
  if (!(bundle.min_degree > 0.0))
    throw degenerate_degree_error("bundle has a sample point of empirical degree zero");
  const double ess_lo = 0.5 * (1.0 + bundle.Mdiag.minCoeff());
  const double ess_hi = 0.5 * (1.0 + bundle.Mdiag.maxCoeff());
  if (window.lo < ess_hi && window.hi > ess_lo)
    throw ill_posed_window_error("window meets the essential spectrum of the operator");

  const auto n = static_cast<Eigen::Index>(bundle.n());
  const Eigen::VectorXd inv_d = bundle.D.cwiseInverse();
  const double shift = 2.0;
  const LinearOperator apply = [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
    y.noalias() = bundle.K * x;
    y = 0.5 * (inv_d.cwiseProduct(y) + bundle.K * inv_d.cwiseProduct(x));
    y += (shift - 0.5) * x - 0.5 * bundle.Mdiag.cwiseProduct(x);
  };
  return window_basis_lanczos_impl(apply, n, window, margin, shift, values_out, options);
}

}  // namespace glspec
