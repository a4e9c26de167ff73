#include "glspec/empirical.hpp"

#include <cmath>
#include <stdexcept>

#include "glspec/errors.hpp"
#include "glspec/parallel.hpp"

namespace glspec {

OperatorBundle build_bundle(const KernelDescriptor& kernel, const PointSet& points,
                            const BundleOptions& options) {
  const auto n = static_cast<Eigen::Index>(points.size());
  if (n < 1) throw std::domain_error("bundle needs at least one sample point");

  OperatorBundle b;
  b.points = points;
  b.kernel = kernel;
  b.K.resize(n, n);

  const double inv_n = 1.0 / static_cast<double>(n);
  const auto& pts = points.points;
  const auto& space = points.space;
  parallel_for(static_cast<std::size_t>(n), options.threads, [&](std::size_t i) {
    const auto ii = static_cast<Eigen::Index>(i);
    for (Eigen::Index j = ii; j < n; ++j)
      b.K(ii, j) = inv_n * kernel_eval(kernel, space, pts[i], pts[static_cast<std::size_t>(j)]);
  });
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < i; ++j) b.K(i, j) = b.K(j, i);

  b.D = b.K.rowwise().sum();
  b.min_degree = b.D.minCoeff();
  if (!(b.min_degree > 0.0)) {
    b.laplacians_available = false;
    return b;
  }

  const Eigen::VectorXd inv_d = b.D.cwiseInverse();
  b.Mdiag = b.K * inv_d;
  b.laplacians_available = true;
  if (!options.build_laplacians) return b;

  b.Lprime.resize(n, n);
  parallel_for(static_cast<std::size_t>(n), options.threads, [&](std::size_t i) {
    const auto ii = static_cast<Eigen::Index>(i);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double half_sym = 0.5 * b.K(ii, j) * (inv_d(ii) + inv_d(j));
      b.Lprime(ii, j) = (ii == j ? 1.0 : 0.0) - half_sym;
    }
  });
  // L = L' + (Mdiag - I)/2, a diagonal shift.
  b.L = b.Lprime;
  for (Eigen::Index i = 0; i < n; ++i) b.L(i, i) += 0.5 * (b.Mdiag(i) - 1.0);
  return b;
}

double empirical_degree(const OperatorBundle& bundle, const Point& x) {
  const auto& pts = bundle.points.points;
  double sum = 0.0;
  for (const auto& p : pts) sum += kernel_eval(bundle.kernel, bundle.points.space, x, p);
  return sum / static_cast<double>(pts.size());
}

namespace {

double require_degree_at(const OperatorBundle& bundle, const Point& x) {
  const double dx = empirical_degree(bundle, x);
  if (!(dx > 0.0))
    throw degenerate_degree_error("empirical degree vanishes at the evaluation point");
  return dx;
}

void require_min_degree(const OperatorBundle& bundle) {
  if (!(bundle.min_degree > 0.0))
    throw degenerate_degree_error("bundle has a sample point of empirical degree zero");
}

}  // namespace

double empirical_m(const OperatorBundle& bundle, const Point& x) {
  require_min_degree(bundle);
  const double dx = require_degree_at(bundle, x);
  const auto& pts = bundle.points.points;
  double sum = 0.0;
  for (std::size_t j = 0; j < pts.size(); ++j) {
    const double k = kernel_eval(bundle.kernel, bundle.points.space, x, pts[j]);
    if (k != 0.0) sum += 0.5 * k * (1.0 / dx + 1.0 / bundle.D(static_cast<Eigen::Index>(j)));
  }
  return sum / static_cast<double>(pts.size());
}

double apply_P_n(const OperatorBundle& bundle, const SpaceFunction& g, const Point& x) {
  const auto& pts = bundle.points.points;
  double sum = 0.0;
  for (const auto& p : pts) {
    const double k = kernel_eval(bundle.kernel, bundle.points.space, x, p);
    if (k != 0.0) sum += k * g(p);
  }
  return sum / static_cast<double>(pts.size());
}

double apply_T_hat_n(const OperatorBundle& bundle, const SpaceFunction& g, const Point& x) {
  require_min_degree(bundle);
  const double dx = require_degree_at(bundle, x);
  const auto& pts = bundle.points.points;
  double sum = 0.0;
  for (std::size_t j = 0; j < pts.size(); ++j) {
    const double k = kernel_eval(bundle.kernel, bundle.points.space, x, pts[j]);
    if (k != 0.0)
      sum += 0.5 * k * (1.0 / dx + 1.0 / bundle.D(static_cast<Eigen::Index>(j))) * g(pts[j]);
  }
  return sum / static_cast<double>(pts.size());
}

double apply_T_n(const OperatorBundle& bundle, const DegreeField& degrees, const SpaceFunction& g,
                 const Point& x) {
  const auto& pts = bundle.points.points;
  double sum = 0.0;
  for (const auto& p : pts) {
    const double h = h_kernel(bundle.kernel, degrees, x, p);
    if (h != 0.0) sum += h * g(p);
  }
  return sum / static_cast<double>(pts.size());
}

double apply_U_n(const OperatorBundle& bundle, const SpaceFunction& g, const Point& x,
                 UVariant variant) {
  const double t_hat = apply_T_hat_n(bundle, g, x);
  if (variant == UVariant::Identity) return g(x) - t_hat;
  return empirical_m(bundle, x) * g(x) - t_hat;
}

Eigen::VectorXd restrict_to_samples(const SpaceFunction& f, const PointSet& points) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = f(points.points[i]);
  return v;
}

Eigen::MatrixXd unnormalized_laplacian(const OperatorBundle& bundle) {
  Eigen::MatrixXd l = -bundle.K;
  l.diagonal() += bundle.D;
  return l;
}

Eigen::MatrixXd normalized_laplacian_sym(const OperatorBundle& bundle) {
  require_min_degree(bundle);
  const Eigen::VectorXd inv_sqrt = bundle.D.cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd l = -(inv_sqrt.asDiagonal() * bundle.K * inv_sqrt.asDiagonal());
  l.diagonal().array() += 1.0;
  return l;
}

Eigen::MatrixXd normalized_laplacian_rw(const OperatorBundle& bundle) {
  require_min_degree(bundle);
  Eigen::MatrixXd l = -(bundle.D.cwiseInverse().asDiagonal() * bundle.K);
  l.diagonal().array() += 1.0;
  return l;
}

}  // namespace glspec
