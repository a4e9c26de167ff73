#include "glspec/reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "glspec/errors.hpp"
#include "glspec/parallel.hpp"

namespace glspec {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kGaussNode = 0.7745966692414834;  // sqrt(3/5)
constexpr double kGaussWMid = 8.0 / 9.0;
constexpr double kGaussWSide = 5.0 / 9.0;

double wrap_coord(double x, double period) {
  const double w = std::fmod(std::fmod(x, period) + period, period);
  return w == period ? 0.0 : w;
}

double wrap_signed(double x, double period) {
  double w = std::fmod(x, period);
  if (w < -0.5 * period) w += period;
  if (w >= 0.5 * period) w -= period;
  return w;
}

double support_radius(const KernelDescriptor& kernel) {
  switch (kernel.form) {
    case KernelForm::BallIndicator:
      return kernel.radius;
    case KernelForm::TruncatedGaussian:
      return kernel.cutoff;
    default:
      return std::numeric_limits<double>::infinity();
  }
}

// Gauss-3 integral of h_mu(x_i, .) over [a, b] in offset coordinates around
// xi_coord; the offset is mapped back into the space's coordinate chart.
double gauss3_h_segment(const KernelDescriptor& kernel, const SpaceDescriptor& space,
                        const DegreeField& degrees, const Point& xi, double xi_coord, double a,
                        double b) {
  if (!(b > a)) return 0.0;
  const double mid = 0.5 * (a + b);
  const double hw = 0.5 * (b - a);
  const double us[3] = {mid - kGaussNode * hw, mid, mid + kGaussNode * hw};
  const double ws[3] = {kGaussWSide, kGaussWMid, kGaussWSide};
  double sum = 0.0;
  for (int q = 0; q < 3; ++q) {
    double y = xi_coord + us[q];
    if (space.kind == SpaceKind::Circle) y = wrap_coord(y, space.length);
    sum += ws[q] * h_kernel(kernel, degrees, xi, Point{y, 0.0});
  }
  return sum * hw;
}

void assemble_one_dimensional(const KernelDescriptor& kernel, const SpaceDescriptor& space,
                              const DegreeField& degrees, const std::vector<Point>& nodes,
                              Eigen::MatrixXd& T) {
  const auto g = nodes.size();
  const double L = space.length;
  const double h = L / static_cast<double>(g);
  const double hh = 0.5 * h;
  const double R = support_radius(kernel);
  const bool circle = space.kind == SpaceKind::Circle;

  parallel_for(g, 0, [&](std::size_t i) {
    const Point& xi = nodes[i];
    const double xc = xi.c0;
    for (std::size_t j = 0; j < g; ++j) {
      const double uc = circle ? wrap_signed(nodes[j].c0 - xc, L) : nodes[j].c0 - xc;
      double min_dist = std::abs(uc) - hh;
      if (circle && std::abs(uc) + hh > 0.5 * L)
        min_dist = std::min(min_dist, L - std::abs(uc) - hh);
      if (min_dist >= R) {
        T(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 0.0;
        continue;
      }

      // The cell in offset coordinates, split at the antipodal seam for the
      // circle so every piece lives where distance(xi, y) == |offset|.
      double pieces[3][2];
      int n_pieces = 0;
      const double A = uc - hh;
      const double B = uc + hh;
      if (!circle) {
        pieces[n_pieces][0] = A;
        pieces[n_pieces][1] = B;
        ++n_pieces;
      } else {
        const double half = 0.5 * L;
        pieces[n_pieces][0] = std::max(A, -half);
        pieces[n_pieces][1] = std::min(B, half);
        ++n_pieces;
        if (B > half) {
          pieces[n_pieces][0] = -half;
          pieces[n_pieces][1] = B - L;
          ++n_pieces;
        }
        if (A < -half) {
          pieces[n_pieces][0] = A + L;
          pieces[n_pieces][1] = half;
          ++n_pieces;
        }
      }

      double integral = 0.0;
      for (int p = 0; p < n_pieces; ++p) {
        const double lo = std::max(pieces[p][0], -R);
        const double hi = std::min(pieces[p][1], R);
        integral += gauss3_h_segment(kernel, space, degrees, xi, xc, lo, hi);
      }
      T(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = integral / L;
    }
  });
}

// Area of disc(0, r) ∩ {u <= x, v <= y}, the building block of exact
// disc/rectangle overlap.
double disc_quadrant_area(double x, double y, double r) {
  if (x <= -r || y <= -r) return 0.0;
  x = std::min(x, r);
  y = std::min(y, r);
  const auto S = [r](double u) {
    u = std::clamp(u, -r, r);
    const double s = std::sqrt(std::max(0.0, r * r - u * u));
    return 0.5 * (u * s + r * r * std::asin(std::clamp(u / r, -1.0, 1.0)));
  };
  const double uy = std::sqrt(std::max(0.0, r * r - y * y));
  double total = 0.0;
  if (y >= 0.0) {
    const double e1 = std::min(x, -uy);
    if (e1 > -r) total += 2.0 * (S(e1) - S(-r));
    const double b2 = std::max(-uy, -r);
    const double e2 = std::min(x, uy);
    if (e2 > b2) total += y * (e2 - b2) + (S(e2) - S(b2));
    if (x > uy) total += 2.0 * (S(x) - S(uy));
  } else {
    const double b = std::max(-uy, -r);
    const double e = std::min(x, uy);
    if (e > b) total += y * (e - b) + (S(e) - S(b));
  }
  return total;
}

double disc_rect_overlap(double x0, double x1, double y0, double y1, double r) {
  return disc_quadrant_area(x1, y1, r) - disc_quadrant_area(x0, y1, r) -
         disc_quadrant_area(x1, y0, r) + disc_quadrant_area(x0, y0, r);
}

// Overlap of the min-image ball around the origin with the cell rectangle,
// summed over the 3x3 lattice of torus images.
double torus_ball_overlap(double x0, double x1, double y0, double y1, double r, double L1,
                          double L2) {
  double total = 0.0;
  for (int a = -1; a <= 1; ++a) {
    const double rx0 = x0 + a * L1;
    const double rx1 = x1 + a * L1;
    const double dx = rx0 > 0.0 ? rx0 : (rx1 < 0.0 ? -rx1 : 0.0);
    if (dx >= r) continue;
    for (int b = -1; b <= 1; ++b) {
      const double ry0 = y0 + b * L2;
      const double ry1 = y1 + b * L2;
      const double dy = ry0 > 0.0 ? ry0 : (ry1 < 0.0 ? -ry1 : 0.0);
      if (std::hypot(dx, dy) >= r) continue;
      total += disc_rect_overlap(rx0, rx1, ry0, ry1, r);
    }
  }
  return total;
}

double gauss9_h_cell(const KernelDescriptor& kernel, const SpaceDescriptor& space,
                     const DegreeField& degrees, const Point& xi, const Point& center, double hh1,
                     double hh2) {
  const double offs[3] = {-kGaussNode, 0.0, kGaussNode};
  const double ws[3] = {kGaussWSide, kGaussWMid, kGaussWSide};
  double sum = 0.0;
  for (int qa = 0; qa < 3; ++qa)
    for (int qb = 0; qb < 3; ++qb) {
      const Point y{wrap_coord(center.c0 + offs[qa] * hh1, space.length),
                    wrap_coord(center.c1 + offs[qb] * hh2, space.length2)};
      sum += ws[qa] * ws[qb] * h_kernel(kernel, degrees, xi, y);
    }
  return sum * hh1 * hh2;
}

double subdivided_h_cell(const KernelDescriptor& kernel, const SpaceDescriptor& space,
                         const DegreeField& degrees, const Point& xi, const Point& center,
                         double hh1, double hh2) {
  constexpr int kSub = 8;
  double sum = 0.0;
  for (int a = 0; a < kSub; ++a)
    for (int b = 0; b < kSub; ++b) {
      const double u = (2.0 * a + 1.0) / kSub - 1.0;
      const double v = (2.0 * b + 1.0) / kSub - 1.0;
      const Point y{wrap_coord(center.c0 + u * hh1, space.length),
                    wrap_coord(center.c1 + v * hh2, space.length2)};
      sum += h_kernel(kernel, degrees, xi, y);
    }
  return sum * (4.0 * hh1 * hh2) / (kSub * kSub);
}

void assemble_torus(const KernelDescriptor& kernel, const SpaceDescriptor& space,
                    const DegreeField& degrees, const std::vector<Point>& nodes,
                    Eigen::MatrixXd& T) {
  const auto g = nodes.size();
  const auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(g))));
  if (side * side != g) throw std::domain_error("torus grid is not a full product grid");
  const double L1 = space.length;
  const double L2 = space.length2;
  const double h1 = L1 / static_cast<double>(side);
  const double h2 = L2 / static_cast<double>(side);
  const double area = L1 * L2;
  const double R = support_radius(kernel);

  parallel_for(g, 0, [&](std::size_t i) {
    const Point& xi = nodes[i];
    for (std::size_t j = 0; j < g; ++j) {
      const Point& yj = nodes[j];
      const double du = wrap_signed(yj.c0 - xi.c0, L1);
      const double dv = wrap_signed(yj.c1 - xi.c1, L2);
      const double x0 = du - 0.5 * h1;
      const double x1 = du + 0.5 * h1;
      const double y0 = dv - 0.5 * h2;
      const double y1 = dv + 0.5 * h2;

      double integral = 0.0;
      switch (kernel.form) {
        case KernelForm::BallIndicator: {
          const double overlap = torus_ball_overlap(x0, x1, y0, y1, R, L1, L2);
          if (overlap > 0.0) {
            // Degree fields on the torus are translation invariant, so the
            // smooth factor of h is constant over the cell.
            const double w =
                0.5 * (1.0 / degrees.eval(xi) + 1.0 / degrees.eval(yj));
            integral = kernel.value * w * overlap;
          }
          break;
        }
        case KernelForm::TruncatedGaussian: {
          const bool no_seam =
              std::abs(du) + 0.5 * h1 <= 0.5 * L1 && std::abs(dv) + 0.5 * h2 <= 0.5 * L2;
          const double far_corner =
              std::hypot(std::abs(du) + 0.5 * h1, std::abs(dv) + 0.5 * h2);
          const double near_corner = std::hypot(std::max(0.0, std::abs(du) - 0.5 * h1),
                                                std::max(0.0, std::abs(dv) - 0.5 * h2));
          if (no_seam && far_corner < R) {
            integral = gauss9_h_cell(kernel, space, degrees, xi, yj, 0.5 * h1, 0.5 * h2);
          } else if (no_seam && near_corner >= R) {
            integral = 0.0;
          } else {
            integral = subdivided_h_cell(kernel, space, degrees, xi, yj, 0.5 * h1, 0.5 * h2);
          }
          break;
        }
        default:
          integral = gauss9_h_cell(kernel, space, degrees, xi, yj, 0.5 * h1, 0.5 * h2);
          break;
      }
      T(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = integral / area;
    }
  });
}

void assemble_cloud(const KernelDescriptor& kernel, const DegreeField& degrees,
                    const std::vector<Point>& nodes, Eigen::MatrixXd& T) {
  const auto g = nodes.size();
  const double inv = 1.0 / static_cast<double>(g);
  parallel_for(g, 0, [&](std::size_t i) {
    for (std::size_t j = 0; j < g; ++j)
      T(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          inv * h_kernel(kernel, degrees, nodes[i], nodes[j]);
  });
}

}  // namespace

double ReferenceSpectrum::eigenfunction(int kappa, int which, const Point& x) {
  if (kappa == 0) return 1.0;
  return which == 0 ? std::cos(kappa * x.c0) : std::sin(kappa * x.c0);
}

ReferenceSpectrum circle_ball_spectrum(double r, int max_frequency, RefOperator op) {
  if (!(r > 0.0) || r > kPi)
    throw std::domain_error("reference ball radius must lie in (0, pi]");
  if (max_frequency < 0) throw std::domain_error("max_frequency must be nonnegative");

  ReferenceSpectrum s;
  s.op = op;
  s.radius = r;
  const auto map_value = [op](double t) { return op == RefOperator::T ? t : 1.0 - t; };
  s.levels.push_back({0, map_value(1.0), 1});
  for (int kappa = 1; kappa <= max_frequency; ++kappa) {
    const double t = std::sin(kappa * r) / (kappa * r);
    s.levels.push_back({kappa, map_value(t), 2});
  }
  return s;
}

std::vector<Point> dense_grid_nodes(const SpaceDescriptor& space, std::size_t grid_n) {
  if (space.kind == SpaceKind::PointCloud) {
    std::vector<Point> nodes;
    nodes.reserve(static_cast<std::size_t>(space.cloud.rows()));
    for (Eigen::Index i = 0; i < space.cloud.rows(); ++i)
      nodes.push_back(Point{static_cast<double>(i), 0.0});
    return nodes;
  }
  return uniform_grid(space, grid_n);
}

Eigen::MatrixXd dense_grid_operator(const KernelDescriptor& kernel, const SpaceDescriptor& space,
                                    const DegreeField& degrees, std::size_t grid_n,
                                    RefOperator op) {
  if (grid_n < 1 && space.kind != SpaceKind::PointCloud)
    throw std::domain_error("grid must have at least one node");
  const std::vector<Point> nodes = dense_grid_nodes(space, grid_n);
  const auto g = static_cast<Eigen::Index>(nodes.size());
  Eigen::MatrixXd T(g, g);

  switch (space.kind) {
    case SpaceKind::Interval:
    case SpaceKind::Circle:
      assemble_one_dimensional(kernel, space, degrees, nodes, T);
      break;
    case SpaceKind::Torus2:
      assemble_torus(kernel, space, degrees, nodes, T);
      break;
    case SpaceKind::PointCloud:
      assemble_cloud(kernel, degrees, nodes, T);
      break;
  }

  for (Eigen::Index i = 0; i < g; ++i)
    for (Eigen::Index j = i + 1; j < g; ++j) {
      const double avg = 0.5 * (T(i, j) + T(j, i));
      T(i, j) = avg;
      T(j, i) = avg;
    }

  if (op == RefOperator::T) return T;
  if (op == RefOperator::Uprime) {
    Eigen::MatrixXd u = -T;
    u.diagonal().array() += 1.0;
    return u;
  }
  const Eigen::VectorXd m = T.rowwise().sum();
  Eigen::MatrixXd u = -T;
  u.diagonal() += m;
  return u;
}

std::pair<double, double> m_range(const KernelDescriptor& kernel, const SpaceDescriptor& space,
                                  const DegreeField& degrees, std::size_t grid_n) {
  const std::vector<Point> nodes = dense_grid_nodes(space, grid_n);
  if (nodes.empty()) throw std::domain_error("m_range needs a nonempty grid");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& x : nodes) {
    const double m = m_function(kernel, space, degrees, x);
    lo = std::min(lo, m);
    hi = std::max(hi, m);
  }
  return {lo, hi};
}

}  // namespace glspec
