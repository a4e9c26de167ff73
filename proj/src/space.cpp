#include "glspec/space.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace glspec {

namespace {

double circle_dist(double x, double y, double length) {
  double d = std::fabs(x - y);
  d = std::fmin(d, length - d);
  return d;
}

std::size_t cloud_index(const SpaceDescriptor& space, const Point& p) {
  const double idx = p.c0;
  if (idx < 0.0 || idx != std::floor(idx) || idx >= static_cast<double>(space.cloud.rows()))
    throw std::domain_error("point cloud index out of range: " + std::to_string(idx));
  return static_cast<std::size_t>(idx);
}

// Area of the disc of radius r centered at the origin intersected with the
// rectangle [-a, a] x [-b, b] (flat-torus ball in min-image coordinates).
double disc_rect_area(double r, double a, double b) {
  if (r <= 0.0) return 0.0;
  if (r * r >= a * a + b * b) return 4.0 * a * b;
  auto segment = [r](double c) {
    if (r <= c) return 0.0;
    return r * r * std::acos(c / r) - c * std::sqrt(r * r - c * c);
  };
  // No corner of the rectangle is inside the disc (r < hypot(a, b)), so the
  // two clipped segments cannot overlap.
  return M_PI * r * r - 2.0 * segment(a) - 2.0 * segment(b);
}

}  // namespace

SpaceDescriptor make_interval(double length) {
  if (!(length > 0.0)) throw std::domain_error("interval length must be positive");
  SpaceDescriptor s;
  s.kind = SpaceKind::Interval;
  s.length = length;
  return s;
}

SpaceDescriptor make_circle(double circumference) {
  if (!(circumference > 0.0)) throw std::domain_error("circle circumference must be positive");
  SpaceDescriptor s;
  s.kind = SpaceKind::Circle;
  s.length = circumference;
  return s;
}

SpaceDescriptor make_torus2(double circumference1, double circumference2) {
  if (!(circumference1 > 0.0) || !(circumference2 > 0.0))
    throw std::domain_error("torus circumferences must be positive");
  SpaceDescriptor s;
  s.kind = SpaceKind::Torus2;
  s.length = circumference1;
  s.length2 = circumference2;
  return s;
}

SpaceDescriptor make_point_cloud(Eigen::MatrixXd coordinates) {
  if (coordinates.rows() < 1) throw std::domain_error("point cloud needs at least one point");
  SpaceDescriptor s;
  s.kind = SpaceKind::PointCloud;
  s.cloud = std::move(coordinates);
  s.cloud_metric = CloudMetric::Euclidean;
  return s;
}

SpaceDescriptor make_point_cloud_with_distances(Eigen::MatrixXd coordinates,
                                                Eigen::MatrixXd distances) {
  if (coordinates.rows() < 1) throw std::domain_error("point cloud needs at least one point");
  if (distances.rows() != coordinates.rows() || distances.cols() != coordinates.rows())
    throw std::domain_error("distance matrix shape does not match the cloud");
  SpaceDescriptor s;
  s.kind = SpaceKind::PointCloud;
  s.cloud = std::move(coordinates);
  s.cloud_distances = std::move(distances);
  s.cloud_metric = CloudMetric::Precomputed;
  return s;
}

double distance(const SpaceDescriptor& space, const Point& x, const Point& y) {
  if (!contains(space, x) || !contains(space, y))
    throw std::domain_error("point outside the space domain");
  switch (space.kind) {
    case SpaceKind::Interval:
      return std::fabs(x.c0 - y.c0);
    case SpaceKind::Circle:
      return circle_dist(x.c0, y.c0, space.length);
    case SpaceKind::Torus2: {
      const double d1 = circle_dist(x.c0, y.c0, space.length);
      const double d2 = circle_dist(x.c1, y.c1, space.length2);
      return std::hypot(d1, d2);
    }
    case SpaceKind::PointCloud: {
      const auto i = cloud_index(space, x);
      const auto j = cloud_index(space, y);
      if (space.cloud_metric == CloudMetric::Precomputed) return space.cloud_distances(i, j);
      return (space.cloud.row(i) - space.cloud.row(j)).norm();
    }
  }
  throw std::logic_error("unreachable space kind");
}

double diameter(const SpaceDescriptor& space) {
  switch (space.kind) {
    case SpaceKind::Interval:
      return space.length;
    case SpaceKind::Circle:
      return space.length / 2.0;
    case SpaceKind::Torus2:
      return std::hypot(space.length / 2.0, space.length2 / 2.0);
    case SpaceKind::PointCloud: {
      double best = 0.0;
      const auto m = space.cloud.rows();
      for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = i + 1; j < m; ++j) {
          const double d = space.cloud_metric == CloudMetric::Precomputed
                               ? space.cloud_distances(i, j)
                               : (space.cloud.row(i) - space.cloud.row(j)).norm();
          best = std::fmax(best, d);
        }
      return best;
    }
  }
  throw std::logic_error("unreachable space kind");
}

bool contains(const SpaceDescriptor& space, const Point& x) {
  switch (space.kind) {
    case SpaceKind::Interval:
      return x.c0 >= 0.0 && x.c0 <= space.length;
    case SpaceKind::Circle:
      return x.c0 >= 0.0 && x.c0 <= space.length;
    case SpaceKind::Torus2:
      return x.c0 >= 0.0 && x.c0 <= space.length && x.c1 >= 0.0 && x.c1 <= space.length2;
    case SpaceKind::PointCloud:
      return x.c0 >= 0.0 && x.c0 == std::floor(x.c0) &&
             x.c0 < static_cast<double>(space.cloud.rows());
  }
  return false;
}

PointSet sample_uniform(const SpaceDescriptor& space, std::size_t n, std::uint64_t seed) {
  PointSet out;
  out.space = space;
  out.seed = seed;
  out.points.reserve(n);
  CounterRng rng(derive_stream(seed, 0));
  for (std::size_t i = 0; i < n; ++i) {
    Point p;
    switch (space.kind) {
      case SpaceKind::Interval:
      case SpaceKind::Circle:
        p.c0 = rng.next_double() * space.length;
        break;
      case SpaceKind::Torus2:
        p.c0 = rng.next_double() * space.length;
        p.c1 = rng.next_double() * space.length2;
        break;
      case SpaceKind::PointCloud:
        p.c0 = static_cast<double>(rng.next_index(static_cast<std::uint64_t>(space.cloud.rows())));
        break;
    }
    out.points.push_back(p);
  }
  return out;
}

double ball_measure(const SpaceDescriptor& space, const Point& center, double radius) {
  if (radius < 0.0) throw std::domain_error("ball radius must be non-negative");
  if (!contains(space, center)) throw std::domain_error("ball center outside the space");
  switch (space.kind) {
    case SpaceKind::Interval: {
      const double lo = std::fmax(center.c0 - radius, 0.0);
      const double hi = std::fmin(center.c0 + radius, space.length);
      return std::fmax(hi - lo, 0.0) / space.length;
    }
    case SpaceKind::Circle:
      return std::fmin(2.0 * radius, space.length) / space.length;
    case SpaceKind::Torus2: {
      const double a = space.length / 2.0;
      const double b = space.length2 / 2.0;
      return disc_rect_area(radius, a, b) / (space.length * space.length2);
    }
    case SpaceKind::PointCloud:
      throw std::domain_error("ball_measure unsupported for point clouds");
  }
  throw std::logic_error("unreachable space kind");
}

std::size_t covering_number(const SpaceDescriptor& space, double delta) {
  if (!(delta > 0.0)) throw std::domain_error("covering radius must be positive");
  if (delta >= diameter(space)) return 1;
  switch (space.kind) {
    case SpaceKind::Interval:
    case SpaceKind::Circle:
      // Each closed ball covers length 2*delta.
      return static_cast<std::size_t>(std::ceil(space.length / (2.0 * delta)));
    case SpaceKind::Torus2: {
      // Greedy upper bound: a radius-delta ball contains the square of
      // half-side delta/sqrt(2); tile with those squares.
      const double side = 2.0 * delta / std::sqrt(2.0);
      const auto n1 = static_cast<std::size_t>(std::ceil(space.length / side));
      const auto n2 = static_cast<std::size_t>(std::ceil(space.length2 / side));
      return n1 * n2;
    }
    case SpaceKind::PointCloud: {
      const auto m = static_cast<std::size_t>(space.cloud.rows());
      std::vector<bool> covered(m, false);
      std::size_t count = 0;
      for (std::size_t i = 0; i < m; ++i) {
        if (covered[i]) continue;
        ++count;
        const Point ci{static_cast<double>(i), 0.0};
        for (std::size_t j = i; j < m; ++j) {
          if (!covered[j] && distance(space, ci, Point{static_cast<double>(j), 0.0}) <= delta)
            covered[j] = true;
        }
      }
      return count;
    }
  }
  throw std::logic_error("unreachable space kind");
}

std::vector<Point> uniform_grid(const SpaceDescriptor& space, std::size_t g) {
  std::vector<Point> out;
  if (g == 0) return out;
  switch (space.kind) {
    case SpaceKind::Interval:
    case SpaceKind::Circle: {
      out.reserve(g);
      const double h = space.length / static_cast<double>(g);
      for (std::size_t i = 0; i < g; ++i) out.push_back({(static_cast<double>(i) + 0.5) * h, 0.0});
      return out;
    }
    case SpaceKind::Torus2: {
      const auto side = static_cast<std::size_t>(
          std::max(1.0, std::round(std::sqrt(static_cast<double>(g)))));
      const double h1 = space.length / static_cast<double>(side);
      const double h2 = space.length2 / static_cast<double>(side);
      out.reserve(side * side);
      for (std::size_t i = 0; i < side; ++i)
        for (std::size_t j = 0; j < side; ++j)
          out.push_back({(static_cast<double>(i) + 0.5) * h1, (static_cast<double>(j) + 0.5) * h2});
      return out;
    }
    case SpaceKind::PointCloud: {
      const auto m = static_cast<std::size_t>(space.cloud.rows());
      const auto take = std::min(g, m);
      out.reserve(take);
      for (std::size_t i = 0; i < take; ++i) out.push_back({static_cast<double>(i), 0.0});
      return out;
    }
  }
  throw std::logic_error("unreachable space kind");
}

}  // namespace glspec
