#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "glspec/rng.hpp"

namespace glspec {

enum class SpaceKind { Interval, Circle, Torus2, PointCloud };
enum class CloudMetric { Euclidean, Precomputed };

// A point of a space. Continuum kinds use the coordinate fields directly
// (Interval / Circle: c0; Torus2: c0, c1); PointCloud stores the point index
// in c0.
struct Point {
  double c0 = 0.0;
  double c1 = 0.0;
};

// A compact metric measure space (X, d, mu) with mu the normalized uniform
// measure (total mass 1).
struct SpaceDescriptor {
  SpaceKind kind = SpaceKind::Circle;
  double length = 0.0;   // Interval length, or first circumference
  double length2 = 0.0;  // second circumference (Torus2 only)
  Eigen::MatrixXd cloud;            // PointCloud coordinates, one row per point
  Eigen::MatrixXd cloud_distances;  // PointCloud precomputed metric (optional)
  CloudMetric cloud_metric = CloudMetric::Euclidean;
};

SpaceDescriptor make_interval(double length);
SpaceDescriptor make_circle(double circumference);
SpaceDescriptor make_torus2(double circumference1, double circumference2);
SpaceDescriptor make_point_cloud(Eigen::MatrixXd coordinates);
SpaceDescriptor make_point_cloud_with_distances(Eigen::MatrixXd coordinates,
                                                Eigen::MatrixXd distances);

// An ordered i.i.d. uniform sample X_1..X_n; carries the seed it was drawn
// with so experiments can be replayed.
struct PointSet {
  SpaceDescriptor space;
  std::vector<Point> points;
  std::uint64_t seed = 0;
  std::size_t size() const { return points.size(); }
};

double distance(const SpaceDescriptor& space, const Point& x, const Point& y);
double diameter(const SpaceDescriptor& space);
bool contains(const SpaceDescriptor& space, const Point& x);

PointSet sample_uniform(const SpaceDescriptor& space, std::size_t n, std::uint64_t seed);

// Exact mu(B_r(x)) for the analytic kinds; throws std::domain_error for
// PointCloud (count empirically there instead).
double ball_measure(const SpaceDescriptor& space, const Point& center, double radius);

// Minimal ball cover count for the 1-D kinds, greedy upper bound for
// Torus2 / PointCloud.
std::size_t covering_number(const SpaceDescriptor& space, double delta);

// Deterministic probe grid (midpoint convention). Torus2 uses a
// round(sqrt(g)) x round(sqrt(g)) product grid; PointCloud returns the first
// min(g, cloud size) points.
std::vector<Point> uniform_grid(const SpaceDescriptor& space, std::size_t g);

}  // namespace glspec
