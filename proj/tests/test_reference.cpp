#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "glspec/reference.hpp"
#include "glspec/spectral.hpp"

using namespace glspec;

namespace {

constexpr double kTwoPi = 6.28318530717958647692;
constexpr double kQuarterPi = 0.78539816339744830962;

KernelDescriptor circle_ball() { return make_ball_kernel(kQuarterPi, 1.0, 0.2, 2.0, 1.0); }

double sinc_level(int kappa, double r) {
  const double kr = static_cast<double>(kappa) * r;
  return std::sin(kr) / kr;
}

}  // namespace

TEST_CASE("analytic circle spectrum lists the sinc levels") {
  const auto ref = circle_ball_spectrum(kQuarterPi, 5, RefOperator::T);
  REQUIRE(ref.levels.size() == 6);
  CHECK(ref.levels[0].kappa == 0);
  CHECK(ref.levels[0].value == 1.0);
  CHECK(ref.levels[0].multiplicity == 1);
  for (int k = 1; k <= 5; ++k) {
    CHECK(ref.levels[static_cast<std::size_t>(k)].kappa == k);
    CHECK(ref.levels[static_cast<std::size_t>(k)].value ==
          doctest::Approx(sinc_level(k, kQuarterPi)).epsilon(1e-15));
    CHECK(ref.levels[static_cast<std::size_t>(k)].multiplicity == 2);
  }
  // Frozen value for the leading nonconstant level.
  CHECK(ref.levels[1].value == doctest::Approx(0.9003163161571062).epsilon(1e-15));

  const auto refu = circle_ball_spectrum(kQuarterPi, 2, RefOperator::Uprime);
  CHECK(refu.levels[0].value == 0.0);
  CHECK(refu.levels[1].value == doctest::Approx(1.0 - 0.9003163161571062).epsilon(1e-14));
  // m is identically 1 for this kernel, so U and U' spectra coincide.
  const auto refamv = circle_ball_spectrum(kQuarterPi, 2, RefOperator::U);
  CHECK(refamv.levels[1].value == doctest::Approx(refu.levels[1].value).epsilon(1e-15));
}

TEST_CASE("reference radius is validated") {
  CHECK_THROWS_AS(circle_ball_spectrum(0.0, 3), std::domain_error);
  CHECK_THROWS_AS(circle_ball_spectrum(-1.0, 3), std::domain_error);
  CHECK_THROWS_AS(circle_ball_spectrum(3.5, 3), std::domain_error);
  CHECK_THROWS_AS(circle_ball_spectrum(1.0, -1), std::domain_error);
  CHECK_NOTHROW(circle_ball_spectrum(M_PI, 3));
}

TEST_CASE("reference eigenfunctions are the Fourier modes") {
  const Point x{0.6, 0.0};
  CHECK(ReferenceSpectrum::eigenfunction(0, 0, x) == 1.0);
  CHECK(ReferenceSpectrum::eigenfunction(2, 0, x) == doctest::Approx(std::cos(1.2)));
  CHECK(ReferenceSpectrum::eigenfunction(2, 1, x) == doctest::Approx(std::sin(1.2)));
}

TEST_CASE("dense grid nodes layouts") {
  const auto circle = make_circle(kTwoPi);
  const auto nodes = dense_grid_nodes(circle, 8);
  REQUIRE(nodes.size() == 8);
  CHECK(nodes[0].c0 == doctest::Approx(kTwoPi / 16.0));

  const auto torus = make_torus2(1.0, 1.0);
  CHECK(dense_grid_nodes(torus, 16).size() == 16);
  // Non-square requests round to the nearest square side.
  CHECK(dense_grid_nodes(torus, 17).size() == 16);
  CHECK(dense_grid_nodes(torus, 26).size() == 25);

  Eigen::MatrixXd coords(3, 2);
  coords << 0, 0, 1, 0, 0, 1;
  const auto cloud = make_point_cloud(coords);
  CHECK(dense_grid_nodes(cloud, 100).size() == 3);
}

TEST_CASE("dense grid operators satisfy their exact identities") {
  const auto circle = make_circle(kTwoPi);
  const auto ball = circle_ball();
  const auto degrees = make_degree_field(ball, circle);
  const std::size_t g = 256;

  const Eigen::MatrixXd T = dense_grid_operator(ball, circle, degrees, g, RefOperator::T);
  const Eigen::MatrixXd U = dense_grid_operator(ball, circle, degrees, g, RefOperator::U);
  const Eigen::MatrixXd Up = dense_grid_operator(ball, circle, degrees, g, RefOperator::Uprime);

  CHECK((T - T.transpose()).cwiseAbs().maxCoeff() == 0.0);
  // U' = I - T entrywise.
  CHECK((Up - (Eigen::MatrixXd::Identity(g, g) - T)).cwiseAbs().maxCoeff() == 0.0);
  // U annihilates constants by construction.
  CHECK((U * Eigen::VectorXd::Ones(g)).cwiseAbs().maxCoeff() < 1e-14);
  // Row sums of T approximate m = 1; the grid m enters U's diagonal.
  CHECK((T.rowwise().sum() - Eigen::VectorXd::Ones(g)).cwiseAbs().maxCoeff() < 1e-4);
}

TEST_CASE("restricted Fourier modes are near-eigenvectors of the grid operator") {
  const auto circle = make_circle(kTwoPi);
  const auto ball = circle_ball();
  const auto degrees = make_degree_field(ball, circle);
  const std::size_t g = 512;
  const Eigen::MatrixXd T = dense_grid_operator(ball, circle, degrees, g, RefOperator::T);
  const auto nodes = dense_grid_nodes(circle, g);

  for (int kappa = 1; kappa <= 3; ++kappa) {
    for (int which = 0; which < 2; ++which) {
      Eigen::VectorXd f(static_cast<Eigen::Index>(g));
      for (std::size_t i = 0; i < g; ++i)
        f(static_cast<Eigen::Index>(i)) =
            ReferenceSpectrum::eigenfunction(kappa, which, nodes[i]);
      const double level = sinc_level(kappa, kQuarterPi);
      const Eigen::VectorXd residual = T * f - level * f;
      CHECK(residual.lpNorm<Eigen::Infinity>() < 1e-3);
    }
  }
}

TEST_CASE("grid eigenvalues converge to the sinc levels at the h^2 rate") {
  const auto circle = make_circle(kTwoPi);
  const auto ball = circle_ball();
  const auto degrees = make_degree_field(ball, circle);

  const double target = sinc_level(1, kQuarterPi);
  double err_coarse = 0.0;
  double err_fine = 0.0;
  for (const std::size_t g : {128ul, 256ul}) {
    const Eigen::MatrixXd T = dense_grid_operator(ball, circle, degrees, g, RefOperator::T);
    const auto s = eig_sym(T);
    // Second-largest eigenvalue: the kappa = 1 pair sits just below 1.
    const double approx = s.values(s.values.size() - 2);
    const double err = std::abs(approx - target);
    (g == 128 ? err_coarse : err_fine) = err;
  }
  CHECK(err_coarse < 2e-3);
  CHECK(err_fine < 6e-4);
  // Quadratic convergence: doubling the grid divides the error by about 4.
  CHECK(err_coarse / err_fine > 2.5);
}

TEST_CASE("sinc pairs appear with multiplicity exactly 2 on the grid") {
  const auto circle = make_circle(kTwoPi);
  const auto ball = circle_ball();
  const auto degrees = make_degree_field(ball, circle);
  const std::size_t g = 512;
  const Eigen::MatrixXd T = dense_grid_operator(ball, circle, degrees, g, RefOperator::T);
  const auto s = eig_sym(T);

  // kappa = 4 hits sin(pi) = 0 and drowns in the near-zero bulk, so only the
  // isolated levels are counted.
  for (const int kappa : {1, 2, 3, 5, 6, 7}) {
    const double level = sinc_level(kappa, kQuarterPi);
    int found = -1;
    for (std::size_t gi = 0; gi < s.groups.size(); ++gi) {
      const auto [begin, end] = s.groups[gi];
      const double mean = s.values.segment(begin, end - begin).mean();
      if (std::abs(mean - level) < 1e-3) {
        found = static_cast<int>(gi);
        break;
      }
    }
    REQUIRE(found >= 0);
    const auto [begin, end] = s.groups[static_cast<std::size_t>(found)];
    CHECK(end - begin == 2);
  }
}

TEST_CASE("constant kernel grid operator is rank one") {
  const auto circle = make_circle(kTwoPi);
  const auto constant = make_constant_kernel(1.0, 1.0, 0.5, 0.0, 1.0);
  const auto degrees = make_degree_field(constant, circle);
  const std::size_t g = 64;
  const Eigen::MatrixXd T = dense_grid_operator(constant, circle, degrees, g, RefOperator::T);
  const Eigen::MatrixXd J = Eigen::MatrixXd::Constant(g, g, 1.0 / static_cast<double>(g));
  CHECK((T - J).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("m_range of the circle ball kernel degenerates to a point") {
  const auto circle = make_circle(kTwoPi);
  const auto ball = circle_ball();
  const auto degrees = make_degree_field(ball, circle);
  const auto [lo, hi] = m_range(ball, circle, degrees, 256);
  CHECK(lo == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(hi == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(hi >= lo);
}

TEST_CASE("torus grid operator: ball kernel row sums match m and U kills constants") {
  const auto torus = make_torus2(2.0, 2.0);
  const auto ball = make_ball_kernel(0.4, 1.0, 0.1, 4.0, 1.0);
  const auto degrees = make_degree_field(ball, torus);
  const std::size_t g = 24 * 24;

  const Eigen::MatrixXd T = dense_grid_operator(ball, torus, degrees, g, RefOperator::T);
  CHECK((T - T.transpose()).cwiseAbs().maxCoeff() == 0.0);
  // Degree is constant (pi r^2 / area), so m = 1 and row sums approach 1.
  CHECK((T.rowwise().sum() - Eigen::VectorXd::Ones(T.rows())).cwiseAbs().maxCoeff() < 1e-3);
  const Eigen::MatrixXd U = dense_grid_operator(ball, torus, degrees, g, RefOperator::U);
  CHECK((U * Eigen::VectorXd::Ones(U.rows())).cwiseAbs().maxCoeff() < 1e-13);

  // The overlap-area weights integrate to the exact ball measure.
  const double measure = ball_measure(torus, {0.3, 1.1}, 0.4);
  CHECK(T.row(5).sum() * degrees.eval({0.0, 0.0}) ==
        doctest::Approx(measure).epsilon(1e-3));
}

TEST_CASE("torus truncated gaussian grid operator is consistent under refinement") {
  const auto torus = make_torus2(2.0, 2.0);
  const auto trunc = make_truncated_gaussian_kernel(0.08, 0.5, 1.0, 0.01, 8.0, 1.0);
  const auto degrees = make_degree_field(trunc, torus);

  const Eigen::MatrixXd coarse =
      dense_grid_operator(trunc, torus, degrees, 12 * 12, RefOperator::T);
  const Eigen::MatrixXd fine =
      dense_grid_operator(trunc, torus, degrees, 24 * 24, RefOperator::T);
  const auto sc = eig_sym(coarse);
  const auto sf = eig_sym(fine);
  CHECK(sc.values(sc.values.size() - 1) ==
        doctest::Approx(sf.values(sf.values.size() - 1)).epsilon(0.02));
}

TEST_CASE("point cloud grid operator restricts h to the cloud") {
  Eigen::MatrixXd coords(4, 1);
  coords << 0.0, 0.3, 0.6, 0.9;
  const auto cloud = make_point_cloud(coords);
  const auto ball = make_ball_kernel(0.35, 1.0, 0.2, 2.0, 1.0);
  const auto degrees = make_degree_field(ball, cloud);
  const Eigen::MatrixXd T = dense_grid_operator(ball, cloud, degrees, 4, RefOperator::T);
  REQUIRE(T.rows() == 4);
  // T_ij = (1/m) h(x_i, x_j) exactly on an atomic space.
  for (Eigen::Index i = 0; i < 4; ++i)
    for (Eigen::Index j = 0; j < 4; ++j) {
      const double expected =
          0.25 * h_kernel(ball, degrees, {static_cast<double>(i), 0.0},
                          {static_cast<double>(j), 0.0});
      CHECK(T(i, j) == doctest::Approx(expected).epsilon(1e-14));
    }
}
