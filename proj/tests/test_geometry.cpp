#include <cmath>

#include "ampcap/geometry.hpp"
#include "ampcap/rng.hpp"
#include "doctest.h"

using namespace ampcap;

namespace {

ChannelMatrix random_channel(int nr, int nt, Rng& rng) {
  Eigen::MatrixXd m(nr, nt);
  for (int i = 0; i < nr; ++i)
    for (int j = 0; j < nt; ++j) m(i, j) = rng.uniform(-1.0, 1.0);
  return ChannelMatrix(m);
}

Eigen::VectorXd random_box_point(const Eigen::VectorXd& a, Rng& rng) {
  Eigen::VectorXd x(a.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) x(i) = rng.uniform(-a(i), a(i));
  return x;
}

}  // namespace

TEST_CASE("input space construction and validation") {
  const InputSpace b = InputSpace::box(Eigen::Vector3d(1.0, 2.0, 3.0));
  CHECK(b.dim() == 3);
  CHECK(r_min(b) == 1.0);
  CHECK(volume(b) == doctest::Approx(48.0));

  const InputSpace s = InputSpace::ball(2, 7.0);
  CHECK(r_min(s) == 7.0);
  CHECK(volume(s) == doctest::Approx(49.0 * kPi));

  CHECK(r_min(InputSpace::box(Eigen::Vector2d(0.0, 5.0))) == 0.0);
  CHECK(volume(InputSpace::box(Eigen::Vector2d(0.0, 5.0))) == 0.0);
  CHECK(volume(InputSpace::box(Eigen::Vector2d(500.0, 500.0))) == doctest::Approx(1e6));

  CHECK_THROWS_AS(InputSpace::box(Eigen::Vector2d(-1.0, 1.0)), std::invalid_argument);
  CHECK_THROWS_AS(InputSpace::ball(0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(InputSpace::ball(2, -1.0), std::invalid_argument);
}

TEST_CASE("channel matrix SVD cache invariants") {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const ChannelMatrix h = random_channel(4, 2, rng);
    const Eigen::MatrixXd recon = h.u().leftCols(h.n_min()) *
                                  h.singular_values().asDiagonal() *
                                  h.v().leftCols(h.n_min()).transpose();
    CHECK((recon - h.matrix()).norm() <= 1e-9 * h.matrix().norm());
    CHECK((h.u().transpose() * h.u() - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() <
          1e-10);
    CHECK((h.v().transpose() * h.v() - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() <
          1e-10);
    for (int i = 1; i < h.n_min(); ++i)
      CHECK(h.singular_values()(i) <= h.singular_values()(i - 1));

    // sign convention: first nonzero entry of each right-singular vector positive
    for (int j = 0; j < 2; ++j) {
      int k = 0;
      while (std::abs(h.v()(k, j)) <= 1e-12) ++k;
      CHECK(h.v()(k, j) > 0.0);
    }
  }
}

TEST_CASE("spectral norm agrees with power iteration") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const ChannelMatrix h = random_channel(3, 3, rng);
    const Eigen::MatrixXd g = h.matrix().transpose() * h.matrix();
    Eigen::VectorXd v = Eigen::VectorXd::Ones(3).normalized();
    for (int it = 0; it < 2000; ++it) v = (g * v).normalized();
    const double sigma1 = std::sqrt(v.dot(g * v));
    CHECK(std::abs(h.spectral_norm() - sigma1) <= 1e-8 * sigma1);
  }
}

TEST_CASE("r_max over boxes: exact vertex maximum") {
  const ChannelMatrix h = ChannelMatrix::diagonal(Eigen::Vector2d(0.3, 0.1));
  const InputSpace x = InputSpace::box(Eigen::Vector2d(500.0, 500.0));
  CHECK(r_max_image(h, x) == doctest::Approx(std::sqrt(25000.0)).epsilon(1e-12));

  Eigen::MatrixXd row(1, 3);
  row << 0.6557, 0.0357, 0.8491;
  const ChannelMatrix h13(row);
  const InputSpace cube = InputSpace::box(Eigen::Vector3d(1.0, 1.0, 1.0));
  CHECK(r_max_image(h13, cube) == doctest::Approx(0.6557 + 0.0357 + 0.8491).epsilon(1e-12));
}

TEST_CASE("r_max over balls: spectral norm times radius") {
  const ChannelMatrix id = ChannelMatrix::diagonal(Eigen::Vector3d(1.0, 1.0, 1.0));
  CHECK(r_max_image(id, InputSpace::ball(3, 4.5)) == doctest::Approx(4.5));
  Eigen::MatrixXd row(1, 3);
  row << 0.6557, 0.0357, 0.8491;
  const ChannelMatrix h13(row);
  CHECK(r_max_image(h13, InputSpace::ball(3, 2.0)) ==
        doctest::Approx(2.0 * h13.spectral_norm()).epsilon(1e-12));
}

TEST_CASE("r_max box beats random search") {
  Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const int nt = 2 + static_cast<int>(rng.uniform01() * 3);  // 2..4
    const int nr = 2 + static_cast<int>(rng.uniform01() * 3);
    const ChannelMatrix h = random_channel(nr, nt, rng);
    Eigen::VectorXd a(nt);
    for (int i = 0; i < nt; ++i) a(i) = rng.uniform(0.1, 10.0);
    const InputSpace x = InputSpace::box(a);
    const double exact = r_max_image(h, x);
    double best = 0.0;
    for (int k = 0; k < 100000; ++k)
      best = std::max(best, (h.matrix() * random_box_point(a, rng)).norm());
    CHECK(exact >= best - 1e-12);
    CHECK(best >= 0.5 * exact);  // random search should get within the right scale
  }
}

TEST_CASE("r_max gray-code enumeration equals brute force") {
  Rng rng(61);
  for (int trial = 0; trial < 10; ++trial) {
    const int nt = 4 + trial % 2;
    const int nr = 2 + trial % 3;
    const ChannelMatrix h = random_channel(nr, nt, rng);
    Eigen::VectorXd a(nt);
    for (int i = 0; i < nt; ++i) a(i) = rng.uniform(0.0, 5.0);  // includes degenerate axes
    double brute = 0.0;
    for (std::uint64_t mask = 0; mask < (1ull << nt); ++mask) {
      Eigen::VectorXd x(nt);
      for (int j = 0; j < nt; ++j) x(j) = (mask >> j) & 1 ? a(j) : -a(j);
      brute = std::max(brute, (h.matrix() * x).norm());
    }
    CHECK(r_max_image(h, InputSpace::box(a)) == doctest::Approx(brute).epsilon(1e-12));
  }
}

TEST_CASE("r_max vertex budget is enforced") {
  Eigen::MatrixXd wide = Eigen::MatrixXd::Ones(2, 25);
  const ChannelMatrix h(wide);
  const InputSpace x = InputSpace::box(Eigen::VectorXd::Ones(25));
  CHECK_THROWS_AS(r_max_image(h, x), budget_error);
  // the ball relaxation suggested by the error message still works
  CHECK(r_max_image(h, InputSpace::ball(25, 1.0)) > 0.0);
}

TEST_CASE("enclosing box of the image") {
  const ChannelMatrix h = ChannelMatrix::diagonal(Eigen::Vector2d(-0.3, 0.1));
  const Eigen::VectorXd box = enclosing_box_of_image(h, InputSpace::box(Eigen::Vector2d(500, 500)));
  CHECK(box(0) == doctest::Approx(150.0));
  CHECK(box(1) == doctest::Approx(50.0));

  const ChannelMatrix id = ChannelMatrix::diagonal(Eigen::Vector2d(1.0, 1.0));
  const Eigen::VectorXd bb = enclosing_box_of_image(id, InputSpace::ball(2, 3.0));
  CHECK(bb(0) == doctest::Approx(3.0));
  CHECK(bb(1) == doctest::Approx(3.0));

  Eigen::MatrixXd row(1, 3);
  row << 0.6557, 0.0357, 0.8491;
  const Eigen::VectorXd be =
      enclosing_box_of_image(ChannelMatrix(row), InputSpace::ball(3, 1.0));
  CHECK(be(0) == doctest::Approx(1.07341).epsilon(1e-4));
}

TEST_CASE("enclosing box dominates the image and is attained") {
  Rng rng(33);
  for (int trial = 0; trial < 5; ++trial) {
    const ChannelMatrix h = random_channel(3, 3, rng);
    Eigen::VectorXd a(3);
    for (int i = 0; i < 3; ++i) a(i) = rng.uniform(0.5, 5.0);
    const InputSpace x = InputSpace::box(a);
    const Eigen::VectorXd box = enclosing_box_of_image(h, x);
    for (int k = 0; k < 100000; ++k) {
      const Eigen::VectorXd y = h.matrix() * random_box_point(a, rng);
      for (int i = 0; i < 3; ++i) CHECK(std::abs(y(i)) <= box(i) + 1e-12);
    }
    // analytic maximizer attains each half-width
    for (int i = 0; i < 3; ++i) {
      Eigen::VectorXd xm(3);
      for (int j = 0; j < 3; ++j) xm(j) = a(j) * (h.matrix()(i, j) >= 0 ? 1.0 : -1.0);
      CHECK(std::abs((h.matrix() * xm)(i)) == doctest::Approx(box(i)).epsilon(1e-9));
    }
  }
}

TEST_CASE("packing efficiency closed cases") {
  const ChannelMatrix id2 = ChannelMatrix::diagonal(Eigen::Vector2d(1.0, 1.0));
  const auto ball_id = packing_efficiency(id2, InputSpace::ball(2, 4.0));
  CHECK(ball_id.exact == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_FALSE(ball_id.box_estimate.has_value());

  // diag(2,1) with a unit ball: ||H||^n / |det H| = 4/2
  const ChannelMatrix d21 = ChannelMatrix::diagonal(Eigen::Vector2d(2.0, 1.0));
  CHECK(packing_efficiency(d21, InputSpace::ball(2, 1.0)).exact == doctest::Approx(2.0));

  // unit square: exact volume quotient pi/2; half-width convention estimate 2 pi
  const auto square = packing_efficiency(id2, InputSpace::box(Eigen::Vector2d(1.0, 1.0)));
  CHECK(square.exact == doctest::Approx(kPi / 2.0).epsilon(1e-12));
  REQUIRE(square.box_estimate.has_value());
  CHECK(*square.box_estimate == doctest::Approx(2.0 * kPi).epsilon(1e-12));

  const ChannelMatrix sing = ChannelMatrix::diagonal(Eigen::Vector2d(1.0, 0.0));
  CHECK_THROWS_AS(packing_efficiency(sing, InputSpace::ball(2, 1.0)), std::runtime_error);
}

TEST_CASE("packing efficiency bounds:exact >= 1 and below the box estimate") {
  Rng rng(55);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = trial % 2 ? 2 : 3;
    ChannelMatrix h = random_channel(n, n, rng);
    while (!h.is_invertible(1e-6)) h = random_channel(n, n, rng);
    Eigen::VectorXd a(n);
    for (int i = 0; i < n; ++i) a(i) = rng.uniform(0.2, 4.0);
    const auto pe = packing_efficiency(h, InputSpace::box(a));
    CHECK(pe.exact >= 1.0 - 1e-12);
    REQUIRE(pe.box_estimate.has_value());
    CHECK(pe.exact <= *pe.box_estimate + 1e-12);
    CHECK(packing_efficiency(h, InputSpace::ball(n, 2.0)).exact >= 1.0 - 1e-12);
  }
}

TEST_CASE("precoded uniform sampler statistics and determinism") {
  // V = I reduces to a plain uniform box
  const Eigen::VectorXd a = Eigen::Vector2d(2.0, 0.5);
  PrecodedUniformSampler ident(Eigen::MatrixXd::Identity(2, 2), a, 99);
  for (int k = 0; k < 1000; ++k) {
    const Eigen::VectorXd x = ident.next();
    CHECK(std::abs(x(0)) <= 2.0);
    CHECK(std::abs(x(1)) <= 0.5);
  }

  // a rotation: V^T x must stay in the box, with covariance diag(a_i^2 / 3)
  const double th = 0.7;
  Eigen::MatrixXd v(2, 2);
  v << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
  PrecodedUniformSampler s(v, a, 123);
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
  const int n = 1000000;
  for (int k = 0; k < n; ++k) {
    const Eigen::VectorXd xt = v.transpose() * s.next();
    CHECK(std::abs(xt(0)) <= 2.0 * (1 + 1e-12));
    CHECK(std::abs(xt(1)) <= 0.5 * (1 + 1e-12));
    cov += xt * xt.transpose();
  }
  cov /= n;
  CHECK(cov(0, 0) == doctest::Approx(4.0 / 3.0).epsilon(0.01));
  CHECK(cov(1, 1) == doctest::Approx(0.25 / 3.0).epsilon(0.01));
  CHECK(std::abs(cov(0, 1)) < 0.01);

  // determinism per seed
  PrecodedUniformSampler s1(v, a, 5), s2(v, a, 5);
  for (int k = 0; k < 10; ++k) CHECK((s1.next() - s2.next()).norm() == 0.0);

  Eigen::MatrixXd bad(2, 2);
  bad << 1.0, 0.1, 0.0, 1.0;
  CHECK_THROWS_AS(PrecodedUniformSampler(bad, a, 1), std::invalid_argument);
}

TEST_CASE("matrix parsing: inline and CSV forms") {
  const Eigen::MatrixXd m = parse_matrix_text("0.3, 0 ; 0, 0.1");
  CHECK(m.rows() == 2);
  CHECK(m(0, 0) == doctest::Approx(0.3));
  CHECK(m(1, 1) == doctest::Approx(0.1));

  const Eigen::MatrixXd m2 = parse_matrix_text("1,2,3\n4,5,6\n");
  CHECK(m2.rows() == 2);
  CHECK(m2.cols() == 3);
  CHECK(m2(1, 2) == doctest::Approx(6.0));

  CHECK_THROWS_AS(parse_matrix_text("1,2\n3"), config_error);
  CHECK_THROWS_AS(parse_matrix_text("1,x\n"), config_error);
  CHECK_THROWS_AS(parse_matrix_text(""), config_error);
}
