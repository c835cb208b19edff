#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/SVD>

#include "adcg/loss.hpp"
#include "adcg/models/lti.hpp"
#include "adcg/models/matcomp.hpp"
#include "adcg/models/superres.hpp"
#include "adcg/models/toy.hpp"
#include "oracles.hpp"

using namespace adcg;
using namespace adcg::models;

namespace {

SuperresModel superres(int grid = 16) {
  SuperresParams p;
  p.grid_w = grid;
  p.grid_h = grid;
  return SuperresModel(p);
}

Vector impulse(int n) {
  Vector u = Vector::Zero(n);
  u[0] = 1.0;
  return u;
}

Vector white_noise(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Vector u(n);
  for (auto& x : u) x = g(rng);
  return u;
}

std::vector<Entry> full_mask(int rows, int cols) {
  std::vector<Entry> omega;
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) omega.push_back({i, j});
  }
  return omega;
}

std::vector<Entry> random_mask(int rows, int cols, double fraction, std::mt19937_64& rng) {
  std::bernoulli_distribution keep(fraction);
  std::vector<Entry> omega;
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      if (keep(rng)) omega.push_back({i, j});
    }
  }
  return omega;
}

}  // namespace

TEST_CASE("superres psi") {
  const auto model = superres();
  const double s = model.params().pixel_size;

  SUBCASE("an isolated source keeps essentially all of its mass") {
    const Vector img = model.psi(ParameterPoint{{8 * s, 8 * s}});
    CHECK(img.sum() >= 1.0 - 1e-6);
    CHECK(img.sum() <= 1.0 + 1e-12);
    CHECK(img.minCoeff() >= 0.0);
  }
  SUBCASE("pixel-centered source matches quadrature of the PSF") {
    const Vector img = model.psi(ParameterPoint{{7.5 * s, 5.5 * s}});
    const double axis = oracle::simpson([](double z) { return std::exp(-0.5 * z * z) / std::sqrt(2 * std::numbers::pi); }, -0.5, 0.5);
    CHECK(axis == doctest::Approx(2 * oracle::normal_cdf(0.5) - 1).epsilon(1e-12));
    CHECK(img[5 * 16 + 7] == doctest::Approx(axis * axis).epsilon(1e-10));
    CHECK(img[5 * 16 + 7] == doctest::Approx(0.3829249225480262 * 0.3829249225480262).epsilon(1e-12));
  }
  SUBCASE("one-pixel translation shifts the image") {
    const Vector a = model.psi(ParameterPoint{{6.3 * s, 7.1 * s}});
    const Vector b = model.psi(ParameterPoint{{7.3 * s, 7.1 * s}});
    for (int row = 0; row < 16; ++row) {
      for (int col = 0; col < 15; ++col) CHECK(std::abs(b[row * 16 + col + 1] - a[row * 16 + col]) < 1e-12);
    }
  }
  SUBCASE("wrong-length points are rejected") {
    CHECK_THROWS_AS(model.psi(ParameterPoint{{1.0}}), DimensionError);
  }
}

TEST_CASE("superres jacobian and its products") {
  const auto model = superres();
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const ParameterPoint t = oracle::random_interior(model, rng);
    const Matrix j = model.jacobian(t);
    const Matrix fd = oracle::finite_difference_jacobian([&](const Vector& x) { return model.psi(x); }, t, 1e-5);
    CHECK(oracle::relative_error(j, fd) < 1e-5);
    const Vector dt{{0.3, -1.2}};
    CHECK((model.jacobian_apply(t, dt) - j * dt).norm() < 1e-12 * (1 + (j * dt).norm()));
    const Vector v = Vector::Random(256);
    CHECK((model.jacobian_transpose_apply(t, v) - j.transpose() * v).norm() < 1e-12 * (1 + (j.transpose() * v).norm()));
  }
}

TEST_CASE("superres lmo") {
  const auto model = superres();
  const double s = model.params().pixel_size;

  SUBCASE("recovers a pixel-centered source") {
    const ParameterPoint t0{{9.5 * s, 4.5 * s}};
    const Vector v = -model.psi(t0);
    const ParameterPoint t = model.lmo(v);
    // Fine-grid oracle around the source at 0.01 px.
    double best = std::numeric_limits<double>::infinity();
    ParameterPoint arg;
    for (int i = -20; i <= 20; ++i) {
      for (int k = -20; k <= 20; ++k) {
        const ParameterPoint c{{t0[0] + i * 0.01 * s, t0[1] + k * 0.01 * s}};
        const double val = model.psi(c).dot(v);
        if (val < best) {
          best = val;
          arg = c;
        }
      }
    }
    CHECK((arg - t0).norm() < 1e-9);
    CHECK((t - t0).norm() < 0.05 * s);
    CHECK(model.psi(t).dot(v) <= best + 1e-12);
  }
  SUBCASE("zero vector returns the first grid point") {
    const ParameterPoint t = model.lmo(Vector::Zero(256));
    CHECK(t[0] == doctest::Approx(0.5 * s));
    CHECK(t[1] == doctest::Approx(0.5 * s));
    CHECK(model.psi(t).dot(Vector::Zero(256)) == 0.0);
  }
  SUBCASE("nonnegative vector gives a nonnegative value") {
    const Vector v = Vector::Random(256).cwiseAbs();
    CHECK(model.psi(model.lmo(v)).dot(v) >= 0.0);
  }
  SUBCASE("never worse than the pixel-center grid") {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> g(0.0, 1.0);
    Vector v(256);
    for (auto& x : v) x = g(rng);
    const double got = model.psi(model.lmo(v)).dot(v);
    for (int a = 0; a < 16; ++a) {
      for (int b = 0; b < 16; ++b) CHECK(got <= model.psi(ParameterPoint{{(a + 0.5) * s, (b + 0.5) * s}}).dot(v) + 1e-12);
    }
  }
}

TEST_CASE("lti psi") {
  SUBCASE("no input and no initial state gives zero output") {
    const LtiModel model(Vector::Zero(20));
    const Vector y = model.psi(ParameterPoint{{0.0, 0.0, 0.7, 1.0, 0.5, -0.5}});
    CHECK(y.isZero(0.0));
  }
  SUBCASE("impulse response of a pure rotation has period four") {
    const LtiModel model(impulse(12));
    const Vector y = model.psi(ParameterPoint{{0.0, 0.0, 1.0, std::numbers::pi / 2, 1.0, 0.0}});
    const double expected[] = {1, 0, -1, 0, 1, 0, -1, 0, 1, 0, -1, 0};
    for (int t = 0; t < 12; ++t) CHECK(y[t] == doctest::Approx(expected[t]).epsilon(1e-12));

    // Matrix-power oracle: y_t = C A^(t-1) B.
    Eigen::Matrix2d a;
    a << 0.6 * std::cos(0.9), -0.6 * std::sin(0.9), 0.6 * std::sin(0.9), 0.6 * std::cos(0.9);
    const Eigen::Vector2d bvec(0.3, -0.8);
    const Vector y2 = model.psi(ParameterPoint{{0.0, 0.0, 0.6, 0.9, 0.3, -0.8}});
    Eigen::Matrix2d power = Eigen::Matrix2d::Identity();
    for (int t = 0; t < 12; ++t) {
      CHECK(y2[t] == doctest::Approx((power * bvec)[0]).epsilon(1e-12));
      power = a * power;
    }
  }
  SUBCASE("zero radius is a one-step delay") {
    const Vector u = white_noise(15, 4);
    const LtiModel model(u);
    const Vector y = model.psi(ParameterPoint{{0.0, 0.0, 0.0, 1.3, 0.7, -0.2}});
    for (int t = 0; t < 15; ++t) CHECK(y[t] == doctest::Approx(0.7 * u[t]).epsilon(1e-12));
  }
  SUBCASE("linear in initial state and input gain") {
    const LtiModel model(white_noise(30, 5));
    const ParameterPoint a{{0.2, -0.1, 0.8, 0.7, 0.3, 0.4}};
    const ParameterPoint b{{-0.5, 0.3, 0.8, 0.7, 0.1, -0.6}};
    ParameterPoint sum = a + b;
    sum[2] = 0.8;
    sum[3] = 0.7;
    CHECK((model.psi(sum) - model.psi(a) - model.psi(b)).norm() < 1e-12);
  }
}

TEST_CASE("lti jacobian") {
  const Vector u = white_noise(25, 8);
  const LtiModel model(u);

  SUBCASE("zero radius") {
    const Matrix j = model.jacobian(ParameterPoint{{0.4, -0.3, 0.0, 0.5, 0.2, 0.9}});
    for (int t = 0; t < 25; ++t) CHECK(j(t, 4) == doctest::Approx(u[t]).epsilon(1e-12));
    for (int t = 1; t < 25; ++t) {
      CHECK(j(t, 0) == 0.0);
      CHECK(j(t, 1) == 0.0);
    }
  }
  SUBCASE("zero input and state") {
    const LtiModel quiet(Vector::Zero(10));
    const Matrix j = quiet.jacobian(ParameterPoint{{0.0, 0.0, 0.5, 1.0, 0.3, 0.3}});
    CHECK(j.col(2).isZero(0.0));
    CHECK(j.col(3).isZero(0.0));
  }
  SUBCASE("finite differences at interior points") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 10; ++trial) {
      const ParameterPoint t = oracle::random_interior(model, rng);
      const Matrix fd = oracle::finite_difference_jacobian([&](const Vector& x) { return model.psi(x); }, t, 1e-6);
      CHECK(oracle::relative_error(model.jacobian(t), fd) < 1e-5);
    }
  }
}

TEST_CASE("lti lmo") {
  const LtiModel model(white_noise(60, 10));
  SUBCASE("matches or beats a planted atom") {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 5; ++trial) {
      const ParameterPoint t0 = oracle::random_interior(model, rng);
      const Vector v = -model.psi(t0);
      const ParameterPoint t = model.lmo(v);
      CHECK(model.contains(t));
      CHECK(model.psi(t).dot(v) <= model.psi(t0).dot(v) + 1e-6);
    }
  }
  SUBCASE("zero vector") {
    const ParameterPoint t = model.lmo(Vector::Zero(60));
    CHECK(model.psi(t).dot(Vector::Zero(60)) == 0.0);
    // Ties in the vertex choice go to +1.
    CHECK(t[0] == 1.0);
    CHECK(t[5] == 1.0);
  }
}

TEST_CASE("matcomp psi") {
  SUBCASE("unit vectors") {
    const MatCompModel on(3, 3, {{0, 0}});
    const MatCompModel off(3, 3, {{1, 1}});
    const ParameterPoint t = on.pack(Vector::Unit(3, 0), Vector::Unit(3, 0));
    CHECK(on.psi(t)[0] == 1.0);
    CHECK(off.psi(t)[0] == 0.0);
  }
  SUBCASE("random pairs match the dense outer product") {
    std::mt19937_64 rng(1);
    const auto omega = random_mask(7, 5, 0.5, rng);
    const MatCompModel model(7, 5, omega);
    const Vector u = oracle::random_unit(7, rng);
    const Vector v = oracle::random_unit(5, rng);
    const Matrix dense = u * v.transpose();
    const Vector got = model.psi(model.pack(u, v));
    for (std::size_t k = 0; k < omega.size(); ++k) CHECK(got[static_cast<Eigen::Index>(k)] == doctest::Approx(dense(omega[k].row, omega[k].col)));
  }
  SUBCASE("non-unit vectors are rejected") {
    const MatCompModel model(2, 2, full_mask(2, 2));
    CHECK_THROWS(model.psi(model.pack(Vector{{1.0, 1.0}}, Vector{{1.0, 0.0}})));
  }
  SUBCASE("bad masks are rejected") {
    CHECK_THROWS(MatCompModel(2, 2, {{2, 0}}));
    CHECK_THROWS(MatCompModel(2, 2, {{0, 0}, {0, 0}}));
  }
}

TEST_CASE("matcomp jacobian") {
  std::mt19937_64 rng(4);
  const MatCompModel model(6, 5, random_mask(6, 5, 0.6, rng));
  const ParameterPoint t = model.pack(oracle::random_unit(6, rng), oracle::random_unit(5, rng));
  const auto unchecked = [&](const Vector& x) {
    const auto [u, v] = model.unpack(x);
    return model.sample_outer(u, v);
  };
  const Matrix j = model.jacobian(t);
  CHECK(oracle::relative_error(j, oracle::finite_difference_jacobian(unchecked, t)) < 1e-8);
  const Vector dt = Vector::Random(11);
  CHECK((model.jacobian_apply(t, dt) - j * dt).norm() < 1e-13);
  const Vector r = Vector::Random(static_cast<Eigen::Index>(model.output_dim()));
  CHECK((model.jacobian_transpose_apply(t, r) - j.transpose() * r).norm() < 1e-13);
}

TEST_CASE("matcomp lmo") {
  SUBCASE("diagonal adjoint") {
    const MatCompModel model(2, 2, {{0, 0}, {1, 1}});
    const Vector v{{3.0, 1.0}};
    const ParameterPoint t = model.lmo(v);
    CHECK(model.psi(t).dot(v) == doctest::Approx(-3.0).epsilon(1e-12));
    const auto [u, w] = model.unpack(t);
    CHECK(std::abs(u[0]) == doctest::Approx(1.0));
    CHECK(std::abs(w[0]) == doctest::Approx(1.0));
    CHECK(u[0] * w[0] == doctest::Approx(-1.0));
  }
  SUBCASE("zero vector") {
    const MatCompModel model(3, 2, full_mask(3, 2));
    const ParameterPoint t = model.lmo(Vector::Zero(6));
    CHECK(model.contains(t));
    CHECK(model.psi(t).dot(Vector::Zero(6)) == 0.0);
  }
  SUBCASE("random sparse matrices match a dense SVD") {
    std::mt19937_64 rng(6);
    std::normal_distribution<double> g(0.0, 1.0);
    for (const auto [rows, cols] : {std::pair{8, 6}, std::pair{30, 20}, std::pair{50, 50}}) {
      const auto omega = random_mask(rows, cols, 0.3, rng);
      const MatCompModel model(rows, cols, omega);
      Vector v(static_cast<Eigen::Index>(omega.size()));
      for (auto& x : v) x = g(rng);
      const Matrix dense = Matrix(model.adjoint(v));
      const double sigma = Eigen::JacobiSVD<Matrix>(dense).singularValues()[0];
      const double got = model.psi(model.lmo(v)).dot(v);
      CHECK(std::abs(got + sigma) <= 1e-6 * sigma);
    }
  }
}

TEST_CASE("matcomp local descent step") {
  const SquaredLoss loss;
  const MatCompModel model(6, 5, full_mask(6, 5));
  std::mt19937_64 rng(13);
  const Vector u0 = oracle::random_unit(6, rng);
  const Vector v0 = oracle::random_unit(5, rng);
  const Vector y = 2.0 * model.psi(model.pack(u0, v0));

  SUBCASE("exact fit has zero gradient") {
    const auto out = model.local_descent_step({model.pack(u0, v0)}, Vector::Constant(1, 2.0), y, loss);
    CHECK(out[0] == model.pack(u0, v0));
  }
  SUBCASE("a perturbed atom turns toward the truth and stays on the spheres") {
    const Vector u = (u0 + 0.1 * oracle::random_unit(6, rng)).normalized();
    const Vector v = (v0 + 0.1 * oracle::random_unit(5, rng)).normalized();
    const auto angle = [&](const ParameterPoint& t) {
      const auto [a, b] = model.unpack(t);
      const Matrix x = a * b.transpose();
      const Matrix truth = u0 * v0.transpose();
      return std::acos(std::clamp(x.cwiseProduct(truth).sum(), -1.0, 1.0));
    };
    const ParameterPoint start = model.pack(u, v);
    const auto out = model.local_descent_step({start}, Vector::Constant(1, 2.0), y, loss);
    CHECK(angle(out[0]) < angle(start));
    const auto [a, b] = model.unpack(out[0]);
    CHECK(std::abs(a.norm() - 1.0) < 1e-12);
    CHECK(std::abs(b.norm() - 1.0) < 1e-12);
  }
}

TEST_CASE("top singular triple") {
  SUBCASE("zero matrix") {
    const Eigen::SparseMatrix<double> z(4, 3);
    const auto t = top_singular_triple(z, {});
    CHECK(t.sigma == 0.0);
    CHECK(t.u.norm() == doctest::Approx(1.0));
    CHECK(t.v.norm() == doctest::Approx(1.0));
  }
  SUBCASE("dense comparison and sign convention") {
    std::mt19937_64 rng(21);
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix dense(12, 9);
    for (Eigen::Index i = 0; i < dense.size(); ++i) dense.data()[i] = g(rng);
    const Eigen::SparseMatrix<double> s = dense.sparseView();
    const auto t = top_singular_triple(s, {});
    const Eigen::JacobiSVD<Matrix> svd(dense, Eigen::ComputeThinU | Eigen::ComputeThinV);
    CHECK(t.converged);
    CHECK(t.sigma == doctest::Approx(svd.singularValues()[0]).epsilon(1e-10));
    CHECK(std::abs(std::abs(t.u.dot(svd.matrixU().col(0))) - 1.0) < 1e-8);
    Eigen::Index imax = 0;
    t.u.cwiseAbs().maxCoeff(&imax);
    CHECK(t.u[imax] > 0.0);
    CHECK((s * t.v - t.sigma * t.u).norm() < 1e-8 * t.sigma);
  }
}

TEST_CASE("moment curve lmo is exact") {
  const MomentCurveModel model(3, -1.0, 1.0);
  std::mt19937_64 rng(30);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const Vector v{{g(rng), g(rng), g(rng)}};
    const double got = model.psi(model.lmo(v)).dot(v);
    double grid = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 20000; ++i) grid = std::min(grid, model.psi(ParameterPoint::Constant(1, -1.0 + i * 1e-4)).dot(v));
    CHECK(got <= grid + 1e-12);
  }
}
