// Randomized checks of the library's invariants.
#include <doctest.h>

#include <algorithm>
#include <random>

#include "adcg/bench/metrics.hpp"
#include "adcg/fcstep.hpp"
#include "adcg/loss.hpp"
#include "adcg/measure.hpp"
#include "adcg/models/lti.hpp"
#include "adcg/models/matcomp.hpp"
#include "adcg/models/superres.hpp"
#include "adcg/models/toy.hpp"
#include "adcg/solver.hpp"
#include "oracles.hpp"

using namespace adcg;

namespace {

AtomicMeasure random_measure(const ForwardModel& model, int atoms, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> w(0.0, 2.0);
  std::vector<Atom> out;
  for (int i = 0; i < atoms; ++i) out.push_back({w(rng), oracle::random_interior(model, rng, 0.0)});
  return AtomicMeasure(std::move(out));
}

}  // namespace

TEST_CASE("apply_forward is linear") {
  std::mt19937_64 rng(100);
  std::uniform_int_distribution<int> degree(1, 3), count(0, 6);
  std::uniform_real_distribution<double> scale(0.1, 5.0);
  for (int trial = 0; trial < 100; ++trial) {
    const models::MomentCurveModel model(degree(rng), -2.0, 2.0);
    const AtomicMeasure a = random_measure(model, count(rng), rng);
    const AtomicMeasure b = random_measure(model, count(rng), rng);
    const Vector fa = apply_forward(model, a);
    const Vector fb = apply_forward(model, b);
    const Vector fab = apply_forward(model, combine(a, b));
    CHECK((fab - fa - fb).norm() <= 1e-12 * (1.0 + fab.norm()));
    const double c = scale(rng);
    const Vector fc = apply_forward(model, a.with_weights(c * a.weights()));
    CHECK((fc - c * fa).norm() <= 1e-12 * (1.0 + fc.norm()));
  }
}

TEST_CASE("pruning exact zeros leaves the image unchanged") {
  std::mt19937_64 rng(101);
  const models::MomentCurveModel model(3, -1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const AtomicMeasure mu = random_measure(model, 5, rng);
    CHECK(apply_forward(model, prune_zero_weights(mu, 0.0)) == apply_forward(model, mu));
  }
}

TEST_CASE("caratheodory_prune preserves image and mass") {
  std::mt19937_64 rng(102);
  std::uniform_int_distribution<int> count(1, 25);
  const models::MomentCurveModel cubic(3, -1.0, 1.0);
  models::SuperresParams sp;
  sp.grid_w = 3;
  sp.grid_h = 2;
  const models::SuperresModel tiny(sp);
  const std::vector<const ForwardModel*> models{&cubic, &tiny};
  for (const ForwardModel* model : models) {
    const auto d = static_cast<std::size_t>(model->output_dim());
    for (int trial = 0; trial < 60; ++trial) {
      const AtomicMeasure mu = random_measure(*model, count(rng), rng);
      const AtomicMeasure out = caratheodory_prune(*model, mu);
      const Vector before = apply_forward(*model, mu);
      CHECK(out.size() <= d + 1);
      CHECK((apply_forward(*model, out) - before).norm() <= 1e-8 * (1.0 + before.norm()));
      CHECK(std::abs(out.total_mass() - mu.total_mass()) <= 1e-8 * (1.0 + mu.total_mass()));
      for (const auto& a : out.atoms()) {
        CHECK(a.weight >= 0.0);
        const bool from_input = std::any_of(mu.atoms().begin(), mu.atoms().end(), [&](const Atom& b) { return b.theta == a.theta; });
        CHECK(from_input);
      }
    }
  }
}

TEST_CASE("squared loss gradient and convexity") {
  std::mt19937_64 rng(103);
  std::uniform_int_distribution<int> dim(1, 50);
  std::normal_distribution<double> g(0.0, 3.0);
  for (int trial = 0; trial < 100; ++trial) {
    Vector r(dim(rng)), a(r.size()), b(r.size());
    for (Eigen::Index i = 0; i < r.size(); ++i) {
      r[i] = g(rng);
      a[i] = g(rng);
      b[i] = g(rng);
    }
    const auto value = [](const Vector& x) { return Vector::Constant(1, squared_loss_value(x)); };
    const Matrix fd = oracle::finite_difference_jacobian(value, r);
    CHECK(oracle::relative_error(fd.transpose(), squared_loss_gradient(r)) <= 1e-6);
    CHECK(squared_loss_value(0.5 * (a + b)) <= 0.5 * squared_loss_value(a) + 0.5 * squared_loss_value(b) + 1e-12);
  }
}

TEST_CASE("solve_weights agrees with active-set enumeration") {
  const SquaredLoss loss;
  std::mt19937_64 rng(104);
  std::uniform_int_distribution<int> dd(1, 6), mm(1, 5);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> tau_dist(0.05, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    Matrix a(dd(rng), mm(rng));
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = g(rng);
    Vector y(a.rows());
    for (auto& v : y) v = 2.0 * g(rng);
    const double tau = tau_dist(rng);
    const auto sol = solve_weights({a, y, tau, loss});
    const auto ref = oracle::enumerate_weight_problem(a, y, tau);
    CHECK(sol.w.minCoeff() >= 0.0);
    CHECK(sol.w.sum() <= tau + 1e-12);
    CHECK(std::abs(sol.objective - ref.value) <= 1e-6);
  }
}

TEST_CASE("solver traces on random moment-curve instances") {
  const SquaredLoss loss;
  std::mt19937_64 rng(105);
  std::normal_distribution<double> g(0.0, 0.5);
  const models::MomentCurveModel model(2, -1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const Vector y{{g(rng), g(rng)}};
    // A long run's best objective upper-bounds the optimum, so
    // f_i - f_ref <= f_i - f* <= gap_i must hold.
    SolverConfig c;
    c.tau = 1.0;
    c.max_outer_iters = 40;
    c.gap_tolerance = 1e-10;
    SolverConfig c_ref = c;
    c_ref.variant = Variant::ADCG;
    const auto ref = run(model, y, loss, c_ref);
    const double f_star = *std::min_element(ref.objective_trace.begin(), ref.objective_trace.end());
    for (Variant v : {Variant::CGM_M, Variant::ADCG, Variant::GF}) {
      c.variant = v;
      c.max_outer_iters = 15;
      const auto res = run(model, y, loss, c);
      for (std::size_t i = 0; i < res.objective_trace.size(); ++i) {
        if (i > 0) CHECK(res.objective_trace[i] <= res.objective_trace[i - 1] * (1 + 1e-12) + 1e-15);
        CHECK(res.objective_trace[i] - f_star <= res.gap_trace[i] + 1e-9);
        CHECK(res.gap_trace[i] >= -1e-12);
        CHECK(res.support_trace[i] <= 3);
      }
      CHECK(res.lower_bound <= *std::min_element(res.objective_trace.begin(), res.objective_trace.end()) + 1e-15);
    }
  }
}

TEST_CASE("model output properties") {
  std::mt19937_64 rng(106);
  models::SuperresParams sp;
  sp.grid_w = 12;
  sp.grid_h = 10;
  const models::SuperresModel sr(sp);
  for (int trial = 0; trial < 50; ++trial) {
    const Vector img = sr.psi(oracle::random_interior(sr, rng, 0.0));
    CHECK(img.minCoeff() >= 0.0);
    CHECK(img.sum() <= 1.0 + 1e-12);
  }

  std::normal_distribution<double> g(0.0, 1.0);
  Vector u(40);
  for (auto& x : u) x = g(rng);
  const models::LtiModel lti(u);
  for (int trial = 0; trial < 30; ++trial) {
    ParameterPoint a = oracle::random_interior(lti, rng, 0.0);
    ParameterPoint b = oracle::random_interior(lti, rng, 0.0);
    b[2] = a[2];
    b[3] = a[3];
    ParameterPoint half_sum = 0.5 * (a + b);  // stays in the box
    const Vector lhs = lti.psi(half_sum);
    const Vector rhs = 0.5 * (lti.psi(a) + lti.psi(b));
    CHECK((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
  }
}

TEST_CASE("every lmo returns a feasible point no worse than references") {
  std::mt19937_64 rng(107);
  std::normal_distribution<double> g(0.0, 1.0);
  models::SuperresParams sp;
  sp.grid_w = 10;
  sp.grid_h = 10;
  const models::SuperresModel sr(sp);
  Vector u(50);
  for (auto& x : u) x = g(rng);
  const models::LtiModel lti(u, {20, 20, 100});
  std::vector<models::Entry> omega;
  for (int i = 0; i < 9; ++i) {
    for (int j = 0; j < 7; ++j) {
      if ((i + 2 * j) % 3 != 0) omega.push_back({i, j});
    }
  }
  const models::MatCompModel mc(9, 7, omega);
  const std::vector<const ForwardModel*> models{&sr, &lti, &mc};
  for (const ForwardModel* model : models) {
    for (int trial = 0; trial < 10; ++trial) {
      Vector v(static_cast<Eigen::Index>(model->output_dim()));
      for (auto& x : v) x = g(rng);
      const ParameterPoint t = model->lmo(v);
      CHECK(model->contains(t, 1e-9));
      const double got = model->psi(t).dot(v);
      for (int k = 0; k < 20; ++k) {
        ParameterPoint ref = oracle::random_interior(*model, rng, 0.0);
        ref = model->retract(ref);
        CHECK(got <= model->psi(ref).dot(v) + 1e-9);
      }
    }
  }
}

TEST_CASE("match_sources properties") {
  std::mt19937_64 rng(108);
  std::uniform_real_distribution<double> pos(0.0, 500.0);
  std::uniform_int_distribution<int> count(0, 6);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<bench::Source> est(static_cast<std::size_t>(count(rng))), truth(static_cast<std::size_t>(count(rng)));
    for (auto& s : est) s = {pos(rng), pos(rng), 1.0};
    for (auto& s : truth) s = {pos(rng), pos(rng), 1.0};
    double prev = 0.0;
    for (double radius : {10.0, 50.0, 100.0, 200.0, 400.0, 800.0}) {
      const auto ab = bench::match_sources(est, truth, radius);
      const auto ba = bench::match_sources(truth, est, radius);
      CHECK(ab.precision == ba.recall);
      CHECK(ab.recall == ba.precision);
      CHECK(ab.f1 >= 0.0);
      CHECK(ab.f1 <= 1.0);
      CHECK(ab.f1 >= prev);
      prev = ab.f1;
    }
  }
}

TEST_CASE("sysid_score is at most 100") {
  std::mt19937_64 rng(109);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    Vector test(20), pred(20);
    for (auto& x : test) x = g(rng);
    for (auto& x : pred) x = g(rng);
    CHECK(bench::sysid_score(pred, test) < 100.0);
    CHECK(bench::sysid_score(test, test) == 100.0);
  }
}
