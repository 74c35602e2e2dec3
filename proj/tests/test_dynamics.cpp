#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "parastab/dynamics.hpp"

using namespace parastab;

namespace {
constexpr double kPi = std::numbers::pi;

const SpaceTimeFn kZeroFn = [](double, double) { return 0.0; };
const SpaceTimeFn kHighObstacle = [](double, double) { return 1e9; };

ProblemData free_heat_problem(const Mesh& mesh, const Field& y0) {
  ProblemData data;
  data.nu = 0.1;
  data.a = kZeroFn;
  data.b = kZeroFn;
  data.f = kZeroFn;
  data.psi = kHighObstacle;
  data.k_penalty = 0.0;
  data.bc = mesh.bc;
  data.y_init = y0;
  data.w_init = y0;
  return data;
}

}  // namespace

TEST_CASE("penalty is the scaled positive part") {
  const Mesh mesh = build_mesh(101, Bc::NeumannHomogeneous);
  const Field psi_t(mesh, 1.0);

  const Field below(mesh, 0.5);
  const Field zero = penalty(below, psi_t, 1000.0);
  for (int i = 0; i < mesh.n_nodes; ++i) CHECK(zero[i] == 0.0);

  const Field above(mesh, 1.5);
  const Field p = penalty(above, psi_t, 1000.0);
  for (int i = 0; i < mesh.n_nodes; ++i) CHECK(p[i] == doctest::Approx(500.0));

  std::mt19937 rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const Field y = oracles::random_field(mesh, rng);
    const Field q = penalty(y, psi_t, 123.0);
    for (int i = 0; i < mesh.n_nodes; ++i) {
      CHECK(q[i] >= 0.0);
      if (y[i] <= psi_t[i]) CHECK(q[i] == 0.0);
      if (y[i] > psi_t[i]) CHECK(q[i] > 0.0);
    }
  }
}

TEST_CASE("positive-part pairing identity under nodal quadrature") {
  // (h, h^+) = ||h^+||^2 holds exactly when the product is formed at the
  // nodes before integrating
  const Mesh mesh = build_mesh(201, Bc::NeumannHomogeneous);
  std::mt19937 rng(42);
  for (int trial = 0; trial < 200; ++trial) {
    const Field h = oracles::random_field(mesh, rng, -2.0, 2.0);
    Field hplus(mesh);
    for (int i = 0; i < mesh.n_nodes; ++i) hplus[i] = std::max(h[i], 0.0);
    const double lhs = integral(pointwise_mul(h, hplus));
    const double rhs = integral(pointwise_mul(hplus, hplus));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("displaced penalty difference: zero input, Lipschitz, monotone") {
  const Mesh mesh = build_mesh(201, Bc::NeumannHomogeneous);
  const double k = 750.0;
  std::mt19937 rng(7);

  const Field y = oracles::random_field(mesh, rng);
  const Field psi_t = oracles::random_field(mesh, rng);
  const Field zero(mesh);
  const Field n0 = nonlinearity(zero, y, psi_t, k);
  for (int i = 0; i < mesh.n_nodes; ++i) CHECK(n0[i] == 0.0);

  for (int trial = 0; trial < 300; ++trial) {
    const Field yy = oracles::random_field(mesh, rng, -2.0, 2.0);
    const Field pp = oracles::random_field(mesh, rng, -2.0, 2.0);
    const Field z1 = oracles::random_field(mesh, rng, -3.0, 3.0);
    const Field z2 = oracles::random_field(mesh, rng, -3.0, 3.0);
    const Field n1 = nonlinearity(z1, yy, pp, k);
    const Field n2 = nonlinearity(z2, yy, pp, k);
    Field dn(mesh), dz(mesh);
    for (int i = 0; i < mesh.n_nodes; ++i) {
      dn[i] = n1[i] - n2[i];
      dz[i] = z1[i] - z2[i];
    }
    CHECK(l2_norm(dn) <= k * l2_norm(dz) * (1.0 + 1e-10));
    CHECK(integral(pointwise_mul(dn, dz)) >= -1e-10);
  }
}

TEST_CASE("explicit terms vanish for trivial data") {
  const Mesh mesh = build_mesh(101, Bc::NeumannHomogeneous);
  ProblemData data = free_heat_problem(mesh, Field(mesh, 0.5));
  const Field state(mesh, 0.5);
  const Field e = explicit_rhs(data, 0.3, state);
  for (int i = 0; i < mesh.n_nodes; ++i) CHECK(e[i] == 0.0);
}

TEST_CASE("convection of a constant field vanishes") {
  const Mesh mesh = build_mesh(101, Bc::NeumannHomogeneous);
  ProblemData data = free_heat_problem(mesh, Field(mesh, 2.0));
  data.b = [](double x, double t) { return std::cos(t) * x * x; };
  const Field state(mesh, 2.0);
  const Field e = explicit_rhs(data, 0.7, state);
  for (int i = 0; i < mesh.n_nodes; ++i) CHECK(e[i] == 0.0);
}

TEST_CASE("reaction sign convention matches the benchmark coefficients") {
  const Mesh mesh = build_mesh(101, Bc::NeumannHomogeneous);
  ProblemData data = free_heat_problem(mesh, Field(mesh, 1.0));
  data.a = [](double x, double t) { return -6.0 + x + 2.0 * std::abs(std::sin(t + x)); };
  const Field state(mesh, 1.0);
  const Field e = explicit_rhs(data, 0.0, state);
  CHECK(e[0] == doctest::Approx(6.0));  // -a(0,0) * 1 = 6 - 2|sin 0|
}

TEST_CASE("heat mode decays at the analytic rate") {
  const Mesh mesh = build_mesh(201, Bc::NeumannHomogeneous);
  const Field y0 = sample(mesh, [](double x) { return std::cos(kPi * x); });
  const ProblemData data = free_heat_problem(mesh, y0);
  const double T = 0.1;
  const Field yT = run_uncontrolled(data, T, 1e-4);
  const double ratio = l2_norm(yT) / l2_norm(y0);
  const double exact = std::exp(-(0.1 * kPi * kPi + 1.0) * T);
  CHECK(std::abs(ratio - exact) / exact < 1e-4);
}

TEST_CASE("constant initial data follows c exp(-t)") {
  const Mesh mesh = build_mesh(51, Bc::NeumannHomogeneous);
  const double c = 2.5;
  const ProblemData data = free_heat_problem(mesh, Field(mesh, c));
  const double T = 0.5;
  const Field yT = run_uncontrolled(data, T, 1e-3);
  for (int i = 0; i < mesh.n_nodes; ++i) {
    CHECK(yT[i] == doctest::Approx(c * std::exp(-T)).epsilon(1e-6));
  }
}

TEST_CASE("time stepping is second order against the discrete-mode oracle") {
  const Mesh mesh = build_mesh(101, Bc::NeumannHomogeneous);
  const oracles::EigenPair mode = oracles::second_generalized_eigenpair(mesh, 0.1);
  const double T = 0.2;
  const double exact = std::exp(-mode.value * T);

  auto ratio_error = [&](double dt) {
    const ProblemData data = free_heat_problem(mesh, mode.vector);
    const Field yT = run_uncontrolled(data, T, dt);
    // the discrete eigenvector evolves by a scalar factor
    return std::abs(l2_norm(yT) / l2_norm(mode.vector) - exact);
  };
  const double e1 = ratio_error(2e-3);
  const double e2 = ratio_error(1e-3);
  const double e3 = ratio_error(5e-4);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.15));
  CHECK(e2 / e3 == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("initial states above the obstacle are rejected") {
  const Mesh mesh = build_mesh(51, Bc::NeumannHomogeneous);
  ProblemData data = free_heat_problem(mesh, Field(mesh, 0.0));
  data.psi = [](double, double) { return -0.5; };
  data.k_penalty = 100.0;
  CHECK_THROWS_AS(data.validate(), std::invalid_argument);

  // exactly at the obstacle passes, slightly above fails
  data.psi = [](double, double) { return 0.0; };
  CHECK_NOTHROW(data.validate());
  data.y_init[10] = 1e-9;
  CHECK_THROWS_AS(data.validate(), std::invalid_argument);
}

TEST_CASE("blow-up raises a divergence error") {
  const Mesh mesh = build_mesh(51, Bc::NeumannHomogeneous);
  ProblemData data = free_heat_problem(mesh, Field(mesh, 1.0));
  data.a = [](double, double) { return -40.0; };  // strong anti-damping
  CHECK_THROWS_AS(run_uncontrolled(data, 1.0, 1e-3), DivergenceError);
}

TEST_CASE("penalty keeps the state near a constant obstacle") {
  // free growth pushes the state up; the penalty caps the overshoot at O(1/k)
  const Mesh mesh = build_mesh(101, Bc::NeumannHomogeneous);
  ProblemData data = free_heat_problem(mesh, Field(mesh, 0.9));
  data.a = [](double, double) { return -3.0; };
  data.psi = [](double, double) { return 1.0; };
  const double k = 2000.0;
  data.k_penalty = k;
  const Field yT = run_uncontrolled(data, 1.0, 1e-4);
  double worst = 0.0;
  for (int i = 0; i < mesh.n_nodes; ++i) worst = std::max(worst, yT[i] - 1.0);
  CHECK(worst > 0.0);          // Moreau-Yosida states do violate slightly
  CHECK(worst < 10.0 / k);     // but only by O(1/k)
}
