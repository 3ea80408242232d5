#include <doctest.h>

#include <random>
#include <sstream>

#include "hcma/cli.hpp"
#include "hcma/rh_linear.hpp"

using namespace hcma;

namespace {

struct Coefficients {
  HermitianField a;
  SymmetricField b;
};

Coefficients random_coefficients(int n, int nodes, std::mt19937_64& rng, double b_scale = 0.2) {
  std::normal_distribution<double> d;
  Coefficients c;
  for (int k = 0; k < nodes; ++k) {
    Eigen::MatrixXcd m(n, n), s(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = cplx(d(rng), d(rng)) * 0.3, s(i, j) = cplx(d(rng), d(rng));
    c.a.values.push_back(m * m.adjoint() + Eigen::MatrixXcd::Identity(n, n));
    c.b.values.push_back(b_scale * (s + s.transpose()) / 2.0);
  }
  return c;
}

// Data with Fourier modes |m| <= modes in every component.
BoundaryData make_data(const CircleGrid& g, int n, int nodes, int modes, std::mt19937_64& rng) {
  std::normal_distribution<double> d;
  BoundaryData data{g, {}};
  for (int k = 0; k < nodes; ++k) {
    Eigen::MatrixXcd v = Eigen::MatrixXcd::Zero(n, g.size());
    for (int i = 0; i < n; ++i)
      for (int m = -modes; m <= modes; ++m) {
        const cplx c(d(rng) / (1 + std::abs(m)), d(rng) / (1 + std::abs(m)));
        for (int j = 0; j < g.size(); ++j) v(i, j) += c * std::polar(1.0, m * g.theta(j));
      }
    data.values.push_back(v);
  }
  return data;
}

double max_difference(const LinearSolution& x, const LinearSolution& y) {
  double err = 0.0;
  for (std::size_t k = 0; k < x.nodes.size(); ++k) {
    err = std::max(err, (x.nodes[k].z - y.nodes[k].z).cwiseAbs().maxCoeff());
    err = std::max(err, (x.nodes[k].xi - y.nodes[k].xi).cwiseAbs().maxCoeff());
  }
  return err;
}

}  // namespace

TEST_SUITE("rh_linear") {

TEST_CASE("decoupled solve satisfies the boundary condition and the anchor") {
  std::mt19937_64 rng(1);
  const CircleGrid g(64);
  for (int n : {1, 2, 3}) {
    const auto c = random_coefficients(n, 4, rng);
    const auto data = make_data(g, n, 4, 12, rng);
    const auto sol = solve_linear_trivial(c.a, c.b, data);
    CHECK(boundary_residual(c.a, c.b, sol, data) < 1e-12);
    for (const auto& node : sol.nodes) CHECK(evaluate_rows(node.z, cplx(0, -1)).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("scalar closed form: xi - conj(z) = conj(tau)") {
  const CircleGrid g(32);
  HermitianField a{{Eigen::MatrixXcd::Identity(1, 1)}};
  SymmetricField b{{Eigen::MatrixXcd::Zero(1, 1)}};
  BoundaryData data{g, {Eigen::MatrixXcd(1, g.size())}};
  for (int j = 0; j < g.size(); ++j) data.values[0](0, j) = std::conj(g.node(j));
  const auto sol = solve_linear_trivial(a, b, data);
  // z = -tau - i vanishes at -i and xi = conj(tau) + conj(z) = i on the circle
  CHECK(std::abs(evaluate_rows(sol.nodes[0].z, 0.3)[0] - (-0.3 - kI)) < 1e-13);
  CHECK(std::abs(evaluate_rows(sol.nodes[0].xi, 0.3)[0] - kI) < 1e-13);
}

TEST_CASE("decouple and recouple are inverse") {
  std::mt19937_64 rng(2);
  const CircleGrid g(64);
  const auto c = random_coefficients(2, 3, rng);
  const auto sol = solve_linear_trivial(c.a, c.b, make_data(g, 2, 3, 10, rng));
  const auto back = recouple(c.a, c.b, decouple(c.a, c.b, sol), g);
  CHECK(max_difference(sol, back) < 1e-12);
}

TEST_CASE("solution is linear in the data") {
  std::mt19937_64 rng(3);
  const CircleGrid g(64);
  const auto c = random_coefficients(2, 2, rng);
  const auto d1 = make_data(g, 2, 2, 8, rng), d2 = make_data(g, 2, 2, 8, rng);
  BoundaryData sum{g, {}};
  for (std::size_t k = 0; k < 2; ++k) sum.values.push_back(d1.values[k] - 2.5 * d2.values[k]);
  const auto s1 = solve_linear_trivial(c.a, c.b, d1), s2 = solve_linear_trivial(c.a, c.b, d2);
  auto combo = s1;
  for (std::size_t k = 0; k < 2; ++k) {
    combo.nodes[k].z = s1.nodes[k].z - 2.5 * s2.nodes[k].z;
    combo.nodes[k].xi = s1.nodes[k].xi - 2.5 * s2.nodes[k].xi;
  }
  CHECK(max_difference(combo, solve_linear_trivial(c.a, c.b, sum)) < 1e-12);
}

TEST_CASE("perturbed solve with constant coefficients reduces to the decoupled solve") {
  std::mt19937_64 rng(4);
  const CircleGrid g(64);
  const auto c = random_coefficients(2, 2, rng);
  const auto data = make_data(g, 2, 2, 8, rng);
  BoundaryCoeffField at{g, {}}, bt{g, {}};
  for (std::size_t k = 0; k < 2; ++k) {
    at.values.emplace_back(g.size(), c.a.values[k]);
    bt.values.emplace_back(g.size(), c.b.values[k]);
  }
  CHECK(at.distance_to(c.a.values) == 0.0);
  const auto p = solve_linear_perturbed(at, bt, c.a, c.b, data);
  CHECK(p.report.iterations <= 2);
  CHECK(max_difference(p, solve_linear_trivial(c.a, c.b, data)) < 1e-12);
}

TEST_CASE("basin of the perturbed iteration") {
  const auto small = cli::make_linear_probe(0.05);
  CHECK(std::max(small.a_tilde.distance_to(small.a.values), small.b_tilde.distance_to(small.b.values)) ==
        doctest::Approx(0.05));
  const auto sol = solve_linear_perturbed(small.a_tilde, small.b_tilde, small.a, small.b, small.data);
  CHECK(sol.report.contraction_ratio <= 0.5);
  CHECK(boundary_residual(small.a_tilde, small.b_tilde, sol, small.data) < 1e-10);
  // data norms fed to the decoupled solves decrease geometrically
  for (std::size_t i = 1; i < sol.report.data_norms.size(); ++i)
    CHECK(sol.report.data_norms[i] < sol.report.data_norms[i - 1]);

  const auto large = cli::make_linear_probe(0.9);
  try {
    solve_linear_perturbed(large.a_tilde, large.b_tilde, large.a, large.b, large.data);
    FAIL("expected the iteration to diverge");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NoContraction);
  }
}

TEST_CASE("contraction ratio grows with the perturbation size") {
  double previous = 0.0;
  for (double delta : {0.02, 0.05, 0.1, 0.2}) {
    const auto p = cli::make_linear_probe(delta);
    const auto sol = solve_linear_perturbed(p.a_tilde, p.b_tilde, p.a, p.b, p.data);
    CHECK(sol.report.contraction_ratio > previous);
    previous = sol.report.contraction_ratio;
  }
}

TEST_CASE("coefficient validation") {
  const CircleGrid g(16);
  Eigen::MatrixXcd singular = Eigen::MatrixXcd::Zero(2, 2);
  singular(0, 0) = 1.0;
  HermitianField a{{singular}};
  SymmetricField b{{Eigen::MatrixXcd::Zero(2, 2)}};
  BoundaryData data{g, {Eigen::MatrixXcd::Zero(2, g.size())}};
  try {
    solve_linear_trivial(a, b, data);
    FAIL("expected DegenerateA");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DegenerateA);
  }
  Eigen::MatrixXcd nonherm = Eigen::MatrixXcd::Identity(2, 2);
  nonherm(0, 1) = 0.5;
  CHECK_THROWS_AS(node::check_coefficients(nonherm, Eigen::MatrixXcd::Zero(2, 2), 1e-8), Error);
  BoundaryData wrong{g, {Eigen::MatrixXcd::Zero(1, g.size())}};
  CHECK_THROWS_AS(solve_linear_trivial(HermitianField{{Eigen::MatrixXcd::Identity(2, 2)}}, b, wrong), Error);
}

TEST_CASE("csv layout") {
  std::mt19937_64 rng(5);
  const CircleGrid g(16);
  const auto c = random_coefficients(2, 1, rng);
  const auto sol = solve_linear_trivial(c.a, c.b, make_data(g, 2, 1, 3, rng));
  std::stringstream s;
  write_csv(s, sol.nodes);
  std::string header;
  std::getline(s, header);
  CHECK(header == "node,component,k,re,im");
  int rows = 0;
  for (std::string line; std::getline(s, line);) ++rows;
  CHECK(rows == 4 * (g.max_order() + 1));
}

}  // TEST_SUITE
