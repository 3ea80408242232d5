#include <doctest.h>

#include <random>
#include <sstream>

#include "hcma/circle.hpp"

using namespace hcma;

namespace {

// Conjugate function by the principal value integral
//   Hf(t) = (1/2pi) int (f(s) - f(t)) cot((t - s)/2) ds,
// midpoint rule on nodes offset from t; the integrand is smooth and periodic.
double hilbert_quadrature(const std::function<double(double)>& f, double t, int m = 4000) {
  double sum = 0.0;
  const double ds = 2.0 * kPi / m;
  for (int q = 0; q < m; ++q) {
    const double s = t + (q + 0.5) * ds;
    sum += (f(s) - f(t)) / std::tan((t - s) / 2.0);
  }
  return sum * ds / (2.0 * kPi);
}

double poisson_quadrature(const std::function<double(double)>& f, cplx tau, int m = 4000) {
  const double r = std::abs(tau), eta = std::arg(tau);
  double sum = 0.0;
  for (int q = 0; q < m; ++q) {
    const double s = 2.0 * kPi * q / m;
    sum += f(s) * (1 - r * r) / (1 - 2 * r * std::cos(eta - s) + r * r);
  }
  return sum / m;
}

// Mean oscillation over every arc of at least `min_len` nodes.
double bmo_all_arcs(const Eigen::VectorXd& v, int min_len) {
  const int n = static_cast<int>(v.size());
  double best = 0.0;
  for (int len = min_len; len <= n; ++len)
    for (int start = 0; start < n; ++start) {
      double mean = 0.0;
      for (int q = 0; q < len; ++q) mean += v[(start + q) % n];
      mean /= len;
      double osc = 0.0;
      for (int q = 0; q < len; ++q) osc += std::abs(v[(start + q) % n] - mean);
      best = std::max(best, osc / len);
    }
  return best;
}

CircleFunction random_trig(const CircleGrid& g, int modes, std::mt19937_64& rng) {
  std::normal_distribution<double> d;
  std::vector<double> a(modes + 1), b(modes + 1);
  for (int m = 0; m <= modes; ++m) a[m] = d(rng) / (1 + m), b[m] = d(rng) / (1 + m);
  return CircleFunction::sample(g, [&](double t) {
    double s = a[0];
    for (int m = 1; m <= modes; ++m) s += a[m] * std::cos(m * t) + b[m] * std::sin(m * t);
    return s;
  });
}

}  // namespace

TEST_SUITE("circle_harmonics") {

TEST_CASE("grid rejects sizes that are not powers of two") {
  CHECK_THROWS_AS(CircleGrid(12), Error);
  CHECK_THROWS_AS(CircleGrid(4), Error);
  const CircleGrid g(64);
  CHECK(g.anchor_index() == 48);
  CHECK(std::abs(g.node(g.anchor_index()) - cplx(0, -1)) < 1e-15);
  CHECK(g.max_order() == 31);
}

TEST_CASE("hilbert multiplier on pure modes") {
  const CircleGrid g(128);
  for (int m : {1, 2, 7, 63}) {
    const auto c = hilbert_transform(CircleFunction::sample(g, [m](double t) { return std::cos(m * t); }));
    const auto s = hilbert_transform(CircleFunction::sample(g, [m](double t) { return std::sin(m * t); }));
    for (int j = 0; j < g.size(); ++j) {
      CHECK(std::abs(c[j] - std::sin(m * g.theta(j))) < 1e-12);
      CHECK(std::abs(s[j] + std::cos(m * g.theta(j))) < 1e-12);
    }
  }
  // constants and the Nyquist mode are annihilated
  const auto nyq = hilbert_transform(CircleFunction::sample(g, [](double t) { return 3.0 + std::cos(64 * t); }));
  CHECK(nyq.sup_norm() < 1e-12);
}

TEST_CASE("hilbert transform matches the principal value integral") {
  const CircleGrid g(256);
  const std::function<double(double)> f = [](double t) { return 1.0 / (2.0 + std::cos(t) + 0.5 * std::sin(2 * t)); };
  const auto h = hilbert_transform(CircleFunction::sample(g, f));
  double err = 0.0;
  for (int j = 0; j < g.size(); j += 7) err = std::max(err, std::abs(h[j].real() - hilbert_quadrature(f, g.theta(j))));
  CHECK(err < 1e-10);
}

TEST_CASE("hilbert of the real part of an entire function") {
  const CircleGrid g(128);
  const auto h = hilbert_transform(
      CircleFunction::sample(g, [](double t) { return std::exp(std::cos(t)) * std::cos(std::sin(t)); }));
  for (int j = 0; j < g.size(); ++j) {
    const double t = g.theta(j);
    CHECK(std::abs(h[j] - std::exp(std::cos(t)) * std::sin(std::sin(t))) < 1e-12);
  }
}

TEST_CASE("hilbert properties on random trigonometric polynomials") {
  std::mt19937_64 rng(42);
  const CircleGrid g(128);
  for (int trial = 0; trial < 20; ++trial) {
    const auto f = random_trig(g, 40, rng);
    const auto hf = hilbert_transform(f);
    const auto hhf = hilbert_transform(hf);
    // H^2 = -(f - mean)
    CHECK((hhf.samples() + f.samples() - Eigen::VectorXcd::Constant(g.size(), f.mean())).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(hf.is_real(1e-12));
    CHECK(std::abs(hf.mean()) < 1e-13);
    // f + iHf extends holomorphically: no negative modes
    const CircleFunction analytic(g, f.samples() + kI * hf.samples());
    for (int m = 1; m < g.size() / 2; ++m) CHECK(std::abs(analytic.coeff(-m)) < 1e-12);
    // commutes with rotation by a node
    const int shift = 5;
    Eigen::VectorXcd rot(g.size());
    for (int j = 0; j < g.size(); ++j) rot[j] = f[(j + shift) % g.size()];
    const auto hrot = hilbert_transform(CircleFunction(g, rot));
    for (int j = 0; j < g.size(); ++j) CHECK(std::abs(hrot[j] - hf[(j + shift) % g.size()]) < 1e-12);
  }
}

TEST_CASE("poisson extension") {
  const CircleGrid g(128);
  const auto one = CircleFunction::sample(g, [](double) { return 1.0; });
  const auto cs = CircleFunction::sample(g, [](double t) { return std::cos(t); });
  const std::function<double(double)> f = [](double t) { return std::exp(std::sin(t)) - 0.3 * std::cos(3 * t); };
  const auto ff = CircleFunction::sample(g, f);
  for (cplx tau : {cplx(0, 0), cplx(0.3, -0.2), std::polar(0.9, 2.0), std::polar(0.5, -1.1)}) {
    CHECK(std::abs(poisson_extend(one, tau) - 1.0) < 1e-14);
    CHECK(std::abs(poisson_extend(cs, tau) - tau.real()) < 1e-14);
    CHECK(std::abs(poisson_extend(ff, tau).real() - poisson_quadrature(f, tau)) < 1e-10);
  }
  CHECK(std::abs(poisson_extend(ff, 0.0) - ff.mean()) < 1e-14);
  CHECK_THROWS_AS(poisson_extend(ff, 1.0), Error);
}

TEST_CASE("riemann hilbert closed forms") {
  const CircleGrid g(128);
  const auto u = solve_riemann_hilbert(CircleFunction::sample(g, [](double t) { return std::cos(t); }), cplx(0, -1));
  for (cplx tau : {cplx(0.2, 0.1), cplx(-0.5, 0.5), cplx(0, -1)}) CHECK(std::abs(u(tau) - tau) < 1e-10);
  // Re u = f on the circle and the anchor holds, for a generic f
  std::mt19937_64 rng(3);
  const auto f = random_trig(g, 30, rng);
  const cplx anchor(f[g.anchor_index()].real(), 1.5);
  const auto v = solve_riemann_hilbert(f, anchor);
  CHECK(std::abs(v(cplx(0, -1)) - anchor) < 1e-10);
  const auto tr = v.trace(g);
  CHECK((tr.real() - f.real()).cwiseAbs().maxCoeff() < 1e-10);
  // imaginary part of the trace is the conjugate function up to a constant
  const auto hf = hilbert_transform(f);
  const double c = tr.imag()[0] - hf.real()[0];
  CHECK((tr.imag() - hf.real() - Eigen::VectorXd::Constant(g.size(), c)).cwiseAbs().maxCoeff() < 1e-10);
  // incompatible anchor
  CHECK_THROWS_AS(solve_riemann_hilbert(CircleFunction::sample(g, [](double) { return 1.0; }), cplx(2.0, 0)), Error);
}

TEST_CASE("holomorphic projection reports the discarded mass") {
  const CircleGrid g(64);
  const auto f = CircleFunction::sample(g, [](double t) { return std::polar(1.0, 2 * t) + 0.5 * std::polar(1.0, -t); });
  const auto p = HolomorphicDisc::project(f, g.max_order());
  CHECK(std::abs(p.disc.coeffs()[2] - 1.0) < 1e-14);
  CHECK(p.negative_mass_ratio > 0.1);
  CHECK_THROWS_AS(p.disc(cplx(1.1, 0)), Error);
}

TEST_CASE("bmo norm") {
  const CircleGrid g(64);
  // the +-1 step has mean oscillation exactly 1 over the whole circle
  const auto step = CircleFunction::sample(g, [](double t) { return t < kPi ? 1.0 : -1.0; });
  CHECK(std::abs(bmo_norm(step) - 1.0) < 1e-14);
  CHECK(bmo_norm(CircleFunction::sample(g, [](double) { return 2.0; })) < 1e-15);
  // dyadic arcs versus all arcs of at least the smallest dyadic length (4 nodes)
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    const auto f = random_trig(g, 12, rng);
    const double dyadic = bmo_norm(f), all = bmo_all_arcs(f.real(), 4);
    CHECK(dyadic <= all + 1e-14);
    CHECK(all <= 4.0 * dyadic + 1e-14);
  }
}

TEST_CASE("john nirenberg tail and moduli") {
  const CircleGrid g(256);
  const auto step = CircleFunction::sample(g, [](double t) { return t < kPi ? 1.0 : -1.0; });
  CHECK(jn_tail(step, 0.5) == doctest::Approx(1.0));
  CHECK(jn_tail(step, 1.5) == 0.0);
  CHECK_THROWS_AS(jn_tail(step, 0.0), Error);
  const auto c = CircleFunction::sample(g, [](double t) { return std::cos(t); });
  // |cos a - cos b| <= |a - b| with equality in the limit at the steepest point
  const double w = modulus_of_continuity(c, 0.1);
  CHECK(w <= 0.1 + 1e-12);
  CHECK(w > 0.09);
  CHECK(holder_seminorm(c, 0.5) > 0.0);
  CHECK(holder_seminorm(c, 0.5, 1) > 0.0);
}

TEST_CASE("interpolation, derivative and csv round trip") {
  const CircleGrid g(64);
  const auto f = CircleFunction::sample(g, [](double t) { return std::sin(3 * t) + 0.2 * std::cos(t); });
  CHECK(std::abs(f.interpolate(0.123) - (std::sin(0.369) + 0.2 * std::cos(0.123))) < 1e-13);
  const auto d = f.derivative();
  for (int j = 0; j < g.size(); ++j)
    CHECK(std::abs(d[j] - (3 * std::cos(3 * g.theta(j)) - 0.2 * std::sin(g.theta(j)))) < 1e-12);
  std::stringstream s;
  write_csv(s, f);
  const auto back = read_circle_csv(s);
  CHECK((back.samples() - f.samples()).cwiseAbs().maxCoeff() < 1e-15);
}

}  // TEST_SUITE
