#include <doctest.h>

#include <sstream>

#include "hcma/regularity.hpp"

using namespace hcma;

namespace {

const ParamFamily& family() {
  static const ParamFamily f = counterexample_family(0.5, 4096, 14);
  return f;
}

}  // namespace

TEST_SUITE("regularity_lab") {

TEST_CASE("cutoff and counterexample profile") {
  CHECK(smooth_cutoff(0.0) == 1.0);
  CHECK(smooth_cutoff(1.0) == 1.0);
  CHECK(smooth_cutoff(2.5) == 0.0);
  CHECK(smooth_cutoff(3.0) == 0.0);
  double previous = 1.0;
  for (double t = 1.0; t <= 2.5; t += 0.01) {
    CHECK(smooth_cutoff(t) <= previous + 1e-15);
    previous = smooth_cutoff(t);
  }
  for (double x : {0.0, 0.01, 0.3}) {
    for (double th : {0.001, 0.2, 1.0, 2.0, 3.0}) {
      // odd in theta and bounded by min(|x|, |theta|)^alpha
      CHECK(counterexample_value(x, -th, 0.5) == doctest::Approx(-counterexample_value(x, th, 0.5)));
      CHECK(std::abs(counterexample_value(x, th, 0.5)) <= std::pow(std::min(x, th), 0.5) + 1e-15);
    }
    CHECK(counterexample_value(x, 0.0, 0.5) == doctest::Approx(0.0));
  }
  CHECK(counterexample_value(0.0, 1.0, 0.5) == 0.0);
}

TEST_CASE("parameter grid") {
  const auto x = geometric_parameters(14);
  REQUIRE(x.size() == 13);
  CHECK(x.front() == 0.0);
  CHECK(x[1] == 0.125);
  CHECK(x.back() == std::ldexp(1.0, -14));
}

TEST_CASE("the counterexample is uniformly holder in both variables") {
  const double norm = product_holder_norm([](double x, double t) { return counterexample_value(x, t, 0.5); },
                                          257, 512, 0.5);
  CHECK(norm <= 3.0);
  CHECK(norm >= 1.0);
}

TEST_CASE("logarithmic growth of the transform at theta = 0") {
  const auto r = log_growth_fit(family());
  CHECK(r.pass);
  CHECK(r.fit.slope > 0.0);
  CHECK(r.fit.r2 >= 0.98);
  CHECK(r.table.rows.size() == 12);
  // sampled differences grow relative to x^alpha as x decreases
  CHECK(r.table.rows.back()[1] / std::pow(r.table.rows.back()[0], 0.5) >
        r.table.rows.front()[1] / std::pow(r.table.rows.front()[0], 0.5));
  const auto odd = sample_family("odd", 0.5, {0.0, 0.1, 0.05, 0.01}, CircleGrid(64),
                                 [](double x, double t) { return counterexample_value(x, t, 0.5); });
  CHECK_THROWS_AS(log_growth_fit(odd), Error);
}

TEST_CASE("off-axis holder constants grow towards the axis") {
  const auto r = offaxis_holder_scan(family());
  CHECK(r.increasing);
  CHECK(r.pass);
  for (std::size_t i = 0; i < r.theta0.size(); ++i) CHECK(std::abs(r.theta_used[i] - r.theta0[i]) < 2 * kPi / 4096);
}

TEST_CASE("difference quotients stay bounded in bmo while the sup grows") {
  const auto r = bmo_uniformity_check(family());
  CHECK(r.bmo_bounded);
  CHECK(r.max_over_median <= 3.0);
  CHECK(r.sup_grows);
  CHECK(r.sup_growth.slope > 0.0);
}

TEST_CASE("smooth families show no growth") {
  const auto fam = sample_family("smooth", 0.5, geometric_parameters(14), CircleGrid(1024),
                                 [](double x, double t) { return x * std::sin(t) + std::cos(2 * t); });
  const auto r = bmo_uniformity_check(fam);
  for (double s : r.sup) CHECK(s <= 1.0);
  CHECK(r.sup_growth.slope < 0.0);
}

TEST_CASE("bmo bound of the transform") {
  const auto r = czo_bmo_bound_check(20, 512);
  CHECK(r.pass);
  CHECK(r.trials == 20);
  CHECK(r.cos_ratio == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.max_ratio <= 10.0);
  CHECK_THROWS_AS(czo_bmo_bound_check(5), Error);
}

TEST_CASE("john nirenberg tail of the transformed step") {
  const auto r = john_nirenberg_fit(4096);
  CHECK(r.pass);
  // continuum tail (4/pi) atan(exp(-pi lambda / 2)) decays at rate pi/2
  CHECK(r.decay == doctest::Approx(kPi / 2).epsilon(0.05));
  const CircleGrid g(4096);
  const auto step = CircleFunction::sample(g, [](double t) {
    return std::sin(t) > 1e-14 ? 1.0 : std::sin(t) < -1e-14 ? -1.0 : 0.0;
  });
  const auto h = hilbert_transform(step);
  for (double lambda : {0.5, 1.0, 2.0}) {
    const double exact = 4.0 / kPi * std::atan(std::exp(-kPi * lambda / 2));
    CHECK(std::abs(jn_tail(h, lambda) - exact) < 5e-3);
  }
}

TEST_CASE("holder blow-up fit") {
  const auto r = holder_blowup_fit(family(), {0.45, 0.40, 0.30, 0.20});
  CHECK(r.norms.size() == 4);
  // norms increase as beta approaches alpha
  for (std::size_t i = 1; i < r.norms.size(); ++i) CHECK(r.norms[i] < r.norms[i - 1]);
  CHECK(r.exponent > 0.0);
  CHECK(std::isfinite(r.fit.r2));
  CHECK_THROWS_AS(holder_blowup_fit(family(), {0.45, 0.6, 0.3, 0.2}), Error);
}

TEST_CASE("table csv") {
  Table t{{"a", "b"}, {{1.0, 2.0}, {3.0, 4.5}}};
  std::stringstream s;
  write_table_csv(s, t);
  CHECK(s.str() == "a,b\n1,2\n3,4.5\n");
}

}  // TEST_SUITE
