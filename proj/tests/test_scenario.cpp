#include <doctest.h>

#include <sstream>

#include "hcma/scenario.hpp"

using namespace hcma;

namespace {

Scenario parse(const std::string& text) {
  std::istringstream in(text);
  return parse_scenario(in);
}

ErrorKind parse_kind(const std::string& text) {
  try {
    parse(text);
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::InvalidArgument;  // sentinel: nothing thrown
}

const std::string kHeader = "[scenario]\nschema_version = 1\nname = t\n";

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("complex literals") {
  CHECK(parse_complex("1.5") == cplx(1.5, 0));
  CHECK(parse_complex("-2i") == cplx(0, -2));
  CHECK(parse_complex("i") == cplx(0, 1));
  CHECK(parse_complex("-i") == cplx(0, -1));
  CHECK(parse_complex("0.3+0.1i") == cplx(0.3, 0.1));
  CHECK(parse_complex(" 1e-2 - 3i ") == cplx(0.01, -3));
  CHECK(parse_complex("2.5e+1+1e-1i") == cplx(25, 0.1));
  CHECK_THROWS_AS(parse_complex("abc"), Error);
  CHECK_THROWS_AS(parse_complex(""), Error);
  const auto l = parse_complex_list("0.5i, 0.5");
  REQUIRE(l.size() == 2);
  CHECK(l[0] == cplx(0, 0.5));
}

TEST_CASE("a full scenario parses") {
  const auto s = parse(kHeader +
                       "[potential]\nkind = translation\nn = 2\nepsilon = 0.05\n"
                       "varsigma1 = 0.5i, 0.5\nvarsigma2 = -0.25, 0.5i, 0.25\n"
                       "[grid]\ncircle_size = 64\nspatial_points = 3\ncenter = 0.1, -0.2i\n"
                       "[solver]\nmode = zehnder_schedule\nresidual_tol = 1e-10\n"
                       "[diagnostics]\ngauge = yes\npsh_samples = 10\nseed = 17\n");
  CHECK(s.kind == "translation");
  CHECK(s.n == 2);
  CHECK(s.varsigma.size() == 2);
  CHECK(s.varsigma[1].coeffs.size() == 3);
  CHECK(s.center[1] == cplx(0, -0.2));
  CHECK(s.product_z0 == s.center);
  CHECK(s.solver.mode == NewtonMode::zehnder_schedule);
  CHECK(s.solver.residual_tol == 1e-10);
  CHECK(s.gauge);
  CHECK(s.seed == 17);
  CHECK(build_potential(s)->dim() == 2);
  CHECK(build_spatial_grid(s).size() == 81);
}

TEST_CASE("defaults") {
  const auto s = parse(kHeader);
  CHECK(s.kind == "trivial");
  CHECK(s.circle_size == 128);
  CHECK(build_potential(s)->describe() == "euclidean");
}

TEST_CASE("rejections are parse errors") {
  CHECK(parse_kind(kHeader + "[potential]\nkind = cubic\n") == ErrorKind::ParseError);
  CHECK(parse_kind(kHeader + "[potential]\nunknown = 1\n") == ErrorKind::ParseError);
  CHECK(parse_kind(kHeader + "[extras]\na = 1\n") == ErrorKind::ParseError);
  CHECK(parse_kind("[scenario]\nschema_version = 2\n") == ErrorKind::ParseError);
  CHECK(parse_kind("[scenario]\nname = x\n") == ErrorKind::ParseError);
  CHECK(parse_kind("[potential]\nkind = trivial\n") == ErrorKind::ParseError);
  CHECK(parse_kind(kHeader + "[grid]\ncircle_size = 100\n") == ErrorKind::ParseError);
  CHECK(parse_kind(kHeader + "[grid]\ncircle_size = 1x\n") == ErrorKind::ParseError);
  CHECK(parse_kind(kHeader + "[grid]\nhalf_width = -1\n") == ErrorKind::ParseError);
  CHECK(parse_kind(kHeader + "[grid]\ncenter = 1, 2\n") == ErrorKind::ParseError);
  CHECK(parse_kind(kHeader + "[solver]\nalpha = 0.2\nbeta = 0.3\n") == ErrorKind::ParseError);
  CHECK(parse_kind(kHeader + "[solver]\nmode = secant\n") == ErrorKind::ParseError);
  CHECK(parse_kind(kHeader + "[diagnostics]\ngauge = maybe\n") == ErrorKind::ParseError);
  // shift not vanishing at the anchor
  CHECK(parse_kind(kHeader + "[potential]\nkind = translation\nvarsigma1 = 1, 1\n") == ErrorKind::ParseError);
  CHECK(parse_kind(kHeader + "[potential]\nkind = translation\nn = 1\nvarsigma2 = 0.5i, 0.5\n") ==
        ErrorKind::ParseError);
  CHECK(parse_kind(kHeader + "[potential]\nkind = expression\n") == ErrorKind::ParseError);
  CHECK(parse_kind(kHeader + "[potential]\nkind = expression\nexpression = z*(zb\n") == ErrorKind::ParseError);
  CHECK(parse_kind(kHeader + "[potential]\nkind = expression\nexpression = z1*z1*zb1\n") == ErrorKind::ParseError);
  CHECK(parse_kind("this is not ini\n[[[\n") == ErrorKind::ParseError);
  CHECK_THROWS_AS(load_scenario("/nonexistent/scenario.ini"), Error);
}

}  // TEST_SUITE
