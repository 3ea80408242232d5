#include <doctest.h>

#include <sstream>

#include "hcma/hcma_field.hpp"

using namespace hcma;

namespace {

std::shared_ptr<TranslationPotential> translation() {
  Eigen::VectorXcd s(2);
  s << cplx(0, 0.5), 0.5;
  return std::make_shared<TranslationPotential>(0.05, std::vector<TauPolynomial>{{s}});
}

Eigen::VectorXcd point(cplx z) {
  Eigen::VectorXcd v(1);
  v << z;
  return v;
}

// Solved families shared by the cases below (solving is the slow part).
struct Fixture {
  PotentialPtr psi, rho;
  LeafField field;
};

Fixture make(PotentialPtr psi, cplx center, double half_width = 0.5) {
  auto rho = std::make_shared<EuclideanPotential>(1);
  const auto grid = SpatialGrid::tensor(point(center), half_width, 3);
  const auto s = solve_discs(*psi, *rho, grid, CircleGrid(128), {});
  return {psi, rho, reconstruct_on_leaves(s.family, psi, rho)};
}

const Fixture& translation_fixture() {
  static const Fixture f = make(translation(), 0.0);
  return f;
}

const Fixture& quartic_fixture() {
  static const Fixture f = make(std::make_shared<QuarticPotential>(1, 0.02, 1.0, 0.5), 0.0);
  return f;
}

const cplx kTau0 = std::polar(0.2, 0.7);

}  // namespace

TEST_SUITE("hcma_field") {

TEST_CASE("order study") {
  const auto s = order_study({0.2, 0.1, 0.05}, {4e-2, 1e-2, 2.5e-3}, 1e-10);
  CHECK(s.order == doctest::Approx(2.0));
  CHECK_FALSE(s.exact);
  CHECK(s.passes(1.8));
  CHECK_FALSE(s.passes(2.5));
  const auto e = order_study({0.2, 0.1, 0.05}, {1e-16, 3e-16, 0.0}, 1e-10);
  CHECK(e.exact);
  CHECK(e.passes(10.0));
}

TEST_CASE("leaf reconstruction on the translation family") {
  const auto& f = translation_fixture();
  const auto& tr = static_cast<const TranslationPotential&>(*f.psi);
  CHECK(f.field.trace_error() < 1e-13);
  // Psi(z(w, theta), theta) = |w|^2 on the boundary, so u_hat = |w|^2 and
  // Phi = |w|^2 - |w + eps s(tau)|^2 along the leaf
  for (std::size_t k = 0; k < f.field.size(); ++k) {
    const Eigen::VectorXcd& w = f.field.leaf(k).w;
    for (cplx tau : {cplx(0, 0), kTau0, std::polar(0.8, -2.0), std::polar(1.0, 1.0)}) {
      CHECK(std::abs(f.field.u_hat(k, tau) - w.squaredNorm()) < 1e-12);
      const double phi = w.squaredNorm() - (w + tr.shift(tau)).squaredNorm();
      CHECK(std::abs(f.field.phi_on_leaf(k, tau) - phi) < 1e-12);
      CHECK(std::abs(f.field.error_term(k, tau) + phi) < 1e-12);
    }
  }
}

TEST_CASE("lagrangian boundary condition after convergence") {
  for (const Fixture* f : {&translation_fixture(), &quartic_fixture()})
    CHECK(residual(f->field.family(), f->field.psi()).sup_norm() <= 1e-8);
}

TEST_CASE("derivative identity") {
  auto rho = std::make_shared<EuclideanPotential>(1);
  const CircleGrid circle(128);
  const auto exact = derivative_identity_refinement(translation(), rho, point(0.0), 0.2, circle, {});
  CHECK(exact.study.exact);
  // off-center: the quartic family is symmetric about the origin
  const auto q = derivative_identity_refinement(std::make_shared<QuarticPotential>(1, 0.02, 1.0, 0.5), rho,
                                                point(cplx(0.3, 0.1)), 0.2, circle, {});
  CHECK(q.study.passes(1.8));
  CHECK(q.study.order < 2.5);
  for (std::size_t i = 1; i < q.levels.size(); ++i) CHECK(q.levels[i].sup_error < q.levels[i - 1].sup_error);

  const auto coarse = solve_discs(*rho, *rho, SpatialGrid::tensor(point(0.0), 0.5, 1), circle, {});
  const auto leaf = reconstruct_on_leaves(coarse.family, rho, rho);
  CHECK_THROWS_AS(derivative_identity_check(leaf), Error);
}

TEST_CASE("foliation inversion recovers the translation preimage") {
  const auto& f = translation_fixture();
  const auto& tr = static_cast<const TranslationPotential&>(*f.psi);
  const Eigen::VectorXcd target = point(cplx(0.12, -0.07));
  double res = 1.0;
  const Leaf l = invert_foliation(f.field, target, kTau0, point(0.0), 1e-13, &res);
  CHECK(res <= 1e-13);
  CHECK((l.w - (target - tr.shift(kTau0))).norm() < 1e-12);
}

TEST_CASE("monge ampere residual") {
  const auto t = ma_refinement(translation_fixture().field, point(cplx(0.1, 0.05)), kTau0, 0.2);
  CHECK(t.det.exact);
  CHECK(t.min_zblock_eig >= 0.5);
  const auto q = ma_refinement(quartic_fixture().field, point(cplx(0.1, 0.05)), kTau0, 0.2);
  CHECK(q.det.passes(1.5));
  CHECK(q.min_zblock_eig >= 0.5);
  for (const auto& l : q.levels) CHECK(l.max_inversion_residual <= 1e-12);

  ProductGridSpec small{point(0.0), kTau0, 0.1, 3};
  CHECK_THROWS_AS(ma_residual(resample_to_product(quartic_fixture().field, small), *quartic_fixture().rho), Error);
}

TEST_CASE("complex hessian of a quadratic") {
  // f = |z|^2 + 3 |tau|^2 + Re(z conj(tau)) has H = [[1, 1/2], [1/2, 3]]
  ProductGridSpec spec{point(cplx(0.1, 0.2)), cplx(-0.1, 0.3), 0.1, 5};
  std::vector<double> v(spec.size());
  for (std::size_t k = 0; k < spec.size(); ++k) {
    const auto [z, tau] = spec.point(k);
    v[k] = std::norm(z[0]) + 3 * std::norm(tau) + (z[0] * std::conj(tau)).real();
  }
  std::size_t center = 0;
  for (std::size_t k = 0; k < spec.size(); ++k)
    if (spec.interior(k) && (spec.point(k).first - spec.z0).norm() < 1e-14 && std::abs(spec.point(k).second - spec.tau0) < 1e-14)
      center = k;
  const auto h = product_complex_hessian(spec, v, center);
  CHECK(std::abs(h(0, 0) - 1.0) < 1e-10);
  CHECK(std::abs(h(1, 1) - 3.0) < 1e-10);
  CHECK(std::abs(h(0, 1) - 0.5) < 1e-10);
  CHECK(std::abs(h(1, 0) - 0.5) < 1e-10);
}

TEST_CASE("leaf linear functions are pluriharmonic") {
  const auto& f = quartic_fixture();
  for (std::size_t k : {0u, 4u, 8u}) {
    const auto l = leaf_linear_function(f.field, k);
    const auto s = pluriharmonic_refinement(l, point(cplx(0.1, 0.05)), 0.3, 0.05);
    CHECK(s.passes(1.5));
    CHECK(s.errors.back() < 1e-6);
  }
}

TEST_CASE("subsolution envelope") {
  for (const Fixture* f : {&translation_fixture(), &quartic_fixture()}) {
    const SubsolutionField sub(f->field);
    CHECK(sub.lambda0() == doctest::Approx(2.0));
    CHECK(sub.floor_constant() > 0.0);
    const auto field = resample_to_product(f->field, ProductGridSpec{point(cplx(0.1, 0.05)), kTau0, 0.1, 5});
    const auto env = envelope_check(sub, field);
    CHECK(env.leaf_agreement <= 1e-7);
    CHECK(env.dominance_violation <= 1e-7);
    CHECK(env.margin_ratio >= env.margin_bound);
    const auto psh = psh_check(sub, 200);
    CHECK(psh.circles >= 500);
    CHECK(psh.violations == 0);
  }
}

TEST_CASE("psh check detects a corrupted envelope") {
  const SubsolutionField bad(quartic_fixture().field, -1.0, EnvelopeCombine::min);
  CHECK(psh_check(bad, 200).violations > 0);
}

TEST_CASE("convexity of the reference potential") {
  CHECK(convexity_check(EuclideanPotential(2), ChartBox{}).pass);
  // |z|^2 - 0.8 |z|^4 is not convex near |z| = 1
  const auto bent = std::make_shared<ExpressionPotential>("z*zb - 0.8*(z*zb)^2", 1);
  CHECK_FALSE(convexity_check(*bent, ChartBox{1.0}).pass);
  NashMoserConfig cfg;
  cfg.box.radius = 1.0;
  const auto s = solve_discs(*bent, *bent, SpatialGrid::tensor(point(0.0), 0.2, 3), CircleGrid(32), cfg);
  const auto leaf = reconstruct_on_leaves(s.family, bent, bent, cfg);
  try {
    SubsolutionField f(leaf);
    FAIL("expected NotConvex");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotConvex);
  }
}

TEST_CASE("product csv") {
  ProductGridSpec spec{point(0.0), 0.0, 0.1, 3};
  std::stringstream s;
  write_product_csv(s, spec, std::vector<double>(spec.size(), 1.0));
  std::string header;
  std::getline(s, header);
  CHECK(header == "re_z1,im_z1,re_tau,im_tau,value");
  int rows = 0;
  for (std::string line; std::getline(s, line);) ++rows;
  CHECK(rows == 81);
}

}  // TEST_SUITE
