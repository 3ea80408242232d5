// Acceptance run: one PASS/FAIL line per criterion, with the measured
// quantities. Criteria listed in --known-failures still print FAIL but do not
// change the exit status.

#include <chrono>
#include <functional>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "hcma/cli.hpp"
#include "hcma/hcma_field.hpp"
#include "hcma/regularity.hpp"
#include "hcma/scenario.hpp"

using namespace hcma;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(3) << v;
  return s.str();
}

Scenario scenario(const std::string& name) {
  return load_scenario(std::string(HCMA_SCENARIO_DIR) + "/" + name + ".ini");
}

struct Run {
  Scenario s;
  PotentialPtr psi, rho;
  Solved solved;
};

Run solve(const Scenario& s) {
  auto psi = build_potential(s);
  auto rho = build_reference(s);
  auto solved = solve_discs(*psi, *rho, build_spatial_grid(s), CircleGrid(s.circle_size), s.solver);
  return {s, psi, rho, std::move(solved)};
}

Outcome exact_family() {
  const Run r = solve(scenario("translation"));
  const auto& tr = static_cast<const TranslationPotential&>(*r.psi);
  const auto& fam = r.solved.family;
  double stated = 0.0, corrected = 0.0;
  for (std::size_t k = 0; k < fam.nodes.size(); ++k) {
    const Eigen::VectorXcd& w = fam.spatial[k];
    for (int j = 0; j < fam.circle.size(); ++j) {
      const cplx t = fam.circle.node(j);
      const Eigen::VectorXcd s = tr.shift(t);  // eps * varsigma(tau)
      stated = std::max(stated, (fam.z(k, t) - (w - s)).cwiseAbs().maxCoeff());
      stated = std::max(stated, (fam.xi(k, t) - (w.conjugate() - s.conjugate())).cwiseAbs().maxCoeff());
      corrected = std::max(corrected, (fam.z(k, t) - (w + s)).cwiseAbs().maxCoeff());
      corrected = std::max(corrected, (fam.xi(k, t) - w.conjugate()).cwiseAbs().maxCoeff());
    }
  }
  return {stated <= 1e-8, "nodes " + std::to_string(fam.nodes.size()) + ", sup error vs z=w-eps*s, xi=conj(w)-eps*conj(s): " +
                              fmt(stated) + "; vs z=w+eps*s, xi=conj(w): " + fmt(corrected)};
}

Outcome trivial_fixed_point() {
  const Run r = solve(scenario("trivial"));
  const auto& rep = r.solved.report;
  const double dist = [&] {
    const auto triv = trivial_foliation(*r.rho, r.solved.family.spatial, r.solved.family.circle);
    double d = 0.0;
    for (std::size_t k = 0; k < triv.nodes.size(); ++k)
      d = std::max({d, (triv.nodes[k].z - r.solved.family.nodes[k].z).cwiseAbs().maxCoeff(),
                    (triv.nodes[k].xi - r.solved.family.nodes[k].xi).cwiseAbs().maxCoeff()});
    return d;
  }();
  return {rep.newton_steps <= 2 && rep.final_residual <= 1e-12 && dist <= 1e-12,
          "steps " + std::to_string(rep.newton_steps) + ", residual " + fmt(rep.final_residual) +
              ", distance to trivial foliation " + fmt(dist)};
}

struct Fields {
  Run run;
  LeafField field;
};

Fields fields(const std::string& name) {
  Run r = solve(scenario(name));
  LeafField f = reconstruct_on_leaves(r.solved.family, r.psi, r.rho, r.s.solver);
  return {std::move(r), std::move(f)};
}

Outcome ma_residual_order() {
  bool pass = true;
  std::string detail;
  for (const char* name : {"translation", "quartic"}) {
    const Fields f = fields(name);
    const auto& s = f.run.s;
    const auto m = ma_refinement(f.field, s.product_z0, s.product_tau0, s.product_h, s.refinement_levels);
    pass = pass && m.det.passes(1.5) && m.min_zblock_eig >= 0.5;
    detail += std::string(name) + ": sup|det| ";
    for (double e : m.det.errors) detail += fmt(e) + " ";
    detail += (m.det.exact ? "(exact)" : "order " + fmt(m.det.order)) + ", min z-eig " + fmt(m.min_zblock_eig) + "; ";
  }
  return {pass, detail};
}

Outcome lagrangian_and_derivative_identity() {
  bool pass = true;
  std::string detail;
  for (const char* name : {"translation", "quartic"}) {
    const Run r = solve(scenario(name));
    const double lag = residual(r.solved.family, *r.psi, r.s.solver.box).sup_norm();
    const auto d = derivative_identity_refinement(r.psi, r.rho, r.s.center, r.s.half_width,
                                                  CircleGrid(r.s.circle_size), r.s.solver, r.s.refinement_levels);
    pass = pass && lag <= 1e-8 && d.study.passes(1.8);
    detail += std::string(name) + ": |xi - dPsi| " + fmt(lag) + ", identity error ";
    for (double e : d.study.errors) detail += fmt(e) + " ";
    detail += (d.study.exact ? "(exact)" : "order " + fmt(d.study.order)) + "; ";
  }
  return {pass, detail};
}

Outcome gauge_invariance() {
  const Scenario s = scenario("gauge");
  const Run r = solve(s);
  Eigen::VectorXcd lin = Eigen::VectorXcd::Zero(s.n), quad = Eigen::VectorXcd::Zero(s.n);
  quad[0] = 0.02;
  const auto h = std::make_shared<PluriharmonicGauge>(lin, quad);
  const auto shifted = solve_discs(SumPotential(r.psi, h), SumPotential(r.rho, h), build_spatial_grid(s),
                                   CircleGrid(s.circle_size), s.solver);
  const auto g = gauge_shift_check(r.solved.family, shifted.family, *h, s.solver.box);
  return {g.z_difference <= 1e-7 && g.xi_difference <= 1e-7,
          "h = 0.02 Re(z1^2): z difference " + fmt(g.z_difference) + ", xi - dh difference " + fmt(g.xi_difference)};
}

Outcome subsolution_envelope() {
  bool pass = true;
  std::string detail;
  for (const char* name : {"translation", "quartic"}) {
    const Fields f = fields(name);
    const auto& s = f.run.s;
    const SubsolutionField sub(f.field);
    const auto product = resample_to_product(f.field, ProductGridSpec{s.product_z0, s.product_tau0, s.product_h, 5});
    const auto env = envelope_check(sub, product);
    const auto psh = psh_check(sub, s.psh_samples, 0.02, s.seed);
    pass = pass && env.leaf_agreement <= 1e-7 && env.dominance_violation <= 1e-7 && psh.violations == 0 &&
           psh.circles >= 500;
    detail += std::string(name) + ": |F - Phi| on leaves " + fmt(env.leaf_agreement) + ", max(F - Phi) " +
              fmt(env.dominance_violation) + ", psh violations " + std::to_string(psh.violations) + "/" +
              std::to_string(psh.circles) + "; ";
  }
  return {pass, detail};
}

const ParamFamily& counterexample() {
  static const ParamFamily f = counterexample_family(0.5, 4096, 14);
  return f;
}

Outcome hilbert_regularity_loss() {
  const auto lg = log_growth_fit(counterexample());
  const auto bmo = bmo_uniformity_check(counterexample());
  return {lg.fit.slope > 0.0 && lg.fit.r2 >= 0.98 && bmo.max_over_median <= 3.0,
          "log-growth slope " + fmt(lg.fit.slope) + ", R^2 " + fmt(lg.fit.r2) + " (constant-offset model R^2 " +
              fmt(lg.offset_fit.r2) + "), BMO max/median " + fmt(bmo.max_over_median)};
}

Outcome blowup_exponent() {
  const auto b = holder_blowup_fit(counterexample(), {0.45, 0.40, 0.30, 0.20});
  return {b.exponent >= 0.7 && b.exponent <= 1.4, "exponent " + fmt(b.exponent) + ", R^2 " + fmt(b.fit.r2)};
}

Outcome linear_basin() {
  const auto small = cli::make_linear_probe(0.05);
  const auto sol = solve_linear_perturbed(small.a_tilde, small.b_tilde, small.a, small.b, small.data);
  std::string large_outcome = "converged";
  bool raised = false;
  try {
    const auto large = cli::make_linear_probe(0.9);
    solve_linear_perturbed(large.a_tilde, large.b_tilde, large.a, large.b, large.data);
  } catch (const Error& e) {
    large_outcome = std::string(to_string(e.kind()));
    raised = e.kind() == ErrorKind::NoContraction || e.kind() == ErrorKind::NoConvergence;
  }
  return {sol.report.contraction_ratio <= 0.5 && raised,
          "delta 0.05: mean ratio " + fmt(sol.report.contraction_ratio) + " in " +
              std::to_string(sol.report.iterations) + " iterations; delta 0.9: " + large_outcome};
}

Outcome unit_identities() {
  const CircleGrid g(128);
  const auto c = CircleFunction::sample(g, [](double t) { return std::cos(t); });
  const auto s = CircleFunction::sample(g, [](double t) { return std::sin(t); });
  const auto one = CircleFunction::sample(g, [](double) { return 1.0; });
  double err = 0.0;
  const auto hc = hilbert_transform(c), hs = hilbert_transform(s), h1 = hilbert_transform(one);
  for (int j = 0; j < g.size(); ++j) {
    err = std::max({err, std::abs(hc[j] - s[j]), std::abs(hs[j] + c[j]), std::abs(h1[j])});
  }
  const auto u = solve_riemann_hilbert(c, cplx(0, -1));
  for (cplx tau : {cplx(0, 0), cplx(0.3, -0.4), std::polar(0.95, 2.0)}) {
    err = std::max({err, std::abs(poisson_extend(one, tau) - 1.0), std::abs(poisson_extend(c, tau) - tau.real()),
                    std::abs(u(tau) - tau)});
  }
  return {err <= 1e-10, "max identity error " + fmt(err)};
}

}  // namespace

int main(int argc, char** argv) {
  std::string known;
  CLI::App app{"acceptance criteria"};
  app.add_option("--known-failures", known, "Comma-separated criteria whose failure is expected");
  CLI11_PARSE(app, argc, argv);
  std::set<int> expected;
  std::stringstream ks(known);
  for (std::string item; std::getline(ks, item, ',');)
    if (!item.empty()) expected.insert(std::stoi(item));

  struct Criterion {
    int id;
    const char* name;
    double budget;  // seconds; 0 = no runtime bound
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "exact-family recovery", 10, exact_family},
      {2, "trivial fixed point", 2, trivial_fixed_point},
      {3, "HCMA residual", 60, ma_residual_order},
      {4, "Lagrangian boundary and derivative identity", 0, lagrangian_and_derivative_identity},
      {5, "gauge invariance", 0, gauge_invariance},
      {6, "subsolution envelope", 0, subsolution_envelope},
      {7, "Hilbert-transform regularity loss", 120, hilbert_regularity_loss},
      {8, "blow-up exponent", 0, blowup_exponent},
      {9, "linear-solver basin", 0, linear_basin},
      {10, "unit exactness", 0, unit_identities},
  };

  int unexpected = 0, passed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget > 0 && secs > c.budget) {
      o.pass = false;
      o.detail += " [runtime over " + fmt(c.budget) + " s]";
    }
    std::cout << "criterion " << std::setw(2) << c.id << ": " << (o.pass ? "PASS" : "FAIL") << "  " << c.name
              << " (" << std::fixed << std::setprecision(2) << secs << " s)" << std::defaultfloat << "  "
              << o.detail;
    if (!o.pass && expected.count(c.id)) std::cout << "  [known failure]";
    std::cout << std::endl;
    passed += o.pass;
    if (!o.pass && !expected.count(c.id)) ++unexpected;
  }
  std::cout << passed << "/" << criteria.size() << " criteria passed";
  if (unexpected) std::cout << ", " << unexpected << " unexpected failure(s)";
  std::cout << std::endl;
  return unexpected ? 1 : 0;
}
