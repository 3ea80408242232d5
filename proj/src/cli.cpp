#include "hcma/cli.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "hcma/parallel.hpp"
#include "hcma/report.hpp"
#include "hcma/scenario.hpp"

namespace hcma::cli {

namespace fs = std::filesystem;

LinearProbe make_linear_probe(double delta, int circle_size) {
  const CircleGrid g(circle_size);
  LinearProbe p{BoundaryCoeffField{g, {{}}}, BoundaryCoeffField{g, {{}}},
                HermitianField{{Eigen::MatrixXcd::Identity(1, 1)}},
                SymmetricField{{Eigen::MatrixXcd::Zero(1, 1)}},
                BoundaryData{g, {Eigen::MatrixXcd(1, g.size())}}};
  for (int j = 0; j < g.size(); ++j) {
    const double th = g.theta(j);
    Eigen::MatrixXcd a(1, 1), b(1, 1);
    a(0, 0) = 1.0 + delta * std::cos(th);
    b(0, 0) = delta * std::polar(1.0, -2.0 * th);
    p.a_tilde.values[0].push_back(a);
    p.b_tilde.values[0].push_back(b);
    const cplx t = g.node(j);
    p.data.values[0](0, j) = std::conj(t) + 0.3 * t * t + 0.1;
  }
  return p;
}

namespace {

struct Options {
  std::string scenario;
  std::string out_dir = ".";
  unsigned threads = 0;
  std::optional<std::uint64_t> seed;
  bool strict = false;
};

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

// Collects results and checks for one command and writes diagnostics.json.
class Session {
 public:
  Session(std::string command, const Options& opt, std::ostream& out)
      : command_(std::move(command)), opt_(opt), out_(out), started_(utc_now()),
        clock_(std::chrono::steady_clock::now()) {}

  json& results() { return results_; }
  void set_scenario(json s) { scenario_ = std::move(s); }
  void set_seed(std::uint64_t seed) { seed_ = seed; }

  void check(const std::string& name, bool pass, bool warning = false) {
    checks_.push_back({name, pass, warning});
    out_ << (pass ? "PASS " : warning ? "WARN " : "FAIL ") << name << '\n';
  }

  // Library errors inside a diagnostic become a failed check of that name.
  template <class Fn>
  void guarded(const std::string& name, Fn&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      results_[name] = {{"error", std::string(to_string(e.kind()))}, {"message", e.what()}};
      check(name, false);
    }
  }

  void fail(const std::string& kind, const std::string& message) {
    error_ = {{"kind", kind}, {"message", message}};
  }

  fs::path path(const std::string& file) const { return fs::path(opt_.out_dir) / file; }

  template <class Fn>
  void write(const std::string& file, Fn&& fn) const {
    std::ofstream f(path(file));
    if (!f) throw std::runtime_error("cannot write " + path(file).string());
    f << std::setprecision(17);
    fn(f);
  }

  int finish(int code) {
    if (code == kOk) {
      for (const auto& c : checks_)
        if (!c.pass && (!c.warning || opt_.strict)) code = kCheckFailure;
    }
    json checks = json::array();
    for (const auto& c : checks_)
      checks.push_back({{"name", c.name}, {"pass", c.pass}, {"severity", c.warning ? "warning" : "check"}});
    json doc;
    doc["command"] = command_;
    doc["scenario"] = scenario_;
    doc["seed"] = seed_;
    doc["strict"] = opt_.strict;
    doc["results"] = results_;
    doc["checks"] = checks;
    doc["error"] = error_;
    doc["exit_code"] = code;
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - clock_).count();
    doc["timestamps"] = {{"started", started_}, {"finished", utc_now()}, {"wall_seconds", wall}};
    try {
      write("diagnostics.json", [&](std::ostream& o) { o << doc.dump(2) << '\n'; });
    } catch (const std::exception& e) {
      out_ << "error: " << e.what() << '\n';
      if (code == kOk) code = kSolverError;
    }
    out_ << "exit " << code << '\n';
    return code;
  }

 private:
  struct Check {
    std::string name;
    bool pass;
    bool warning;
  };
  std::string command_;
  const Options& opt_;
  std::ostream& out_;
  std::string started_;
  std::chrono::steady_clock::time_point clock_;
  json results_ = json::object();
  json scenario_ = nullptr;
  json error_ = nullptr;
  std::uint64_t seed_ = 0;
  std::vector<Check> checks_;
};

json describe(const Scenario& s) {
  return {{"name", s.name},
          {"kind", s.kind},
          {"n", s.n},
          {"epsilon", s.epsilon},
          {"circle_size", s.circle_size},
          {"spatial_points", s.spatial_points},
          {"half_width", s.half_width},
          {"mode", to_string(s.solver.mode)}};
}

struct Problem {
  Scenario s;
  PotentialPtr psi, rho;
  SpatialGrid grid;
  CircleGrid circle{8};
};

Problem load(const Options& opt, Session& session) {
  if (opt.scenario.empty()) throw Error(ErrorKind::ParseError, "--scenario is required");
  Problem p{load_scenario(opt.scenario), nullptr, nullptr, {}, CircleGrid(8)};
  if (opt.seed) p.s.seed = *opt.seed;
  p.psi = build_potential(p.s);
  p.rho = build_reference(p.s);
  p.grid = build_spatial_grid(p.s);
  p.circle = CircleGrid(p.s.circle_size);
  session.set_scenario(describe(p.s));
  session.set_seed(p.s.seed);
  return p;
}

void write_nodes(std::ostream& out, const SpatialGrid& grid) {
  out << "node";
  for (int i = 1; i <= grid.dim(); ++i) out << ",re_w" << i << ",im_w" << i;
  out << '\n';
  for (std::size_t k = 0; k < grid.size(); ++k) {
    out << k;
    for (int i = 0; i < grid.dim(); ++i) out << ',' << grid[k][i].real() << ',' << grid[k][i].imag();
    out << '\n';
  }
}

// Sup error against z = w + eps s(tau), xi = conj(w) on the circle nodes.
double translation_family_error(const DiscFamily& fam, const TranslationPotential& psi) {
  double err = 0.0;
  for (std::size_t k = 0; k < fam.nodes.size(); ++k) {
    const Eigen::VectorXcd& w = fam.spatial[k];
    for (int j = 0; j < fam.circle.size(); ++j) {
      const cplx t = fam.circle.node(j);
      err = std::max(err, (fam.z(k, t) - w - psi.shift(t)).cwiseAbs().maxCoeff());
      err = std::max(err, (fam.xi(k, t) - w.conjugate()).cwiseAbs().maxCoeff());
    }
  }
  return err;
}

// Shared first stage of solve / diagnose / reconstruct.
Solved solve_stage(const Problem& p, Session& session) {
  const auto small = smallness_check(*p.psi, *p.rho, p.s.solver.box, p.s.solver.alpha,
                                     p.s.smallness_threshold, 256, p.s.seed);
  session.results()["smallness"] = to_json(small);
  session.check("smallness", small.pass, true);

  Solved solved = solve_discs(*p.psi, *p.rho, p.grid, p.circle, p.s.solver);
  session.results()["solve"] = to_json(solved.report);
  session.check("fixed_point", solved.report.fixed_point_error <= 1e-10);

  session.write("discs.csv", [&](std::ostream& o) { write_csv(o, solved.family.nodes); });
  session.write("nodes.csv", [&](std::ostream& o) { write_nodes(o, p.grid); });
  session.write("history.csv", [&](std::ostream& o) { write_history_csv(o, solved.report); });

  if (const auto* tr = dynamic_cast<const TranslationPotential*>(p.psi.get())) {
    const double err = translation_family_error(solved.family, *tr);
    session.results()["exact_family_error"] = number(err);
    session.check("exact_family", err <= 1e-8);
  }
  return solved;
}

void gauge_stage(const Problem& p, const Solved& base, Session& session) {
  Eigen::VectorXcd lin = Eigen::VectorXcd::Zero(p.s.n), quad = Eigen::VectorXcd::Zero(p.s.n);
  lin[0] = p.s.gauge_linear;
  quad[0] = p.s.gauge_quadratic;
  const auto gauge = std::make_shared<PluriharmonicGauge>(lin, quad);
  const SumPotential psi_h(p.psi, gauge), rho_h(p.rho, gauge);
  session.guarded("gauge", [&] {
    const Solved shifted = solve_discs(psi_h, rho_h, p.grid, p.circle, p.s.solver);
    const auto rep = gauge_shift_check(base.family, shifted.family, *gauge, p.s.solver.box);
    session.results()["gauge"] = to_json(rep);
    session.check("gauge", rep.pass);
  });
}

int cmd_solve(const Problem& p, Session& session) {
  const Solved solved = solve_stage(p, session);
  if (p.s.gauge) gauge_stage(p, solved, session);
  return kOk;
}

int cmd_diagnose(const Problem& p, Session& session) {
  const Solved solved = solve_stage(p, session);
  json& r = session.results();

  const double lagrangian = residual(solved.family, *p.psi, p.s.solver.box).sup_norm();
  r["lagrangian_residual"] = number(lagrangian);
  session.check("lagrangian", lagrangian <= 1e-8);

  const auto pc = check_potential(*p.psi, p.s.solver.box, 32, p.s.seed);
  r["potential"] = {{"gradient_fd_error", number(pc.gradient_fd_error)},
                    {"hessian_fd_error", number(pc.hessian_fd_error)},
                    {"min_mixed_eig", number(pc.min_mixed_eig)},
                    {"min_real_hessian_eig", number(pc.min_real_hessian_eig)}};
  session.check("potential_derivatives", pc.gradient_fd_error <= 1e-6 && pc.hessian_fd_error <= 1e-6);

  session.guarded("reconstruction", [&] {
    const LeafField leaf = reconstruct_on_leaves(solved.family, p.psi, p.rho, p.s.solver);
    r["trace_error"] = number(leaf.trace_error());
    session.check("trace", leaf.trace_error() <= 1e-10);
  });
  r["convexity"] = to_json(convexity_check(*p.rho, p.s.solver.box));

  if (p.s.derivative_identity) {
    session.guarded("derivative_identity", [&] {
      const auto study = derivative_identity_refinement(p.psi, p.rho, p.s.center, p.s.half_width,
                                                        p.circle, p.s.solver, p.s.refinement_levels);
      r["derivative_identity"] = to_json(study);
      session.check("derivative_identity", study.study.passes(1.8));
    });
  }
  if (p.s.gauge) gauge_stage(p, solved, session);
  return kOk;
}

int cmd_reconstruct(const Problem& p, Session& session) {
  const Solved solved = solve_stage(p, session);
  json& r = session.results();
  const LeafField leaf = reconstruct_on_leaves(solved.family, p.psi, p.rho, p.s.solver);
  r["trace_error"] = number(leaf.trace_error());

  if (p.s.ma_residual) {
    session.guarded("ma_residual", [&] {
      const auto study = ma_refinement(leaf, p.s.product_z0, p.s.product_tau0, p.s.product_h,
                                       p.s.refinement_levels);
      r["ma_residual"] = to_json(study);
      session.check("ma_order", study.det.passes(1.5));
      session.check("zblock_eigenvalue", study.min_zblock_eig >= 0.5);
    });
  }
  if (p.s.subsolution) {
    session.guarded("subsolution", [&] {
      const SubsolutionField f(leaf);
      const ProductGridSpec spec{p.s.product_z0, p.s.product_tau0, p.s.product_h, 5};
      const ProductField field = resample_to_product(leaf, spec);
      session.write("product.csv", [&](std::ostream& o) { write_product_csv(o, spec, field.phi); });
      const auto env = envelope_check(f, field);
      r["floor_constant"] = number(f.floor_constant());
      r["convexity"] = to_json(f.convexity());
      r["envelope"] = to_json(env);
      session.check("envelope_agreement", env.leaf_agreement <= 1e-7);
      session.check("envelope_dominance", env.dominance_violation <= 1e-7);
      const auto psh = psh_check(f, p.s.psh_samples, 0.02, p.s.seed);
      r["psh"] = to_json(psh);
      session.check("psh", psh.violations == 0);
    });
  }
  return kOk;
}

struct CounterexampleArgs {
  double alpha = 0.5;
  int levels = 14;
  int size = 4096;
  int trials = 20;
};

int cmd_counterexample(const CounterexampleArgs& a, const Options& opt, Session& session) {
  const std::uint64_t seed = opt.seed.value_or(0x5eed);
  session.set_seed(seed);
  json& r = session.results();
  r["parameters"] = {{"alpha", a.alpha}, {"levels", a.levels}, {"size", a.size}, {"trials", a.trials}};
  const ParamFamily fam = counterexample_family(a.alpha, a.size, a.levels);

  const auto lg = log_growth_fit(fam);
  r["log_growth"] = to_json(lg);
  session.write("log_growth.csv", [&](std::ostream& o) { write_table_csv(o, lg.table); });
  session.check("log_growth", lg.pass);

  const auto bmo = bmo_uniformity_check(fam);
  r["bmo_uniformity"] = to_json(bmo);
  session.write("bmo_uniformity.csv", [&](std::ostream& o) { write_table_csv(o, bmo.table); });
  session.check("bmo_bounded", bmo.bmo_bounded);
  session.check("sup_grows", bmo.sup_grows);

  const auto off = offaxis_holder_scan(fam);
  r["offaxis"] = to_json(off);
  session.write("offaxis.csv", [&](std::ostream& o) { write_table_csv(o, off.table); });
  session.check("offaxis", off.pass);

  const auto czo = czo_bmo_bound_check(a.trials, 1024, seed);
  r["czo"] = to_json(czo);
  session.write("czo.csv", [&](std::ostream& o) { write_table_csv(o, czo.table); });
  session.check("czo_bmo_bound", czo.pass);

  const auto jn = john_nirenberg_fit(a.size);
  r["john_nirenberg"] = to_json(jn);
  session.write("john_nirenberg.csv", [&](std::ostream& o) { write_table_csv(o, jn.table); });
  session.check("john_nirenberg", jn.pass);

  // The discrete exponent sits below the expected window at desk resolution,
  // so it is reported as a warning rather than a hard check.
  std::vector<double> betas;
  for (double f : {0.9, 0.8, 0.6, 0.4}) betas.push_back(f * a.alpha);
  const auto blow = holder_blowup_fit(fam, betas);
  r["blowup"] = to_json(blow);
  session.write("blowup.csv", [&](std::ostream& o) { write_table_csv(o, blow.table); });
  session.check("blowup_exponent", blow.pass, true);
  return kOk;
}

int cmd_linear(double delta, int size, Session& session) {
  json& r = session.results();
  r["delta"] = delta;
  r["circle_size"] = size;
  const LinearProbe p = make_linear_probe(delta, size);
  r["coefficient_distance"] =
      std::max(p.a_tilde.distance_to(p.a.values), p.b_tilde.distance_to(p.b.values));
  const LinearSolution sol = solve_linear_perturbed(p.a_tilde, p.b_tilde, p.a, p.b, p.data);
  r["linear"] = to_json(sol.report);
  session.write("linear.csv", [&](std::ostream& o) { write_csv(o, sol.nodes); });
  session.check("residual", sol.report.sup_residual <= 1e-10);
  session.check("contraction", sol.report.contraction_ratio <= 0.5);
  return kOk;
}

int cmd_hilbert(const std::string& probe, int size, Session& session) {
  const CircleGrid g(size);
  std::function<double(double)> f, expected;
  if (probe == "cos") {
    f = [](double t) { return std::cos(t); };
    expected = [](double t) { return std::sin(t); };
  } else if (probe == "sin") {
    f = [](double t) { return std::sin(t); };
    expected = [](double t) { return -std::cos(t); };
  } else {
    // sign of sin theta; continuum transform (2/pi) log|tan(theta/2)|
    f = [](double t) { return std::sin(t) > 1e-14 ? 1.0 : std::sin(t) < -1e-14 ? -1.0 : 0.0; };
    expected = [](double t) { return 2.0 / kPi * std::log(std::abs(std::tan(t / 2))); };
  }
  const CircleFunction in = CircleFunction::sample(g, f);
  const CircleFunction out = hilbert_transform(in);
  Table t{{"theta", "f", "hf", "expected"}, {}};
  double err = 0.0;
  for (int j = 0; j < size; ++j) {
    const double th = g.theta(j);
    const double e = expected(th);
    t.rows.push_back({th, in[j].real(), out[j].real(), e});
    if (std::isfinite(e)) err = std::max(err, std::abs(out[j].real() - e));
  }
  session.write("hilbert.csv", [&](std::ostream& o) { write_table_csv(o, t); });
  json& r = session.results();
  r["probe"] = probe;
  r["circle_size"] = size;
  r["max_error"] = number(err);
  r["imag_part"] = number(out.imag().cwiseAbs().maxCoeff());
  // the step has no finite-grid closed form; only the smooth probes are checked
  if (probe != "step") session.check("closed_form", err <= 1e-10);
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options opt;
  CounterexampleArgs cx;
  double delta = 0.05;
  int linear_size = 128, hilbert_size = 256;
  std::string probe = "cos";

  CLI::App app{"Holomorphic disc families and Monge-Ampere reconstruction"};
  app.option_defaults()->always_capture_default();
  app.add_option("--scenario", opt.scenario, "Scenario file");
  app.add_option("--out", opt.out_dir, "Output directory");
  app.add_option("--threads", opt.threads, "Worker threads (0 = all cores)");
  app.add_option("--seed", opt.seed, "Override the random seed");
  app.add_flag("--strict", opt.strict, "Treat warnings as failures");
  app.require_subcommand(1);
  app.fallthrough();

  auto* solve = app.add_subcommand("solve", "Solve the disc family");
  auto* diagnose = app.add_subcommand("diagnose", "Solve and run boundary and derivative checks");
  auto* reconstruct = app.add_subcommand("reconstruct", "Solve and rebuild the potential");
  auto* counter = app.add_subcommand("counterexample", "Hilbert transform regularity study");
  counter->add_option("--alpha", cx.alpha)->check(CLI::Range(0.05, 0.95));
  counter->add_option("--levels", cx.levels)->check(CLI::Range(6, 20));
  counter->add_option("--size", cx.size);
  counter->add_option("--trials", cx.trials)->check(CLI::Range(10, 10000));
  auto* linear = app.add_subcommand("linear", "Perturbed linear problem on one node");
  linear->add_option("--delta", delta)->check(CLI::Range(0.0, 10.0));
  linear->add_option("--size", linear_size);
  auto* hilbert = app.add_subcommand("hilbert", "Hilbert transform of a probe function");
  hilbert->add_option("--probe", probe)->check(CLI::IsMember({"cos", "sin", "step"}));
  hilbert->add_option("--size", hilbert_size);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kParseError;
  }

  thread_setting() = opt.threads;
  std::error_code ec;
  fs::create_directories(opt.out_dir, ec);
  if (ec) {
    err << "error: cannot create " << opt.out_dir << ": " << ec.message() << '\n';
    return kParseError;
  }

  CLI::App* cmd = app.get_subcommands().front();
  Session session(cmd->get_name(), opt, out);
  int code = kOk;
  try {
    if (cmd == counter) {
      code = cmd_counterexample(cx, opt, session);
    } else if (cmd == linear) {
      code = cmd_linear(delta, linear_size, session);
    } else if (cmd == hilbert) {
      code = cmd_hilbert(probe, hilbert_size, session);
    } else {
      const Problem p = load(opt, session);
      if (cmd == solve) code = cmd_solve(p, session);
      if (cmd == diagnose) code = cmd_diagnose(p, session);
      if (cmd == reconstruct) code = cmd_reconstruct(p, session);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    session.fail(std::string(to_string(e.kind())), e.what());
    code = e.kind() == ErrorKind::ParseError ? kParseError : kSolverError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    session.fail("Internal", e.what());
    code = kSolverError;
  }
  return session.finish(code);
}

}  // namespace hcma::cli
