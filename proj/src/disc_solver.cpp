#include "hcma/disc_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "hcma/parallel.hpp"

namespace hcma {

// ---- SpatialGrid ------------------------------------------------------------

SpatialGrid SpatialGrid::tensor(const Eigen::VectorXcd& center, double half_width, int points) {
  if (points < 1) throw Error(ErrorKind::InvalidArgument, "tensor grid needs points >= 1");
  if (center.size() < 1) throw Error(ErrorKind::InvalidArgument, "tensor grid needs n >= 1");
  SpatialGrid g;
  g.dim_ = static_cast<int>(center.size());
  g.points_ = points;
  g.center_ = center;
  g.spacing_ = points > 1 ? 2.0 * half_width / (points - 1) : 0.0;
  const int axes = 2 * g.dim_;
  std::size_t total = 1;
  for (int a = 0; a < axes; ++a) total *= static_cast<std::size_t>(points);
  g.nodes_.reserve(total);
  for (std::size_t k = 0; k < total; ++k) {
    Eigen::VectorXcd w = center;
    std::size_t rest = k;
    for (int a = 0; a < axes; ++a) {
      const int idx = static_cast<int>(rest % points);
      rest /= points;
      const double offset = points > 1 ? -half_width + idx * g.spacing_ : 0.0;
      if (a < g.dim_)
        w[a] += offset;
      else
        w[a - g.dim_] += cplx(0.0, offset);
    }
    g.nodes_.push_back(std::move(w));
  }
  return g;
}

SpatialGrid SpatialGrid::list(std::vector<Eigen::VectorXcd> nodes) {
  if (nodes.empty()) throw Error(ErrorKind::InvalidArgument, "empty node list");
  SpatialGrid g;
  g.dim_ = static_cast<int>(nodes.front().size());
  for (const auto& w : nodes)
    if (w.size() != g.dim_) throw Error(ErrorKind::DimensionMismatch, "node list mixes dimensions");
  g.center_ = nodes.front();
  g.nodes_ = std::move(nodes);
  return g;
}

std::optional<std::size_t> SpatialGrid::neighbor(std::size_t k, int axis, int step) const {
  if (!is_tensor()) return std::nullopt;
  std::size_t stride = 1;
  for (int a = 0; a < axis; ++a) stride *= static_cast<std::size_t>(points_);
  const int idx = static_cast<int>((k / stride) % points_);
  const int moved = idx + step;
  if (moved < 0 || moved >= points_) return std::nullopt;
  return k + static_cast<std::ptrdiff_t>(step) * static_cast<std::ptrdiff_t>(stride);
}

double DiscFamily::fixed_point_error() const {
  double err = 0.0;
  for (std::size_t k = 0; k < nodes.size(); ++k)
    err = std::max(err, (z(k, -kI) - spatial[k]).cwiseAbs().maxCoeff());
  return err;
}

// ---- config -----------------------------------------------------------------

void NashMoserConfig::validate() const {
  if (!(0.0 < beta && beta < alpha && alpha < 1.0))
    throw Error(ErrorKind::InvalidArgument, "need 0 < beta < alpha < 1");
  if (!(residual_tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "residual_tol must be positive");
  if (max_outer_iterations < 1) throw Error(ErrorKind::InvalidArgument, "max_outer_iterations < 1");
  if (!(kappa > 1.0) || !(lambda > 0.0))
    throw Error(ErrorKind::InvalidArgument, "schedule needs kappa > 1 and lambda > 0");
}

int NashMoserConfig::cutoff(int step, int order) const {
  if (mode == NewtonMode::plain_newton) return order;
  const double grow = 1.0 - std::exp(-lambda * std::pow(kappa, step));
  const int c = static_cast<int>(std::ceil(order * grow + base_modes));
  return std::clamp(c, 0, order);
}

std::string to_string(NewtonMode mode) {
  return mode == NewtonMode::plain_newton ? "plain_newton" : "zehnder_schedule";
}

NewtonMode parse_mode(const std::string& text) {
  if (text == "plain_newton") return NewtonMode::plain_newton;
  if (text == "zehnder_schedule") return NewtonMode::zehnder_schedule;
  throw Error(ErrorKind::ParseError, "unknown solver mode '" + text + "'");
}

// ---- per-node kernels -------------------------------------------------------

namespace {

Eigen::MatrixXcd node_residual(const DiscPair& d, const Potential& psi, const CircleGrid& grid,
                               const ChartBox& box, Eigen::MatrixXcd* z_trace = nullptr) {
  const int size = grid.size();
  const Eigen::MatrixXcd zt = trace_rows(d.z, size);
  const Eigen::MatrixXcd xt = trace_rows(d.xi, size);
  Eigen::MatrixXcd t(zt.rows(), size);
  for (int j = 0; j < size; ++j) {
    const Eigen::VectorXcd zj = zt.col(j);
    if (!box.contains(zj)) {
      std::ostringstream msg;
      msg << "disc boundary left the chart box at theta = " << grid.theta(j);
      throw Error(ErrorKind::LeftChart, msg.str());
    }
    t.col(j) = xt.col(j) - psi.gradient(zj, grid.node(j));
  }
  if (z_trace) *z_trace = zt;
  return t;
}

struct NodeStep {
  DiscPair next;
  double correction = 0.0;
};

NodeStep node_step(const DiscPair& d, const Potential& psi, const CircleGrid& grid,
                   const NashMoserConfig& config, int cutoff, LinearReport& report) {
  const int size = grid.size();
  Eigen::MatrixXcd zt;
  const Eigen::MatrixXcd t = node_residual(d, psi, grid, config.box, &zt);
  const Eigen::Index n = zt.rows();

  std::vector<Eigen::MatrixXcd> a_tilde(size), b_tilde(size);
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n, n), b = Eigen::MatrixXcd::Zero(n, n);
  for (int j = 0; j < size; ++j) {
    const Eigen::VectorXcd zj = zt.col(j);
    a_tilde[j] = psi.mixed_hessian(zj, grid.node(j));
    b_tilde[j] = psi.holo_hessian(zj, grid.node(j));
    a += a_tilde[j];
    b += b_tilde[j];
  }
  a /= static_cast<double>(size);
  b /= static_cast<double>(size);
  a = 0.5 * (a + a.adjoint()).eval();
  b = 0.5 * (b + b.transpose()).eval();

  PerturbedOptions opts{config.inner_tol, config.inner_max_iterations};
  DiscPair corr = node::solve_perturbed(a_tilde, b_tilde, a, b, -t, grid, opts, report);

  const int order = grid.max_order();
  if (cutoff < order) {
    corr.z.rightCols(order - cutoff).setZero();
    corr.xi.rightCols(order - cutoff).setZero();
    // keep the correction of z vanishing at the fixed point
    corr.z.col(0) -= evaluate_rows(corr.z, -kI);
  }
  NodeStep out;
  out.correction = std::max(corr.z.cwiseAbs().maxCoeff(), corr.xi.cwiseAbs().maxCoeff());
  out.next.z = d.z + corr.z;
  out.next.xi = d.xi + corr.xi;
  return out;
}

void merge(LinearReport& into, const LinearReport& from) {
  into.sup_residual = std::max(into.sup_residual, from.sup_residual);
  into.iterations = std::max(into.iterations, from.iterations);
  into.contraction_ratio = std::max(into.contraction_ratio, from.contraction_ratio);
  into.negative_mass = std::max(into.negative_mass, from.negative_mass);
  into.max_condition = std::max(into.max_condition, from.max_condition);
  if (from.data_norms.size() > into.data_norms.size()) into.data_norms = from.data_norms;
}

double sup_of(const std::vector<Eigen::MatrixXcd>& values) {
  double s = 0.0;
  for (const auto& v : values)
    if (v.size()) s = std::max(s, v.cwiseAbs().maxCoeff());
  return s;
}

}  // namespace

// ---- public operations ------------------------------------------------------

DiscFamily trivial_foliation(const Potential& rho, const SpatialGrid& spatial,
                             const CircleGrid& circle) {
  if (rho.dim() != spatial.dim())
    throw Error(ErrorKind::DimensionMismatch, "reference potential and grid differ in dimension");
  DiscFamily f{spatial, circle, {}};
  const int order = circle.max_order();
  const int n = spatial.dim();
  f.nodes.resize(spatial.size());
  for (std::size_t k = 0; k < spatial.size(); ++k) {
    DiscPair& d = f.nodes[k];
    d.z = Eigen::MatrixXcd::Zero(n, order + 1);
    d.xi = Eigen::MatrixXcd::Zero(n, order + 1);
    d.z.col(0) = spatial[k];
    d.xi.col(0) = rho.gradient(spatial[k], -kI);
  }
  return f;
}

BoundaryData residual(const DiscFamily& family, const Potential& psi, const ChartBox& box) {
  BoundaryData out{family.circle, std::vector<Eigen::MatrixXcd>(family.nodes.size())};
  parallel_for(family.nodes.size(), [&](std::size_t k) {
    out.values[k] = node_residual(family.nodes[k], psi, family.circle, box);
  });
  return out;
}

DiscFamily newton_step(const DiscFamily& family, const Potential& psi,
                       const NashMoserConfig& config, StepReport& report, int step_index) {
  const std::size_t count = family.nodes.size();
  const int cutoff = config.cutoff(step_index, family.order());
  std::vector<NodeStep> steps(count);
  std::vector<LinearReport> reports(count);
  std::vector<double> before(count);
  parallel_for(count, [&](std::size_t k) {
    before[k] = node_residual(family.nodes[k], psi, family.circle, config.box).cwiseAbs().maxCoeff();
    steps[k] = node_step(family.nodes[k], psi, family.circle, config, cutoff, reports[k]);
  });
  DiscFamily next{family.spatial, family.circle, std::vector<DiscPair>(count)};
  report = StepReport{};
  report.cutoff = cutoff;
  for (std::size_t k = 0; k < count; ++k) {
    next.nodes[k] = std::move(steps[k].next);
    report.correction_norm = std::max(report.correction_norm, steps[k].correction);
    report.residual_before = std::max(report.residual_before, before[k]);
    merge(report.linear, reports[k]);
  }
  report.residual_after = sup_of(residual(next, psi, config.box).values);
  return next;
}

Solved solve_discs(const Potential& psi, const Potential& rho, const SpatialGrid& spatial,
                   const CircleGrid& circle, const NashMoserConfig& config) {
  if (psi.dim() != rho.dim())
    throw Error(ErrorKind::DimensionMismatch, "potentials differ in dimension");
  return solve_discs_from(trivial_foliation(rho, spatial, circle), psi, config);
}

Solved solve_discs_from(DiscFamily start, const Potential& psi, const NashMoserConfig& config,
                        bool check_foliation) {
  config.validate();
  Solved out{std::move(start), {}};
  SolveReport& rep = out.report;
  double r = sup_of(residual(out.family, psi, config.box).values);
  rep.residual_history.push_back(r);
  const double blowup = 1e3 * std::max(r, 1.0);
  while (r > config.residual_tol) {
    if (rep.newton_steps >= config.max_outer_iterations) {
      std::ostringstream msg;
      msg << "residual " << r << " above " << config.residual_tol << " after "
          << rep.newton_steps << " Newton steps";
      throw Error(ErrorKind::NoConvergence, msg.str());
    }
    StepReport step;
    out.family = newton_step(out.family, psi, config, step, rep.newton_steps);
    ++rep.newton_steps;
    const double next = step.residual_after;
    if (!std::isfinite(next) || next > blowup)
      throw Error(ErrorKind::NoConvergence, "Newton iteration diverged");
    if (rep.newton_steps >= 2 && next > r) rep.monotone_after_first = false;
    if (r > 0.0) rep.quadratic_constants.push_back(next / (r * r));
    rep.residual_history.push_back(next);
    rep.correction_norms.push_back(step.correction_norm);
    rep.cutoffs.push_back(step.cutoff);
    rep.max_linear_iterations = std::max(rep.max_linear_iterations, step.linear.iterations);
    rep.max_linear_contraction = std::max(rep.max_linear_contraction, step.linear.contraction_ratio);
    rep.max_negative_mass = std::max(rep.max_negative_mass, step.linear.negative_mass);
    r = next;
  }
  rep.final_residual = r;
  rep.fixed_point_error = out.family.fixed_point_error();
  if (check_foliation && out.family.spatial.is_tensor() && out.family.spatial.points() >= 2) {
    rep.min_foliation_det = foliation_min_det(out.family);
    if (rep.min_foliation_det < 0.1) {
      std::ostringstream msg;
      msg << "foliation Jacobian determinant " << rep.min_foliation_det << " below 0.1";
      throw Error(ErrorKind::FoliationDegenerate, msg.str());
    }
  } else {
    rep.min_foliation_det = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

DiscPair solve_leaf(const Potential& psi, const Potential& rho, const Eigen::VectorXcd& w,
                    const CircleGrid& circle, const NashMoserConfig& config) {
  config.validate();
  const int order = circle.max_order();
  const int n = static_cast<int>(w.size());
  DiscPair d{Eigen::MatrixXcd::Zero(n, order + 1), Eigen::MatrixXcd::Zero(n, order + 1)};
  d.z.col(0) = w;
  d.xi.col(0) = rho.gradient(w, -kI);
  double r = node_residual(d, psi, circle, config.box).cwiseAbs().maxCoeff();
  for (int step = 0; r > config.residual_tol; ++step) {
    if (step >= config.max_outer_iterations)
      throw Error(ErrorKind::NoConvergence, "leaf solve did not converge");
    LinearReport lr;
    d = node_step(d, psi, circle, config, config.cutoff(step, order), lr).next;
    r = node_residual(d, psi, circle, config.box).cwiseAbs().maxCoeff();
    if (!std::isfinite(r)) throw Error(ErrorKind::NoConvergence, "leaf solve diverged");
  }
  return d;
}

Eigen::MatrixXd foliation_jacobian(const DiscFamily& family, std::size_t k, cplx tau) {
  const SpatialGrid& g = family.spatial;
  if (!g.is_tensor() || g.points() < 2)
    throw Error(ErrorKind::GridTooCoarse, "foliation Jacobian needs a tensor grid with >= 2 points");
  const int n = g.dim();
  Eigen::MatrixXd jac(2 * n, 2 * n);
  for (int axis = 0; axis < 2 * n; ++axis) {
    const auto up = g.neighbor(k, axis, 1);
    const auto down = g.neighbor(k, axis, -1);
    const std::size_t hi = up ? *up : k;
    const std::size_t lo = down ? *down : k;
    const double dist = g.spacing() * ((up ? 1 : 0) + (down ? 1 : 0));
    const Eigen::VectorXcd dz = (family.z(hi, tau) - family.z(lo, tau)) / dist;
    jac.col(axis).head(n) = dz.real();
    jac.col(axis).tail(n) = dz.imag();
  }
  return jac;
}

double foliation_min_det(const DiscFamily& family) {
  std::vector<cplx> taus;
  for (int j = 0; j < family.circle.size(); ++j) taus.push_back(family.circle.node(j));
  for (int k = 0; k < 8; ++k) taus.push_back(std::polar(0.5, kPi * k / 4.0));
  std::vector<double> per_node(family.nodes.size(), std::numeric_limits<double>::infinity());
  parallel_for(family.nodes.size(), [&](std::size_t k) {
    for (cplx tau : taus)
      per_node[k] = std::min(per_node[k], std::abs(foliation_jacobian(family, k, tau).determinant()));
  });
  return *std::min_element(per_node.begin(), per_node.end());
}

SmallnessReport smallness_check(const Potential& psi, const Potential& rho, const ChartBox& box,
                                double alpha, double threshold, int samples, std::uint64_t seed) {
  const int n = psi.dim();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-box.radius, box.radius);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
  std::uniform_real_distribution<double> jitter(-1.0, 1.0);

  struct Sample {
    Eigen::VectorXcd z;
    double theta;
    Eigen::VectorXcd diff;
  };
  auto eval = [&](Eigen::VectorXcd z, double theta) {
    const cplx tau = std::polar(1.0, theta);
    return Sample{z, theta, psi.gradient(z, tau) - rho.gradient(z, tau)};
  };
  auto distance = [](const Sample& p, const Sample& q) {
    double dt = std::fmod(std::abs(p.theta - q.theta), 2.0 * kPi);
    dt = std::min(dt, 2.0 * kPi - dt);
    return std::sqrt((p.z - q.z).squaredNorm() + dt * dt);
  };

  SmallnessReport rep;
  rep.threshold = threshold;
  std::vector<Sample> pts;
  for (int s = 0; s < samples; ++s) {
    Eigen::VectorXcd z(n);
    for (int i = 0; i < n; ++i) z[i] = cplx(coord(rng), coord(rng));
    pts.push_back(eval(z, angle(rng)));
    rep.sup_norm = std::max(rep.sup_norm, pts.back().diff.cwiseAbs().maxCoeff());
    // a nearby partner so that small scales enter the seminorm
    const double scale = std::pow(2.0, -1.0 - s % 10);
    Eigen::VectorXcd zq = z;
    for (int i = 0; i < n; ++i) {
      zq[i] += scale * cplx(jitter(rng), jitter(rng));
      zq[i] = cplx(std::clamp(zq[i].real(), -box.radius, box.radius),
                   std::clamp(zq[i].imag(), -box.radius, box.radius));
    }
    pts.push_back(eval(zq, pts.back().theta + scale * jitter(rng)));
    rep.sup_norm = std::max(rep.sup_norm, pts.back().diff.cwiseAbs().maxCoeff());
  }
  for (std::size_t p = 0; p < pts.size(); ++p) {
    for (std::size_t q = p + 1; q < pts.size(); ++q) {
      const double d = distance(pts[p], pts[q]);
      if (d <= 0.0) continue;
      const double num = (pts[p].diff - pts[q].diff).cwiseAbs().maxCoeff();
      rep.holder_seminorm = std::max(rep.holder_seminorm, num / std::pow(d, alpha));
    }
  }
  rep.pass = rep.sup_norm <= threshold;
  return rep;
}

GaugeReport gauge_shift_check(const DiscFamily& base, const DiscFamily& shifted,
                              const Potential& gauge, const ChartBox& box) {
  if (!(base.circle == shifted.circle) || base.nodes.size() != shifted.nodes.size())
    throw Error(ErrorKind::DimensionMismatch, "families live on different grids");
  const int n = gauge.dim();
  GaugeReport rep;

  // ddbar h by second differences of values at a few points of the box.
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> coord(-0.5 * box.radius, 0.5 * box.radius);
  const double h = 1e-3;
  for (int s = 0; s < 8; ++s) {
    Eigen::VectorXcd z(n);
    for (int i = 0; i < n; ++i) z[i] = cplx(coord(rng), coord(rng));
    auto value = [&](int a, double da, int b, double db) {
      Eigen::VectorXcd p = z;
      // a, b index real axes: < n real part, >= n imaginary part
      auto bump = [&](int axis, double d) {
        if (axis < n)
          p[axis] += d;
        else
          p[axis - n] += cplx(0.0, d);
      };
      bump(a, da);
      bump(b, db);
      return gauge.value(p, -kI);
    };
    auto second = [&](int a, int b) {
      return (value(a, h, b, h) - value(a, h, b, -h) - value(a, -h, b, h) + value(a, -h, b, -h)) /
             (4.0 * h * h);
    };
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        // d_i dbar_j = 1/4 (dx_i - i dy_i)(dx_j + i dy_j)
        const cplx v = 0.25 * cplx(second(i, j) + second(n + i, n + j),
                                   second(i, n + j) - second(n + i, j));
        rep.ddbar_gauge = std::max(rep.ddbar_gauge, std::abs(v));
      }
    }
  }
  if (rep.ddbar_gauge > 1e-6) {
    std::ostringstream msg;
    msg << "gauge is not pluriharmonic: |ddbar h| = " << rep.ddbar_gauge;
    throw Error(ErrorKind::NotSameForm, msg.str());
  }

  std::vector<cplx> taus;
  for (int j = 0; j < base.circle.size(); ++j) taus.push_back(base.circle.node(j));
  for (int k = 0; k < 8; ++k) taus.push_back(std::polar(0.5, kPi * k / 4.0));
  taus.push_back(0.0);
  for (std::size_t k = 0; k < base.nodes.size(); ++k) {
    for (cplx tau : taus) {
      const Eigen::VectorXcd z0 = base.z(k, tau);
      const Eigen::VectorXcd z1 = shifted.z(k, tau);
      rep.z_difference = std::max(rep.z_difference, (z0 - z1).cwiseAbs().maxCoeff());
      const Eigen::VectorXcd expect = base.xi(k, tau) + gauge.gradient(z0, tau);
      rep.xi_difference = std::max(rep.xi_difference, (shifted.xi(k, tau) - expect).cwiseAbs().maxCoeff());
    }
  }
  rep.pass = rep.z_difference <= rep.tolerance && rep.xi_difference <= rep.tolerance;
  return rep;
}

void write_history_csv(std::ostream& out, const SolveReport& report) {
  out << "step,residual,correction,cutoff\n";
  out.precision(17);
  for (std::size_t s = 0; s < report.residual_history.size(); ++s) {
    out << s << ',' << report.residual_history[s] << ',';
    if (s > 0) out << report.correction_norms[s - 1] << ',' << report.cutoffs[s - 1];
    else out << ',';
    out << '\n';
  }
}

}  // namespace hcma
