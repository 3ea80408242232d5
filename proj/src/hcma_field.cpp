#include "hcma/hcma_field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "hcma/fit.hpp"
#include "hcma/parallel.hpp"

namespace hcma {

namespace {

std::vector<cplx> interior_taus() {
  std::vector<cplx> taus;
  for (int k = 0; k < 8; ++k) taus.push_back(std::polar(0.5, kPi * k / 4.0));
  return taus;
}

std::vector<cplx> check_taus(const CircleGrid& grid) {
  std::vector<cplx> taus;
  for (int j = 0; j < grid.size(); ++j) taus.push_back(grid.node(j));
  for (cplx t : interior_taus()) taus.push_back(t);
  return taus;
}

// real axis of complex coordinate a (0..n-1 spatial, n = tau) in a product grid
int re_axis(int a, int n) { return a < n ? a : 2 * n; }
int im_axis(int a, int n) { return a < n ? n + a : 2 * n + 1; }

}  // namespace

// ---- leaves -----------------------------------------------------------------

double Leaf::u_hat(cplx tau) const {
  if (std::abs(tau) >= 1.0 - 1e-12) return u.interpolate(std::arg(tau)).real();
  return poisson_extend(u, tau).real();
}

LeafField::LeafField(DiscFamily family, PotentialPtr psi, PotentialPtr rho, NashMoserConfig config)
    : family_(std::move(family)), psi_(std::move(psi)), rho_(std::move(rho)), config_(config) {
  config_.residual_tol = std::min(config_.residual_tol, 1e-12);
  const CircleGrid& grid = family_.circle;
  leaves_.resize(family_.nodes.size());
  std::vector<double> trace_err(leaves_.size()), rel(leaves_.size());
  parallel_for(leaves_.size(), [&](std::size_t k) {
    Leaf& lf = leaves_[k];
    lf.w = family_.spatial[k];
    lf.disc = family_.nodes[k];
    const Eigen::MatrixXcd zt = trace_rows(lf.disc.z, grid.size());
    Eigen::VectorXcd s(grid.size());
    for (int j = 0; j < grid.size(); ++j) {
      const Eigen::VectorXcd zj = zt.col(j);
      if (!config_.box.contains(zj)) throw Error(ErrorKind::LeftChart, "leaf boundary left the chart box");
      const double value = psi_->value(zj, grid.node(j));
      s[j] = value;
      rel[k] = std::max(rel[k], std::abs(value - rho_->value(zj, grid.node(j))));
    }
    lf.u = CircleFunction(grid, s);
    for (int j = 0; j < grid.size(); ++j)
      trace_err[k] = std::max(trace_err[k], std::abs(lf.u.interpolate(grid.theta(j)).real() - s[j].real()));
  });
  for (std::size_t k = 0; k < leaves_.size(); ++k) {
    trace_error_ = std::max(trace_error_, trace_err[k]);
    sup_relative_ = std::max(sup_relative_, rel[k]);
  }
}

double LeafField::error_term(std::size_t k, cplx tau) const {
  return rho_->value(leaves_[k].z(tau), tau) - rho_->value(leaves_[k].w, tau);
}

double LeafField::phi_on_leaf(std::size_t k, cplx tau) const {
  return leaves_[k].u_hat(tau) - rho_->value(leaves_[k].z(tau), tau);
}

Leaf LeafField::leaf_at(const Eigen::VectorXcd& w) const {
  const CircleGrid& grid = family_.circle;
  Leaf lf;
  lf.w = w;
  lf.disc = solve_leaf(*psi_, *rho_, w, grid, config_);
  const Eigen::MatrixXcd zt = trace_rows(lf.disc.z, grid.size());
  Eigen::VectorXcd s(grid.size());
  for (int j = 0; j < grid.size(); ++j) s[j] = psi_->value(zt.col(j), grid.node(j));
  lf.u = CircleFunction(grid, s);
  return lf;
}

LeafField reconstruct_on_leaves(const DiscFamily& family, PotentialPtr psi, PotentialPtr rho,
                                const NashMoserConfig& config) {
  return LeafField(family, std::move(psi), std::move(rho), config);
}

// ---- derivative identity ----------------------------------------------------

DerivativeIdentityReport derivative_identity_check(const LeafField& leaf) {
  const DiscFamily& fam = leaf.family();
  const SpatialGrid& g = fam.spatial;
  if (!g.is_tensor() || g.points() < 3)
    throw Error(ErrorKind::GridTooCoarse, "derivative identity needs >= 3 nodes per axis");
  const int n = g.dim();
  const std::vector<cplx> taus = check_taus(fam.circle);
  DerivativeIdentityReport rep;
  rep.spacing = g.spacing();
  for (std::size_t k = 0; k < g.size(); ++k) {
    bool interior = true;
    for (int a = 0; a < 2 * n; ++a)
      interior = interior && g.neighbor(k, a, 1) && g.neighbor(k, a, -1);
    if (!interior) continue;
    ++rep.interior_nodes;
    for (cplx tau : taus) {
      const Eigen::MatrixXd jac = foliation_jacobian(fam, k, tau);
      Eigen::VectorXd grad_w(2 * n);
      for (int a = 0; a < 2 * n; ++a) {
        const std::size_t up = *g.neighbor(k, a, 1), down = *g.neighbor(k, a, -1);
        grad_w[a] = (leaf.u_hat(up, tau) - leaf.u_hat(down, tau)) / (2.0 * g.spacing());
      }
      // grad_w U = J^T grad_z u
      const Eigen::VectorXd grad_z = jac.transpose().partialPivLu().solve(grad_w);
      const Eigen::VectorXcd xi = leaf.leaf(k).xi(tau);
      for (int i = 0; i < n; ++i) {
        const cplx dz = 0.5 * cplx(grad_z[i], -grad_z[n + i]);
        rep.sup_error = std::max(rep.sup_error, std::abs(dz - xi[i]));
      }
    }
  }
  return rep;
}

OrderStudy order_study(std::vector<double> steps, std::vector<double> errors, double floor) {
  OrderStudy s;
  s.steps = std::move(steps);
  s.errors = std::move(errors);
  s.floor = floor;
  s.exact = std::all_of(s.errors.begin(), s.errors.end(), [&](double e) { return e <= floor; });
  std::vector<double> h, e;
  for (std::size_t i = 0; i < s.errors.size(); ++i) {
    if (s.errors[i] > 0.0) {
      h.push_back(s.steps[i]);
      e.push_back(s.errors[i]);
    }
  }
  if (h.size() >= 2) {
    const LinearFit fit = fit_order(h, e);
    s.order = fit.slope;
    s.r2 = fit.r2;
  }
  return s;
}

DerivativeStudy derivative_identity_refinement(PotentialPtr psi, PotentialPtr rho,
                                               const Eigen::VectorXcd& center, double half_width,
                                               const CircleGrid& circle,
                                               const NashMoserConfig& config, int levels,
                                               double floor) {
  DerivativeStudy out;
  std::vector<double> steps, errors;
  for (int l = 0; l < levels; ++l) {
    const double hw = half_width / std::pow(2.0, l);
    const SpatialGrid grid = SpatialGrid::tensor(center, hw, 3);
    const Solved solved = solve_discs(*psi, *rho, grid, circle, config);
    const LeafField leaf(solved.family, psi, rho, config);
    out.levels.push_back(derivative_identity_check(leaf));
    steps.push_back(out.levels.back().spacing);
    errors.push_back(out.levels.back().sup_error);
  }
  out.study = order_study(steps, errors, floor);
  return out;
}

// ---- product grid -----------------------------------------------------------

std::size_t ProductGridSpec::size() const {
  std::size_t total = 1;
  for (int a = 0; a < 2 * dim() + 2; ++a) total *= static_cast<std::size_t>(points);
  return total;
}

std::pair<Eigen::VectorXcd, cplx> ProductGridSpec::point(std::size_t k) const {
  const int n = dim();
  Eigen::VectorXcd z = z0;
  cplx tau = tau0;
  const double mid = 0.5 * (points - 1);
  std::size_t rest = k;
  for (int a = 0; a < 2 * n + 2; ++a) {
    const double off = (static_cast<double>(rest % points) - mid) * h;
    rest /= points;
    if (a < n)
      z[a] += off;
    else if (a < 2 * n)
      z[a - n] += cplx(0.0, off);
    else if (a == 2 * n)
      tau += off;
    else
      tau += cplx(0.0, off);
  }
  return {z, tau};
}

std::optional<std::size_t> ProductGridSpec::neighbor(std::size_t k, int axis, int step) const {
  std::size_t stride = 1;
  for (int a = 0; a < axis; ++a) stride *= static_cast<std::size_t>(points);
  const int idx = static_cast<int>((k / stride) % points);
  if (idx + step < 0 || idx + step >= points) return std::nullopt;
  return k + static_cast<std::ptrdiff_t>(step) * static_cast<std::ptrdiff_t>(stride);
}

bool ProductGridSpec::interior(std::size_t k) const {
  for (int a = 0; a < 2 * dim() + 2; ++a)
    if (!neighbor(k, a, 1) || !neighbor(k, a, -1)) return false;
  return true;
}

Leaf invert_foliation(const LeafField& leaf, const Eigen::VectorXcd& z_target, cplx tau,
                      const Eigen::VectorXcd& start, double tol, double* residual) {
  const int n = static_cast<int>(z_target.size());
  const double delta = 1e-7;
  auto pack = [n](const Eigen::VectorXcd& v) {
    Eigen::VectorXd r(2 * n);
    r << v.real(), v.imag();
    return r;
  };
  Leaf current = leaf.leaf_at(start);
  Eigen::VectorXcd f = current.z(tau) - z_target;
  double norm = f.cwiseAbs().maxCoeff();
  Eigen::MatrixXd jac(2 * n, 2 * n);
  bool need_jacobian = true;
  for (int it = 0; it < 40 && norm > tol; ++it) {
    const bool fresh = need_jacobian;
    if (need_jacobian) {
      for (int a = 0; a < 2 * n; ++a) {
        Eigen::VectorXcd w = current.w;
        if (a < n)
          w[a] += delta;
        else
          w[a - n] += cplx(0.0, delta);
        const Leaf probe = leaf.leaf_at(w);
        jac.col(a) = pack(probe.z(tau) - current.z(tau)) / delta;
      }
      need_jacobian = false;
    }
    const Eigen::VectorXd step = jac.partialPivLu().solve(-pack(f));
    Eigen::VectorXcd dw(n);
    for (int i = 0; i < n; ++i) dw[i] = cplx(step[i], step[n + i]);
    double damping = 1.0;
    bool accepted = false;
    for (int tries = 0; tries < 12; ++tries, damping *= 0.5) {
      Leaf trial = leaf.leaf_at(current.w + damping * dw);
      const Eigen::VectorXcd ft = trial.z(tau) - z_target;
      const double nt = ft.cwiseAbs().maxCoeff();
      if (nt < norm) {
        // keep the chord Jacobian while the contraction is good
        need_jacobian = nt > 0.25 * norm;
        current = std::move(trial);
        f = ft;
        norm = nt;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (fresh) break;
      need_jacobian = true;
    }
  }
  if (residual) *residual = norm;
  if (!(norm <= tol)) {
    std::ostringstream msg;
    msg << "foliation inversion stalled at residual " << norm;
    throw Error(ErrorKind::InversionFailed, msg.str());
  }
  return current;
}

ProductField resample_to_product(const LeafField& leaf, const ProductGridSpec& spec) {
  if (spec.dim() != leaf.family().dim())
    throw Error(ErrorKind::DimensionMismatch, "product grid and family differ in dimension");
  if (spec.points < 1) throw Error(ErrorKind::InvalidArgument, "product grid needs points >= 1");
  ProductField out;
  out.spec = spec;
  const std::size_t count = spec.size();
  out.phi.resize(count);
  out.preimage.resize(count);
  std::vector<double> res(count);
  parallel_for(count, [&](std::size_t k) {
    const auto [z, tau] = spec.point(k);
    if (std::abs(tau) > 1.0 + 1e-12) throw Error(ErrorKind::OutsideDisk, "product grid leaves the disk");
    const Leaf lf = invert_foliation(leaf, z, tau, z, 1e-13, &res[k]);
    out.preimage[k] = lf.w;
    out.phi[k] = lf.u_hat(tau) - leaf.rho().value(z, tau);
  });
  out.max_inversion_residual = *std::max_element(res.begin(), res.end());
  return out;
}

Eigen::MatrixXcd product_complex_hessian(const ProductGridSpec& spec,
                                         const std::vector<double>& values, std::size_t k) {
  const int n = spec.dim();
  const double h = spec.h;
  auto at = [&](std::size_t idx) { return values[idx]; };
  auto second = [&](int p, int q) {
    if (p == q) {
      return (at(*spec.neighbor(k, p, 1)) - 2.0 * at(k) + at(*spec.neighbor(k, p, -1))) / (h * h);
    }
    auto corner = [&](int sp, int sq) { return at(*spec.neighbor(*spec.neighbor(k, p, sp), q, sq)); };
    return (corner(1, 1) - corner(1, -1) - corner(-1, 1) + corner(-1, -1)) / (4.0 * h * h);
  };
  Eigen::MatrixXcd hess(n + 1, n + 1);
  for (int a = 0; a <= n; ++a) {
    for (int b = 0; b <= n; ++b) {
      const int xa = re_axis(a, n), ya = im_axis(a, n), xb = re_axis(b, n), yb = im_axis(b, n);
      hess(a, b) = 0.25 * cplx(second(xa, xb) + second(ya, yb), second(xa, yb) - second(ya, xb));
    }
  }
  return hess;
}

MaResidualReport ma_residual(const ProductField& field, const Potential& rho) {
  const ProductGridSpec& spec = field.spec;
  if (spec.points < 5) throw Error(ErrorKind::GridTooCoarse, "Monge-Ampere residual needs >= 5 points per axis");
  const int n = spec.dim();
  MaResidualReport rep;
  rep.min_zblock_eig = std::numeric_limits<double>::infinity();
  rep.max_inversion_residual = field.max_inversion_residual;
  for (std::size_t k = 0; k < spec.size(); ++k) {
    if (!spec.interior(k)) continue;
    const auto [z, tau] = spec.point(k);
    Eigen::MatrixXcd hess = product_complex_hessian(spec, field.phi, k);
    hess.topLeftCorner(n, n) += rho.mixed_hessian(z, tau);
    const Eigen::MatrixXcd zblock = 0.5 * (hess.topLeftCorner(n, n) + hess.topLeftCorner(n, n).adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(zblock, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    if (lo < 1e-8) {
      std::ostringstream msg;
      msg << "z-block eigenvalue " << lo << " at product point " << k;
      throw Error(ErrorKind::SingularXBlock, msg.str());
    }
    rep.min_zblock_eig = std::min(rep.min_zblock_eig, lo);
    const Eigen::VectorXcd col = hess.topRightCorner(n, 1);
    const Eigen::RowVectorXcd row = hess.bottomLeftCorner(1, n);
    const cplx schur = hess(n, n) - (row * zblock.ldlt().solve(col))(0, 0);
    rep.sup_det = std::max(rep.sup_det, std::abs(hess.determinant()));
    rep.sup_schur = std::max(rep.sup_schur, std::abs(schur));
    ++rep.points;
  }
  return rep;
}

MaStudy ma_refinement(const LeafField& leaf, const Eigen::VectorXcd& z0, cplx tau0, double h0,
                      int levels, double floor) {
  MaStudy out;
  out.min_zblock_eig = std::numeric_limits<double>::infinity();
  std::vector<double> steps, dets, schurs;
  for (int l = 0; l < levels; ++l) {
    ProductGridSpec spec{z0, tau0, h0 / std::pow(2.0, l), 5};
    const ProductField field = resample_to_product(leaf, spec);
    out.levels.push_back(ma_residual(field, leaf.rho()));
    steps.push_back(spec.h);
    dets.push_back(out.levels.back().sup_det);
    schurs.push_back(out.levels.back().sup_schur);
    out.min_zblock_eig = std::min(out.min_zblock_eig, out.levels.back().min_zblock_eig);
  }
  out.det = order_study(steps, dets, floor);
  out.schur = order_study(steps, schurs, floor);
  return out;
}

// ---- leaf linear functions --------------------------------------------------

double LeafLinearFunction::operator()(const Eigen::VectorXcd& z, cplx tau) const {
  const Eigen::VectorXcd xi = leaf_->xi(tau);
  const Eigen::VectorXcd zx = leaf_->z(tau);
  return 2.0 * (xi.transpose() * (z - zx))(0, 0).real() + leaf_->u_hat(tau);
}

LeafLinearFunction leaf_linear_function(const LeafField& field, std::size_t node) {
  return LeafLinearFunction(field, node);
}

double pluriharmonic_defect(const LeafLinearFunction& l, const Eigen::VectorXcd& z, cplx tau,
                            double h) {
  ProductGridSpec spec{z, tau, h, 3};
  std::vector<double> values(spec.size());
  for (std::size_t k = 0; k < spec.size(); ++k) {
    const auto [zk, tk] = spec.point(k);
    values[k] = l(zk, tk);
  }
  std::size_t center = 0, stride = 1;
  for (int a = 0; a < 2 * spec.dim() + 2; ++a, stride *= 3) center += stride;
  return product_complex_hessian(spec, values, center).cwiseAbs().maxCoeff();
}

OrderStudy pluriharmonic_refinement(const LeafLinearFunction& l, const Eigen::VectorXcd& z,
                                    cplx tau, double h0, int levels, double floor) {
  std::vector<double> steps, errors;
  for (int k = 0; k < levels; ++k) {
    const double h = h0 / std::pow(2.0, k);
    steps.push_back(h);
    errors.push_back(pluriharmonic_defect(l, z, tau, h));
  }
  return order_study(steps, errors, floor);
}

// ---- subsolution ------------------------------------------------------------

ConvexityReport convexity_check(const Potential& rho, const ChartBox& box, double floor,
                                int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-box.radius, box.radius);
  ConvexityReport rep;
  rep.floor = floor;
  rep.min_eigenvalue = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    Eigen::VectorXcd z(rho.dim());
    for (int i = 0; i < rho.dim(); ++i) z[i] = cplx(coord(rng), coord(rng));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(rho.real_hessian(z, -kI), Eigen::EigenvaluesOnly);
    rep.min_eigenvalue = std::min(rep.min_eigenvalue, eig.eigenvalues().minCoeff());
  }
  rep.pass = rep.min_eigenvalue >= floor;
  return rep;
}

SubsolutionField::SubsolutionField(const LeafField& leaf, double floor_m, EnvelopeCombine combine)
    : leaf_(&leaf), m_(floor_m), combine_(combine) {
  convexity_ = convexity_check(leaf.rho(), leaf.config().box);
  if (!convexity_.pass) {
    std::ostringstream msg;
    msg << "reference potential not convex enough: min eigenvalue " << convexity_.min_eigenvalue;
    throw Error(ErrorKind::NotConvex, msg.str());
  }
  if (m_ < 0.0) m_ = 2.0 * leaf.sup_relative_boundary();
}

double SubsolutionField::operator()(const Eigen::VectorXcd& z, cplx tau, int* index) const {
  const double rho = leaf_->rho().value(z, tau);
  double best = 0.0;
  int arg = -1;
  for (std::size_t k = 0; k < leaf_->size(); ++k) {
    const double v = LeafLinearFunction(leaf_->leaf(k))(z, tau) - rho;
    const bool better = combine_ == EnvelopeCombine::max ? v > best : v < best;
    if (arg < 0 || better) {
      best = v;
      arg = static_cast<int>(k);
    }
  }
  if (combine_ == EnvelopeCombine::max && best < -m_) {
    best = -m_;
    arg = -1;
  }
  if (index) *index = arg;
  return best;
}

SubsolutionField build_subsolution(const LeafField& leaf, double floor_m) {
  return SubsolutionField(leaf, floor_m);
}

EnvelopeReport envelope_check(const SubsolutionField& f, const ProductField& field) {
  const LeafField& leaf = f.leaves();
  const Potential& rho = leaf.rho();
  EnvelopeReport rep;
  rep.margin_bound = f.lambda0() / 6.0;
  rep.margin_ratio = std::numeric_limits<double>::infinity();
  const std::vector<cplx> taus = check_taus(leaf.family().circle);
  for (std::size_t k = 0; k < leaf.size(); ++k) {
    for (cplx tau : taus) {
      const Eigen::VectorXcd z = leaf.leaf(k).z(tau);
      rep.leaf_agreement = std::max(rep.leaf_agreement, std::abs(f(z, tau) - leaf.phi_on_leaf(k, tau)));
      ++rep.leaf_points;
    }
  }
  for (std::size_t p = 0; p < field.spec.size(); ++p) {
    const auto [z, tau] = field.spec.point(p);
    const double phi = field.phi[p];
    rep.dominance_violation = std::max(rep.dominance_violation, f(z, tau) - phi);
    const double r = rho.value(z, tau);
    for (std::size_t k = 0; k < leaf.size(); ++k) {
      const double d = (z - leaf.leaf(k).z(tau)).norm();
      if (d < 1e-3) continue;
      const double gap = phi - (LeafLinearFunction(leaf.leaf(k))(z, tau) - r);
      rep.margin_ratio = std::min(rep.margin_ratio, gap / (d * d));
    }
    ++rep.grid_points;
  }
  rep.dominance_violation = std::max(rep.dominance_violation, 0.0);
  return rep;
}

PshReport psh_check(const SubsolutionField& f, int samples, double h, std::uint64_t seed) {
  const LeafField& leaf = f.leaves();
  const int n = leaf.family().dim();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double spread = std::max(leaf.family().spatial.spacing(), 0.05);
  const int nodes = 128;
  const double radii[] = {h, 2.0 * h, 4.0 * h};

  auto total = [&](const Eigen::VectorXcd& z, cplx tau) { return leaf.rho().value(z, tau) + f(z, tau); };

  PshReport rep;
  rep.worst_defect = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    const std::size_t k = static_cast<std::size_t>(unit(rng) * leaf.size()) % leaf.size();
    const cplx tau = std::polar(0.7 * std::sqrt(unit(rng)), 2.0 * kPi * unit(rng));
    Eigen::VectorXcd z = leaf.leaf(k).z(tau);
    for (int i = 0; i < n; ++i) z[i] += spread * cplx(normal(rng), normal(rng)) * 0.5;
    Eigen::VectorXcd dir(n + 1);
    for (int i = 0; i <= n; ++i) dir[i] = cplx(normal(rng), normal(rng));
    dir /= dir.norm();
    const double center = total(z, tau);
    for (double r : radii) {
      double avg = 0.0;
      for (int j = 0; j < nodes; ++j) {
        const cplx e = std::polar(r, 2.0 * kPi * j / nodes);
        avg += total(z + e * dir.head(n), tau + e * dir[n]);
      }
      avg /= nodes;
      const double defect = center - avg;
      rep.worst_defect = std::max(rep.worst_defect, defect);
      if (defect > 1e-8 * (1.0 + std::abs(center))) ++rep.violations;
      ++rep.circles;
    }
  }
  return rep;
}

void write_product_csv(std::ostream& out, const ProductGridSpec& spec,
                       const std::vector<double>& values) {
  const int n = spec.dim();
  for (int i = 1; i <= n; ++i) out << "re_z" << i << ",im_z" << i << ',';
  out << "re_tau,im_tau,value\n";
  out.precision(17);
  for (std::size_t k = 0; k < spec.size(); ++k) {
    const auto [z, tau] = spec.point(k);
    for (int i = 0; i < n; ++i) out << z[i].real() << ',' << z[i].imag() << ',';
    out << tau.real() << ',' << tau.imag() << ',' << values[k] << '\n';
  }
}

}  // namespace hcma
