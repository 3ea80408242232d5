#include "hcma/rh_linear.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "hcma/parallel.hpp"

namespace hcma {

namespace {

constexpr double kMaxCondition = 1e8;

void require_nodes(std::size_t expected, std::size_t got, const char* what) {
  if (expected != got)
    throw Error(ErrorKind::DimensionMismatch,
                std::string(what) + ": expected " + std::to_string(expected) + " nodes, got " +
                    std::to_string(got));
}

void require_square(const Eigen::MatrixXcd& m, Eigen::Index n, const char* what) {
  if (m.rows() != n || m.cols() != n)
    throw Error(ErrorKind::DimensionMismatch, std::string(what) + " has wrong shape");
}

double contraction_of(const std::vector<double>& norms) {
  // Mean ratio over the last (up to) three steps.
  const std::size_t n = norms.size();
  if (n < 2) return 0.0;
  double acc = 0.0;
  int count = 0;
  for (std::size_t k = n - 1; k >= 1 && count < 3; --k, ++count)
    acc += norms[k - 1] > 0.0 ? norms[k] / norms[k - 1] : 0.0;
  return acc / count;
}

}  // namespace

double BoundaryCoeffField::distance_to(const std::vector<Eigen::MatrixXcd>& base) const {
  require_nodes(values.size(), base.size(), "BoundaryCoeffField::distance_to");
  double worst = 0.0;
  for (std::size_t p = 0; p < values.size(); ++p)
    for (const auto& m : values[p]) worst = std::max(worst, (m - base[p]).cwiseAbs().maxCoeff());
  return worst;
}

CircleFunction BoundaryData::component(std::size_t node, int i) const {
  return CircleFunction(grid, values.at(node).row(i).transpose());
}

double BoundaryData::sup_norm() const {
  double s = 0.0;
  for (const auto& v : values)
    if (v.size() > 0) s = std::max(s, v.cwiseAbs().maxCoeff());
  return s;
}

// ---- node kernels -----------------------------------------------------------

namespace node {

double check_coefficients(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b, double sigma) {
  const Eigen::Index n = a.rows();
  require_square(a, n, "A");
  require_square(b, n, "B");
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if ((a - a.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw Error(ErrorKind::DegenerateA, "A is not Hermitian");
  const double det = a.determinant().real();
  if (!(det >= sigma)) {
    std::ostringstream msg;
    msg << "det A = " << det << " below sigma = " << sigma;
    throw Error(ErrorKind::DegenerateA, msg.str());
  }
  const Eigen::VectorXd sv = a.jacobiSvd().singularValues();
  const double cond = sv[0] / sv[sv.size() - 1];
  if (!(cond <= kMaxCondition)) throw Error(ErrorKind::DegenerateA, "A is ill-conditioned");
  return cond;
}

DiscPair solve_trivial(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b,
                       const Eigen::MatrixXcd& data, const CircleGrid& grid) {
  const Eigen::Index n = a.rows();
  if (data.rows() != n || data.cols() != grid.size())
    throw Error(ErrorKind::DimensionMismatch, "boundary data shape does not match (n, grid)");
  const int order = grid.max_order();
  const int anchor = grid.anchor_index();
  Eigen::MatrixXcd g1(n, order + 1), g2(n, order + 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const cplx at_anchor = data(i, anchor);
    const CircleFunction re_part = CircleFunction::from_real(grid, data.row(i).real().transpose());
    const CircleFunction im_part = CircleFunction::from_real(grid, data.row(i).imag().transpose());
    // Re g1 = Re b with g1(-i) = b(-i).
    g1.row(i) = solve_riemann_hilbert(re_part, at_anchor, order).coeffs().transpose();
    // Im g2 = Im b: write g2 = i u with Re u = Im b and u(-i) = -i b(-i).
    g2.row(i) = (kI * solve_riemann_hilbert(im_part, -kI * at_anchor, order).coeffs()).transpose();
  }
  const Eigen::MatrixXcd a_bar_inv = a.conjugate().inverse();
  const Eigen::MatrixXcd diff = g2 - g1;
  DiscPair out;
  out.z = 0.5 * a_bar_inv * diff;
  out.xi = 0.5 * (g1 + g2) + b * out.z;
  return out;
}

Eigen::MatrixXcd apply_operator(const std::vector<Eigen::MatrixXcd>& a_tilde,
                                const std::vector<Eigen::MatrixXcd>& b_tilde,
                                const DiscPair& sol, int grid_size) {
  const Eigen::MatrixXcd zt = trace_rows(sol.z, grid_size);
  const Eigen::MatrixXcd xt = trace_rows(sol.xi, grid_size);
  Eigen::MatrixXcd out(zt.rows(), grid_size);
  for (int j = 0; j < grid_size; ++j)
    out.col(j) = xt.col(j) - a_tilde[j] * zt.col(j).conjugate() - b_tilde[j] * zt.col(j);
  return out;
}

DiscPair solve_perturbed(const std::vector<Eigen::MatrixXcd>& a_tilde,
                         const std::vector<Eigen::MatrixXcd>& b_tilde,
                         const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b,
                         const Eigen::MatrixXcd& data, const CircleGrid& grid,
                         const PerturbedOptions& opts, LinearReport& report) {
  const int size = grid.size();
  if (static_cast<int>(a_tilde.size()) != size || static_cast<int>(b_tilde.size()) != size)
    throw Error(ErrorKind::DimensionMismatch, "coefficient samples do not match circle grid");
  const Eigen::Index n = a.rows();
  const int order = grid.max_order();
  DiscPair acc{Eigen::MatrixXcd::Zero(n, order + 1), Eigen::MatrixXcd::Zero(n, order + 1)};

  const double data_norm = data.size() ? data.cwiseAbs().maxCoeff() : 0.0;
  const double target = opts.tol * (1.0 + data_norm);
  Eigen::MatrixXcd current = data;
  std::vector<double> norms{data_norm};
  int streak = 0;
  for (int it = 1; it <= opts.max_iter; ++it) {
    const DiscPair step = solve_trivial(a, b, current, grid);
    acc.z += step.z;
    acc.xi += step.xi;
    current = data - apply_operator(a_tilde, b_tilde, acc, size);
    const double norm = current.cwiseAbs().maxCoeff();
    streak = norm >= norms.back() ? streak + 1 : 0;
    norms.push_back(norm);
    if (norm <= target) {
      report.iterations = std::max(report.iterations, it);
      report.sup_residual = std::max(report.sup_residual, norm);
      report.contraction_ratio = std::max(report.contraction_ratio, contraction_of(norms));
      if (report.data_norms.size() < norms.size()) report.data_norms = norms;
      return acc;
    }
    if (streak >= 3) {
      std::ostringstream msg;
      msg << "data norm stopped decreasing at iteration " << it << " (" << norm << ")";
      throw Error(ErrorKind::NoContraction, msg.str());
    }
  }
  throw Error(ErrorKind::MaxIterations,
              "perturbed linear solve did not reach tolerance in " + std::to_string(opts.max_iter) +
                  " iterations");
}

}  // namespace node

// ---- field-level operations -------------------------------------------------

DecoupledTraces decouple(const HermitianField& a, const SymmetricField& b,
                         const LinearSolution& sol) {
  const std::size_t nodes = sol.nodes.size();
  require_nodes(nodes, a.values.size(), "decouple A");
  require_nodes(nodes, b.values.size(), "decouple B");
  DecoupledTraces out;
  out.g1.resize(nodes);
  out.g2.resize(nodes);
  for (std::size_t p = 0; p < nodes; ++p) {
    const auto& s = sol.nodes[p];
    const Eigen::Index n = a.values[p].rows();
    require_square(a.values[p], n, "A");
    require_square(b.values[p], n, "B");
    if (s.z.rows() != n || s.xi.rows() != n)
      throw Error(ErrorKind::DimensionMismatch, "solution components do not match A");
    const Eigen::MatrixXcd zt = trace_rows(s.z, sol.grid.size());
    const Eigen::MatrixXcd xt = trace_rows(s.xi, sol.grid.size());
    const Eigen::MatrixXcd base = xt - b.values[p] * zt;
    const Eigen::MatrixXcd az = a.values[p].conjugate() * zt;
    out.g1[p] = base - az;
    out.g2[p] = base + az;
  }
  return out;
}

LinearSolution recouple(const HermitianField& a, const SymmetricField& b,
                        const DecoupledTraces& g, const CircleGrid& grid) {
  const std::size_t nodes = g.g1.size();
  require_nodes(nodes, g.g2.size(), "recouple g2");
  require_nodes(nodes, a.values.size(), "recouple A");
  require_nodes(nodes, b.values.size(), "recouple B");
  LinearSolution sol;
  sol.grid = grid;
  sol.nodes.resize(nodes);
  double negative = 0.0, cond = 0.0;
  for (std::size_t p = 0; p < nodes; ++p) {
    cond = std::max(cond, node::check_coefficients(a.values[p], b.values[p], a.sigma));
    const Eigen::MatrixXcd a_bar_inv = a.values[p].conjugate().inverse();
    const Eigen::MatrixXcd diff = g.g2[p] - g.g1[p];
    const Eigen::MatrixXcd zt = 0.5 * a_bar_inv * diff;
    const Eigen::MatrixXcd xt = 0.5 * (g.g1[p] + g.g2[p]) + b.values[p] * zt;
    double nz = 0.0, nx = 0.0;
    sol.nodes[p].z = project_rows(zt, grid.max_order(), &nz);
    sol.nodes[p].xi = project_rows(xt, grid.max_order(), &nx);
    negative = std::max({negative, nz, nx});
  }
  sol.report.negative_mass = negative;
  sol.report.max_condition = cond;
  return sol;
}

LinearSolution solve_linear_trivial(const HermitianField& a, const SymmetricField& b,
                                    const BoundaryData& data) {
  const std::size_t nodes = data.nodes();
  require_nodes(nodes, a.values.size(), "solve_linear_trivial A");
  require_nodes(nodes, b.values.size(), "solve_linear_trivial B");
  LinearSolution sol;
  sol.grid = data.grid;
  sol.nodes.resize(nodes);
  std::vector<double> conds(nodes, 0.0);
  parallel_for(nodes, [&](std::size_t p) {
    conds[p] = node::check_coefficients(a.values[p], b.values[p], a.sigma);
    sol.nodes[p] = node::solve_trivial(a.values[p], b.values[p], data.values[p], data.grid);
  });
  sol.report.iterations = 1;
  sol.report.max_condition = *std::max_element(conds.begin(), conds.end());
  sol.report.sup_residual = boundary_residual(a, b, sol, data);
  sol.report.data_norms = {data.sup_norm()};
  return sol;
}

LinearSolution solve_linear_perturbed(const BoundaryCoeffField& a_tilde,
                                      const BoundaryCoeffField& b_tilde,
                                      const HermitianField& a, const SymmetricField& b,
                                      const BoundaryData& data, PerturbedOptions opts) {
  const std::size_t nodes = data.nodes();
  require_nodes(nodes, a_tilde.values.size(), "solve_linear_perturbed A~");
  require_nodes(nodes, b_tilde.values.size(), "solve_linear_perturbed B~");
  require_nodes(nodes, a.values.size(), "solve_linear_perturbed A");
  require_nodes(nodes, b.values.size(), "solve_linear_perturbed B");
  if (!(a_tilde.grid == data.grid) || !(b_tilde.grid == data.grid))
    throw Error(ErrorKind::DimensionMismatch, "coefficient and data grids differ");
  LinearSolution sol;
  sol.grid = data.grid;
  sol.nodes.resize(nodes);
  std::vector<LinearReport> reports(nodes);
  std::vector<double> conds(nodes, 0.0);
  const double global_norm = data.sup_norm();
  parallel_for(nodes, [&](std::size_t p) {
    conds[p] = node::check_coefficients(a.values[p], b.values[p], a.sigma);
    // The tolerance is relative to the global data norm, not the node's.
    PerturbedOptions local = opts;
    const double node_norm = data.values[p].size() ? data.values[p].cwiseAbs().maxCoeff() : 0.0;
    local.tol = opts.tol * (1.0 + global_norm) / (1.0 + node_norm);
    sol.nodes[p] = node::solve_perturbed(a_tilde.values[p], b_tilde.values[p], a.values[p],
                                         b.values[p], data.values[p], data.grid, local, reports[p]);
  });
  LinearReport& r = sol.report;
  for (const auto& rep : reports) {
    r.iterations = std::max(r.iterations, rep.iterations);
    r.contraction_ratio = std::max(r.contraction_ratio, rep.contraction_ratio);
    if (rep.data_norms.size() > r.data_norms.size()) r.data_norms = rep.data_norms;
  }
  r.max_condition = *std::max_element(conds.begin(), conds.end());
  r.sup_residual = boundary_residual(a_tilde, b_tilde, sol, data);
  return sol;
}

double boundary_residual(const BoundaryCoeffField& a_tilde, const BoundaryCoeffField& b_tilde,
                         const LinearSolution& sol, const BoundaryData& data) {
  double worst = 0.0;
  for (std::size_t p = 0; p < sol.nodes.size(); ++p) {
    const Eigen::MatrixXcd r =
        node::apply_operator(a_tilde.values[p], b_tilde.values[p], sol.nodes[p], sol.grid.size()) -
        data.values[p];
    worst = std::max(worst, r.cwiseAbs().maxCoeff());
  }
  return worst;
}

double boundary_residual(const HermitianField& a, const SymmetricField& b,
                         const LinearSolution& sol, const BoundaryData& data) {
  double worst = 0.0;
  const int size = sol.grid.size();
  for (std::size_t p = 0; p < sol.nodes.size(); ++p) {
    std::vector<Eigen::MatrixXcd> at(size, a.values[p]), bt(size, b.values[p]);
    const Eigen::MatrixXcd r = node::apply_operator(at, bt, sol.nodes[p], size) - data.values[p];
    worst = std::max(worst, r.cwiseAbs().maxCoeff());
  }
  return worst;
}

void write_csv(std::ostream& out, const std::vector<DiscPair>& nodes) {
  out << "node,component,k,re,im\n" << std::setprecision(17);
  for (std::size_t p = 0; p < nodes.size(); ++p) {
    const auto& d = nodes[p];
    auto dump = [&](const Eigen::MatrixXcd& m, const char* prefix) {
      for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index k = 0; k < m.cols(); ++k)
          out << p << ',' << prefix << (i + 1) << ',' << k << ',' << m(i, k).real() << ','
              << m(i, k).imag() << '\n';
    };
    dump(d.z, "z");
    dump(d.xi, "xi");
  }
}

}  // namespace hcma
