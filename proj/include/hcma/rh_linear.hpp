#pragma once

// Linearized free-boundary problem for families of holomorphic discs:
//
//     xi_hat - A conj(z_hat) - B z_hat = b   on the circle,
//     z_hat(-i) = 0,
//
// with z_hat, xi_hat holomorphic in tau. At tau-independent (A, B) the system
// decouples into two scalar Riemann-Hilbert problems; tau-dependent
// coefficients are handled by iterating the decoupled solve.

#include <iosfwd>
#include <vector>

#include "hcma/circle.hpp"

namespace hcma {

/// Per spatial node n x n Hermitian matrices with det >= sigma.
struct HermitianField {
  std::vector<Eigen::MatrixXcd> values;
  double sigma = 1e-8;
};

/// Per spatial node n x n complex symmetric matrices.
struct SymmetricField {
  std::vector<Eigen::MatrixXcd> values;
};

/// Matrices sampled per spatial node and per circle node: values[node][j].
struct BoundaryCoeffField {
  CircleGrid grid{8};
  std::vector<std::vector<Eigen::MatrixXcd>> values;

  /// sup over nodes and circle samples of the max-entry distance to base.
  double distance_to(const std::vector<Eigen::MatrixXcd>& base) const;
};

/// Per spatial node an n x N matrix of boundary samples (rows = components).
struct BoundaryData {
  CircleGrid grid{8};
  std::vector<Eigen::MatrixXcd> values;

  std::size_t nodes() const { return values.size(); }
  int components() const { return values.empty() ? 0 : static_cast<int>(values.front().rows()); }
  CircleFunction component(std::size_t node, int i) const;
  double sup_norm() const;
};

/// Holomorphic z- and xi-discs at one node; rows are components, columns are
/// Taylor coefficients a_0..a_K.
struct DiscPair {
  Eigen::MatrixXcd z;
  Eigen::MatrixXcd xi;
};

struct LinearReport {
  double sup_residual = 0.0;
  int iterations = 0;
  double contraction_ratio = 0.0;
  std::vector<double> data_norms;  // sup of the data fed to each decoupled solve
  double negative_mass = 0.0;      // largest discarded negative-mode ratio
  double max_condition = 0.0;      // largest condition number of conj(A)
};

struct LinearSolution {
  CircleGrid grid{8};
  std::vector<DiscPair> nodes;
  LinearReport report;
};

/// Boundary traces g1 = xi - B z - conj(A) z, g2 = xi - B z + conj(A) z.
struct DecoupledTraces {
  std::vector<Eigen::MatrixXcd> g1;
  std::vector<Eigen::MatrixXcd> g2;
};

DecoupledTraces decouple(const HermitianField& a, const SymmetricField& b,
                         const LinearSolution& sol);

/// z = 1/2 conj(A)^{-1}(g2 - g1), xi = 1/2(g1 + g2) + 1/2 B conj(A)^{-1}(g2 - g1),
/// re-projected to Taylor coefficients of order grid.max_order().
LinearSolution recouple(const HermitianField& a, const SymmetricField& b,
                        const DecoupledTraces& g, const CircleGrid& grid);

/// Exact decoupled solve at tau-independent coefficients.
LinearSolution solve_linear_trivial(const HermitianField& a, const SymmetricField& b,
                                    const BoundaryData& data);

struct PerturbedOptions {
  double tol = 1e-11;
  int max_iter = 60;
};

/// Iterates data_{k+1} = b - T'(sum of corrections) with the decoupled solve at
/// base (A, B). Throws NoContraction after three consecutive non-decreasing
/// data norms and MaxIterations when the budget runs out.
LinearSolution solve_linear_perturbed(const BoundaryCoeffField& a_tilde,
                                      const BoundaryCoeffField& b_tilde,
                                      const HermitianField& a, const SymmetricField& b,
                                      const BoundaryData& data, PerturbedOptions opts = {});

/// Sup over nodes and circle samples of |xi - A conj(z) - B z - b| with
/// tau-dependent coefficients.
double boundary_residual(const BoundaryCoeffField& a_tilde, const BoundaryCoeffField& b_tilde,
                         const LinearSolution& sol, const BoundaryData& data);
/// Same with tau-independent coefficients.
double boundary_residual(const HermitianField& a, const SymmetricField& b,
                         const LinearSolution& sol, const BoundaryData& data);

/// Per-node kernels shared with the nonlinear solver.
namespace node {

/// Throws DegenerateA when conj(A) is not Hermitian, det < sigma, or its
/// condition number exceeds 1e8; returns the condition number.
double check_coefficients(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b, double sigma);

/// Decoupled solve at one node. data is n x N.
DiscPair solve_trivial(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b,
                       const Eigen::MatrixXcd& data, const CircleGrid& grid);

/// Perturbed iteration at one node; a_tilde/b_tilde hold one matrix per circle node.
DiscPair solve_perturbed(const std::vector<Eigen::MatrixXcd>& a_tilde,
                         const std::vector<Eigen::MatrixXcd>& b_tilde,
                         const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b,
                         const Eigen::MatrixXcd& data, const CircleGrid& grid,
                         const PerturbedOptions& opts, LinearReport& report);

/// Boundary samples of xi - A conj(z) - B z with per-sample coefficients.
Eigen::MatrixXcd apply_operator(const std::vector<Eigen::MatrixXcd>& a_tilde,
                                const std::vector<Eigen::MatrixXcd>& b_tilde,
                                const DiscPair& sol, int grid_size);

}  // namespace node

/// CSV rows "node,component,k,re,im"; components are z1..zn then xi1..xin.
void write_csv(std::ostream& out, const std::vector<DiscPair>& nodes);

}  // namespace hcma
