#pragma once

// Nonlinear free-boundary problem: for every spatial node w find holomorphic
// discs z(w, .), xi(w, .) with
//
//     xi(w, theta) = dPsi(z(w, theta), theta)   on the circle,
//     z(w, -i) = w,
//
// by Newton iteration on the linearization solved in rh_linear.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hcma/potential.hpp"
#include "hcma/rh_linear.hpp"

namespace hcma {

/// Spatial nodes in C^n: either a tensor grid with `points` samples along each
/// of the 2n real axes, or an explicit list.
class SpatialGrid {
 public:
  /// Tensor grid centered at `center` with half-width `half_width` per real
  /// axis. points >= 1; points == 1 places a single node at the center.
  static SpatialGrid tensor(const Eigen::VectorXcd& center, double half_width, int points);
  static SpatialGrid list(std::vector<Eigen::VectorXcd> nodes);

  int dim() const { return dim_; }
  std::size_t size() const { return nodes_.size(); }
  const Eigen::VectorXcd& operator[](std::size_t k) const { return nodes_[k]; }
  const std::vector<Eigen::VectorXcd>& nodes() const { return nodes_; }

  bool is_tensor() const { return points_ > 0; }
  int points() const { return points_; }
  double spacing() const { return spacing_; }
  const Eigen::VectorXcd& center() const { return center_; }

  /// Index of the tensor neighbour of node k shifted by `step` along real axis
  /// `axis` (0..n-1 real parts, n..2n-1 imaginary parts), if it exists.
  std::optional<std::size_t> neighbor(std::size_t k, int axis, int step) const;

 private:
  int dim_ = 0;
  int points_ = 0;
  double spacing_ = 0.0;
  Eigen::VectorXcd center_;
  std::vector<Eigen::VectorXcd> nodes_;
};

struct DiscFamily {
  SpatialGrid spatial;
  CircleGrid circle{8};
  std::vector<DiscPair> nodes;

  int dim() const { return spatial.dim(); }
  int order() const { return circle.max_order(); }
  Eigen::VectorXcd z(std::size_t k, cplx tau) const { return evaluate_rows(nodes[k].z, tau); }
  Eigen::VectorXcd xi(std::size_t k, cplx tau) const { return evaluate_rows(nodes[k].xi, tau); }
  /// sup over nodes of |z(w, -i) - w|.
  double fixed_point_error() const;
};

enum class NewtonMode { plain_newton, zehnder_schedule };

struct NashMoserConfig {
  NewtonMode mode = NewtonMode::plain_newton;
  double alpha = 0.5;
  double beta = 0.25;
  double kappa = 1.5;
  double lambda = 0.5;
  int base_modes = 4;            // K_beta in the truncation schedule
  double residual_tol = 1e-11;
  int max_outer_iterations = 30;
  double inner_tol = 1e-13;
  int inner_max_iterations = 60;
  ChartBox box{};

  /// Throws InvalidArgument unless 0 < beta < alpha < 1 and residual_tol > 0.
  void validate() const;
  /// Highest Taylor mode kept at outer step `step` (0-based) for order K.
  int cutoff(int step, int order) const;
};

/// z == w, xi == d rho(w).
DiscFamily trivial_foliation(const Potential& rho, const SpatialGrid& spatial,
                             const CircleGrid& circle);

/// xi - dPsi(z, theta) on the boundary grid; LeftChart if z leaves the box.
BoundaryData residual(const DiscFamily& family, const Potential& psi, const ChartBox& box = {});

struct StepReport {
  double residual_before = 0.0;
  double residual_after = 0.0;
  double correction_norm = 0.0;  // sup of |coefficient| of the Taylor correction
  int cutoff = 0;
  LinearReport linear;
};

/// One Newton step on every node (parallel per node).
DiscFamily newton_step(const DiscFamily& family, const Potential& psi,
                       const NashMoserConfig& config, StepReport& report, int step_index = 0);

struct SolveReport {
  std::vector<double> residual_history;   // sup |T| before step 1, after each step
  std::vector<double> correction_norms;
  std::vector<int> cutoffs;
  std::vector<double> quadratic_constants;  // r_{k+1} / r_k^2
  int newton_steps = 0;
  double final_residual = 0.0;
  double fixed_point_error = 0.0;
  double min_foliation_det = 0.0;
  double max_negative_mass = 0.0;
  int max_linear_iterations = 0;
  double max_linear_contraction = 0.0;
  bool monotone_after_first = true;
};

struct Solved {
  DiscFamily family;
  SolveReport report;
};

/// Newton iteration from the trivial foliation of rho (or from `start`).
/// Throws NoConvergence, LeftChart, FoliationDegenerate.
Solved solve_discs(const Potential& psi, const Potential& rho, const SpatialGrid& spatial,
                   const CircleGrid& circle, const NashMoserConfig& config);
Solved solve_discs_from(DiscFamily start, const Potential& psi, const NashMoserConfig& config,
                        bool check_foliation = true);

/// Single-leaf solve at an arbitrary w (used for off-grid evaluations).
DiscPair solve_leaf(const Potential& psi, const Potential& rho, const Eigen::VectorXcd& w,
                    const CircleGrid& circle, const NashMoserConfig& config);

/// Real 2n x 2n Jacobian of w -> z(w, tau) at node k by finite differences
/// on the tensor grid (one-sided at edges).
Eigen::MatrixXd foliation_jacobian(const DiscFamily& family, std::size_t k, cplx tau);

/// min |det| of the foliation Jacobian over nodes, all circle nodes and eight
/// interior samples tau = 0.5 exp(i pi k / 4).
double foliation_min_det(const DiscFamily& family);

struct SmallnessReport {
  double sup_norm = 0.0;
  double holder_seminorm = 0.0;
  double threshold = 0.1;
  bool pass = true;
};

/// Estimates sup and Holder-alpha seminorm of dPsi - drho over box x circle
/// from `samples` deterministic random points; pass iff sup_norm <= threshold.
SmallnessReport smallness_check(const Potential& psi, const Potential& rho, const ChartBox& box,
                                double alpha, double threshold = 0.1, int samples = 256,
                                std::uint64_t seed = 11);

struct GaugeReport {
  double z_difference = 0.0;
  double xi_difference = 0.0;
  double ddbar_gauge = 0.0;
  double tolerance = 1e-7;
  bool pass = true;
};

/// Compares families solved with rho and rho + h (and Psi + h). Throws
/// NotSameForm when ddbar h exceeds 1e-6 by finite differences.
GaugeReport gauge_shift_check(const DiscFamily& base, const DiscFamily& shifted,
                              const Potential& gauge, const ChartBox& box = {});

/// CSV of residual history "step,residual,correction,cutoff".
void write_history_csv(std::ostream& out, const SolveReport& report);

std::string to_string(NewtonMode mode);
NewtonMode parse_mode(const std::string& text);

}  // namespace hcma
