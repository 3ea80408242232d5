#pragma once

// Reconstruction of the Monge-Ampere potential from a solved disc family.
//
// Along each leaf tau -> z(w, tau) the full potential u_hat(w, .) is the
// harmonic extension of Psi(z(w, theta), theta); the relative potential is
// Phi(z(w, tau), tau) = u_hat(w, tau) - rho(z(w, tau)).

#include <functional>
#include <iosfwd>
#include <vector>

#include "hcma/disc_solver.hpp"

namespace hcma {

/// Leaf data needed to evaluate u_hat at an arbitrary w.
struct Leaf {
  Eigen::VectorXcd w;
  DiscPair disc;
  CircleFunction u{CircleGrid(8), Eigen::VectorXcd::Zero(8)};  // boundary trace of u_hat

  Eigen::VectorXcd z(cplx tau) const { return evaluate_rows(disc.z, tau); }
  Eigen::VectorXcd xi(cplx tau) const { return evaluate_rows(disc.xi, tau); }
  /// Poisson extension inside, trigonometric interpolation on |tau| = 1.
  double u_hat(cplx tau) const;
};

class LeafField {
 public:
  LeafField(DiscFamily family, PotentialPtr psi, PotentialPtr rho, NashMoserConfig config);

  const DiscFamily& family() const { return family_; }
  const Potential& psi() const { return *psi_; }
  const Potential& rho() const { return *rho_; }
  const NashMoserConfig& config() const { return config_; }
  std::size_t size() const { return leaves_.size(); }
  const Leaf& leaf(std::size_t k) const { return leaves_[k]; }

  double u_hat(std::size_t k, cplx tau) const { return leaves_[k].u_hat(tau); }
  /// e(w, tau) = rho(z(w, tau)) - rho(w).
  double error_term(std::size_t k, cplx tau) const;
  /// Phi at the leaf image point (z(w_k, tau), tau).
  double phi_on_leaf(std::size_t k, cplx tau) const;
  /// sup over leaves of |trace of u_hat - Psi(z(w, theta), theta)| at the nodes.
  double trace_error() const { return trace_error_; }
  /// max |Psi - rho| over all leaf boundary samples.
  double sup_relative_boundary() const { return sup_relative_; }

  /// Solves the leaf through an arbitrary w.
  Leaf leaf_at(const Eigen::VectorXcd& w) const;

 private:
  DiscFamily family_;
  PotentialPtr psi_, rho_;
  NashMoserConfig config_;
  std::vector<Leaf> leaves_;
  double trace_error_ = 0.0;
  double sup_relative_ = 0.0;
};

/// Builds u_hat for every node of a converged family.
LeafField reconstruct_on_leaves(const DiscFamily& family, PotentialPtr psi, PotentialPtr rho,
                                const NashMoserConfig& config = {});

// ---- derivative identity ----------------------------------------------------

struct DerivativeIdentityReport {
  double sup_error = 0.0;  // max |d_z u_hat - xi| over interior nodes and tau samples
  double spacing = 0.0;
  int interior_nodes = 0;
};

/// (d_z u_hat)(z(w, tau), tau) by the chain rule with centered differences
/// across neighbouring leaves, compared with xi(w, tau) on all circle nodes
/// and eight interior tau. Needs a tensor grid with >= 3 points per axis.
DerivativeIdentityReport derivative_identity_check(const LeafField& leaf);

/// Convergence order of an error sequence under halving of the step, with an
/// exactness floor: when every error is at or below `floor` the data carry no
/// order information and the study is reported as exact.
struct OrderStudy {
  std::vector<double> steps;
  std::vector<double> errors;
  double order = 0.0;
  double r2 = 0.0;
  bool exact = false;
  double floor = 0.0;
  /// exact, or fitted order >= min_order.
  bool passes(double min_order) const { return exact || order >= min_order; }
};

OrderStudy order_study(std::vector<double> steps, std::vector<double> errors, double floor);

struct DerivativeStudy {
  std::vector<DerivativeIdentityReport> levels;
  OrderStudy study;
};

/// Solves 3 x ... x 3 families with half-widths half_width / 2^l and checks the
/// derivative identity at the center node on each.
DerivativeStudy derivative_identity_refinement(PotentialPtr psi, PotentialPtr rho,
                                               const Eigen::VectorXcd& center, double half_width,
                                               const CircleGrid& circle,
                                               const NashMoserConfig& config, int levels = 3,
                                               double floor = 1e-10);

// ---- product field and Monge-Ampere residual -------------------------------

/// Tensor grid of `points` samples per real axis of (z, tau), centered at
/// (z0, tau0) with spacing h; axes are Re z_1..Re z_n, Im z_1..Im z_n, Re tau, Im tau.
struct ProductGridSpec {
  Eigen::VectorXcd z0;
  cplx tau0 = 0.0;
  double h = 0.1;
  int points = 5;

  int dim() const { return static_cast<int>(z0.size()); }
  std::size_t size() const;
  /// Coordinates of grid point k.
  std::pair<Eigen::VectorXcd, cplx> point(std::size_t k) const;
  /// Index of the neighbour of k shifted along `axis` by `step`, if inside.
  std::optional<std::size_t> neighbor(std::size_t k, int axis, int step) const;
  bool interior(std::size_t k) const;
};

struct ProductField {
  ProductGridSpec spec;
  std::vector<double> phi;                // Phi = u_hat - rho at each grid point
  std::vector<Eigen::VectorXcd> preimage;  // w with z(w, tau) = z
  double max_inversion_residual = 0.0;
};

/// Solves z(w, tau) = z_target by damped Newton over w with a finite-difference
/// Jacobian built from leaf solves; starts from w = start.
/// Throws InversionFailed when the residual stays above `tol`.
Leaf invert_foliation(const LeafField& leaf, const Eigen::VectorXcd& z_target, cplx tau,
                      const Eigen::VectorXcd& start, double tol = 1e-13,
                      double* residual = nullptr);

ProductField resample_to_product(const LeafField& leaf, const ProductGridSpec& spec);

struct MaResidualReport {
  double sup_det = 0.0;      // sup |det H| over interior grid points
  double sup_schur = 0.0;    // sup |u_tt - u_tz Z^{-1} u_zt|
  double min_zblock_eig = 0.0;
  double max_inversion_residual = 0.0;
  int points = 0;
};

/// (n+1) x (n+1) complex Hessian of rho + Phi by centered differences of Phi
/// (the z-block of rho analytically). Throws SingularXBlock when the z-block
/// has an eigenvalue below 1e-8.
MaResidualReport ma_residual(const ProductField& field, const Potential& rho);

struct MaStudy {
  std::vector<MaResidualReport> levels;
  OrderStudy det;
  OrderStudy schur;
  double min_zblock_eig = 0.0;
};

/// ma_residual on product grids with spacing h0 / 2^l, l = 0..levels-1.
MaStudy ma_refinement(const LeafField& leaf, const Eigen::VectorXcd& z0, cplx tau0, double h0,
                      int levels = 3, double floor = 1e-9);

/// Complex Hessian H_ab = d_a dbar_b of the product-grid function at point k
/// by centered differences; used by ma_residual and the pluriharmonic check.
Eigen::MatrixXcd product_complex_hessian(const ProductGridSpec& spec,
                                         const std::vector<double>& values, std::size_t k);

// ---- leaf linear functions and the subsolution ------------------------------

/// L_x(z, tau) = 2 Re sum_p xi_p(x, tau)(z_p - z_p(x, tau)) + u_hat(x, tau).
class LeafLinearFunction {
 public:
  LeafLinearFunction(const LeafField& field, std::size_t node) : leaf_(&field.leaf(node)) {}
  explicit LeafLinearFunction(const Leaf& leaf) : leaf_(&leaf) {}
  double operator()(const Eigen::VectorXcd& z, cplx tau) const;

 private:
  const Leaf* leaf_;
};

LeafLinearFunction leaf_linear_function(const LeafField& field, std::size_t node);

/// sup of |d dbar L| entries in (z, tau) from centered differences with step h.
double pluriharmonic_defect(const LeafLinearFunction& l, const Eigen::VectorXcd& z, cplx tau,
                            double h);
OrderStudy pluriharmonic_refinement(const LeafLinearFunction& l, const Eigen::VectorXcd& z,
                                    cplx tau, double h0, int levels = 3, double floor = 1e-9);

struct ConvexityReport {
  double min_eigenvalue = 0.0;
  double floor = 0.5;
  bool pass = true;
};

/// min eigenvalue of the real Hessian D^2 rho over sampled points of the box.
ConvexityReport convexity_check(const Potential& rho, const ChartBox& box, double floor = 0.5,
                                int samples = 64, std::uint64_t seed = 5);

enum class EnvelopeCombine { max, min };  // min is a fault injection for tests

class SubsolutionField {
 public:
  /// Throws NotConvex when rho fails the eigenvalue floor; M < 0 selects the
  /// default floor 2 sup |Psi - rho| over the leaf boundaries.
  SubsolutionField(const LeafField& leaf, double floor_m = -1.0,
                   EnvelopeCombine combine = EnvelopeCombine::max);

  double floor_constant() const { return m_; }
  double lambda0() const { return convexity_.min_eigenvalue; }
  const ConvexityReport& convexity() const { return convexity_; }
  const LeafField& leaves() const { return *leaf_; }

  /// F(z, tau); `index` receives the attaining leaf (-1 for the floor).
  double operator()(const Eigen::VectorXcd& z, cplx tau, int* index = nullptr) const;

 private:
  const LeafField* leaf_;
  double m_;
  EnvelopeCombine combine_;
  ConvexityReport convexity_;
};

SubsolutionField build_subsolution(const LeafField& leaf, double floor_m = -1.0);

struct EnvelopeReport {
  double leaf_agreement = 0.0;     // sup |F - Phi| at leaf image points
  double dominance_violation = 0.0;  // sup max(F - Phi, 0) on the product grid
  double margin_ratio = 0.0;       // min (Phi - (L_x - rho)) / d^2 over samples with d > 0
  double margin_bound = 0.0;       // lambda0 / 6, reported for comparison
  int leaf_points = 0;
  int grid_points = 0;
};

/// Compares F with Phi on leaf images (every node, circle nodes and interior
/// tau samples) and on a product field.
EnvelopeReport envelope_check(const SubsolutionField& f, const ProductField& field);

struct PshReport {
  int circles = 0;
  int violations = 0;
  double worst_defect = 0.0;  // max (center - average) over all circles
};

/// Sub-mean-value test of rho + F on `samples` random complex lines through
/// points near the leaves, radii h, 2h, 4h, 128 trapezoid nodes per circle.
PshReport psh_check(const SubsolutionField& f, int samples, double h = 0.02,
                    std::uint64_t seed = 0x5eed);

// ---- export -----------------------------------------------------------------

/// CSV with columns re_z1,im_z1,..,re_zn,im_zn,re_tau,im_tau,value.
void write_product_csv(std::ostream& out, const ProductGridSpec& spec,
                       const std::vector<double>& values);

}  // namespace hcma
