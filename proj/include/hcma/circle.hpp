#pragma once

// Discrete harmonic analysis on the unit circle and disk.
//
// Sampling convention: a CircleFunction on a grid of N nodes theta_j = 2*pi*j/N
// is the trigonometric polynomial
//
//     f(theta) = sum_{m=-N/2}^{N/2-1} c_m exp(i m theta),
//
// and coefficients are stored in FFT order (index m mod N). The Nyquist mode
// m = -N/2 is kept in the coefficient vector but has no holomorphic or
// conjugate partner; Hilbert transform and holomorphic projection drop it.

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hcma/error.hpp"

namespace hcma {

using cplx = std::complex<double>;
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr cplx kI{0.0, 1.0};

class CircleGrid {
 public:
  /// size must be a power of two >= 8.
  explicit CircleGrid(int size);

  int size() const noexcept { return size_; }
  double theta(int j) const noexcept { return 2.0 * kPi * j / size_; }
  cplx node(int j) const noexcept { return std::polar(1.0, theta(j)); }
  /// Index of tau = -i, where fixed-point conditions are anchored.
  int anchor_index() const noexcept { return 3 * size_ / 4; }
  /// Largest Taylor order whose trace is resolved without aliasing.
  int max_order() const noexcept { return size_ / 2 - 1; }
  /// Wraps an integer mode to its FFT slot.
  int slot(int m) const noexcept { return ((m % size_) + size_) % size_; }

  bool operator==(const CircleGrid&) const = default;

 private:
  int size_;
};

namespace fft {
/// c_m = (1/N) sum_j f_j exp(-i m theta_j), FFT order.
Eigen::VectorXcd analyze(const Eigen::VectorXcd& samples);
/// f_j = sum_m c_m exp(i m theta_j).
Eigen::VectorXcd synthesize(const Eigen::VectorXcd& coeffs);
}  // namespace fft

class CircleFunction {
 public:
  CircleFunction(CircleGrid grid, Eigen::VectorXcd samples);

  static CircleFunction from_coeffs(CircleGrid grid, Eigen::VectorXcd coeffs);
  static CircleFunction from_real(CircleGrid grid, const Eigen::VectorXd& values);

  template <class Fn>
  static CircleFunction sample(CircleGrid grid, Fn&& fn) {
    Eigen::VectorXcd s(grid.size());
    for (int j = 0; j < grid.size(); ++j) s[j] = cplx(fn(grid.theta(j)));
    return CircleFunction(grid, std::move(s));
  }

  const CircleGrid& grid() const noexcept { return grid_; }
  int size() const noexcept { return grid_.size(); }
  const Eigen::VectorXcd& samples() const noexcept { return samples_; }
  const Eigen::VectorXcd& coeffs() const noexcept { return coeffs_; }
  cplx coeff(int m) const { return coeffs_[grid_.slot(m)]; }
  cplx operator[](int j) const { return samples_[j]; }

  Eigen::VectorXd real() const { return samples_.real(); }
  Eigen::VectorXd imag() const { return samples_.imag(); }
  bool is_real(double tol = 1e-12) const;
  double sup_norm() const { return samples_.cwiseAbs().maxCoeff(); }
  cplx mean() const { return coeffs_[0]; }

  /// Trigonometric interpolation at an arbitrary angle.
  cplx interpolate(double theta) const;

  /// k-th derivative in theta computed spectrally.
  CircleFunction derivative(int k = 1) const;

 private:
  CircleGrid grid_;
  Eigen::VectorXcd samples_;
  Eigen::VectorXcd coeffs_;
};

/// Truncated Taylor series u(tau) = sum_{k=0}^{K} a_k tau^k.
class HolomorphicDisc {
 public:
  explicit HolomorphicDisc(Eigen::VectorXcd coeffs);

  static HolomorphicDisc constant(cplx value, int order);

  int order() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
  const Eigen::VectorXcd& coeffs() const noexcept { return coeffs_; }

  /// Evaluation for |tau| <= 1; throws OutsideDisk beyond.
  cplx operator()(cplx tau) const;
  CircleFunction trace(const CircleGrid& grid) const;
  double coeff_bound() const { return coeffs_.cwiseAbs().sum(); }

  struct Projection;
  /// Keeps modes 0..order of a boundary function and reports the relative
  /// mass of the discarded negative (and Nyquist) modes.
  static Projection project(const CircleFunction& f, int order);

 private:
  Eigen::VectorXcd coeffs_;
};

struct HolomorphicDisc::Projection {
  HolomorphicDisc disc;
  double negative_mass_ratio;
};

// ---- row-wise helpers for vector-valued discs (rows = components) ----------

/// Boundary traces of each row of Taylor coefficients on an N-point grid.
Eigen::MatrixXcd trace_rows(const Eigen::MatrixXcd& taylor, int grid_size);
/// Holomorphic projection of each row of boundary samples to `order`.
/// negative_mass (optional) receives the largest per-row discarded mass ratio.
Eigen::MatrixXcd project_rows(const Eigen::MatrixXcd& samples, int order,
                              double* negative_mass = nullptr);
/// Horner evaluation of each row at tau.
Eigen::VectorXcd evaluate_rows(const Eigen::MatrixXcd& taylor, cplx tau);
/// tau-derivative of each row at tau.
Eigen::VectorXcd derivative_rows(const Eigen::MatrixXcd& taylor, cplx tau);

// ---- operations -------------------------------------------------------------

/// Fourier multiplier c_m -> -i sign(m) c_m, sign(0) = 0, Nyquist mode zeroed.
CircleFunction hilbert_transform(const CircleFunction& f);

/// Harmonic extension sum_m c_m r^|m| e^{i m eta}; |tau| <= 1 - 1e-12.
cplx poisson_extend(const CircleFunction& f, cplx tau);

/// Holomorphic u with Re u = f on the circle and u(-i) = anchor.
HolomorphicDisc solve_riemann_hilbert(const CircleFunction& f, cplx anchor);
HolomorphicDisc solve_riemann_hilbert(const CircleFunction& f, cplx anchor, int order);

/// sup_{|x-x'| <= t} |f(x) - f(x')| on a line grid.
double modulus_of_continuity(std::span<const double> x, std::span<const double> f, double t);
/// Same with arc distance on the circle; uses the real part of f.
double modulus_of_continuity(const CircleFunction& f, double t);

/// Max over dyadic arcs (all node rotations) of the mean |f - f_Q|.
double bmo_norm(const CircleFunction& f);

/// Normalized measure of {|f - mean f| > lambda}.
double jn_tail(const CircleFunction& f, double lambda);

/// Holder seminorm [D^k f]_alpha on the circle (spectral D^k, arc distance).
double holder_seminorm(const CircleFunction& f, double alpha, int k = 0);
/// Holder seminorm on a uniform line grid (centered differences for D^k).
double holder_seminorm(std::span<const double> x, std::span<const double> f, double alpha,
                       int k = 0);

// ---- serialization ----------------------------------------------------------

/// CSV with header "theta,re,im".
void write_csv(std::ostream& out, const CircleFunction& f);
CircleFunction read_circle_csv(std::istream& in);

}  // namespace hcma
