#pragma once

// Boundary potentials Psi(z, tau) on a chart box N' x circle, together with
// their Wirtinger derivatives:
//
//   gradient       g_i  = d Psi / d z_i
//   mixed_hessian  H_ij = d^2 Psi / d z_i d zbar_j   (Hermitian)
//   holo_hessian   S_ij = d^2 Psi / d z_i d z_j      (symmetric)
//
// A reference potential rho is simply a Potential that ignores tau.

#include <memory>
#include <random>
#include <string>
#include <vector>

#include "hcma/circle.hpp"
#include "hcma/expression.hpp"

namespace hcma {

/// Axis-aligned chart box: |Re z_i|, |Im z_i| <= radius.
struct ChartBox {
  double radius = 2.0;
  bool contains(const Eigen::VectorXcd& z) const;
};

class Potential {
 public:
  virtual ~Potential() = default;

  virtual int dim() const = 0;
  virtual double value(const Eigen::VectorXcd& z, cplx tau) const = 0;
  virtual Eigen::VectorXcd gradient(const Eigen::VectorXcd& z, cplx tau) const = 0;
  virtual Eigen::MatrixXcd mixed_hessian(const Eigen::VectorXcd& z, cplx tau) const = 0;
  virtual Eigen::MatrixXcd holo_hessian(const Eigen::VectorXcd& z, cplx tau) const = 0;
  virtual std::string describe() const = 0;

  /// Real 2n x 2n Hessian in coordinates (Re z_1..Re z_n, Im z_1..Im z_n).
  Eigen::MatrixXd real_hessian(const Eigen::VectorXcd& z, cplx tau) const;
};

using PotentialPtr = std::shared_ptr<const Potential>;

/// |z|^2 = sum_i |z_i|^2.
class EuclideanPotential final : public Potential {
 public:
  explicit EuclideanPotential(int n) : n_(n) {}
  int dim() const override { return n_; }
  double value(const Eigen::VectorXcd& z, cplx) const override { return z.squaredNorm(); }
  Eigen::VectorXcd gradient(const Eigen::VectorXcd& z, cplx) const override { return z.conjugate(); }
  Eigen::MatrixXcd mixed_hessian(const Eigen::VectorXcd&, cplx) const override {
    return Eigen::MatrixXcd::Identity(n_, n_);
  }
  Eigen::MatrixXcd holo_hessian(const Eigen::VectorXcd&, cplx) const override {
    return Eigen::MatrixXcd::Zero(n_, n_);
  }
  std::string describe() const override { return "euclidean"; }

 private:
  int n_;
};

/// Taylor polynomial in tau; coefficient k multiplies tau^k.
struct TauPolynomial {
  Eigen::VectorXcd coeffs;
  cplx operator()(cplx tau) const;
  cplx derivative(cplx tau) const;
};

/// sum_i |z_i - eps * s_i(tau)|^2 with holomorphic s_i and s_i(-i) = 0.
/// The exact disc family is z = w + eps s(tau), xi = conj(w).
class TranslationPotential final : public Potential {
 public:
  TranslationPotential(double eps, std::vector<TauPolynomial> shifts);

  int dim() const override { return static_cast<int>(shifts_.size()); }
  double value(const Eigen::VectorXcd& z, cplx tau) const override;
  Eigen::VectorXcd gradient(const Eigen::VectorXcd& z, cplx tau) const override;
  Eigen::MatrixXcd mixed_hessian(const Eigen::VectorXcd&, cplx) const override {
    return Eigen::MatrixXcd::Identity(dim(), dim());
  }
  Eigen::MatrixXcd holo_hessian(const Eigen::VectorXcd&, cplx) const override {
    return Eigen::MatrixXcd::Zero(dim(), dim());
  }
  std::string describe() const override { return "translation"; }

  double epsilon() const { return eps_; }
  const std::vector<TauPolynomial>& shifts() const { return shifts_; }
  /// eps * s(tau).
  Eigen::VectorXcd shift(cplx tau) const;

 private:
  double eps_;
  std::vector<TauPolynomial> shifts_;
};

/// |z|^2 + eps * Re(c0 + c1 tau) * (|z|^2)^2.
class QuarticPotential final : public Potential {
 public:
  QuarticPotential(int n, double eps, cplx c0, cplx c1);

  int dim() const override { return n_; }
  double value(const Eigen::VectorXcd& z, cplx tau) const override;
  Eigen::VectorXcd gradient(const Eigen::VectorXcd& z, cplx tau) const override;
  Eigen::MatrixXcd mixed_hessian(const Eigen::VectorXcd& z, cplx tau) const override;
  Eigen::MatrixXcd holo_hessian(const Eigen::VectorXcd& z, cplx tau) const override;
  std::string describe() const override { return "quartic"; }

 private:
  double weight(cplx tau) const { return eps_ * (c0_ + c1_ * tau).real(); }
  int n_;
  double eps_;
  cplx c0_, c1_;
};

/// User expression, derivatives taken symbolically. Throws InvalidArgument
/// when the expression is not real valued at sampled points.
class ExpressionPotential final : public Potential {
 public:
  ExpressionPotential(const std::string& source, int n);

  int dim() const override { return expr_.dim(); }
  double value(const Eigen::VectorXcd& z, cplx tau) const override;
  Eigen::VectorXcd gradient(const Eigen::VectorXcd& z, cplx tau) const override;
  Eigen::MatrixXcd mixed_hessian(const Eigen::VectorXcd& z, cplx tau) const override;
  Eigen::MatrixXcd holo_hessian(const Eigen::VectorXcd& z, cplx tau) const override;
  std::string describe() const override { return "expression: " + expr_.source(); }

 private:
  std::vector<cplx> slots(const Eigen::VectorXcd& z, cplx tau) const;
  expr::Expression expr_;
  std::vector<expr::Expression> grad_;
  std::vector<expr::Expression> mixed_;  // row-major n x n
  std::vector<expr::Expression> holo_;
};

/// h(z) = Re sum_i (a_i z_i + b_i z_i^2); pluriharmonic.
class PluriharmonicGauge final : public Potential {
 public:
  PluriharmonicGauge(Eigen::VectorXcd linear, Eigen::VectorXcd quadratic);

  int dim() const override { return static_cast<int>(a_.size()); }
  double value(const Eigen::VectorXcd& z, cplx) const override;
  Eigen::VectorXcd gradient(const Eigen::VectorXcd& z, cplx) const override;
  Eigen::MatrixXcd mixed_hessian(const Eigen::VectorXcd&, cplx) const override {
    return Eigen::MatrixXcd::Zero(dim(), dim());
  }
  Eigen::MatrixXcd holo_hessian(const Eigen::VectorXcd&, cplx) const override {
    return b_.asDiagonal();
  }
  std::string describe() const override { return "pluriharmonic-gauge"; }

 private:
  Eigen::VectorXcd a_, b_;
};

/// Sum of two potentials of the same dimension.
class SumPotential final : public Potential {
 public:
  SumPotential(PotentialPtr first, PotentialPtr second);

  int dim() const override { return first_->dim(); }
  double value(const Eigen::VectorXcd& z, cplx tau) const override {
    return first_->value(z, tau) + second_->value(z, tau);
  }
  Eigen::VectorXcd gradient(const Eigen::VectorXcd& z, cplx tau) const override {
    return first_->gradient(z, tau) + second_->gradient(z, tau);
  }
  Eigen::MatrixXcd mixed_hessian(const Eigen::VectorXcd& z, cplx tau) const override {
    return first_->mixed_hessian(z, tau) + second_->mixed_hessian(z, tau);
  }
  Eigen::MatrixXcd holo_hessian(const Eigen::VectorXcd& z, cplx tau) const override {
    return first_->holo_hessian(z, tau) + second_->holo_hessian(z, tau);
  }
  std::string describe() const override {
    return first_->describe() + " + " + second_->describe();
  }

 private:
  PotentialPtr first_, second_;
};

// ---- validation -------------------------------------------------------------

struct PotentialCheck {
  double gradient_fd_error = 0.0;   // max |analytic - centered FD| of the gradient
  double hessian_fd_error = 0.0;    // same for mixed and holomorphic Hessians
  double min_mixed_det = 0.0;       // min det of the mixed Hessian over samples
  double min_mixed_eig = 0.0;       // min eigenvalue of the mixed Hessian
  double min_real_hessian_eig = 0.0;
  int samples = 0;
};

/// Spot-checks derivatives by centered differences (step h) at random points
/// of the chart box and boundary angles; deterministic given seed.
PotentialCheck check_potential(const Potential& psi, const ChartBox& box, int samples = 32,
                               std::uint64_t seed = 7, double h = 1e-4);

/// Wirtinger gradient of the value by centered differences.
Eigen::VectorXcd fd_gradient(const Potential& psi, const Eigen::VectorXcd& z, cplx tau, double h);

}  // namespace hcma
