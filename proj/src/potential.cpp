#include "hcma/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Eigenvalues>

namespace hcma {

bool ChartBox::contains(const Eigen::VectorXcd& z) const {
  for (Eigen::Index i = 0; i < z.size(); ++i)
    if (std::abs(z[i].real()) > radius || std::abs(z[i].imag()) > radius || !std::isfinite(std::abs(z[i])))
      return false;
  return true;
}

Eigen::MatrixXd Potential::real_hessian(const Eigen::VectorXcd& z, cplx tau) const {
  const int n = dim();
  const Eigen::MatrixXcd h = mixed_hessian(z, tau);
  const Eigen::MatrixXcd s = holo_hessian(z, tau);
  Eigen::MatrixXd out(2 * n, 2 * n);
  out.topLeftCorner(n, n) = 2.0 * (h + s).real();
  out.bottomRightCorner(n, n) = 2.0 * (h - s).real();
  out.topRightCorner(n, n) = 2.0 * (h - s).imag();
  out.bottomLeftCorner(n, n) = -2.0 * (h + s).imag();
  return out;
}

// ---- TauPolynomial ----------------------------------------------------------

cplx TauPolynomial::operator()(cplx tau) const {
  cplx acc = 0.0;
  for (Eigen::Index k = coeffs.size() - 1; k >= 0; --k) acc = acc * tau + coeffs[k];
  return acc;
}

cplx TauPolynomial::derivative(cplx tau) const {
  cplx acc = 0.0;
  for (Eigen::Index k = coeffs.size() - 1; k >= 1; --k) acc = acc * tau + static_cast<double>(k) * coeffs[k];
  return acc;
}

// ---- TranslationPotential ---------------------------------------------------

TranslationPotential::TranslationPotential(double eps, std::vector<TauPolynomial> shifts)
    : eps_(eps), shifts_(std::move(shifts)) {
  if (shifts_.empty()) throw Error(ErrorKind::InvalidArgument, "translation needs >= 1 component");
  for (const auto& s : shifts_)
    if (std::abs(s(-kI)) > 1e-12)
      throw Error(ErrorKind::InvalidArgument, "translation shifts must vanish at tau = -i");
}

Eigen::VectorXcd TranslationPotential::shift(cplx tau) const {
  Eigen::VectorXcd s(dim());
  for (int i = 0; i < dim(); ++i) s[i] = eps_ * shifts_[i](tau);
  return s;
}

double TranslationPotential::value(const Eigen::VectorXcd& z, cplx tau) const {
  return (z - shift(tau)).squaredNorm();
}

Eigen::VectorXcd TranslationPotential::gradient(const Eigen::VectorXcd& z, cplx tau) const {
  return (z - shift(tau)).conjugate();
}

// ---- QuarticPotential -------------------------------------------------------

QuarticPotential::QuarticPotential(int n, double eps, cplx c0, cplx c1)
    : n_(n), eps_(eps), c0_(c0), c1_(c1) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "quartic needs n >= 1");
}

double QuarticPotential::value(const Eigen::VectorXcd& z, cplx tau) const {
  const double s = z.squaredNorm();
  return s + weight(tau) * s * s;
}

Eigen::VectorXcd QuarticPotential::gradient(const Eigen::VectorXcd& z, cplx tau) const {
  const double s = z.squaredNorm();
  return (1.0 + 2.0 * weight(tau) * s) * z.conjugate();
}

Eigen::MatrixXcd QuarticPotential::mixed_hessian(const Eigen::VectorXcd& z, cplx tau) const {
  const double s = z.squaredNorm();
  const double m = weight(tau);
  // d/dzbar_j [(1 + 2 m s) zbar_i] = 2 m z_j zbar_i + (1 + 2 m s) delta_ij
  Eigen::MatrixXcd h = (1.0 + 2.0 * m * s) * Eigen::MatrixXcd::Identity(n_, n_);
  h += 2.0 * m * z.conjugate() * z.transpose();
  return h;
}

Eigen::MatrixXcd QuarticPotential::holo_hessian(const Eigen::VectorXcd& z, cplx tau) const {
  const Eigen::VectorXcd zb = z.conjugate();
  return 2.0 * weight(tau) * zb * zb.transpose();
}

// ---- ExpressionPotential ----------------------------------------------------

ExpressionPotential::ExpressionPotential(const std::string& source, int n) : expr_(source, n) {
  // Derivatives are taken of the expression itself, so it must be real valued
  // for them to be derivatives of the potential.
  std::mt19937_64 rng(0x7e57);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 16; ++trial) {
    Eigen::VectorXcd z(n);
    for (int i = 0; i < n; ++i) z[i] = cplx(u(rng), u(rng));
    const cplx v = expr_.evaluate(slots(z, std::polar(1.0, kPi * u(rng))));
    if (std::abs(v.imag()) > 1e-9 * (1.0 + std::abs(v.real())))
      throw Error(ErrorKind::InvalidArgument, "expression is not real valued: " + source);
  }
  for (int i = 0; i < n; ++i) grad_.push_back(expr_.derivative(i));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      mixed_.push_back(grad_[i].derivative(n + j));
      holo_.push_back(grad_[i].derivative(j));
    }
  }
}

std::vector<cplx> ExpressionPotential::slots(const Eigen::VectorXcd& z, cplx tau) const {
  const int n = dim();
  std::vector<cplx> v(2 * n + 2);
  for (int i = 0; i < n; ++i) {
    v[i] = z[i];
    v[n + i] = std::conj(z[i]);
  }
  v[2 * n] = tau;
  v[2 * n + 1] = std::conj(tau);
  return v;
}

double ExpressionPotential::value(const Eigen::VectorXcd& z, cplx tau) const {
  return expr_.evaluate(slots(z, tau)).real();
}

Eigen::VectorXcd ExpressionPotential::gradient(const Eigen::VectorXcd& z, cplx tau) const {
  // For a real-valued expression E, d(Re E)/dz_i = dE/dz_i.
  const auto v = slots(z, tau);
  Eigen::VectorXcd g(dim());
  for (int i = 0; i < dim(); ++i) g[i] = grad_[i].evaluate(v);
  return g;
}

Eigen::MatrixXcd ExpressionPotential::mixed_hessian(const Eigen::VectorXcd& z, cplx tau) const {
  const auto v = slots(z, tau);
  const int n = dim();
  Eigen::MatrixXcd h(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) h(i, j) = mixed_[i * n + j].evaluate(v);
  return h;
}

Eigen::MatrixXcd ExpressionPotential::holo_hessian(const Eigen::VectorXcd& z, cplx tau) const {
  const auto v = slots(z, tau);
  const int n = dim();
  Eigen::MatrixXcd s(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s(i, j) = holo_[i * n + j].evaluate(v);
  return s;
}

// ---- PluriharmonicGauge / SumPotential --------------------------------------

PluriharmonicGauge::PluriharmonicGauge(Eigen::VectorXcd linear, Eigen::VectorXcd quadratic)
    : a_(std::move(linear)), b_(std::move(quadratic)) {
  if (a_.size() != b_.size()) throw Error(ErrorKind::DimensionMismatch, "gauge coefficient sizes differ");
}

double PluriharmonicGauge::value(const Eigen::VectorXcd& z, cplx) const {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) acc += (a_[i] * z[i] + b_[i] * z[i] * z[i]).real();
  return acc;
}

Eigen::VectorXcd PluriharmonicGauge::gradient(const Eigen::VectorXcd& z, cplx) const {
  return 0.5 * a_ + b_.cwiseProduct(z);
}

SumPotential::SumPotential(PotentialPtr first, PotentialPtr second)
    : first_(std::move(first)), second_(std::move(second)) {
  if (first_->dim() != second_->dim())
    throw Error(ErrorKind::DimensionMismatch, "summed potentials differ in dimension");
}

// ---- validation -------------------------------------------------------------

Eigen::VectorXcd fd_gradient(const Potential& psi, const Eigen::VectorXcd& z, cplx tau, double h) {
  const int n = psi.dim();
  Eigen::VectorXcd g(n);
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXcd zp = z, zm = z;
    zp[i] += h;
    zm[i] -= h;
    const double dx = (psi.value(zp, tau) - psi.value(zm, tau)) / (2.0 * h);
    zp = z;
    zm = z;
    zp[i] += cplx(0.0, h);
    zm[i] -= cplx(0.0, h);
    const double dy = (psi.value(zp, tau) - psi.value(zm, tau)) / (2.0 * h);
    g[i] = 0.5 * cplx(dx, -dy);
  }
  return g;
}

PotentialCheck check_potential(const Potential& psi, const ChartBox& box, int samples,
                               std::uint64_t seed, double h) {
  const int n = psi.dim();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-box.radius, box.radius);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
  PotentialCheck out;
  out.samples = samples;
  out.min_mixed_det = std::numeric_limits<double>::infinity();
  out.min_mixed_eig = std::numeric_limits<double>::infinity();
  out.min_real_hessian_eig = std::numeric_limits<double>::infinity();
  const double margin = 1.0 - 2.0 * h / std::max(box.radius, 1e-12);
  for (int s = 0; s < samples; ++s) {
    Eigen::VectorXcd z(n);
    for (int i = 0; i < n; ++i) z[i] = margin * cplx(coord(rng), coord(rng));
    const cplx tau = std::polar(1.0, angle(rng));

    const Eigen::VectorXcd g = psi.gradient(z, tau);
    out.gradient_fd_error = std::max(out.gradient_fd_error, (g - fd_gradient(psi, z, tau, h)).cwiseAbs().maxCoeff());

    const Eigen::MatrixXcd hm = psi.mixed_hessian(z, tau);
    const Eigen::MatrixXcd hs = psi.holo_hessian(z, tau);
    for (int j = 0; j < n; ++j) {
      Eigen::VectorXcd zp = z, zm = z;
      zp[j] += h;
      zm[j] -= h;
      const Eigen::VectorXcd gx = (psi.gradient(zp, tau) - psi.gradient(zm, tau)) / (2.0 * h);
      zp = z;
      zm = z;
      zp[j] += cplx(0.0, h);
      zm[j] -= cplx(0.0, h);
      const Eigen::VectorXcd gy = (psi.gradient(zp, tau) - psi.gradient(zm, tau)) / (2.0 * h);
      const Eigen::VectorXcd d_holo = 0.5 * (gx - kI * gy);
      const Eigen::VectorXcd d_anti = 0.5 * (gx + kI * gy);
      out.hessian_fd_error = std::max(out.hessian_fd_error, (d_holo - hs.col(j)).cwiseAbs().maxCoeff());
      out.hessian_fd_error = std::max(out.hessian_fd_error, (d_anti - hm.col(j)).cwiseAbs().maxCoeff());
    }
    out.min_mixed_det = std::min(out.min_mixed_det, hm.determinant().real());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(hm, Eigen::EigenvaluesOnly);
    out.min_mixed_eig = std::min(out.min_mixed_eig, eig.eigenvalues().minCoeff());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> reig(psi.real_hessian(z, tau), Eigen::EigenvaluesOnly);
    out.min_real_hessian_eig = std::min(out.min_real_hessian_eig, reig.eigenvalues().minCoeff());
  }
  return out;
}

}  // namespace hcma
