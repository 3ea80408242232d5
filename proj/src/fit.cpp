#include "hcma/fit.hpp"

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "hcma/error.hpp"

namespace hcma {

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw Error(ErrorKind::InvalidArgument, "fit_line needs >= 2 paired samples");
  const Eigen::Index n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd design(n, 2);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    design(i, 0) = x[i];
    design(i, 1) = 1.0;
    rhs[i] = y[i];
  }
  const Eigen::Vector2d beta = design.colPivHouseholderQr().solve(rhs);
  const Eigen::VectorXd resid = rhs - design * beta;
  const double ss_res = resid.squaredNorm();
  const double ss_tot = (rhs.array() - rhs.mean()).matrix().squaredNorm();
  LinearFit fit;
  fit.slope = beta[0];
  fit.intercept = beta[1];
  fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  fit.rms_residual = std::sqrt(ss_res / static_cast<double>(n));
  fit.samples = static_cast<int>(n);
  return fit;
}

LinearFit fit_proportional(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.empty())
    throw Error(ErrorKind::InvalidArgument, "fit_proportional needs paired samples");
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += x[i] * y[i];
    sxx += x[i] * x[i];
    syy += y[i] * y[i];
  }
  LinearFit fit;
  fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) ss_res += std::pow(y[i] - fit.slope * x[i], 2);
  fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  fit.rms_residual = std::sqrt(ss_res / static_cast<double>(x.size()));
  fit.samples = static_cast<int>(x.size());
  return fit;
}

LinearFit fit_order(std::span<const double> h, std::span<const double> err) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < h.size(); ++i) {
    lx.push_back(std::log(h[i]));
    ly.push_back(std::log(err[i]));
  }
  return fit_line(lx, ly);
}

}  // namespace hcma
