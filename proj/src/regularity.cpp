#include "hcma/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include "hcma/parallel.hpp"

namespace hcma {

namespace {

double blend(double u) { return u > 0.0 ? std::exp(-1.0 / u) : 0.0; }

// wraps to (-pi, pi]
double wrap(double theta) {
  double t = std::fmod(theta + kPi, 2.0 * kPi);
  if (t < 0.0) t += 2.0 * kPi;
  return t == 0.0 ? kPi : t - kPi;
}

void require_geometric(const ParamFamily& fam) {
  const auto& x = fam.x;
  bool ok = x.size() >= 3 && x[0] == 0.0;
  for (std::size_t i = 1; ok && i < x.size(); ++i)
    ok = std::abs(x[i] - std::ldexp(1.0, -static_cast<int>(i) - 2)) <= 1e-15;
  if (!ok) throw Error(ErrorKind::GridNotGeometric, "parameters must be {0} U {2^-j, j = 3..J}");
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

std::vector<CircleFunction> ParamFamily::transformed() const {
  std::vector<CircleFunction> out(slices.size(), slices.front());
  parallel_for(slices.size(), [&](std::size_t i) { out[i] = hilbert_transform(slices[i]); });
  return out;
}

double smooth_cutoff(double t, double t1) {
  if (t <= 1.0) return 1.0;
  if (t >= t1) return 0.0;
  const double u = (t - 1.0) / (t1 - 1.0);
  return blend(1.0 - u) / (blend(1.0 - u) + blend(u));
}

double counterexample_value(double x, double theta, double alpha) {
  const double th = wrap(theta);
  const double m = std::pow(std::min(std::abs(x), std::abs(th)), alpha);
  const double s = smooth_cutoff(std::abs(th));
  return th >= 0.0 ? -s * m : s * m;
}

std::vector<double> geometric_parameters(int levels) {
  if (levels < 4) throw Error(ErrorKind::InvalidArgument, "need levels >= 4");
  std::vector<double> x{0.0};
  for (int j = 3; j <= levels; ++j) x.push_back(std::ldexp(1.0, -j));
  return x;
}

ParamFamily sample_family(const std::string& name, double alpha, std::vector<double> x,
                          const CircleGrid& grid,
                          const std::function<double(double, double)>& fn) {
  if (x.empty()) throw Error(ErrorKind::InvalidArgument, "empty parameter grid");
  ParamFamily fam;
  fam.name = name;
  fam.alpha = alpha;
  fam.x = std::move(x);
  fam.slices.assign(fam.x.size(), CircleFunction(grid, Eigen::VectorXcd::Zero(grid.size())));
  parallel_for(fam.x.size(), [&](std::size_t i) {
    Eigen::VectorXd v(grid.size());
    for (int j = 0; j < grid.size(); ++j) {
      v[j] = fn(fam.x[i], grid.theta(j));
      if (!std::isfinite(v[j])) throw Error(ErrorKind::InvalidArgument, "family value not finite");
    }
    fam.slices[i] = CircleFunction::from_real(grid, v);
  });
  return fam;
}

ParamFamily counterexample_family(double alpha, int circle_size, int levels) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorKind::InvalidArgument, "need 0 < alpha < 1");
  std::ostringstream name;
  name << "counterexample(alpha=" << alpha << ")";
  return sample_family(name.str(), alpha, geometric_parameters(levels), CircleGrid(circle_size),
                       [alpha](double x, double t) { return counterexample_value(x, t, alpha); });
}

double product_holder_norm(const std::function<double(double, double)>& fn, int x_points,
                           int theta_points, double alpha, std::uint64_t seed) {
  if (x_points < 2 || theta_points < 2) throw Error(ErrorKind::InvalidArgument, "grid too small");
  const std::size_t count = static_cast<std::size_t>(x_points) * theta_points;
  std::vector<double> xs(count), ts(count), vs(count);
  double sup = 0.0;
  for (int i = 0; i < x_points; ++i) {
    for (int j = 0; j < theta_points; ++j) {
      const std::size_t k = static_cast<std::size_t>(i) * theta_points + j;
      xs[k] = -kPi + 2.0 * kPi * i / (x_points - 1);
      ts[k] = 2.0 * kPi * j / theta_points;
      vs[k] = fn(xs[k], ts[k]);
      sup = std::max(sup, std::abs(vs[k]));
    }
  }
  auto quotient = [&](std::size_t p, std::size_t q) {
    double dt = std::abs(ts[p] - ts[q]);
    dt = std::min(dt, 2.0 * kPi - dt);
    const double d = std::hypot(xs[p] - xs[q], dt);
    return d > 0.0 ? std::abs(vs[p] - vs[q]) / std::pow(d, alpha) : 0.0;
  };
  double semi = 0.0;
  const double pairs = 0.5 * static_cast<double>(count) * static_cast<double>(count - 1);
  if (pairs <= 2e6) {
    for (std::size_t p = 0; p < count; ++p)
      for (std::size_t q = p + 1; q < count; ++q) semi = std::max(semi, quotient(p, q));
  } else {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, count - 1);
    for (int s = 0; s < 2000000; ++s) semi = std::max(semi, quotient(pick(rng), pick(rng)));
    for (int i = 0; i < x_points; ++i) {
      for (int j = 0; j < theta_points; ++j) {
        const std::size_t k = static_cast<std::size_t>(i) * theta_points + j;
        const std::size_t right = static_cast<std::size_t>(i) * theta_points + (j + 1) % theta_points;
        semi = std::max(semi, quotient(k, right));
        if (i + 1 < x_points) {
          const std::size_t up = k + theta_points;
          semi = std::max(semi, quotient(k, up));
          semi = std::max(semi, quotient(k, up - j + (j + 1) % theta_points));
        }
      }
    }
  }
  return sup + semi;
}

LogGrowthReport log_growth_fit(const ParamFamily& fam) {
  require_geometric(fam);
  const auto ht = fam.transformed();
  const double a = fam.alpha;
  const double spacing = 2.0 * kPi / fam.grid().size();
  LogGrowthReport rep;
  rep.table.columns = {"x", "y", "x^a(-log x)"};
  std::vector<double> basis, xa, y;
  for (std::size_t i = 1; i < fam.x.size(); ++i) {
    const double x = fam.x[i];
    const double v = std::abs(ht[i][0].real() - ht[0][0].real());
    basis.push_back(std::pow(x, a) * -std::log(x));
    xa.push_back(std::pow(x, a));
    y.push_back(v);
    if (x < spacing) ++rep.below_resolution;
    rep.table.rows.push_back({x, v, basis.back()});
  }
  // two-term least squares y = c B + d X without constant
  Eigen::MatrixXd design(y.size(), 2);
  Eigen::VectorXd rhs(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    design(i, 0) = basis[i];
    design(i, 1) = xa[i];
    rhs[i] = y[i];
  }
  const Eigen::Vector2d coef = design.colPivHouseholderQr().solve(rhs);
  const Eigen::VectorXd resid = rhs - design * coef;
  const double mean = rhs.mean();
  const double ss_tot = (rhs.array() - mean).square().sum();
  rep.fit.slope = coef[0];
  rep.fit.intercept = coef[1];
  rep.fit.samples = static_cast<int>(y.size());
  rep.fit.rms_residual = std::sqrt(resid.squaredNorm() / y.size());
  rep.fit.r2 = ss_tot > 0.0 ? 1.0 - resid.squaredNorm() / ss_tot : 1.0;
  rep.offset_fit = fit_line(basis, y);
  rep.pass = rep.fit.slope > 0.0 && rep.fit.r2 >= 0.98;
  return rep;
}

OffAxisReport offaxis_holder_scan(const ParamFamily& fam, std::vector<double> theta0) {
  const auto ht = fam.transformed();
  const CircleGrid& grid = fam.grid();
  const double a = fam.alpha;
  std::size_t origin = 0;
  while (origin < fam.x.size() && fam.x[origin] != 0.0) ++origin;
  if (origin == fam.x.size()) throw Error(ErrorKind::InvalidArgument, "family has no x = 0 slice");

  OffAxisReport rep;
  rep.theta0 = std::move(theta0);
  rep.table.columns = {"theta0", "theta_used", "constant", "1-log(theta0/2)"};
  std::vector<double> lx;
  for (double t0 : rep.theta0) {
    int j = static_cast<int>(std::lround(wrap(t0) / (2.0 * kPi) * grid.size()));
    j = ((j % grid.size()) + grid.size()) % grid.size();
    double c = 0.0;
    for (std::size_t i = 0; i < fam.x.size(); ++i) {
      const double x = std::abs(fam.x[i]);
      if (x <= 0.0 || x >= std::abs(t0) / 2.0) continue;
      c = std::max(c, std::abs(ht[i][j].real() - ht[origin][j].real()) / std::pow(x, a));
    }
    rep.theta_used.push_back(grid.theta(j));
    rep.constants.push_back(c);
    lx.push_back(1.0 - std::log(std::abs(t0) / 2.0));
    rep.table.rows.push_back({t0, grid.theta(j), c, lx.back()});
  }
  rep.fit = fit_line(lx, rep.constants);
  // constants should not decrease as theta0 shrinks
  std::vector<std::size_t> order(rep.theta0.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t p, std::size_t q) { return std::abs(rep.theta0[p]) > std::abs(rep.theta0[q]); });
  rep.increasing = true;
  for (std::size_t i = 1; i < order.size(); ++i)
    rep.increasing = rep.increasing && rep.constants[order[i]] >= rep.constants[order[i - 1]];
  bool finite = true;
  for (double c : rep.constants) finite = finite && std::isfinite(c);
  rep.pass = finite && rep.increasing && rep.fit.r2 >= 0.9;
  return rep;
}

BmoUniformityReport bmo_uniformity_check(const ParamFamily& fam) {
  require_geometric(fam);
  const auto ht = fam.transformed();
  const double a = fam.alpha;
  BmoUniformityReport rep;
  const std::size_t pairs = fam.x.size() - 1;
  rep.separation.resize(pairs);
  rep.bmo.resize(pairs);
  rep.sup.resize(pairs);
  parallel_for(pairs, [&](std::size_t p) {
    const std::size_t i = p + 1;
    const double d = fam.x[i];
    Eigen::VectorXd h = (ht[i].real() - ht[0].real()) / std::pow(d, a);
    const CircleFunction q = CircleFunction::from_real(fam.grid(), h);
    rep.separation[p] = d;
    rep.bmo[p] = bmo_norm(q);
    rep.sup[p] = h.cwiseAbs().maxCoeff();
  });
  rep.table.columns = {"separation", "bmo", "sup"};
  std::vector<double> llog, lsup, neglog;
  for (std::size_t p = 0; p < pairs; ++p) {
    rep.table.rows.push_back({rep.separation[p], rep.bmo[p], rep.sup[p]});
    neglog.push_back(-std::log(rep.separation[p]));
    llog.push_back(std::log(neglog.back()));
    lsup.push_back(std::log(std::max(rep.sup[p], 1e-300)));
  }
  const double med = median(rep.bmo);
  rep.max_over_median = med > 0.0 ? *std::max_element(rep.bmo.begin(), rep.bmo.end()) / med : 0.0;
  rep.bmo_bounded = rep.max_over_median <= 3.0;
  rep.log_power = fit_line(llog, lsup).slope;
  rep.sup_growth = fit_line(neglog, rep.sup);
  rep.sup_grows = rep.sup_growth.slope > 0.0;
  return rep;
}

CzoReport czo_bmo_bound_check(int trials, int circle_size, std::uint64_t seed) {
  if (trials < 10) throw Error(ErrorKind::InvalidArgument, "need at least 10 trials");
  const CircleGrid grid(circle_size);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  CzoReport rep;
  rep.table.columns = {"trial", "kind", "bmo_f", "bmo_Hf", "ratio"};

  auto ratio_of = [&](const CircleFunction& f, double* bf, double* bh) {
    *bf = bmo_norm(f);
    *bh = bmo_norm(hilbert_transform(f));
    return *bf > 1e-12 ? *bh / *bf : std::numeric_limits<double>::quiet_NaN();
  };
  double bf = 0.0, bh = 0.0;
  rep.cos_ratio = ratio_of(CircleFunction::sample(grid, [](double t) { return std::cos(t); }), &bf, &bh);
  rep.step_ratio = ratio_of(CircleFunction::sample(grid, [](double t) { return t < kPi ? 1.0 : -1.0; }), &bf, &bh);
  rep.max_ratio = std::max(rep.cos_ratio, rep.step_ratio);

  for (int t = 0; t < trials; ++t) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(circle_size);
    const bool steps = t % 2 == 1;
    if (!steps) {
      const int degree = 1 + t % 16;
      for (int m = 1; m <= degree; ++m) {
        const double c = normal(rng) / m, s = normal(rng) / m;
        for (int j = 0; j < circle_size; ++j) v[j] += c * std::cos(m * grid.theta(j)) + s * std::sin(m * grid.theta(j));
      }
    } else {
      const int jumps = 1 + t % 6;
      for (int k = 0; k < jumps; ++k) {
        const double lo = 2.0 * kPi * unit(rng), len = 2.0 * kPi * unit(rng) * 0.5;
        const double h = normal(rng);
        for (int j = 0; j < circle_size; ++j) {
          double d = grid.theta(j) - lo;
          if (d < 0.0) d += 2.0 * kPi;
          if (d < len) v[j] += h;
        }
      }
    }
    const double r = ratio_of(CircleFunction::from_real(grid, v), &bf, &bh);
    if (!std::isfinite(r)) {
      ++rep.skipped;
      continue;
    }
    ++rep.trials;
    rep.max_ratio = std::max(rep.max_ratio, r);
    rep.table.rows.push_back({static_cast<double>(t), steps ? 1.0 : 0.0, bf, bh, r});
  }
  rep.pass = rep.max_ratio <= 10.0;
  return rep;
}

BlowupReport holder_blowup_fit(const ParamFamily& fam, std::vector<double> betas) {
  if (betas.size() < 4) throw Error(ErrorKind::InvalidArgument, "need at least 4 betas");
  for (double b : betas)
    if (!(b > 0.0 && b < fam.alpha)) throw Error(ErrorKind::InvalidArgument, "betas must lie in (0, alpha)");
  const auto ht = fam.transformed();
  const std::size_t m = fam.x.size();
  BlowupReport rep;
  rep.betas = std::move(betas);
  rep.norms.assign(rep.betas.size(), 0.0);
  // pairwise sup_theta differences, then the quotient for each beta
  std::vector<double> diff(m * m, 0.0);
  parallel_for(m, [&](std::size_t i) {
    for (std::size_t j = i + 1; j < m; ++j)
      diff[i * m + j] = (ht[i].real() - ht[j].real()).cwiseAbs().maxCoeff();
  });
  rep.table.columns = {"beta", "norm", "1/(alpha-beta)"};
  std::vector<double> lx, ly;
  for (std::size_t b = 0; b < rep.betas.size(); ++b) {
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i + 1; j < m; ++j) {
        const double d = std::abs(fam.x[i] - fam.x[j]);
        if (d > 0.0) rep.norms[b] = std::max(rep.norms[b], diff[i * m + j] / std::pow(d, rep.betas[b]));
      }
    const double inv = 1.0 / (fam.alpha - rep.betas[b]);
    lx.push_back(std::log(inv));
    ly.push_back(std::log(rep.norms[b]));
    rep.table.rows.push_back({rep.betas[b], rep.norms[b], inv});
  }
  rep.fit = fit_line(lx, ly);
  rep.exponent = rep.fit.slope;
  rep.pass = rep.exponent >= 0.7 && rep.exponent <= 1.4;
  return rep;
}

JohnNirenbergReport john_nirenberg_fit(int circle_size, int lambdas) {
  const CircleGrid grid(circle_size);
  const CircleFunction step = CircleFunction::sample(grid, [](double t) { return t < kPi ? 1.0 : -1.0; });
  const CircleFunction h = hilbert_transform(step);
  JohnNirenbergReport rep;
  rep.table.columns = {"lambda", "tail"};
  std::vector<double> lx, ly;
  for (int k = 0; k < lambdas; ++k) {
    const double lambda = 0.5 + 2.5 * k / std::max(1, lambdas - 1);
    const double tail = jn_tail(h, lambda);
    rep.table.rows.push_back({lambda, tail});
    if (tail <= 0.0) continue;
    lx.push_back(lambda);
    ly.push_back(std::log(tail));
  }
  rep.fit = fit_line(lx, ly);
  rep.decay = -rep.fit.slope;
  rep.pass = rep.decay > 0.0 && rep.fit.r2 >= 0.95;
  return rep;
}

void write_table_csv(std::ostream& out, const Table& table) {
  for (std::size_t c = 0; c < table.columns.size(); ++c) out << (c ? "," : "") << table.columns[c];
  out << '\n';
  out.precision(17);
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << row[c];
    out << '\n';
  }
}

}  // namespace hcma
