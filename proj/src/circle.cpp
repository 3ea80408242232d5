#include "hcma/circle.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

#include <unsupported/Eigen/FFT>

namespace hcma {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

Eigen::FFT<double>& fft_engine() {
  thread_local Eigen::FFT<double> engine;
  return engine;
}

// Arc distance between two angles on [0, 2pi).
double arc_distance(double a, double b) {
  double d = std::fmod(std::abs(a - b), 2.0 * kPi);
  return std::min(d, 2.0 * kPi - d);
}

constexpr std::size_t kMaxPairs = 2'000'000;
constexpr std::uint64_t kPairSeed = 0x5eedULL;

// Pair scan sup |g_a - g_b| / dist(a,b)^alpha, exhaustive up to kMaxPairs and
// deterministically sampled beyond.
template <class Dist>
double pair_scan(const std::vector<cplx>& g, double alpha, Dist&& dist) {
  const std::size_t n = g.size();
  double best = 0.0;
  const std::size_t pairs = n * (n - 1) / 2;
  auto visit = [&](std::size_t a, std::size_t b) {
    const double d = dist(a, b);
    if (d <= 0.0) return;
    best = std::max(best, std::abs(g[a] - g[b]) / std::pow(d, alpha));
  };
  if (pairs <= kMaxPairs) {
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b) visit(a, b);
  } else {
    std::mt19937_64 rng(kPairSeed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (std::size_t s = 0; s < kMaxPairs; ++s) {
      const std::size_t a = pick(rng);
      const std::size_t b = pick(rng);
      if (a != b) visit(a, b);
    }
    // Nearest-neighbour pairs dominate for small alpha-deficit; always scan them.
    for (std::size_t a = 0; a + 1 < n; ++a)
      for (std::size_t b = a + 1; b < std::min(n, a + 33); ++b) visit(a, b);
  }
  return best;
}

}  // namespace

CircleGrid::CircleGrid(int size) : size_(size) {
  if (!is_power_of_two(size) || size < 8)
    throw Error(ErrorKind::InvalidArgument,
                "circle grid size must be a power of two >= 8, got " + std::to_string(size));
}

namespace fft {

Eigen::VectorXcd analyze(const Eigen::VectorXcd& samples) {
  std::vector<cplx> in(samples.data(), samples.data() + samples.size());
  std::vector<cplx> out;
  fft_engine().fwd(out, in);
  Eigen::VectorXcd c(samples.size());
  const double scale = 1.0 / static_cast<double>(samples.size());
  for (Eigen::Index m = 0; m < c.size(); ++m) c[m] = out[m] * scale;
  return c;
}

Eigen::VectorXcd synthesize(const Eigen::VectorXcd& coeffs) {
  std::vector<cplx> in(coeffs.data(), coeffs.data() + coeffs.size());
  std::vector<cplx> out;
  fft_engine().inv(out, in);
  Eigen::VectorXcd s(coeffs.size());
  const double scale = static_cast<double>(coeffs.size());
  for (Eigen::Index j = 0; j < s.size(); ++j) s[j] = out[j] * scale;
  return s;
}

}  // namespace fft

// ---- CircleFunction ---------------------------------------------------------

CircleFunction::CircleFunction(CircleGrid grid, Eigen::VectorXcd samples)
    : grid_(grid), samples_(std::move(samples)) {
  if (samples_.size() != grid_.size())
    throw Error(ErrorKind::DimensionMismatch, "sample count does not match circle grid");
  coeffs_ = fft::analyze(samples_);
}

CircleFunction CircleFunction::from_coeffs(CircleGrid grid, Eigen::VectorXcd coeffs) {
  if (coeffs.size() != grid.size())
    throw Error(ErrorKind::DimensionMismatch, "coefficient count does not match circle grid");
  return CircleFunction(grid, fft::synthesize(coeffs));
}

CircleFunction CircleFunction::from_real(CircleGrid grid, const Eigen::VectorXd& values) {
  return CircleFunction(grid, values.cast<cplx>());
}

bool CircleFunction::is_real(double tol) const {
  return samples_.imag().cwiseAbs().maxCoeff() <= tol * std::max(1.0, sup_norm());
}

cplx CircleFunction::interpolate(double theta) const {
  const int n = size();
  cplx acc = coeffs_[0];
  for (int m = 1; m < n / 2; ++m) {
    acc += coeffs_[m] * std::polar(1.0, m * theta) + coeffs_[n - m] * std::polar(1.0, -m * theta);
  }
  // Nyquist split symmetrically so real data interpolates to real values.
  acc += coeffs_[n / 2] * std::cos(0.5 * n * theta);
  return acc;
}

CircleFunction CircleFunction::derivative(int k) const {
  const int n = size();
  Eigen::VectorXcd c = coeffs_;
  for (int s = 0; s < n; ++s) {
    const int m = s < n / 2 ? s : s - n;
    if (s == n / 2) {
      c[s] = (k == 0) ? c[s] : cplx(0.0);
      continue;
    }
    c[s] *= std::pow(cplx(0.0, static_cast<double>(m)), k);
  }
  return from_coeffs(grid_, std::move(c));
}

// ---- HolomorphicDisc --------------------------------------------------------

HolomorphicDisc::HolomorphicDisc(Eigen::VectorXcd coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.size() == 0) throw Error(ErrorKind::InvalidArgument, "empty Taylor series");
}

HolomorphicDisc HolomorphicDisc::constant(cplx value, int order) {
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(order + 1);
  c[0] = value;
  return HolomorphicDisc(std::move(c));
}

cplx HolomorphicDisc::operator()(cplx tau) const {
  if (std::abs(tau) > 1.0 + 1e-12) throw Error(ErrorKind::OutsideDisk, "|tau| > 1");
  cplx acc = 0.0;
  for (Eigen::Index k = coeffs_.size() - 1; k >= 0; --k) acc = acc * tau + coeffs_[k];
  return acc;
}

CircleFunction HolomorphicDisc::trace(const CircleGrid& grid) const {
  if (order() > grid.max_order())
    throw Error(ErrorKind::InvalidArgument, "Taylor order exceeds grid resolution");
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(grid.size());
  c.head(coeffs_.size()) = coeffs_;
  return CircleFunction::from_coeffs(grid, std::move(c));
}

HolomorphicDisc::Projection HolomorphicDisc::project(const CircleFunction& f, int order) {
  const int n = f.size();
  if (order > n / 2 - 1) throw Error(ErrorKind::InvalidArgument, "projection order too large");
  const Eigen::VectorXcd& c = f.coeffs();
  double total = 0.0, negative = 0.0;
  for (int s = 0; s < n; ++s) {
    const double a = std::abs(c[s]);
    total += a;
    if (s >= n / 2) negative += a;
  }
  return {HolomorphicDisc(c.head(order + 1)), total > 0.0 ? negative / total : 0.0};
}

// ---- row helpers ------------------------------------------------------------

Eigen::MatrixXcd trace_rows(const Eigen::MatrixXcd& taylor, int grid_size) {
  if (taylor.cols() > grid_size / 2)
    throw Error(ErrorKind::InvalidArgument, "Taylor order exceeds grid resolution");
  Eigen::MatrixXcd out(taylor.rows(), grid_size);
  Eigen::VectorXcd c(grid_size);
  for (Eigen::Index r = 0; r < taylor.rows(); ++r) {
    c.setZero();
    c.head(taylor.cols()) = taylor.row(r).transpose();
    out.row(r) = fft::synthesize(c).transpose();
  }
  return out;
}

Eigen::MatrixXcd project_rows(const Eigen::MatrixXcd& samples, int order, double* negative_mass) {
  const Eigen::Index n = samples.cols();
  if (order > n / 2 - 1) throw Error(ErrorKind::InvalidArgument, "projection order too large");
  Eigen::MatrixXcd out(samples.rows(), order + 1);
  double worst = 0.0;
  for (Eigen::Index r = 0; r < samples.rows(); ++r) {
    const Eigen::VectorXcd c = fft::analyze(samples.row(r).transpose());
    out.row(r) = c.head(order + 1).transpose();
    if (negative_mass) {
      const double total = c.cwiseAbs().sum();
      const double neg = c.tail(n / 2).cwiseAbs().sum();
      if (total > 0.0) worst = std::max(worst, neg / total);
    }
  }
  if (negative_mass) *negative_mass = worst;
  return out;
}

Eigen::VectorXcd evaluate_rows(const Eigen::MatrixXcd& taylor, cplx tau) {
  Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(taylor.rows());
  for (Eigen::Index k = taylor.cols() - 1; k >= 0; --k) acc = (acc * tau + taylor.col(k)).eval();
  return acc;
}

Eigen::VectorXcd derivative_rows(const Eigen::MatrixXcd& taylor, cplx tau) {
  Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(taylor.rows());
  for (Eigen::Index k = taylor.cols() - 1; k >= 1; --k)
    acc = (acc * tau + static_cast<double>(k) * taylor.col(k)).eval();
  return acc;
}

// ---- operations -------------------------------------------------------------

CircleFunction hilbert_transform(const CircleFunction& f) {
  const int n = f.size();
  Eigen::VectorXcd c = f.coeffs();
  c[0] = 0.0;
  c[n / 2] = 0.0;
  for (int m = 1; m < n / 2; ++m) {
    c[m] *= -kI;
    c[n - m] *= kI;
  }
  return CircleFunction::from_coeffs(f.grid(), std::move(c));
}

cplx poisson_extend(const CircleFunction& f, cplx tau) {
  const double r = std::abs(tau);
  if (r > 1.0 - 1e-12) throw Error(ErrorKind::OutsideDisk, "Poisson extension needs |tau| < 1");
  const int n = f.size();
  const Eigen::VectorXcd& c = f.coeffs();
  cplx acc = c[0];
  cplx pos = 1.0;               // tau^m
  cplx neg = 1.0;               // conj(tau)^m
  const cplx tau_bar = std::conj(tau);
  for (int m = 1; m < n / 2; ++m) {
    pos *= tau;
    neg *= tau_bar;
    acc += c[m] * pos + c[n - m] * neg;
  }
  pos *= tau;
  neg *= tau_bar;
  acc += c[n / 2] * 0.5 * (pos + neg);
  return acc;
}

HolomorphicDisc solve_riemann_hilbert(const CircleFunction& f, cplx anchor) {
  return solve_riemann_hilbert(f, anchor, f.grid().max_order());
}

HolomorphicDisc solve_riemann_hilbert(const CircleFunction& f, cplx anchor, int order) {
  const CircleGrid& grid = f.grid();
  if (!f.is_real(1e-12)) throw Error(ErrorKind::InvalidArgument, "Riemann-Hilbert data must be real");
  const double at_anchor = f[grid.anchor_index()].real();
  if (std::abs(anchor.real() - at_anchor) > 1e-8) {
    std::ostringstream msg;
    msg << "Re(anchor) = " << anchor.real() << " but f(-i) = " << at_anchor;
    throw Error(ErrorKind::IncompatibleAnchor, msg.str());
  }
  // u = f + i Hil f restricted to nonnegative modes: a_0 = c_0, a_m = 2 c_m.
  const Eigen::VectorXcd& c = f.coeffs();
  Eigen::VectorXcd a(order + 1);
  a[0] = cplx(c[0].real(), 0.0);
  for (int m = 1; m <= order; ++m) a[m] = 2.0 * c[m];
  HolomorphicDisc u(std::move(a));
  const double shift = anchor.imag() - u(-kI).imag();
  Eigen::VectorXcd coeffs = u.coeffs();
  coeffs[0] += cplx(0.0, shift);
  return HolomorphicDisc(std::move(coeffs));
}

double modulus_of_continuity(std::span<const double> x, std::span<const double> f, double t) {
  if (x.size() != f.size()) throw Error(ErrorKind::DimensionMismatch, "x and f differ in length");
  if (!(t > 0.0)) throw Error(ErrorKind::InvalidArgument, "modulus needs t > 0");
  double best = 0.0;
  for (std::size_t a = 0; a < x.size(); ++a)
    for (std::size_t b = a + 1; b < x.size(); ++b)
      if (std::abs(x[a] - x[b]) <= t) best = std::max(best, std::abs(f[a] - f[b]));
  return best;
}

double modulus_of_continuity(const CircleFunction& f, double t) {
  if (!(t > 0.0)) throw Error(ErrorKind::InvalidArgument, "modulus needs t > 0");
  const int n = f.size();
  const Eigen::VectorXd v = f.real();
  const int reach = std::min(n / 2, static_cast<int>(std::floor(t * n / (2.0 * kPi) + 1e-9)));
  double best = 0.0;
  for (int a = 0; a < n; ++a)
    for (int d = 1; d <= reach; ++d) best = std::max(best, std::abs(v[a] - v[(a + d) % n]));
  return best;
}

double bmo_norm(const CircleFunction& f) {
  if (!f.is_real(1e-10)) throw Error(ErrorKind::InvalidArgument, "bmo_norm expects a real function");
  const int n = f.size();
  const Eigen::VectorXd v = f.real();
  const int levels = static_cast<int>(std::lround(std::log2(n))) - 2;
  double best = 0.0;
  for (int k = 0; k <= levels; ++k) {
    const int len = n >> k;
    for (int start = 0; start < n; ++start) {
      double mean = 0.0;
      for (int q = 0; q < len; ++q) mean += v[(start + q) % n];
      mean /= len;
      double osc = 0.0;
      for (int q = 0; q < len; ++q) osc += std::abs(v[(start + q) % n] - mean);
      best = std::max(best, osc / len);
      if (k == 0) break;  // every rotation of the full circle is the same arc
    }
  }
  return best;
}

double jn_tail(const CircleFunction& f, double lambda) {
  if (!(lambda > 0.0)) throw Error(ErrorKind::InvalidArgument, "jn_tail needs lambda > 0");
  const Eigen::VectorXd v = f.real();
  const double mean = v.mean();
  Eigen::Index count = 0;
  for (Eigen::Index j = 0; j < v.size(); ++j)
    if (std::abs(v[j] - mean) > lambda) ++count;
  return static_cast<double>(count) / static_cast<double>(v.size());
}

double holder_seminorm(const CircleFunction& f, double alpha, int k) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorKind::InvalidArgument, "alpha must lie in (0,1)");
  if (f.size() < (1 << (k + 4))) throw Error(ErrorKind::GridTooCoarse, "grid too coarse for D^k");
  const CircleFunction d = k == 0 ? f : f.derivative(k);
  std::vector<cplx> g(d.samples().data(), d.samples().data() + d.size());
  const CircleGrid& grid = f.grid();
  return pair_scan(g, alpha, [&](std::size_t a, std::size_t b) {
    return arc_distance(grid.theta(static_cast<int>(a)), grid.theta(static_cast<int>(b)));
  });
}

double holder_seminorm(std::span<const double> x, std::span<const double> f, double alpha, int k) {
  if (x.size() != f.size()) throw Error(ErrorKind::DimensionMismatch, "x and f differ in length");
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorKind::InvalidArgument, "alpha must lie in (0,1)");
  if (x.size() < (std::size_t{1} << (k + 4))) throw Error(ErrorKind::GridTooCoarse, "grid too coarse for D^k");
  std::vector<double> xs(x.begin(), x.end());
  std::vector<double> vs(f.begin(), f.end());
  for (int order = 0; order < k; ++order) {
    std::vector<double> nx, nv;
    for (std::size_t j = 1; j + 1 < xs.size(); ++j) {
      nx.push_back(xs[j]);
      nv.push_back((vs[j + 1] - vs[j - 1]) / (xs[j + 1] - xs[j - 1]));
    }
    xs = std::move(nx);
    vs = std::move(nv);
  }
  std::vector<cplx> g(vs.begin(), vs.end());
  return pair_scan(g, alpha, [&](std::size_t a, std::size_t b) { return std::abs(xs[a] - xs[b]); });
}

void write_csv(std::ostream& out, const CircleFunction& f) {
  out << "theta,re,im\n" << std::setprecision(17);
  for (int j = 0; j < f.size(); ++j)
    out << f.grid().theta(j) << ',' << f[j].real() << ',' << f[j].imag() << '\n';
}

CircleFunction read_circle_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("theta,re,im", 0) != 0)
    throw Error(ErrorKind::ParseError, "expected header theta,re,im");
  std::vector<cplx> values;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    double theta = 0, re = 0, im = 0;
    char c1 = 0, c2 = 0;
    if (!(row >> theta >> c1 >> re >> c2 >> im) || c1 != ',' || c2 != ',')
      throw Error(ErrorKind::ParseError, "malformed row: " + line);
    values.emplace_back(re, im);
  }
  CircleGrid grid(static_cast<int>(values.size()));
  return CircleFunction(grid, Eigen::Map<Eigen::VectorXcd>(values.data(), values.size()));
}

}  // namespace hcma
