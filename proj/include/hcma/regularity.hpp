#pragma once

// Parameter-direction regularity of the circle Hilbert transform: a family
// f(x, theta) that is uniformly Holder in (x, theta) whose transform loses the
// Holder bound in x at theta = 0 while staying bounded in BMO.

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "hcma/circle.hpp"
#include "hcma/fit.hpp"

namespace hcma {

/// Real samples f(x_i, theta_j); one CircleFunction per parameter value.
struct ParamFamily {
  std::string name;
  double alpha = 0.5;
  std::vector<double> x;
  std::vector<CircleFunction> slices;

  const CircleGrid& grid() const { return slices.front().grid(); }
  /// Hilbert transform of every slice (parallel per slice).
  std::vector<CircleFunction> transformed() const;
};

/// Smooth cutoff: 1 on [0, 1], 0 on [t1, inf), exp(-1/t) blend in between.
double smooth_cutoff(double t, double t1 = 2.5);

/// f(x, theta) = -s(|theta|) min(|x|, |theta|)^alpha for theta in [0, pi] and
/// +s(|theta|) min(|x|, |theta|)^alpha for theta in (-pi, 0).
double counterexample_value(double x, double theta, double alpha);

/// Parameter grid {0} U {2^-j, j = 3..levels}.
std::vector<double> geometric_parameters(int levels);

ParamFamily counterexample_family(double alpha, int circle_size = 4096, int levels = 14);
ParamFamily sample_family(const std::string& name, double alpha, std::vector<double> x,
                          const CircleGrid& grid,
                          const std::function<double(double, double)>& fn);

/// Holder-alpha norm (sup + seminorm) of a function on [-pi, pi] x circle with
/// Euclidean distance in (x, theta-arc); scans all pairs up to 2e6, beyond
/// that 2e6 random pairs plus every pair of grid neighbours.
double product_holder_norm(const std::function<double(double, double)>& fn, int x_points,
                           int theta_points, double alpha, std::uint64_t seed = 0x5eed);

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct LogGrowthReport {
  LinearFit fit;           // y = c x^a (-log x) + d x^a; slope = c, intercept = d
  LinearFit offset_fit;    // y = c x^a (-log x) + d (constant offset)
  int below_resolution = 0;  // parameters smaller than the circle spacing
  bool pass = false;         // c > 0 and r2 >= 0.98
  Table table;               // x, y, x^a (-log x)
};

/// Fits |Hf(x, 0) - Hf(0, 0)| against x^a(-log x). Throws GridNotGeometric
/// unless x = {0} U {2^-j, j = 3..J}.
LogGrowthReport log_growth_fit(const ParamFamily& fam);

struct OffAxisReport {
  std::vector<double> theta0;      // requested angles
  std::vector<double> theta_used;  // nearest grid angle
  std::vector<double> constants;   // sup_x |Hf(x,t0) - Hf(0,t0)| / x^a over 0 < x < t0/2
  LinearFit fit;                   // constants against 1 - log(t0/2)
  bool increasing = false;
  bool pass = false;               // finite, increasing as t0 decreases, r2 >= 0.9
  Table table;
};

OffAxisReport offaxis_holder_scan(const ParamFamily& fam,
                                  std::vector<double> theta0 = {0.8, 0.4, 0.2, 0.1});

struct BmoUniformityReport {
  std::vector<double> separation;  // |x - x'| = 2^-j
  std::vector<double> bmo;         // bmo_norm of the difference quotient
  std::vector<double> sup;         // sup_theta of the difference quotient
  double max_over_median = 0.0;
  double log_power = 0.0;          // slope of log sup against log(-log |x - x'|)
  LinearFit sup_growth;            // sup against -log |x - x'|
  bool bmo_bounded = false;        // max / median <= 3
  bool sup_grows = false;          // sup_growth slope > 0
  Table table;
};

/// Difference quotients over the pairs (2^-j, 0) of a geometric family.
BmoUniformityReport bmo_uniformity_check(const ParamFamily& fam);

struct CzoReport {
  int trials = 0;
  int skipped = 0;
  double max_ratio = 0.0;
  double cos_ratio = 0.0;   // bmo(H cos) / bmo(cos)
  double step_ratio = 0.0;  // for the +-1 step
  bool pass = false;        // max_ratio <= 10
  Table table;
};

/// Random trigonometric polynomials and step functions; trials >= 10.
CzoReport czo_bmo_bound_check(int trials, int circle_size = 1024, std::uint64_t seed = 0x5eed);

struct BlowupReport {
  std::vector<double> betas;
  std::vector<double> norms;  // sup |Hf(x,t) - Hf(x',t)| / |x - x'|^beta
  LinearFit fit;              // log norm against log 1/(alpha - beta)
  double exponent = 0.0;
  bool pass = false;          // exponent in [0.7, 1.4]
  Table table;
};

/// betas must lie in (0, alpha), at least 4 values.
BlowupReport holder_blowup_fit(const ParamFamily& fam, std::vector<double> betas);

struct JohnNirenbergReport {
  LinearFit fit;  // log tail against lambda
  double decay = 0.0;  // -slope
  bool pass = false;   // decay > 0 and r2 >= 0.95
  Table table;
};

/// Tail measure of the transform of the +-1 step on lambda in [0.5, 3].
JohnNirenbergReport john_nirenberg_fit(int circle_size = 4096, int lambdas = 11);

void write_table_csv(std::ostream& out, const Table& table);

}  // namespace hcma
