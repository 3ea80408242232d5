#pragma once

// Scenario files: INI text with sections [scenario], [potential], [grid],
// [solver], [diagnostics]. Unknown sections and keys are rejected.
//
//   [scenario]
//   schema_version = 1
//   name = translation
//
//   [potential]
//   kind = translation        ; trivial | translation | quartic | expression
//   n = 1
//   epsilon = 0.05
//   varsigma1 = 0.5i, 0.5     ; Taylor coefficients in tau
//
// Complex literals: 1.5, -2i, 0.3+0.1i, 1e-2-3i.

#include <iosfwd>
#include <string>
#include <vector>

#include "hcma/disc_solver.hpp"

namespace hcma {

struct Scenario {
  int schema_version = 1;
  std::string name = "unnamed";

  // [potential]
  std::string kind = "trivial";
  int n = 1;
  double epsilon = 0.0;
  std::vector<TauPolynomial> varsigma;  // translation shifts
  cplx quartic_c0 = 1.0;
  cplx quartic_c1 = 0.0;
  std::string expression;

  // [grid]
  int circle_size = 128;
  int spatial_points = 3;
  double half_width = 0.5;
  Eigen::VectorXcd center;
  double box_radius = 2.0;
  Eigen::VectorXcd product_z0;
  cplx product_tau0{0.15, 0.13};
  double product_h = 0.2;
  int refinement_levels = 3;

  // [solver]
  NashMoserConfig solver{};
  double smallness_threshold = 0.1;

  // [diagnostics]
  bool derivative_identity = true;
  bool ma_residual = true;
  bool subsolution = true;
  int psh_samples = 200;
  bool gauge = false;
  cplx gauge_linear = 0.0;
  cplx gauge_quadratic = 0.02;
  std::uint64_t seed = 0x5eed;
};

/// Throws ParseError with the offending key or value in the message.
Scenario parse_scenario(std::istream& in);
Scenario load_scenario(const std::string& path);

cplx parse_complex(const std::string& text);
std::vector<cplx> parse_complex_list(const std::string& text);

/// Boundary potential Psi and reference rho = |z|^2 for the scenario.
PotentialPtr build_potential(const Scenario& s);
PotentialPtr build_reference(const Scenario& s);
SpatialGrid build_spatial_grid(const Scenario& s);

}  // namespace hcma
