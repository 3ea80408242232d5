#include "hcma/report.hpp"

#include <cmath>

namespace hcma {

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

namespace {

json numbers(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

}  // namespace

json to_json(const LinearFit& f) {
  return {{"slope", number(f.slope)},
          {"intercept", number(f.intercept)},
          {"r2", number(f.r2)},
          {"rms_residual", number(f.rms_residual)},
          {"samples", f.samples}};
}

json to_json(const LinearReport& r) {
  return {{"sup_residual", number(r.sup_residual)},
          {"iterations", r.iterations},
          {"contraction_ratio", number(r.contraction_ratio)},
          {"data_norms", numbers(r.data_norms)},
          {"negative_mass", number(r.negative_mass)},
          {"max_condition", number(r.max_condition)}};
}

json to_json(const SolveReport& r) {
  json cut = json::array();
  for (int c : r.cutoffs) cut.push_back(c);
  return {{"newton_steps", r.newton_steps},
          {"final_residual", number(r.final_residual)},
          {"residual_history", numbers(r.residual_history)},
          {"correction_norms", numbers(r.correction_norms)},
          {"cutoffs", cut},
          {"quadratic_constants", numbers(r.quadratic_constants)},
          {"fixed_point_error", number(r.fixed_point_error)},
          {"min_foliation_det", number(r.min_foliation_det)},
          {"max_negative_mass", number(r.max_negative_mass)},
          {"max_linear_iterations", r.max_linear_iterations},
          {"max_linear_contraction", number(r.max_linear_contraction)},
          {"monotone_after_first", r.monotone_after_first}};
}

json to_json(const SmallnessReport& r) {
  return {{"sup_norm", number(r.sup_norm)},
          {"holder_seminorm", number(r.holder_seminorm)},
          {"threshold", number(r.threshold)},
          {"pass", r.pass}};
}

json to_json(const GaugeReport& r) {
  return {{"z_difference", number(r.z_difference)},
          {"xi_difference", number(r.xi_difference)},
          {"ddbar_gauge", number(r.ddbar_gauge)},
          {"tolerance", number(r.tolerance)},
          {"pass", r.pass}};
}

json to_json(const OrderStudy& s) {
  return {{"steps", numbers(s.steps)},
          {"errors", numbers(s.errors)},
          {"order", number(s.order)},
          {"r2", number(s.r2)},
          {"exact", s.exact},
          {"floor", number(s.floor)}};
}

json to_json(const DerivativeStudy& s) {
  json levels = json::array();
  for (const auto& l : s.levels)
    levels.push_back({{"spacing", number(l.spacing)},
                      {"sup_error", number(l.sup_error)},
                      {"interior_nodes", l.interior_nodes}});
  return {{"levels", levels}, {"study", to_json(s.study)}};
}

json to_json(const MaStudy& s) {
  json levels = json::array();
  for (const auto& l : s.levels)
    levels.push_back({{"sup_det", number(l.sup_det)},
                      {"sup_schur", number(l.sup_schur)},
                      {"min_zblock_eig", number(l.min_zblock_eig)},
                      {"max_inversion_residual", number(l.max_inversion_residual)},
                      {"points", l.points}});
  return {{"levels", levels},
          {"det", to_json(s.det)},
          {"schur", to_json(s.schur)},
          {"min_zblock_eig", number(s.min_zblock_eig)}};
}

json to_json(const EnvelopeReport& r) {
  return {{"leaf_agreement", number(r.leaf_agreement)},
          {"dominance_violation", number(r.dominance_violation)},
          {"margin_ratio", number(r.margin_ratio)},
          {"margin_bound", number(r.margin_bound)},
          {"leaf_points", r.leaf_points},
          {"grid_points", r.grid_points}};
}

json to_json(const PshReport& r) {
  return {{"circles", r.circles}, {"violations", r.violations}, {"worst_defect", number(r.worst_defect)}};
}

json to_json(const ConvexityReport& r) {
  return {{"min_eigenvalue", number(r.min_eigenvalue)}, {"floor", number(r.floor)}, {"pass", r.pass}};
}

json to_json(const Table& t) {
  json rows = json::array();
  for (const auto& row : t.rows) rows.push_back(numbers(row));
  return {{"columns", t.columns}, {"rows", rows}};
}

json to_json(const LogGrowthReport& r) {
  return {{"fit", to_json(r.fit)},
          {"offset_fit", to_json(r.offset_fit)},
          {"below_resolution", r.below_resolution},
          {"pass", r.pass},
          {"table", to_json(r.table)}};
}

json to_json(const OffAxisReport& r) {
  return {{"theta0", numbers(r.theta0)},
          {"theta_used", numbers(r.theta_used)},
          {"constants", numbers(r.constants)},
          {"fit", to_json(r.fit)},
          {"increasing", r.increasing},
          {"pass", r.pass},
          {"table", to_json(r.table)}};
}

json to_json(const BmoUniformityReport& r) {
  return {{"max_over_median", number(r.max_over_median)},
          {"log_power", number(r.log_power)},
          {"sup_growth", to_json(r.sup_growth)},
          {"bmo_bounded", r.bmo_bounded},
          {"sup_grows", r.sup_grows},
          {"table", to_json(r.table)}};
}

json to_json(const CzoReport& r) {
  return {{"trials", r.trials},
          {"skipped", r.skipped},
          {"max_ratio", number(r.max_ratio)},
          {"cos_ratio", number(r.cos_ratio)},
          {"step_ratio", number(r.step_ratio)},
          {"pass", r.pass},
          {"table", to_json(r.table)}};
}

json to_json(const BlowupReport& r) {
  return {{"betas", numbers(r.betas)},
          {"norms", numbers(r.norms)},
          {"fit", to_json(r.fit)},
          {"exponent", number(r.exponent)},
          {"pass", r.pass},
          {"table", to_json(r.table)}};
}

json to_json(const JohnNirenbergReport& r) {
  return {{"fit", to_json(r.fit)}, {"decay", number(r.decay)}, {"pass", r.pass}, {"table", to_json(r.table)}};
}

}  // namespace hcma
