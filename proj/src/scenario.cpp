#include "hcma/scenario.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace hcma {

namespace {

namespace pt = boost::property_tree;

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double parse_real(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw Error(ErrorKind::ParseError, "bad number '" + text + "' for " + what);
  return v;
}

int parse_int(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty() || v < INT32_MIN || v > INT32_MAX)
    throw Error(ErrorKind::ParseError, "bad integer '" + text + "' for " + what);
  return static_cast<int>(v);
}

bool parse_bool(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  if (t == "true" || t == "yes" || t == "1" || t == "on") return true;
  if (t == "false" || t == "no" || t == "0" || t == "off") return false;
  throw Error(ErrorKind::ParseError, "bad boolean '" + text + "' for " + what);
}

Eigen::VectorXcd parse_point(const std::string& text, int n, const std::string& what) {
  const std::vector<cplx> v = parse_complex_list(text);
  if (static_cast<int>(v.size()) != n)
    throw Error(ErrorKind::ParseError, what + " needs " + std::to_string(n) + " components");
  Eigen::VectorXcd p(n);
  for (int i = 0; i < n; ++i) p[i] = v[i];
  return p;
}

}  // namespace

cplx parse_complex(const std::string& text) {
  std::string t;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) t += c;
  if (t.empty()) throw Error(ErrorKind::ParseError, "empty complex literal");
  if (t.back() != 'i') return parse_real(t, "complex literal");
  // split a+bi at the last sign that is not an exponent sign or leading
  std::size_t split = std::string::npos;
  for (std::size_t k = t.size() - 1; k > 0; --k) {
    if ((t[k] == '+' || t[k] == '-') && t[k - 1] != 'e' && t[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  std::string re = "0", im = t.substr(0, t.size() - 1);
  if (split != std::string::npos) {
    re = t.substr(0, split);
    im = t.substr(split, t.size() - 1 - split);
  }
  if (im.empty() || im == "+") im = "1";
  if (im == "-") im = "-1";
  if (im[0] == '+') im = im.substr(1);
  return {parse_real(re, "complex literal '" + text + "'"), parse_real(im, "complex literal '" + text + "'")};
}

std::vector<cplx> parse_complex_list(const std::string& text) {
  std::vector<cplx> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_complex(item));
  if (out.empty()) throw Error(ErrorKind::ParseError, "empty list");
  return out;
}

Scenario parse_scenario(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(ErrorKind::ParseError, std::string("malformed scenario: ") + e.message() +
                                           " (line " + std::to_string(e.line()) + ")");
  }
  static const std::map<std::string, std::set<std::string>> allowed = {
      {"scenario", {"schema_version", "name"}},
      {"potential", {"kind", "n", "epsilon", "varsigma", "c0", "c1", "expression"}},
      {"grid", {"circle_size", "spatial_points", "half_width", "center", "box_radius",
                "product_z0", "product_tau0", "product_h", "refinement_levels"}},
      {"solver", {"mode", "alpha", "beta", "kappa", "lambda", "base_modes", "residual_tol",
                  "max_outer_iterations", "inner_tol", "inner_max_iterations",
                  "smallness_threshold"}},
      {"diagnostics", {"derivative_identity", "ma_residual", "subsolution", "psh_samples",
                       "gauge", "gauge_linear", "gauge_quadratic", "seed"}},
  };
  for (const auto& [section, body] : tree) {
    const auto it = allowed.find(section);
    if (it == allowed.end()) throw Error(ErrorKind::ParseError, "unknown section [" + section + "]");
    if (!body.data().empty()) throw Error(ErrorKind::ParseError, "key '" + section + "' outside a section");
    for (const auto& [key, value] : body) {
      std::string base = key;
      // varsigma1, varsigma2, ... share one schema entry
      if (section == "potential" && key.rfind("varsigma", 0) == 0) base = "varsigma";
      if (!it->second.count(base))
        throw Error(ErrorKind::ParseError, "unknown key '" + key + "' in [" + section + "]");
    }
  }
  if (!tree.get_child_optional("scenario"))
    throw Error(ErrorKind::ParseError, "missing [scenario] section");

  Scenario s;
  auto get = [&](const std::string& path) { return tree.get_optional<std::string>(pt::ptree::path_type(path, '.')); };

  const auto version = get("scenario.schema_version");
  if (!version) throw Error(ErrorKind::ParseError, "missing scenario.schema_version");
  s.schema_version = parse_int(*version, "schema_version");
  if (s.schema_version != 1)
    throw Error(ErrorKind::ParseError, "unsupported schema_version " + std::to_string(s.schema_version));
  if (auto v = get("scenario.name")) s.name = trim(*v);

  if (auto v = get("potential.kind")) s.kind = trim(*v);
  if (s.kind != "trivial" && s.kind != "translation" && s.kind != "quartic" && s.kind != "expression")
    throw Error(ErrorKind::ParseError, "unknown potential kind '" + s.kind + "'");
  if (auto v = get("potential.n")) s.n = parse_int(*v, "n");
  if (s.n < 1 || s.n > 4) throw Error(ErrorKind::ParseError, "n must be in 1..4");
  if (auto v = get("potential.epsilon")) s.epsilon = parse_real(*v, "epsilon");
  if (auto v = get("potential.c0")) s.quartic_c0 = parse_complex(*v);
  if (auto v = get("potential.c1")) s.quartic_c1 = parse_complex(*v);
  if (auto v = get("potential.expression")) s.expression = trim(*v);
  for (int i = 1; i <= s.n; ++i) {
    auto v = get("potential.varsigma" + std::to_string(i));
    if (!v && i == 1) v = get("potential.varsigma");
    if (!v) {
      s.varsigma.push_back(TauPolynomial{Eigen::VectorXcd::Zero(1)});
      continue;
    }
    const auto c = parse_complex_list(*v);
    s.varsigma.push_back(TauPolynomial{Eigen::Map<const Eigen::VectorXcd>(c.data(), c.size())});
  }
  if (const auto pot = tree.get_child_optional("potential")) {
    for (const auto& [key, value] : *pot) {
      if (key.rfind("varsigma", 0) == 0 && key != "varsigma") {
        const std::string idx = key.substr(8);
        const int i = parse_int(idx, key);
        if (i < 1 || i > s.n) throw Error(ErrorKind::ParseError, "'" + key + "' exceeds n");
      }
    }
  }
  if (s.kind == "expression" && s.expression.empty())
    throw Error(ErrorKind::ParseError, "expression potential needs potential.expression");

  s.center = Eigen::VectorXcd::Zero(s.n);
  if (auto v = get("grid.circle_size")) s.circle_size = parse_int(*v, "circle_size");
  if (auto v = get("grid.spatial_points")) s.spatial_points = parse_int(*v, "spatial_points");
  if (auto v = get("grid.half_width")) s.half_width = parse_real(*v, "half_width");
  if (auto v = get("grid.center")) s.center = parse_point(*v, s.n, "center");
  if (auto v = get("grid.box_radius")) s.box_radius = parse_real(*v, "box_radius");
  s.product_z0 = s.center;
  if (auto v = get("grid.product_z0")) s.product_z0 = parse_point(*v, s.n, "product_z0");
  if (auto v = get("grid.product_tau0")) s.product_tau0 = parse_complex(*v);
  if (auto v = get("grid.product_h")) s.product_h = parse_real(*v, "product_h");
  if (auto v = get("grid.refinement_levels")) s.refinement_levels = parse_int(*v, "refinement_levels");
  if (s.spatial_points < 1) throw Error(ErrorKind::ParseError, "spatial_points must be >= 1");
  if (!(s.half_width >= 0.0) || !(s.box_radius > 0.0) || !(s.product_h > 0.0))
    throw Error(ErrorKind::ParseError, "grid sizes must be positive");
  if (s.refinement_levels < 2) throw Error(ErrorKind::ParseError, "refinement_levels must be >= 2");

  NashMoserConfig& c = s.solver;
  if (auto v = get("solver.mode")) c.mode = parse_mode(trim(*v));
  if (auto v = get("solver.alpha")) c.alpha = parse_real(*v, "alpha");
  if (auto v = get("solver.beta")) c.beta = parse_real(*v, "beta");
  if (auto v = get("solver.kappa")) c.kappa = parse_real(*v, "kappa");
  if (auto v = get("solver.lambda")) c.lambda = parse_real(*v, "lambda");
  if (auto v = get("solver.base_modes")) c.base_modes = parse_int(*v, "base_modes");
  if (auto v = get("solver.residual_tol")) c.residual_tol = parse_real(*v, "residual_tol");
  if (auto v = get("solver.max_outer_iterations")) c.max_outer_iterations = parse_int(*v, "max_outer_iterations");
  if (auto v = get("solver.inner_tol")) c.inner_tol = parse_real(*v, "inner_tol");
  if (auto v = get("solver.inner_max_iterations")) c.inner_max_iterations = parse_int(*v, "inner_max_iterations");
  if (auto v = get("solver.smallness_threshold")) s.smallness_threshold = parse_real(*v, "smallness_threshold");
  c.box.radius = s.box_radius;
  try {
    c.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::ParseError, std::string("invalid solver settings: ") + e.what());
  }

  if (auto v = get("diagnostics.derivative_identity")) s.derivative_identity = parse_bool(*v, "derivative_identity");
  if (auto v = get("diagnostics.ma_residual")) s.ma_residual = parse_bool(*v, "ma_residual");
  if (auto v = get("diagnostics.subsolution")) s.subsolution = parse_bool(*v, "subsolution");
  if (auto v = get("diagnostics.psh_samples")) s.psh_samples = parse_int(*v, "psh_samples");
  if (auto v = get("diagnostics.gauge")) s.gauge = parse_bool(*v, "gauge");
  if (auto v = get("diagnostics.gauge_linear")) s.gauge_linear = parse_complex(*v);
  if (auto v = get("diagnostics.gauge_quadratic")) s.gauge_quadratic = parse_complex(*v);
  if (auto v = get("diagnostics.seed")) s.seed = static_cast<std::uint64_t>(parse_int(*v, "seed"));

  // surface construction errors (bad circle size, shift normalization,
  // expression syntax) as parse errors
  try {
    CircleGrid check(s.circle_size);
    (void)check;
    build_potential(s);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ParseError) throw;
    throw Error(ErrorKind::ParseError, e.what());
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open scenario '" + path + "'");
  return parse_scenario(in);
}

PotentialPtr build_reference(const Scenario& s) { return std::make_shared<EuclideanPotential>(s.n); }

PotentialPtr build_potential(const Scenario& s) {
  if (s.kind == "trivial") return build_reference(s);
  if (s.kind == "translation") return std::make_shared<TranslationPotential>(s.epsilon, s.varsigma);
  if (s.kind == "quartic")
    return std::make_shared<QuarticPotential>(s.n, s.epsilon, s.quartic_c0, s.quartic_c1);
  return std::make_shared<ExpressionPotential>(s.expression, s.n);
}

SpatialGrid build_spatial_grid(const Scenario& s) {
  return SpatialGrid::tensor(s.center, s.half_width, s.spatial_points);
}

}  // namespace hcma
