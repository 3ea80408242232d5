#pragma once

// Small complex expression language for user-supplied potentials.
//
// Variables: z1..zn, zb1..zbn (conjugates), t, tb (tau and its conjugate);
// for n = 1 the aliases z and zb are accepted, and tau/taub alias t/tb.
// Operators + - * / ^ (constant exponent), unary minus, the imaginary unit i,
// numbers such as 2, 0.5e-1, 3i, and functions exp log sin cos sqrt.
//
// Wirtinger calculus treats each variable and its conjugate as independent,
// so derivatives are taken symbolically with respect to single variables.

#include <complex>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace hcma::expr {

using cplx = std::complex<double>;

struct Node;
using NodePtr = std::shared_ptr<const Node>;

class Expression {
 public:
  /// Parses `source` with `dim` complex spatial variables; throws ParseError.
  Expression(const std::string& source, int dim);

  int dim() const noexcept { return dim_; }
  int variable_count() const noexcept { return 2 * dim_ + 2; }
  const std::string& source() const noexcept { return source_; }

  /// values laid out as z1..zn, zb1..zbn, t, tb.
  cplx evaluate(std::span<const cplx> values) const;

  /// Symbolic derivative with respect to variable index `var`.
  Expression derivative(int var) const;

  /// Canonical text of the (simplified) tree, mostly for diagnostics.
  std::string to_string() const;

 private:
  Expression(NodePtr root, int dim, std::string source);

  NodePtr root_;
  int dim_;
  std::string source_;
};

}  // namespace hcma::expr
