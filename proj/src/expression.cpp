#include "hcma/expression.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

#include "hcma/error.hpp"

namespace hcma::expr {

enum class Op { Const, Var, Neg, Add, Sub, Mul, Div, Pow, Exp, Log, Sin, Cos, Sqrt };

struct Node {
  Op op;
  cplx value{};         // Const, and the exponent for Pow
  int var = -1;         // Var
  NodePtr lhs, rhs;     // operands (rhs unused for unary ops)
};

namespace {

NodePtr make_const(cplx v) { return std::make_shared<Node>(Node{Op::Const, v, -1, nullptr, nullptr}); }
NodePtr make_var(int v) { return std::make_shared<Node>(Node{Op::Var, {}, v, nullptr, nullptr}); }

bool is_const(const NodePtr& n, cplx v) { return n->op == Op::Const && n->value == v; }
bool is_const(const NodePtr& n) { return n->op == Op::Const; }

cplx apply_unary(Op op, cplx a) {
  switch (op) {
    case Op::Neg: return -a;
    case Op::Exp: return std::exp(a);
    case Op::Log: return std::log(a);
    case Op::Sin: return std::sin(a);
    case Op::Cos: return std::cos(a);
    case Op::Sqrt: return std::sqrt(a);
    default: break;
  }
  throw Error(ErrorKind::InvalidArgument, "not a unary operator");
}

cplx integer_power(cplx base, cplx exponent) {
  const double p = exponent.real();
  if (exponent.imag() == 0.0 && p == std::round(p) && std::abs(p) <= 64.0) {
    cplx acc = 1.0;
    const int k = static_cast<int>(std::abs(p));
    for (int s = 0; s < k; ++s) acc *= base;
    return p < 0 ? 1.0 / acc : acc;
  }
  return std::pow(base, exponent);
}

NodePtr unary(Op op, NodePtr a) {
  if (is_const(a)) return make_const(apply_unary(op, a->value));
  if (op == Op::Neg && a->op == Op::Neg) return a->lhs;
  return std::make_shared<Node>(Node{op, {}, -1, std::move(a), nullptr});
}

NodePtr binary(Op op, NodePtr a, NodePtr b) {
  if (is_const(a) && is_const(b)) {
    switch (op) {
      case Op::Add: return make_const(a->value + b->value);
      case Op::Sub: return make_const(a->value - b->value);
      case Op::Mul: return make_const(a->value * b->value);
      case Op::Div: return make_const(a->value / b->value);
      default: break;
    }
  }
  switch (op) {
    case Op::Add:
      if (is_const(a, 0.0)) return b;
      if (is_const(b, 0.0)) return a;
      break;
    case Op::Sub:
      if (is_const(b, 0.0)) return a;
      if (is_const(a, 0.0)) return unary(Op::Neg, b);
      break;
    case Op::Mul:
      if (is_const(a, 0.0) || is_const(b, 0.0)) return make_const(0.0);
      if (is_const(a, 1.0)) return b;
      if (is_const(b, 1.0)) return a;
      break;
    case Op::Div:
      if (is_const(a, 0.0)) return make_const(0.0);
      if (is_const(b, 1.0)) return a;
      break;
    default: break;
  }
  return std::make_shared<Node>(Node{op, {}, -1, std::move(a), std::move(b)});
}

NodePtr power(NodePtr a, cplx exponent) {
  if (exponent == 0.0) return make_const(1.0);
  if (exponent == 1.0) return a;
  if (is_const(a)) return make_const(integer_power(a->value, exponent));
  return std::make_shared<Node>(Node{Op::Pow, exponent, -1, std::move(a), nullptr});
}

cplx eval(const Node& n, std::span<const cplx> v) {
  switch (n.op) {
    case Op::Const: return n.value;
    case Op::Var: return v[n.var];
    case Op::Add: return eval(*n.lhs, v) + eval(*n.rhs, v);
    case Op::Sub: return eval(*n.lhs, v) - eval(*n.rhs, v);
    case Op::Mul: return eval(*n.lhs, v) * eval(*n.rhs, v);
    case Op::Div: return eval(*n.lhs, v) / eval(*n.rhs, v);
    case Op::Pow: return integer_power(eval(*n.lhs, v), n.value);
    default: return apply_unary(n.op, eval(*n.lhs, v));
  }
}

NodePtr diff(const NodePtr& n, int var) {
  switch (n->op) {
    case Op::Const: return make_const(0.0);
    case Op::Var: return make_const(n->var == var ? 1.0 : 0.0);
    case Op::Neg: return unary(Op::Neg, diff(n->lhs, var));
    case Op::Add: return binary(Op::Add, diff(n->lhs, var), diff(n->rhs, var));
    case Op::Sub: return binary(Op::Sub, diff(n->lhs, var), diff(n->rhs, var));
    case Op::Mul:
      return binary(Op::Add, binary(Op::Mul, diff(n->lhs, var), n->rhs),
                    binary(Op::Mul, n->lhs, diff(n->rhs, var)));
    case Op::Div: {
      // (u/v)' = u'/v - u v'/v^2
      NodePtr first = binary(Op::Div, diff(n->lhs, var), n->rhs);
      NodePtr second = binary(Op::Div, binary(Op::Mul, n->lhs, diff(n->rhs, var)),
                              power(n->rhs, 2.0));
      return binary(Op::Sub, first, second);
    }
    case Op::Pow:
      return binary(Op::Mul, binary(Op::Mul, make_const(n->value), power(n->lhs, n->value - 1.0)),
                    diff(n->lhs, var));
    case Op::Exp: return binary(Op::Mul, n, diff(n->lhs, var));
    case Op::Log: return binary(Op::Div, diff(n->lhs, var), n->lhs);
    case Op::Sin: return binary(Op::Mul, unary(Op::Cos, n->lhs), diff(n->lhs, var));
    case Op::Cos:
      return unary(Op::Neg, binary(Op::Mul, unary(Op::Sin, n->lhs), diff(n->lhs, var)));
    case Op::Sqrt:
      return binary(Op::Div, diff(n->lhs, var), binary(Op::Mul, make_const(2.0), n));
  }
  return make_const(0.0);
}

void print(const Node& n, std::ostream& out, int dim) {
  auto name = [dim](int v) -> std::string {
    if (v < dim) return "z" + std::to_string(v + 1);
    if (v < 2 * dim) return "zb" + std::to_string(v - dim + 1);
    return v == 2 * dim ? "t" : "tb";
  };
  switch (n.op) {
    case Op::Const: out << "(" << n.value.real() << (n.value.imag() < 0 ? "" : "+") << n.value.imag() << "i)"; return;
    case Op::Var: out << name(n.var); return;
    case Op::Neg: out << "-("; print(*n.lhs, out, dim); out << ")"; return;
    case Op::Pow: out << "("; print(*n.lhs, out, dim); out << ")^" << n.value.real(); return;
    case Op::Add: case Op::Sub: case Op::Mul: case Op::Div: {
      const char sym = n.op == Op::Add ? '+' : n.op == Op::Sub ? '-' : n.op == Op::Mul ? '*' : '/';
      out << "(";
      print(*n.lhs, out, dim);
      out << sym;
      print(*n.rhs, out, dim);
      out << ")";
      return;
    }
    default: {
      const char* fname = n.op == Op::Exp ? "exp" : n.op == Op::Log ? "log"
                        : n.op == Op::Sin ? "sin" : n.op == Op::Cos ? "cos" : "sqrt";
      out << fname << "(";
      print(*n.lhs, out, dim);
      out << ")";
    }
  }
}

class Parser {
 public:
  Parser(const std::string& src, int dim) : src_(src), dim_(dim) {}

  NodePtr parse() {
    NodePtr root = parse_sum();
    skip_space();
    if (pos_ != src_.size()) fail("unexpected trailing input");
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorKind::ParseError,
                "expression '" + src_ + "' at column " + std::to_string(pos_ + 1) + ": " + msg);
  }

  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr parse_sum() {
    NodePtr acc = parse_product();
    for (;;) {
      if (accept('+')) acc = binary(Op::Add, acc, parse_product());
      else if (accept('-')) acc = binary(Op::Sub, acc, parse_product());
      else return acc;
    }
  }

  NodePtr parse_product() {
    NodePtr acc = parse_unary();
    for (;;) {
      if (accept('*')) acc = binary(Op::Mul, acc, parse_unary());
      else if (accept('/')) acc = binary(Op::Div, acc, parse_unary());
      else return acc;
    }
  }

  NodePtr parse_unary() {
    if (accept('-')) return unary(Op::Neg, parse_unary());
    if (accept('+')) return parse_unary();
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_primary();
    if (accept('^')) {
      NodePtr exponent = parse_unary();
      if (!is_const(exponent)) fail("exponent must be constant");
      return power(base, exponent->value);
    }
    return base;
  }

  NodePtr parse_primary() {
    skip_space();
    if (pos_ >= src_.size()) fail("unexpected end of input");
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr inner = parse_sum();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_identifier();
    fail(std::string("unexpected character '") + c + "'");
  }

  NodePtr parse_number() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.'))
      ++pos_;
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < src_.size() && (src_[look] == '+' || src_[look] == '-')) ++look;
      if (look < src_.size() && std::isdigit(static_cast<unsigned char>(src_[look]))) {
        pos_ = look;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      }
    }
    double v = 0.0;
    try {
      v = std::stod(src_.substr(start, pos_ - start));
    } catch (const std::exception&) {
      fail("malformed number");
    }
    if (pos_ < src_.size() && src_[pos_] == 'i' &&
        (pos_ + 1 == src_.size() || !std::isalnum(static_cast<unsigned char>(src_[pos_ + 1])))) {
      ++pos_;
      return make_const(cplx(0.0, v));
    }
    return make_const(v);
  }

  NodePtr parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && std::isalnum(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    const std::string id = src_.substr(start, pos_ - start);
    skip_space();
    const bool call = pos_ < src_.size() && src_[pos_] == '(';
    if (call) {
      Op op;
      if (id == "exp") op = Op::Exp;
      else if (id == "log") op = Op::Log;
      else if (id == "sin") op = Op::Sin;
      else if (id == "cos") op = Op::Cos;
      else if (id == "sqrt") op = Op::Sqrt;
      else fail("unknown function '" + id + "'");
      ++pos_;
      NodePtr arg = parse_sum();
      if (!accept(')')) fail("expected ')'");
      return unary(op, arg);
    }
    if (id == "i") return make_const(cplx(0.0, 1.0));
    if (id == "t" || id == "tau") return make_var(2 * dim_);
    if (id == "tb" || id == "taub") return make_var(2 * dim_ + 1);
    if (dim_ == 1 && id == "z") return make_var(0);
    if (dim_ == 1 && id == "zb") return make_var(1);
    auto indexed = [&](const std::string& prefix, int offset) -> NodePtr {
      if (id.size() <= prefix.size() || id.compare(0, prefix.size(), prefix) != 0) return nullptr;
      const std::string digits = id.substr(prefix.size());
      for (char d : digits)
        if (!std::isdigit(static_cast<unsigned char>(d))) return nullptr;
      const int k = std::stoi(digits);
      if (k < 1 || k > dim_) fail("variable '" + id + "' out of range for dimension " + std::to_string(dim_));
      return make_var(offset + k - 1);
    };
    if (NodePtr v = indexed("zb", dim_)) return v;
    if (NodePtr v = indexed("z", 0)) return v;
    fail("unknown identifier '" + id + "'");
  }

  const std::string& src_;
  int dim_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression::Expression(const std::string& source, int dim) : dim_(dim), source_(source) {
  if (dim < 1) throw Error(ErrorKind::InvalidArgument, "expression dimension must be >= 1");
  root_ = Parser(source_, dim_).parse();
}

Expression::Expression(NodePtr root, int dim, std::string source)
    : root_(std::move(root)), dim_(dim), source_(std::move(source)) {}

cplx Expression::evaluate(std::span<const cplx> values) const {
  if (static_cast<int>(values.size()) != variable_count())
    throw Error(ErrorKind::DimensionMismatch, "expression expects 2n+2 variable values");
  return eval(*root_, values);
}

Expression Expression::derivative(int var) const {
  if (var < 0 || var >= variable_count()) throw Error(ErrorKind::InvalidArgument, "bad variable index");
  return Expression(diff(root_, var), dim_, source_);
}

std::string Expression::to_string() const {
  std::ostringstream out;
  print(*root_, out, dim_);
  return out.str();
}

}  // namespace hcma::expr
