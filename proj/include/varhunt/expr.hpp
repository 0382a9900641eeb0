#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace varhunt {

// Scalar expressions in the spatial variable `x` and the state variable `xi`.
// Trees are immutable after parsing; evaluation is lock-free.

enum class NodeKind {
  Constant,
  VarX,
  VarXi,
  Add,
  Sub,
  Mul,
  Div,
  Pow,
  Neg,
  Abs,
  Exp,
  Log,
  Sin,
  Cos,
  Min,
  Max,
  Spow,        // spow(e, p) = |e|^{p-2} * e, spow(0, p) = 0
  Distosc,     // distosc(p) = sum_k dist(xi, R \ [k!*k, (k+1)!])^p
  DistoscPrim  // internal: antiderivative of distosc; not produced by the parser
};

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
  NodeKind kind;
  double value = 0.0;  // Constant payload
  ExprPtr a, b;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, std::size_t offset)
      : std::runtime_error(msg + " (offset " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class EvalDomainError : public std::runtime_error {
 public:
  EvalDomainError(const std::string& msg, double x, double xi)
      : std::runtime_error(msg + " at (x=" + std::to_string(x) +
                           ", xi=" + std::to_string(xi) + ")") {}
};

class Expr {
 public:
  Expr() = default;
  explicit Expr(ExprPtr root) : root_(std::move(root)) {}

  static Expr parse(const std::string& src);

  double eval(double x, double xi) const;
  std::string print() const;
  bool structurally_equal(const Expr& other) const;

  bool depends_on_xi() const;
  bool contains_distosc() const;

  const ExprPtr& root() const { return root_; }
  explicit operator bool() const { return root_ != nullptr; }

 private:
  ExprPtr root_;
};

// One factorial band [k!*k, (k+1)!] of the distosc nonlinearity.
struct DistBand {
  double lo, hi;
};

// Bands with (k+1)! representable in 62 bits, in increasing order.
const std::vector<DistBand>& distosc_bands();

// Antiderivative F(x, xi) = int_0^xi f(x, t) dt.
// Symbolic mode when a closed-form antiderivative tree exists (polynomials in
// xi, sums of spow/distosc terms, xi-free factors); adaptive Simpson
// quadrature otherwise (abs tol 1e-10, max depth 40).
class Primitive {
 public:
  explicit Primitive(Expr f);

  double operator()(double x, double xi) const;
  bool symbolic() const { return anti_.has_value(); }
  const Expr& source() const { return f_; }

 private:
  Expr f_;
  std::optional<Expr> anti_;
};

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol, int max_depth);

}  // namespace varhunt
