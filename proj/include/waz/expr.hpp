#pragma once

// A small expression language for defining maps from text, e.g.
//   "x1^2 - x2^2; 2*x1*x2"
// Components are separated by ';', variables are x1..xn, functions are
// sin cos exp ln sqrt abs, and '^' takes an integer literal exponent.

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "waz/dual.hpp"
#include "waz/linalg.hpp"
#include "waz/map.hpp"

namespace waz::expr {

enum class UnaryOp { Neg, Sin, Cos, Exp, Ln, Sqrt, Abs };
enum class BinaryOp { Add, Sub, Mul, Div, Pow };

struct Node;
using Ast = std::shared_ptr<const Node>;

struct Constant {
  double value;
};
struct Variable {
  std::size_t index;  // zero-based
};
struct Unary {
  UnaryOp op;
  Ast arg;
};
/// For Pow the right operand is always an integral Constant.
struct Binary {
  BinaryOp op;
  Ast lhs, rhs;
};

struct Node {
  std::variant<Constant, Variable, Unary, Binary> v;
};

/// Parses `dim` semicolon-separated components over x1..x<dim>.
/// Throws Error{SyntaxError|ArityError|UnknownIdentifier}; syntax errors
/// carry the byte offset of the offending token.
std::vector<Ast> parse(std::string_view src, std::size_t dim);

/// One expression over x1..x<dim> (no ';').
Ast parse_scalar(std::string_view src, std::size_t dim);

/// Throws NonFinite on division by zero, ln of a nonpositive value, sqrt of
/// a negative value, or any non-finite intermediate.
double eval(const Ast& ast, std::span<const double> x);
Dual eval(const Ast& ast, std::span<const Dual> x);

/// Jacobian of the components at x in one vector-gradient dual sweep.
/// Throws NonFinite, or NotDifferentiable for abs at 0.
Matrix ad_jacobian(std::span<const Ast> components, std::span<const double> x);

/// Fully parenthesised source text that parses back to an equal tree.
std::string to_string(const Ast& ast);
std::string to_string(std::span<const Ast> components);

bool structurally_equal(const Ast& a, const Ast& b);

/// A MapSpec over R^dim backed by parsed components (AutoDiff Jacobian).
MapSpec make_map(std::string_view src, std::size_t dim, Vec base_point,
                 std::string label = "expr");

}  // namespace waz::expr
