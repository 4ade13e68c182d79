#include "waz/expr.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>

#include "waz/error.hpp"

namespace waz::expr {

namespace {

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, Semi, End };

struct Token {
  Tok kind;
  std::string_view text;
  std::size_t offset;
};

[[noreturn]] void syntax_error(std::size_t offset, const std::string& msg) {
  throw Error(ErrorKind::SyntaxError, msg + " at offset " + std::to_string(offset), offset);
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < src.size()) {
    const char c = src[i];
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      ++i;
      continue;
    }
    const std::size_t start = i;
    if (is_digit(c) || (c == '.' && i + 1 < src.size() && is_digit(src[i + 1]))) {
      while (i < src.size() && is_digit(src[i])) ++i;
      if (i < src.size() && src[i] == '.') {
        ++i;
        while (i < src.size() && is_digit(src[i])) ++i;
      }
      if (i < src.size() && (src[i] == 'e' || src[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < src.size() && (src[j] == '+' || src[j] == '-')) ++j;
        if (j < src.size() && is_digit(src[j])) {
          i = j;
          while (i < src.size() && is_digit(src[i])) ++i;
        }
      }
      out.push_back({Tok::Number, src.substr(start, i - start), start});
      continue;
    }
    if (is_alpha(c)) {
      while (i < src.size() && (is_alpha(src[i]) || is_digit(src[i]))) ++i;
      out.push_back({Tok::Ident, src.substr(start, i - start), start});
      continue;
    }
    Tok k;
    switch (c) {
      case '+': k = Tok::Plus; break;
      case '-': k = Tok::Minus; break;
      case '*': k = Tok::Star; break;
      case '/': k = Tok::Slash; break;
      case '^': k = Tok::Caret; break;
      case '(': k = Tok::LParen; break;
      case ')': k = Tok::RParen; break;
      case ';': k = Tok::Semi; break;
      default: syntax_error(start, std::string("unexpected character '") + c + "'");
    }
    out.push_back({k, src.substr(start, 1), start});
    ++i;
  }
  out.push_back({Tok::End, {}, src.size()});
  return out;
}

Ast make(Node n) { return std::make_shared<const Node>(std::move(n)); }

struct FunctionName {
  std::string_view name;
  UnaryOp op;
};
constexpr FunctionName kFunctions[] = {
    {"sin", UnaryOp::Sin}, {"cos", UnaryOp::Cos},   {"exp", UnaryOp::Exp},
    {"ln", UnaryOp::Ln},   {"sqrt", UnaryOp::Sqrt}, {"abs", UnaryOp::Abs},
};

class Parser {
 public:
  Parser(std::vector<Token> toks, std::size_t dim) : toks_(std::move(toks)), dim_(dim) {}

  std::vector<Ast> components() {
    std::vector<Ast> out;
    out.push_back(expr());
    while (peek().kind == Tok::Semi) {
      ++pos_;
      out.push_back(expr());
    }
    if (peek().kind != Tok::End) syntax_error(peek().offset, "unexpected '" + std::string(peek().text) + "'");
    return out;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& take() { return toks_[pos_++]; }

  Ast expr() {
    Ast lhs = term();
    while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
      const BinaryOp op = take().kind == Tok::Plus ? BinaryOp::Add : BinaryOp::Sub;
      lhs = make({Binary{op, lhs, term()}});
    }
    return lhs;
  }

  Ast term() {
    Ast lhs = unary();
    while (peek().kind == Tok::Star || peek().kind == Tok::Slash) {
      const BinaryOp op = take().kind == Tok::Star ? BinaryOp::Mul : BinaryOp::Div;
      lhs = make({Binary{op, lhs, unary()}});
    }
    return lhs;
  }

  // '^' binds tighter than unary minus: -x1^2 == -(x1^2).
  Ast unary() {
    if (peek().kind == Tok::Minus) {
      ++pos_;
      return make({Unary{UnaryOp::Neg, unary()}});
    }
    return power();
  }

  Ast power() {
    Ast base = atom();
    if (peek().kind != Tok::Caret) return base;
    ++pos_;
    bool negative = false;
    if (peek().kind == Tok::Minus || peek().kind == Tok::Plus) negative = take().kind == Tok::Minus;
    const Token& t = peek();
    if (t.kind != Tok::Number || t.text.find_first_of(".eE") != std::string_view::npos) {
      syntax_error(t.offset, "exponent must be an integer literal");
    }
    ++pos_;
    if (t.text.size() > 6) syntax_error(t.offset, "exponent too large");
    const int k = std::atoi(std::string(t.text).c_str());
    return make({Binary{BinaryOp::Pow, base, make({Constant{static_cast<double>(negative ? -k : k)}})}});
  }

  Ast atom() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Number: {
        ++pos_;
        const std::string text(t.text);
        errno = 0;
        const double v = std::strtod(text.c_str(), nullptr);
        if (errno == ERANGE || !std::isfinite(v)) syntax_error(t.offset, "numeric literal out of range");
        return make({Constant{v}});
      }
      case Tok::Ident: {
        ++pos_;
        for (const auto& f : kFunctions) {
          if (t.text == f.name) {
            expect(Tok::LParen, "'(' after function name");
            Ast arg = expr();
            expect(Tok::RParen, "')'");
            return make({Unary{f.op, arg}});
          }
        }
        if (t.text.size() >= 2 && t.text[0] == 'x' && t.text[1] != '0' &&
            t.text.find_first_not_of("0123456789", 1) == std::string_view::npos && t.text.size() <= 8) {
          const std::size_t idx = std::stoul(std::string(t.text.substr(1)));
          if (idx >= 1 && idx <= dim_) return make({Variable{idx - 1}});
        }
        throw Error(ErrorKind::UnknownIdentifier,
                    "unknown identifier '" + std::string(t.text) + "' at offset " + std::to_string(t.offset),
                    t.offset);
      }
      case Tok::LParen: {
        ++pos_;
        Ast inner = expr();
        expect(Tok::RParen, "')'");
        return inner;
      }
      case Tok::End:
        syntax_error(t.offset, "unexpected end of input");
      default:
        syntax_error(t.offset, "unexpected '" + std::string(t.text) + "'");
    }
  }

  void expect(Tok kind, const char* what) {
    if (peek().kind != kind) syntax_error(peek().offset, std::string("expected ") + what);
    ++pos_;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::size_t dim_;
};

[[noreturn]] void non_finite(const char* what) { throw Error(ErrorKind::NonFinite, what); }

template <class T>
T checked(T v) {
  if (!std::isfinite(value_of(v))) non_finite("non-finite intermediate value");
  if constexpr (std::is_same_v<T, Dual>) {
    if (!all_finite(v.grad())) non_finite("non-finite derivative");
  }
  return v;
}

template <class T>
T eval_impl(const Node& n, std::span<const T> x) {
  using std::cos;
  using std::exp;
  using std::log;
  using std::sin;
  using std::sqrt;
  return std::visit(
      [&](const auto& node) -> T {
        using N = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<N, Constant>) {
          return T(node.value);
        } else if constexpr (std::is_same_v<N, Variable>) {
          if (node.index >= x.size()) throw Error(ErrorKind::InvalidArgument, "variable index out of range");
          return x[node.index];
        } else if constexpr (std::is_same_v<N, Unary>) {
          const T a = eval_impl(*node.arg, x);
          const double av = value_of(a);
          switch (node.op) {
            case UnaryOp::Neg: return -a;
            case UnaryOp::Sin: return checked(T(sin(a)));
            case UnaryOp::Cos: return checked(T(cos(a)));
            case UnaryOp::Exp: return checked(T(exp(a)));
            case UnaryOp::Ln:
              if (!(av > 0.0)) non_finite("ln of a nonpositive value");
              return checked(T(log(a)));
            case UnaryOp::Sqrt:
              if (av < 0.0) non_finite("sqrt of a negative value");
              return checked(T(sqrt(a)));
            case UnaryOp::Abs:
              if constexpr (std::is_same_v<T, Dual>) {
                return abs(a);
              } else {
                return std::abs(a);
              }
          }
          non_finite("bad unary op");
        } else {
          if (node.op == BinaryOp::Pow) {
            const T base = eval_impl(*node.lhs, x);
            const int k = static_cast<int>(std::get<Constant>(node.rhs->v).value);
            if (k < 0 && value_of(base) == 0.0) non_finite("negative power of zero");
            return checked(T(ipow(base, k)));
          }
          const T a = eval_impl(*node.lhs, x);
          const T b = eval_impl(*node.rhs, x);
          switch (node.op) {
            case BinaryOp::Add: return checked(a + b);
            case BinaryOp::Sub: return checked(a - b);
            case BinaryOp::Mul: return checked(a * b);
            case BinaryOp::Div:
              if (value_of(b) == 0.0) non_finite("division by zero");
              return checked(a / b);
            case BinaryOp::Pow: break;
          }
          non_finite("bad binary op");
        }
      },
      n.v);
}

std::string number_text(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const char* unary_name(UnaryOp op) {
  switch (op) {
    case UnaryOp::Neg: return "-";
    case UnaryOp::Sin: return "sin";
    case UnaryOp::Cos: return "cos";
    case UnaryOp::Exp: return "exp";
    case UnaryOp::Ln: return "ln";
    case UnaryOp::Sqrt: return "sqrt";
    case UnaryOp::Abs: return "abs";
  }
  return "?";
}

const char* binary_symbol(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return " + ";
    case BinaryOp::Sub: return " - ";
    case BinaryOp::Mul: return " * ";
    case BinaryOp::Div: return " / ";
    case BinaryOp::Pow: return "^";
  }
  return "?";
}

}  // namespace

std::vector<Ast> parse(std::string_view src, std::size_t dim) {
  if (src.find_first_not_of(" \t\r\n") == std::string_view::npos) {
    throw Error(ErrorKind::SyntaxError, "empty expression at offset 0", 0);
  }
  Parser p(tokenize(src), dim);
  std::vector<Ast> comps = p.components();
  if (comps.size() != dim) {
    throw Error(ErrorKind::ArityError, "expected " + std::to_string(dim) + " components, got " +
                                           std::to_string(comps.size()));
  }
  return comps;
}

Ast parse_scalar(std::string_view src, std::size_t dim) {
  if (src.find_first_not_of(" \t\r\n") == std::string_view::npos) {
    throw Error(ErrorKind::SyntaxError, "empty expression at offset 0", 0);
  }
  Parser p(tokenize(src), dim);
  std::vector<Ast> comps = p.components();
  if (comps.size() != 1) {
    throw Error(ErrorKind::ArityError, "expected a single expression, got " + std::to_string(comps.size()));
  }
  return comps.front();
}

double eval(const Ast& ast, std::span<const double> x) {
  if (!all_finite(x)) non_finite("non-finite input point");
  return eval_impl<double>(*ast, x);
}

Dual eval(const Ast& ast, std::span<const Dual> x) { return eval_impl<Dual>(*ast, x); }

Matrix ad_jacobian(std::span<const Ast> components, std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<Dual> xd;
  xd.reserve(n);
  for (std::size_t i = 0; i < n; ++i) xd.push_back(Dual::variable(x[i], i, n));
  Matrix j(components.size(), n);
  for (std::size_t r = 0; r < components.size(); ++r) {
    const Dual d = eval(components[r], std::span<const Dual>(xd));
    for (std::size_t c = 0; c < n; ++c) j(r, c) = d.partial(c);
  }
  return j;
}

std::string to_string(const Ast& ast) {
  return std::visit(
      [&](const auto& node) -> std::string {
        using N = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<N, Constant>) {
          return number_text(node.value);
        } else if constexpr (std::is_same_v<N, Variable>) {
          return "x" + std::to_string(node.index + 1);
        } else if constexpr (std::is_same_v<N, Unary>) {
          if (node.op == UnaryOp::Neg) return "(-" + to_string(node.arg) + ")";
          return std::string(unary_name(node.op)) + "(" + to_string(node.arg) + ")";
        } else {
          if (node.op == BinaryOp::Pow) {
            const int k = static_cast<int>(std::get<Constant>(node.rhs->v).value);
            return "(" + to_string(node.lhs) + "^" + std::to_string(k) + ")";
          }
          return "(" + to_string(node.lhs) + binary_symbol(node.op) + to_string(node.rhs) + ")";
        }
      },
      ast->v);
}

std::string to_string(std::span<const Ast> components) {
  std::string s;
  for (std::size_t i = 0; i < components.size(); ++i) {
    if (i) s += "; ";
    s += to_string(components[i]);
  }
  return s;
}

bool structurally_equal(const Ast& a, const Ast& b) {
  if (a->v.index() != b->v.index()) return false;
  return std::visit(
      [&](const auto& na) -> bool {
        using N = std::decay_t<decltype(na)>;
        const auto& nb = std::get<N>(b->v);
        if constexpr (std::is_same_v<N, Constant>) {
          return na.value == nb.value;
        } else if constexpr (std::is_same_v<N, Variable>) {
          return na.index == nb.index;
        } else if constexpr (std::is_same_v<N, Unary>) {
          return na.op == nb.op && structurally_equal(na.arg, nb.arg);
        } else {
          return na.op == nb.op && structurally_equal(na.lhs, nb.lhs) && structurally_equal(na.rhs, nb.rhs);
        }
      },
      a->v);
}

MapSpec make_map(std::string_view src, std::size_t dim, Vec base_point, std::string label) {
  auto comps = std::make_shared<const std::vector<Ast>>(parse(src, dim));
  VecFn ev = [comps](std::span<const double> x) {
    Vec y;
    y.reserve(comps->size());
    for (const Ast& c : *comps) y.push_back(eval(c, x));
    return y;
  };
  DualFn dv = [comps](std::span<const Dual> x) {
    std::vector<Dual> y;
    y.reserve(comps->size());
    for (const Ast& c : *comps) y.push_back(eval(c, x));
    return y;
  };
  const double scale = 1.0 + norm(base_point);
  return MapSpec(std::move(label), dim, std::move(ev), std::move(dv), AutoDiff{},
                 DomainSpec(DomainSpec::whole_space(dim), -1.0, scale), std::move(base_point));
}

}  // namespace waz::expr
