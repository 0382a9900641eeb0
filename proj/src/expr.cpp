#include "varhunt/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdint>
#include <sstream>

namespace varhunt {

namespace {

ExprPtr make(NodeKind k, ExprPtr a = nullptr, ExprPtr b = nullptr) {
  auto n = std::make_shared<ExprNode>();
  n->kind = k;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

ExprPtr make_const(double v) {
  auto n = std::make_shared<ExprNode>();
  n->kind = NodeKind::Constant;
  n->value = v;
  return n;
}

struct Token {
  enum Type { Number, Ident, Symbol, End } type;
  std::string text;
  double number = 0.0;
  std::size_t offset = 0;
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) { advance(); }

  const Token& peek() const { return tok_; }

  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    tok_.offset = pos_;
    if (pos_ >= src_.size()) {
      tok_.type = Token::End;
      tok_.text.clear();
      return;
    }
    char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t end;
      try {
        tok_.number = std::stod(src_.substr(pos_), &end);
      } catch (const std::exception&) {
        throw ParseError("malformed number", pos_);
      }
      tok_.type = Token::Number;
      tok_.text = src_.substr(pos_, end);
      pos_ += end;
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        ++pos_;
      tok_.type = Token::Ident;
      tok_.text = src_.substr(start, pos_ - start);
      return;
    }
    static const std::string symbols = "+-*/^(),";
    if (symbols.find(c) == std::string::npos)
      throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    tok_.type = Token::Symbol;
    tok_.text = std::string(1, c);
    ++pos_;
  }

  const std::string& src_;
  std::size_t pos_ = 0;
  Token tok_;
};

struct Builtin {
  NodeKind kind;
  int arity;
};

std::optional<Builtin> lookup_builtin(const std::string& name) {
  if (name == "abs") return Builtin{NodeKind::Abs, 1};
  if (name == "exp") return Builtin{NodeKind::Exp, 1};
  if (name == "log") return Builtin{NodeKind::Log, 1};
  if (name == "sin") return Builtin{NodeKind::Sin, 1};
  if (name == "cos") return Builtin{NodeKind::Cos, 1};
  if (name == "min") return Builtin{NodeKind::Min, 2};
  if (name == "max") return Builtin{NodeKind::Max, 2};
  if (name == "spow") return Builtin{NodeKind::Spow, 2};
  if (name == "distosc") return Builtin{NodeKind::Distosc, 1};
  return std::nullopt;
}

class Parser {
 public:
  explicit Parser(const std::string& src) : lex_(src) {}

  ExprPtr parse_all() {
    ExprPtr e = parse_expr();
    if (lex_.peek().type != Token::End)
      throw ParseError("trailing input, expected end of expression or operator",
                       lex_.peek().offset);
    return e;
  }

 private:
  ExprPtr parse_expr() {
    ExprPtr e = parse_term();
    while (is_symbol("+") || is_symbol("-")) {
      bool add = is_symbol("+");
      lex_.take();
      e = make(add ? NodeKind::Add : NodeKind::Sub, e, parse_term());
    }
    return e;
  }

  ExprPtr parse_term() {
    ExprPtr e = parse_factor();
    while (is_symbol("*") || is_symbol("/")) {
      bool mul = is_symbol("*");
      lex_.take();
      e = make(mul ? NodeKind::Mul : NodeKind::Div, e, parse_factor());
    }
    return e;
  }

  // '^' is right-associative and binds tighter than unary minus on its left,
  // so -xi^2 is -(xi^2) while the exponent may carry a sign: 2^-3.
  ExprPtr parse_factor() {
    if (is_symbol("-")) {
      lex_.take();
      return make(NodeKind::Neg, parse_factor());
    }
    return parse_power();
  }

  ExprPtr parse_power() {
    ExprPtr base = parse_primary();
    if (is_symbol("^")) {
      lex_.take();
      return make(NodeKind::Pow, base, parse_factor());
    }
    return base;
  }

  ExprPtr parse_primary() {
    Token t = lex_.peek();
    if (t.type == Token::Number) {
      lex_.take();
      return make_const(t.number);
    }
    if (t.type == Token::Ident) {
      lex_.take();
      if (t.text == "x") return make(NodeKind::VarX);
      if (t.text == "xi") return make(NodeKind::VarXi);
      auto builtin = lookup_builtin(t.text);
      if (!builtin)
        throw ParseError("unknown identifier '" + t.text + "'", t.offset);
      expect("(");
      std::vector<ExprPtr> args;
      args.push_back(parse_expr());
      while (is_symbol(",")) {
        lex_.take();
        args.push_back(parse_expr());
      }
      expect(")");
      if (static_cast<int>(args.size()) != builtin->arity)
        throw ParseError("'" + t.text + "' expects " +
                             std::to_string(builtin->arity) + " argument(s)",
                         t.offset);
      if (builtin->arity == 1) return make(builtin->kind, args[0]);
      return make(builtin->kind, args[0], args[1]);
    }
    if (is_symbol("(")) {
      lex_.take();
      ExprPtr e = parse_expr();
      expect(")");
      return e;
    }
    throw ParseError("expected number, variable, function call, or '('", t.offset);
  }

  bool is_symbol(const char* s) const {
    return lex_.peek().type == Token::Symbol && lex_.peek().text == s;
  }

  void expect(const char* s) {
    if (!is_symbol(s))
      throw ParseError(std::string("expected '") + s + "'", lex_.peek().offset);
    lex_.take();
  }

  Lexer lex_;
};

double eval_node(const ExprNode& n, double x, double xi);

double checked_pow(double base, double expo, double x, double xi) {
  if (base == 0.0 && expo < 0.0)
    throw EvalDomainError("0 raised to negative power", x, xi);
  if (base < 0.0 && expo != std::floor(expo))
    throw EvalDomainError("negative base with non-integer exponent", x, xi);
  return std::pow(base, expo);
}

double eval_distosc(double xi, double p) {
  if (xi <= 0.0) return 0.0;
  for (const DistBand& band : distosc_bands()) {
    if (xi < band.lo) break;
    if (xi <= band.hi) {
      double d = std::min(xi - band.lo, band.hi - xi);
      return std::pow(d, p);
    }
  }
  return 0.0;
}

// F(xi) = int_0^xi distosc(p) dt, closed form per band.
double eval_distosc_prim(double xi, double p) {
  if (xi <= 0.0) return 0.0;
  double acc = 0.0;
  for (const DistBand& band : distosc_bands()) {
    if (xi < band.lo) break;
    double h = 0.5 * (band.hi - band.lo);
    double full = 2.0 * std::pow(h, p + 1.0) / (p + 1.0);
    if (xi >= band.hi) {
      acc += full;
      continue;
    }
    double mid = band.lo + h;
    if (xi <= mid) {
      acc += std::pow(xi - band.lo, p + 1.0) / (p + 1.0);
    } else {
      acc += full - std::pow(band.hi - xi, p + 1.0) / (p + 1.0);
    }
    break;
  }
  return acc;
}

double eval_node(const ExprNode& n, double x, double xi) {
  switch (n.kind) {
    case NodeKind::Constant:
      return n.value;
    case NodeKind::VarX:
      return x;
    case NodeKind::VarXi:
      return xi;
    case NodeKind::Add:
      return eval_node(*n.a, x, xi) + eval_node(*n.b, x, xi);
    case NodeKind::Sub:
      return eval_node(*n.a, x, xi) - eval_node(*n.b, x, xi);
    case NodeKind::Mul:
      return eval_node(*n.a, x, xi) * eval_node(*n.b, x, xi);
    case NodeKind::Div: {
      double den = eval_node(*n.b, x, xi);
      if (den == 0.0) throw EvalDomainError("division by zero", x, xi);
      return eval_node(*n.a, x, xi) / den;
    }
    case NodeKind::Pow:
      return checked_pow(eval_node(*n.a, x, xi), eval_node(*n.b, x, xi), x, xi);
    case NodeKind::Neg:
      return -eval_node(*n.a, x, xi);
    case NodeKind::Abs:
      return std::fabs(eval_node(*n.a, x, xi));
    case NodeKind::Exp:
      return std::exp(eval_node(*n.a, x, xi));
    case NodeKind::Log: {
      double v = eval_node(*n.a, x, xi);
      if (v <= 0.0) throw EvalDomainError("log of non-positive value", x, xi);
      return std::log(v);
    }
    case NodeKind::Sin:
      return std::sin(eval_node(*n.a, x, xi));
    case NodeKind::Cos:
      return std::cos(eval_node(*n.a, x, xi));
    case NodeKind::Min:
      return std::min(eval_node(*n.a, x, xi), eval_node(*n.b, x, xi));
    case NodeKind::Max:
      return std::max(eval_node(*n.a, x, xi), eval_node(*n.b, x, xi));
    case NodeKind::Spow: {
      double v = eval_node(*n.a, x, xi);
      double p = eval_node(*n.b, x, xi);
      if (v == 0.0) return 0.0;
      return std::pow(std::fabs(v), p - 2.0) * v;
    }
    case NodeKind::Distosc:
      return eval_distosc(xi, eval_node(*n.a, x, xi));
    case NodeKind::DistoscPrim:
      return eval_distosc_prim(xi, eval_node(*n.a, x, xi));
  }
  throw std::logic_error("unreachable expression node kind");
}

void print_node(const ExprNode& n, std::ostream& os);

void print_paren(const ExprNode& n, std::ostream& os) {
  os << '(';
  print_node(n, os);
  os << ')';
}

void print_node(const ExprNode& n, std::ostream& os) {
  switch (n.kind) {
    case NodeKind::Constant: {
      std::ostringstream tmp;
      tmp.precision(17);
      tmp << n.value;
      os << tmp.str();
      return;
    }
    case NodeKind::VarX:
      os << 'x';
      return;
    case NodeKind::VarXi:
      os << "xi";
      return;
    case NodeKind::Add:
      print_paren(*n.a, os);
      os << '+';
      print_paren(*n.b, os);
      return;
    case NodeKind::Sub:
      print_paren(*n.a, os);
      os << '-';
      print_paren(*n.b, os);
      return;
    case NodeKind::Mul:
      print_paren(*n.a, os);
      os << '*';
      print_paren(*n.b, os);
      return;
    case NodeKind::Div:
      print_paren(*n.a, os);
      os << '/';
      print_paren(*n.b, os);
      return;
    case NodeKind::Pow:
      print_paren(*n.a, os);
      os << '^';
      print_paren(*n.b, os);
      return;
    case NodeKind::Neg:
      os << '-';
      print_paren(*n.a, os);
      return;
    case NodeKind::Abs:
    case NodeKind::Exp:
    case NodeKind::Log:
    case NodeKind::Sin:
    case NodeKind::Cos:
    case NodeKind::Distosc:
    case NodeKind::DistoscPrim: {
      const char* name = n.kind == NodeKind::Abs   ? "abs"
                         : n.kind == NodeKind::Exp ? "exp"
                         : n.kind == NodeKind::Log ? "log"
                         : n.kind == NodeKind::Sin ? "sin"
                         : n.kind == NodeKind::Cos ? "cos"
                         : n.kind == NodeKind::Distosc ? "distosc"
                                                       : "distosc_prim";
      os << name << '(';
      print_node(*n.a, os);
      os << ')';
      return;
    }
    case NodeKind::Min:
    case NodeKind::Max:
    case NodeKind::Spow: {
      const char* name = n.kind == NodeKind::Min   ? "min"
                         : n.kind == NodeKind::Max ? "max"
                                                   : "spow";
      os << name << '(';
      print_node(*n.a, os);
      os << ',';
      print_node(*n.b, os);
      os << ')';
      return;
    }
  }
}

bool equal_nodes(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return a == b;
  if (a->kind != b->kind) return false;
  if (a->kind == NodeKind::Constant) return a->value == b->value;
  return equal_nodes(a->a, b->a) && equal_nodes(a->b, b->b);
}

bool node_depends_on_xi(const ExprPtr& n) {
  if (!n) return false;
  if (n->kind == NodeKind::VarXi || n->kind == NodeKind::Distosc ||
      n->kind == NodeKind::DistoscPrim)
    return true;
  return node_depends_on_xi(n->a) || node_depends_on_xi(n->b);
}

bool node_contains_distosc(const ExprPtr& n) {
  if (!n) return false;
  if (n->kind == NodeKind::Distosc || n->kind == NodeKind::DistoscPrim) return true;
  return node_contains_distosc(n->a) || node_contains_distosc(n->b);
}

std::optional<double> const_value(const ExprPtr& n) {
  if (n && n->kind == NodeKind::Constant) return n->value;
  return std::nullopt;
}

// Antiderivative in xi with F(x, 0) = 0, or nullopt when no closed form is
// recognized.
std::optional<ExprPtr> antiderivative(const ExprPtr& n) {
  if (!node_depends_on_xi(n)) return make(NodeKind::Mul, n, make(NodeKind::VarXi));
  switch (n->kind) {
    case NodeKind::VarXi:
      return make(NodeKind::Mul, make_const(0.5),
                  make(NodeKind::Pow, make(NodeKind::VarXi), make_const(2.0)));
    case NodeKind::Pow: {
      auto expo = const_value(n->b);
      if (n->a->kind == NodeKind::VarXi && expo && *expo != -1.0) {
        return make(NodeKind::Div,
                    make(NodeKind::Pow, make(NodeKind::VarXi),
                         make_const(*expo + 1.0)),
                    make_const(*expo + 1.0));
      }
      return std::nullopt;
    }
    case NodeKind::Add: {
      auto fa = antiderivative(n->a);
      auto fb = antiderivative(n->b);
      if (fa && fb) return make(NodeKind::Add, *fa, *fb);
      return std::nullopt;
    }
    case NodeKind::Sub: {
      auto fa = antiderivative(n->a);
      auto fb = antiderivative(n->b);
      if (fa && fb) return make(NodeKind::Sub, *fa, *fb);
      return std::nullopt;
    }
    case NodeKind::Neg: {
      auto fa = antiderivative(n->a);
      if (fa) return make(NodeKind::Neg, *fa);
      return std::nullopt;
    }
    case NodeKind::Mul: {
      if (!node_depends_on_xi(n->a)) {
        auto fb = antiderivative(n->b);
        if (fb) return make(NodeKind::Mul, n->a, *fb);
      }
      if (!node_depends_on_xi(n->b)) {
        auto fa = antiderivative(n->a);
        if (fa) return make(NodeKind::Mul, *fa, n->b);
      }
      return std::nullopt;
    }
    case NodeKind::Div: {
      if (!node_depends_on_xi(n->b)) {
        auto fa = antiderivative(n->a);
        if (fa) return make(NodeKind::Div, *fa, n->b);
      }
      return std::nullopt;
    }
    case NodeKind::Spow: {
      // int spow(t, p) dt = |xi|^p / p
      auto p = const_value(n->b);
      if (n->a->kind == NodeKind::VarXi && p && *p != 0.0) {
        return make(NodeKind::Div,
                    make(NodeKind::Pow,
                         make(NodeKind::Abs, make(NodeKind::VarXi)),
                         make_const(*p)),
                    make_const(*p));
      }
      return std::nullopt;
    }
    case NodeKind::Distosc:
      if (const_value(n->a)) return make(NodeKind::DistoscPrim, n->a);
      return std::nullopt;
    default:
      return std::nullopt;
  }
}

}  // namespace

const std::vector<DistBand>& distosc_bands() {
  static const std::vector<DistBand> bands = [] {
    std::vector<DistBand> out;
    const std::uint64_t limit = std::uint64_t{1} << 62;
    std::uint64_t fact = 1;  // k!
    for (std::uint64_t k = 1;; ++k) {
      if (fact > limit / (k + 1)) break;  // (k+1)! would overflow the bound
      std::uint64_t next = fact * (k + 1);
      out.push_back(DistBand{static_cast<double>(fact * k), static_cast<double>(next)});
      fact = next;
    }
    return out;
  }();
  return bands;
}

Expr Expr::parse(const std::string& src) {
  if (src.empty()) throw ParseError("empty expression", 0);
  Parser p(src);
  return Expr(p.parse_all());
}

double Expr::eval(double x, double xi) const {
  if (!root_) throw std::logic_error("eval of empty expression");
  return eval_node(*root_, x, xi);
}

std::string Expr::print() const {
  if (!root_) return "";
  std::ostringstream os;
  print_node(*root_, os);
  return os.str();
}

bool Expr::structurally_equal(const Expr& other) const {
  return equal_nodes(root_, other.root_);
}

bool Expr::depends_on_xi() const { return node_depends_on_xi(root_); }

bool Expr::contains_distosc() const { return node_contains_distosc(root_); }

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol, int max_depth) {
  struct Impl {
    const std::function<double(double)>& f;
    double recurse(double a, double fa, double b, double fb, double m, double fm,
                   double whole, double tol, int depth) {
      double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
      double flm = f(lm), frm = f(rm);
      double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
      double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
      if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
      return recurse(a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
             recurse(m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
    }
  } impl{f};
  if (a == b) return 0.0;
  double m = 0.5 * (a + b);
  double fa = f(a), fb = f(b), fm = f(m);
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return impl.recurse(a, fa, b, fb, m, fm, whole, tol, max_depth);
}

Primitive::Primitive(Expr f) : f_(std::move(f)) {
  auto anti = antiderivative(f_.root());
  if (anti) anti_ = Expr(*anti);
}

double Primitive::operator()(double x, double xi) const {
  if (anti_) return anti_->eval(x, xi);
  auto integrand = [&](double t) { return f_.eval(x, t); };
  double sign = 1.0, lo = 0.0, hi = xi;
  if (xi < 0.0) {
    sign = -1.0;
    lo = xi;
    hi = 0.0;
  }
  return sign * adaptive_simpson(integrand, lo, hi, 1e-10, 40);
}

}  // namespace varhunt
