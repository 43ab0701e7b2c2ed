#include "isogeo/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <utility>

namespace isogeo {

ParseError::ParseError(std::size_t offset, std::string expected)
    : std::runtime_error("parse error at byte " + std::to_string(offset) +
                         ": expected " + expected),
      offset_(offset),
      expected_(std::move(expected)) {}

PoleError::PoleError(cplx at)
    : std::runtime_error("pole encountered at z = (" +
                         std::to_string(at.real()) + ", " +
                         std::to_string(at.imag()) + ")"),
      at_(at) {}

// ---------------------------------------------------------------------------
// Builders

namespace {

ExprPtr node(Expr e) { return std::make_shared<const Expr>(std::move(e)); }

bool is_const(const ExprPtr& e, double re, double im = 0.0) {
  return e->kind == ExprKind::Const && e->value == cplx{re, im};
}
bool is_real_const(const ExprPtr& e) {
  return e->kind == ExprKind::Const && e->value.imag() == 0.0;
}

}  // namespace

ExprPtr make_const(double nonneg_re) {
  Expr e;
  e.kind = ExprKind::Const;
  e.value = nonneg_re;
  return node(std::move(e));
}

ExprPtr make_imag_unit() {
  Expr e;
  e.kind = ExprKind::Const;
  e.value = cplx{0, 1};
  return node(std::move(e));
}

ExprPtr make_var() {
  Expr e;
  e.kind = ExprKind::Var;
  return node(std::move(e));
}

ExprPtr make_neg(ExprPtr a) {
  if (is_const(a, 0)) return a;
  if (a->kind == ExprKind::Neg) return a->a;
  Expr e;
  e.kind = ExprKind::Neg;
  e.a = std::move(a);
  return node(std::move(e));
}

ExprPtr make_add(ExprPtr a, ExprPtr b) {
  if (is_const(a, 0)) return b;
  if (is_const(b, 0)) return a;
  if (is_real_const(a) && is_real_const(b))
    return make_const(a->value.real() + b->value.real());
  Expr e;
  e.kind = ExprKind::Add;
  e.a = std::move(a);
  e.b = std::move(b);
  return node(std::move(e));
}

ExprPtr make_sub(ExprPtr a, ExprPtr b) {
  if (is_const(b, 0)) return a;
  if (is_const(a, 0)) return make_neg(std::move(b));
  Expr e;
  e.kind = ExprKind::Sub;
  e.a = std::move(a);
  e.b = std::move(b);
  return node(std::move(e));
}

ExprPtr make_mul(ExprPtr a, ExprPtr b) {
  if (is_const(a, 0) || is_const(b, 0)) return make_const(0);
  if (is_const(a, 1)) return b;
  if (is_const(b, 1)) return a;
  if (is_real_const(a) && is_real_const(b))
    return make_const(a->value.real() * b->value.real());
  Expr e;
  e.kind = ExprKind::Mul;
  e.a = std::move(a);
  e.b = std::move(b);
  return node(std::move(e));
}

ExprPtr make_div(ExprPtr a, ExprPtr b) {
  if (is_const(b, 1)) return a;
  if (is_const(a, 0) && !is_const(b, 0)) return a;
  Expr e;
  e.kind = ExprKind::Div;
  e.a = std::move(a);
  e.b = std::move(b);
  return node(std::move(e));
}

ExprPtr make_pow(ExprPtr a, int n) {
  if (n == 1) return a;
  if (n == 0) return make_const(1);
  Expr e;
  e.kind = ExprKind::Pow;
  e.a = std::move(a);
  e.exponent = n;
  return node(std::move(e));
}

ExprPtr make_call(Func f, ExprPtr a) {
  Expr e;
  e.kind = ExprKind::Call;
  e.func = f;
  e.a = std::move(a);
  return node(std::move(e));
}

ExprPtr make_int(long long n) {
  if (n < 0) return make_neg(make_const(static_cast<double>(-n)));
  return make_const(static_cast<double>(n));
}

// ---------------------------------------------------------------------------
// Parser (recursive descent, byte offsets for diagnostics)

namespace {

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  ExprPtr run() {
    ExprPtr e = expr();
    skip_ws();
    if (pos_ != s_.size()) throw ParseError(pos_, "end of input");
    return e;
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;

  void skip_ws() {
    while (pos_ < s_.size() &&
           std::isspace(static_cast<unsigned char>(s_[pos_])))
      ++pos_;
  }
  bool peek_is(char c) {
    skip_ws();
    return pos_ < s_.size() && s_[pos_] == c;
  }
  bool accept(char c) {
    if (peek_is(c)) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c, const char* what) {
    if (!accept(c)) throw ParseError(pos_, what);
  }

  ExprPtr expr() {
    ExprPtr e = term();
    for (;;) {
      if (accept('+'))
        e = raw_binary(ExprKind::Add, e, term());
      else if (accept('-'))
        e = raw_binary(ExprKind::Sub, e, term());
      else
        return e;
    }
  }

  ExprPtr term() {
    ExprPtr e = factor();
    for (;;) {
      if (accept('*'))
        e = raw_binary(ExprKind::Mul, e, factor());
      else if (accept('/'))
        e = raw_binary(ExprKind::Div, e, factor());
      else
        return e;
    }
  }

  ExprPtr factor() {
    bool neg = accept('-');
    ExprPtr e = base();
    if (accept('^')) e = raw_pow(e, int_literal());
    if (neg) e = raw_neg(e);
    return e;
  }

  ExprPtr base() {
    skip_ws();
    if (pos_ >= s_.size())
      throw ParseError(pos_, "a value: z, i, number, '(' or function");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      ExprPtr e = expr();
      expect(')', "')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_')
      return identifier();
    throw ParseError(pos_, "a value: z, i, number, '(' or function");
  }

  ExprPtr number() {
    std::size_t start = pos_;
    while (pos_ < s_.size() &&
           std::isdigit(static_cast<unsigned char>(s_[pos_])))
      ++pos_;
    if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      while (pos_ < s_.size() &&
             std::isdigit(static_cast<unsigned char>(s_[pos_])))
        ++pos_;
    }
    std::string text(s_.substr(start, pos_ - start));
    return make_const(std::strtod(text.c_str(), nullptr));
  }

  ExprPtr identifier() {
    std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) ||
            s_[pos_] == '_'))
      ++pos_;
    std::string_view name = s_.substr(start, pos_ - start);
    if (name == "z") return make_var();
    if (name == "i") return make_imag_unit();
    Func f;
    if (name == "exp")
      f = Func::Exp;
    else if (name == "sin")
      f = Func::Sin;
    else if (name == "cos")
      f = Func::Cos;
    else if (name == "log")
      f = Func::Log;
    else
      throw ParseError(start, "one of: z, i, exp, sin, cos, log");
    expect('(', "'(' after function name");
    ExprPtr arg = expr();
    expect(')', "')'");
    return make_call(f, std::move(arg));
  }

  int int_literal() {
    skip_ws();
    bool neg = accept('-');
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < s_.size() &&
           std::isdigit(static_cast<unsigned char>(s_[pos_])))
      ++pos_;
    if (pos_ == start) throw ParseError(pos_, "integer exponent");
    int v = std::atoi(std::string(s_.substr(start, pos_ - start)).c_str());
    return neg ? -v : v;
  }

  // The parser must not fold: "0+z" has to round-trip as Add(0, z).
  static ExprPtr raw_binary(ExprKind k, ExprPtr a, ExprPtr b) {
    Expr e;
    e.kind = k;
    e.a = std::move(a);
    e.b = std::move(b);
    return node(std::move(e));
  }
  static ExprPtr raw_neg(ExprPtr a) {
    Expr e;
    e.kind = ExprKind::Neg;
    e.a = std::move(a);
    return node(std::move(e));
  }
  static ExprPtr raw_pow(ExprPtr a, int n) {
    Expr e;
    e.kind = ExprKind::Pow;
    e.a = std::move(a);
    e.exponent = n;
    return node(std::move(e));
  }
};

}  // namespace

ExprPtr parse(std::string_view text) { return Parser(text).run(); }

// ---------------------------------------------------------------------------
// Evaluation

namespace {

cplx ipow(cplx base, int n, cplx at) {
  bool inv = n < 0;
  unsigned k = inv ? static_cast<unsigned>(-(long long)n)
                   : static_cast<unsigned>(n);
  cplx acc = 1.0, b = base;
  while (k) {
    if (k & 1u) acc *= b;
    b *= b;
    k >>= 1;
  }
  if (inv) {
    if (acc == cplx{0, 0}) throw PoleError(at);
    return 1.0 / acc;
  }
  return acc;
}

}  // namespace

cplx eval(const Expr& e, cplx z) {
  switch (e.kind) {
    case ExprKind::Const:
      return e.value;
    case ExprKind::Var:
      return z;
    case ExprKind::Neg:
      return -eval(*e.a, z);
    case ExprKind::Add:
      return eval(*e.a, z) + eval(*e.b, z);
    case ExprKind::Sub:
      return eval(*e.a, z) - eval(*e.b, z);
    case ExprKind::Mul:
      return eval(*e.a, z) * eval(*e.b, z);
    case ExprKind::Div: {
      cplx den = eval(*e.b, z);
      if (den == cplx{0, 0}) throw PoleError(z);
      return eval(*e.a, z) / den;
    }
    case ExprKind::Pow:
      return ipow(eval(*e.a, z), e.exponent, z);
    case ExprKind::Call: {
      cplx a = eval(*e.a, z);
      switch (e.func) {
        case Func::Exp:
          return std::exp(a);
        case Func::Sin:
          return std::sin(a);
        case Func::Cos:
          return std::cos(a);
        case Func::Log:
          if (a == cplx{0, 0}) throw PoleError(z);
          return std::log(a);
      }
    }
  }
  throw std::logic_error("eval: corrupt AST");
}

cplx eval_rescued(const ExprPtr& e, cplx z) {
  try {
    return eval(*e, z);
  } catch (const PoleError&) {
  }
  // Mean-value recovery on two concentric circles.  A removable singularity
  // gives radius-independent means; magnitude growing as the radius halves
  // marks a genuine pole.
  const double scale = std::max(1.0, std::abs(z));
  auto circle = [&](double r, double& max_abs) {
    cplx mean = 0.0;
    max_abs = 0.0;
    for (int k = 0; k < 8; ++k) {
      double th = 2.0 * 3.14159265358979323846 * (k + 0.37) / 8.0;
      cplx w = eval(*e, z + std::polar(r, th));
      mean += w;
      max_abs = std::max(max_abs, std::abs(w));
    }
    return mean / 8.0;
  };
  double big1 = 0, big2 = 0;
  cplx m1, m2;
  try {
    m1 = circle(1e-3 * scale, big1);
    m2 = circle(5e-4 * scale, big2);
  } catch (const PoleError&) {
    throw PoleError(z);
  }
  if (big2 > 1.6 * big1 + 1e-300) throw PoleError(z);
  if (std::abs(m1 - m2) > 1e-6 * (1.0 + std::abs(m2))) throw PoleError(z);
  return m2;
}

// ---------------------------------------------------------------------------
// Symbolic derivative

ExprPtr differentiate(const ExprPtr& e) {
  switch (e->kind) {
    case ExprKind::Const:
      return make_const(0);
    case ExprKind::Var:
      return make_const(1);
    case ExprKind::Neg:
      return make_neg(differentiate(e->a));
    case ExprKind::Add:
      return make_add(differentiate(e->a), differentiate(e->b));
    case ExprKind::Sub:
      return make_sub(differentiate(e->a), differentiate(e->b));
    case ExprKind::Mul:
      return make_add(make_mul(differentiate(e->a), e->b),
                      make_mul(e->a, differentiate(e->b)));
    case ExprKind::Div:
      return make_div(make_sub(make_mul(differentiate(e->a), e->b),
                               make_mul(e->a, differentiate(e->b))),
                      make_pow(e->b, 2));
    case ExprKind::Pow:
      return make_mul(make_mul(make_int(e->exponent),
                               make_pow(e->a, e->exponent - 1)),
                      differentiate(e->a));
    case ExprKind::Call: {
      ExprPtr inner = differentiate(e->a);
      switch (e->func) {
        case Func::Exp:
          return make_mul(make_call(Func::Exp, e->a), inner);
        case Func::Sin:
          return make_mul(make_call(Func::Cos, e->a), inner);
        case Func::Cos:
          return make_mul(make_neg(make_call(Func::Sin, e->a)), inner);
        case Func::Log:
          return make_div(inner, e->a);
      }
    }
  }
  throw std::logic_error("differentiate: corrupt AST");
}

// ---------------------------------------------------------------------------
// Printer.  Emits text that reparses to a structurally equal AST: each node
// is printed into the tightest grammar slot that can hold it, with
// parentheses whenever the child kind cannot legally occupy the slot.

namespace {

enum Slot { kBase, kFactor, kTerm, kExpr };

// Tightest slot a node can occupy without parentheses.
Slot natural_slot(const Expr& e) {
  switch (e.kind) {
    case ExprKind::Const:
    case ExprKind::Var:
    case ExprKind::Call:
      return kBase;
    case ExprKind::Pow:
      return kFactor;  // base '^' int is a factor production
    case ExprKind::Neg:
      return kFactor;
    case ExprKind::Mul:
    case ExprKind::Div:
      return kTerm;
    case ExprKind::Add:
    case ExprKind::Sub:
      return kExpr;
  }
  return kExpr;
}

std::string print_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s = buf;
  if (s.find('e') == std::string::npos && s.find('E') == std::string::npos)
    return s;
  // The grammar has no exponent notation; fall back to fixed point with
  // enough digits to round-trip, then trim trailing zeros.
  std::snprintf(buf, sizeof buf, "%.*f", 40, v);
  s = buf;
  std::size_t last = s.find_last_not_of('0');
  if (last != std::string::npos && s[last] == '.') --last;
  return s.substr(0, last + 1);
}

void print_node(const Expr& e, Slot slot, std::string& out);

void print_in(const Expr& e, Slot slot, std::string& out) {
  if (natural_slot(e) <= slot) {
    print_node(e, slot, out);
  } else {
    out += '(';
    print_node(e, kExpr, out);
    out += ')';
  }
}

void print_node(const Expr& e, Slot, std::string& out) {
  switch (e.kind) {
    case ExprKind::Const:
      if (e.value == cplx{0, 1}) {
        out += 'i';
      } else {
        out += print_real(e.value.real());
      }
      return;
    case ExprKind::Var:
      out += 'z';
      return;
    case ExprKind::Call:
      switch (e.func) {
        case Func::Exp: out += "exp("; break;
        case Func::Sin: out += "sin("; break;
        case Func::Cos: out += "cos("; break;
        case Func::Log: out += "log("; break;
      }
      print_in(*e.a, kExpr, out);
      out += ')';
      return;
    case ExprKind::Pow:
      print_in(*e.a, kBase, out);
      out += '^';
      out += std::to_string(e.exponent);
      return;
    case ExprKind::Neg:
      out += '-';
      // The negation sign belongs to the factor; its operand must fit in the
      // base-or-power slot below it.
      if (natural_slot(*e.a) <= kFactor && e.a->kind != ExprKind::Neg) {
        print_node(*e.a, kFactor, out);
      } else {
        out += '(';
        print_node(*e.a, kExpr, out);
        out += ')';
      }
      return;
    case ExprKind::Mul:
    case ExprKind::Div:
      print_in(*e.a, kTerm, out);
      out += e.kind == ExprKind::Mul ? '*' : '/';
      print_in(*e.b, kFactor, out);
      return;
    case ExprKind::Add:
    case ExprKind::Sub:
      print_in(*e.a, kExpr, out);
      out += e.kind == ExprKind::Add ? '+' : '-';
      print_in(*e.b, kTerm, out);
      return;
  }
}

}  // namespace

std::string pretty_print(const ExprPtr& e) {
  std::string out;
  print_in(*e, kExpr, out);
  return out;
}

bool structurally_equal(const ExprPtr& x, const ExprPtr& y) {
  if (x == y) return true;
  if (!x || !y) return false;
  if (x->kind != y->kind) return false;
  switch (x->kind) {
    case ExprKind::Const:
      return x->value == y->value;
    case ExprKind::Var:
      return true;
    case ExprKind::Neg:
      return structurally_equal(x->a, y->a);
    case ExprKind::Pow:
      return x->exponent == y->exponent && structurally_equal(x->a, y->a);
    case ExprKind::Call:
      return x->func == y->func && structurally_equal(x->a, y->a);
    default:
      return structurally_equal(x->a, y->a) && structurally_equal(x->b, y->b);
  }
}

}  // namespace isogeo
