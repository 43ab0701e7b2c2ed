#pragma once

// Minimal holomorphic expression language over the variable z.
//
// Grammar (exact):
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := '-'? base ('^' intLiteral)?
//   base   := 'z' | 'i' | number | '(' expr ')' | ident '(' expr ')'
//   ident  := exp | sin | cos | log
// Numbers are digit sequences with an optional fraction part; no exponent
// notation.  Exponents are (possibly negative) integer literals.  Conjugation
// is deliberately not expressible: everything in the language is holomorphic
// away from poles of '/' and '^' with negative exponents.  log uses the
// principal branch; branch-cut crossings are the caller's responsibility.
//
// ASTs are immutable and shared; pretty_print emits text that reparses to a
// structurally equal AST.

#include <complex>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

namespace isogeo {

using cplx = std::complex<double>;

enum class ExprKind { Const, Var, Neg, Add, Sub, Mul, Div, Pow, Call };
enum class Func { Exp, Sin, Cos, Log };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  ExprKind kind = ExprKind::Const;
  cplx value{};       // Const: either nonnegative real or the unit i
  ExprPtr a, b;       // operands; only a for Neg / Pow / Call
  int exponent = 0;   // Pow
  Func func = Func::Exp;  // Call
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t offset, std::string expected);
  std::size_t offset() const { return offset_; }
  const std::string& expected() const { return expected_; }

 private:
  std::size_t offset_;
  std::string expected_;
};

class PoleError : public std::runtime_error {
 public:
  explicit PoleError(cplx at);
  cplx at() const { return at_; }

 private:
  cplx at_;
};

ExprPtr parse(std::string_view text);
cplx eval(const Expr& e, cplx z);
inline cplx eval(const ExprPtr& e, cplx z) { return eval(*e, z); }
ExprPtr differentiate(const ExprPtr& e);
std::string pretty_print(const ExprPtr& e);
bool structurally_equal(const ExprPtr& x, const ExprPtr& y);

// Node builders with light folding (0/1 identities, nonnegative-real constant
// arithmetic).  The folding preserves the constant invariant noted in Expr.
ExprPtr make_const(double nonneg_re);
ExprPtr make_imag_unit();
ExprPtr make_var();
ExprPtr make_neg(ExprPtr a);
ExprPtr make_add(ExprPtr a, ExprPtr b);
ExprPtr make_sub(ExprPtr a, ExprPtr b);
ExprPtr make_mul(ExprPtr a, ExprPtr b);
ExprPtr make_div(ExprPtr a, ExprPtr b);
ExprPtr make_pow(ExprPtr a, int n);
ExprPtr make_call(Func f, ExprPtr a);

// Signed integer constant (wraps negatives in a Neg node).
ExprPtr make_int(long long n);

// Evaluation that treats removable singularities gracefully: on a PoleError
// the value is recovered from small-circle means (the mean-value property);
// circles that reveal magnitude growth as the radius shrinks indicate a
// genuine pole and rethrow.
cplx eval_rescued(const ExprPtr& e, cplx z);

}  // namespace isogeo
