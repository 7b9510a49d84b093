#ifndef KGSYM_EXPR_HPP
#define KGSYM_EXPR_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "kgsym/rational.hpp"

namespace kgsym {

/// Built-in scalar functions (each takes exactly one argument).
enum class Func {
    Sin, Cos, Tan, Cot, Sinh, Cosh, Tanh, Coth, Exp, Ln, Arctan, Sqrt, LambertW
};

const char* func_name(Func f);

/// Immutable symbolic expression tree. Handles are cheap to copy and share
/// structure; all operations build new trees.
///
/// Node kinds follow the minimal algebra: subtraction and division are
/// represented as sums/products with rational coefficients and negative
/// exponents. Raw factory functions (sum/product/pow/call) preserve the tree
/// exactly as given; `simplify` rewrites to the canonical form described in
/// expr.cpp. Arithmetic operators canonicalize as they build.
class Expr {
  public:
    enum class Kind { Rational, Float, Symbol, Sum, Product, Power, Call };

    Expr();  // rational zero

    // Atoms.
    static Expr rational(const Rational& r);
    static Expr integer(long long n);
    static Expr rational(long long num, long long den);
    static Expr real(double v);
    static Expr symbol(const std::string& name);

    // Raw structural nodes (no rewriting). Used by the parser and tests.
    static Expr sum(std::vector<Expr> kids);
    static Expr product(std::vector<Expr> kids);
    static Expr pow(Expr base, Expr exponent);
    static Expr call(Func f, Expr arg);

    Kind kind() const;
    const Rational& rat() const;
    double fval() const;
    const std::string& name() const;
    Func fn() const;
    const std::vector<Expr>& kids() const;

    bool is_rational() const { return kind() == Kind::Rational; }
    bool is_zero() const;
    bool is_one() const;
    bool is_integer() const;

    /// Structural equality (exact tree match).
    bool same_as(const Expr& o) const;

    /// Re-parseable text form.
    std::string str() const;

  private:
    struct Node;
    explicit Expr(std::shared_ptr<const Node> n) : n_(std::move(n)) {}
    std::shared_ptr<const Node> n_;
    friend int compare(const Expr& a, const Expr& b);
    friend class ExprBuilder;
};

/// Total term ordering used for canonical child ordering. Returns <0, 0, >0.
int compare(const Expr& a, const Expr& b);

struct ExprLess {
    bool operator()(const Expr& a, const Expr& b) const { return compare(a, b) < 0; }
};

/// Canonical form: flattened, constant-folded, like-terms collected, ordered
/// children, fixed rewrite set (x^0, x^1, exp/ln inverses, adjacent
/// sin^2+cos^2 and sinh^2-cosh^2 folds). Idempotent.
Expr simplify(const Expr& e);

/// Exact partial derivative with respect to a symbol; result canonical.
Expr differentiate(const Expr& e, const std::string& sym);

/// Capture-free replacement of a symbol, then simplify.
Expr substitute(const Expr& e, const std::string& sym, const Expr& replacement);

std::set<std::string> free_symbols(const Expr& e);

// Canonicalizing arithmetic. These are the workhorses for building formulas.
Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr pow(const Expr& base, const Expr& exponent);
Expr pow(const Expr& base, long long exponent);
Expr apply(Func f, const Expr& arg);

inline Expr sin(const Expr& e) { return apply(Func::Sin, e); }
inline Expr cos(const Expr& e) { return apply(Func::Cos, e); }
inline Expr tan(const Expr& e) { return apply(Func::Tan, e); }
inline Expr cot(const Expr& e) { return apply(Func::Cot, e); }
inline Expr sinh(const Expr& e) { return apply(Func::Sinh, e); }
inline Expr cosh(const Expr& e) { return apply(Func::Cosh, e); }
inline Expr tanh(const Expr& e) { return apply(Func::Tanh, e); }
inline Expr coth(const Expr& e) { return apply(Func::Coth, e); }
inline Expr exp(const Expr& e) { return apply(Func::Exp, e); }
inline Expr ln(const Expr& e) { return apply(Func::Ln, e); }
inline Expr arctan(const Expr& e) { return apply(Func::Arctan, e); }
inline Expr sqrt(const Expr& e) { return apply(Func::Sqrt, e); }
inline Expr lambert_w(const Expr& e) { return apply(Func::LambertW, e); }

/// Bindings for numeric evaluation. Ordered map keeps behaviour deterministic.
using Assignment = std::map<std::string, double>;

/// Raised when evaluation hits an unbound symbol or a domain violation
/// (ln of a non-positive value, sqrt of a negative, lambertW below -1/e, ...).
/// `offender` carries the text of the offending subexpression.
class EvalError : public std::runtime_error {
  public:
    EvalError(const std::string& msg, std::string offender)
        : std::runtime_error(msg + " in " + offender), offender_(std::move(offender)) {}
    const std::string& offender() const { return offender_; }

  private:
    std::string offender_;
};

double eval_at(const Expr& e, const Assignment& a);

/// Axis-aligned sampling box: symbol -> [lo, hi].
struct Box {
    std::map<std::string, std::pair<double, double>> ranges;
    void set(const std::string& s, double lo, double hi) { ranges[s] = {lo, hi}; }
    void merge(const Box& o) {
        for (const auto& kv : o.ranges) ranges[kv.first] = kv.second;
    }
};

struct ZeroTestOptions {
    int samples = 20;
    double tol = 1e-9;
    std::uint64_t seed = 42;
};

/// Max |eval| over `n` deterministic samples drawn from `box`. Samples that
/// hit a domain error are redrawn up to a retry cap, after which the error
/// propagates.
double max_abs_on_box(const Expr& e, const Box& box, int n, std::uint64_t seed);

/// True iff |eval| < tol at all sampled points.
bool is_zero_probabilistic(const Expr& e, const Box& box, int n, double tol,
                           std::uint64_t seed);
inline bool is_zero_probabilistic(const Expr& e, const Box& box,
                                  const ZeroTestOptions& opt) {
    return is_zero_probabilistic(e, box, opt.samples, opt.tol, opt.seed);
}

}  // namespace kgsym

#endif
