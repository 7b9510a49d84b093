#include "kgsym/expr.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "kgsym/lambert.hpp"
#include "kgsym/rng.hpp"

namespace kgsym {

const char* func_name(Func f) {
    switch (f) {
        case Func::Sin: return "sin";
        case Func::Cos: return "cos";
        case Func::Tan: return "tan";
        case Func::Cot: return "cot";
        case Func::Sinh: return "sinh";
        case Func::Cosh: return "cosh";
        case Func::Tanh: return "tanh";
        case Func::Coth: return "coth";
        case Func::Exp: return "exp";
        case Func::Ln: return "ln";
        case Func::Arctan: return "arctan";
        case Func::Sqrt: return "sqrt";
        case Func::LambertW: return "lambertW";
    }
    return "?";
}

struct Expr::Node {
    Kind kind;
    Rational rat;
    double fval = 0.0;
    std::string name;
    Func fn = Func::Sin;
    std::vector<Expr> kids;
};

class ExprBuilder {
  public:
    static Expr from_node(Expr::Node n) {
        return Expr(std::make_shared<const Expr::Node>(std::move(n)));
    }
};

Expr::Expr() {
    Node n;
    n.kind = Kind::Rational;
    n.rat = Rational(0);
    n_ = std::make_shared<const Node>(std::move(n));
}

Expr Expr::rational(const Rational& r) {
    Node n;
    n.kind = Kind::Rational;
    n.rat = r;
    return ExprBuilder::from_node(std::move(n));
}
Expr Expr::integer(long long v) { return rational(Rational(v)); }
Expr Expr::rational(long long num, long long den) { return rational(Rational(num, den)); }
Expr Expr::real(double v) {
    Node n;
    n.kind = Kind::Float;
    n.fval = v;
    return ExprBuilder::from_node(std::move(n));
}
Expr Expr::symbol(const std::string& name) {
    Node n;
    n.kind = Kind::Symbol;
    n.name = name;
    return ExprBuilder::from_node(std::move(n));
}
Expr Expr::sum(std::vector<Expr> kids) {
    Node n;
    n.kind = Kind::Sum;
    n.kids = std::move(kids);
    return ExprBuilder::from_node(std::move(n));
}
Expr Expr::product(std::vector<Expr> kids) {
    Node n;
    n.kind = Kind::Product;
    n.kids = std::move(kids);
    return ExprBuilder::from_node(std::move(n));
}
Expr Expr::pow(Expr base, Expr exponent) {
    Node n;
    n.kind = Kind::Power;
    n.kids = {std::move(base), std::move(exponent)};
    return ExprBuilder::from_node(std::move(n));
}
Expr Expr::call(Func f, Expr arg) {
    Node n;
    n.kind = Kind::Call;
    n.fn = f;
    n.kids = {std::move(arg)};
    return ExprBuilder::from_node(std::move(n));
}

Expr::Kind Expr::kind() const { return n_->kind; }
const Rational& Expr::rat() const { return n_->rat; }
double Expr::fval() const { return n_->fval; }
const std::string& Expr::name() const { return n_->name; }
Func Expr::fn() const { return n_->fn; }
const std::vector<Expr>& Expr::kids() const { return n_->kids; }

bool Expr::is_zero() const { return kind() == Kind::Rational && rat().is_zero(); }
bool Expr::is_one() const { return kind() == Kind::Rational && rat().is_one(); }
bool Expr::is_integer() const { return kind() == Kind::Rational && rat().is_integer(); }

bool Expr::same_as(const Expr& o) const { return compare(*this, o) == 0; }

// ---------------------------------------------------------------------------
// Ordering
// ---------------------------------------------------------------------------

namespace {

int kind_rank(Expr::Kind k) {
    switch (k) {
        case Expr::Kind::Rational: return 0;
        case Expr::Kind::Float: return 1;
        case Expr::Kind::Symbol: return 2;
        case Expr::Kind::Call: return 3;
        case Expr::Kind::Power: return 4;
        case Expr::Kind::Product: return 5;
        case Expr::Kind::Sum: return 6;
    }
    return 7;
}

}  // namespace

int compare(const Expr& a, const Expr& b) {
    if (a.n_ == b.n_) return 0;
    int ra = kind_rank(a.kind()), rb = kind_rank(b.kind());
    if (ra != rb) return ra < rb ? -1 : 1;
    switch (a.kind()) {
        case Expr::Kind::Rational: {
            if (a.rat() == b.rat()) return 0;
            return a.rat() < b.rat() ? -1 : 1;
        }
        case Expr::Kind::Float: {
            if (a.fval() == b.fval()) return 0;
            return a.fval() < b.fval() ? -1 : 1;
        }
        case Expr::Kind::Symbol:
            return a.name().compare(b.name());
        case Expr::Kind::Call: {
            if (a.fn() != b.fn()) return static_cast<int>(a.fn()) < static_cast<int>(b.fn()) ? -1 : 1;
            return compare(a.kids()[0], b.kids()[0]);
        }
        default: {
            const auto& ka = a.kids();
            const auto& kb = b.kids();
            size_t m = std::min(ka.size(), kb.size());
            for (size_t i = 0; i < m; ++i) {
                int c = compare(ka[i], kb[i]);
                if (c != 0) return c;
            }
            if (ka.size() != kb.size()) return ka.size() < kb.size() ? -1 : 1;
            return 0;
        }
    }
}

// ---------------------------------------------------------------------------
// Canonicalization
// ---------------------------------------------------------------------------

namespace {

Expr canon(const Expr& e);
Expr canon_sum(std::vector<Expr> kids);
Expr canon_product(std::vector<Expr> kids);
Expr canon_pow(const Expr& base, const Expr& exponent);
Expr canon_call(Func f, const Expr& arg);

bool is_rat(const Expr& e) { return e.kind() == Expr::Kind::Rational; }
bool is_float(const Expr& e) { return e.kind() == Expr::Kind::Float; }

// Numeric coefficient that may stay exact or degrade to double.
struct Coef {
    Rational r{1};
    double f = 1.0;
    bool exact = true;

    double value() const { return exact ? r.to_double() : f; }
    void mul_rat(const Rational& q) {
        if (exact) r = r * q; else f *= q.to_double();
    }
    void mul_f(double v) {
        if (exact) { f = r.to_double(); exact = false; }
        f *= v;
    }
    void add(const Coef& o) {
        if (exact && o.exact) { r = r + o.r; return; }
        double v = value() + o.value();
        exact = false;
        f = v;
    }
    bool is_zero() const { return exact ? r.is_zero() : f == 0.0; }
    bool is_one() const { return exact ? r.is_one() : f == 1.0; }
    bool same(const Coef& o) const {
        if (exact != o.exact) return false;
        return exact ? r == o.r : f == o.f;
    }
    Coef negated() const {
        Coef c = *this;
        if (c.exact) c.r = -c.r; else c.f = -c.f;
        return c;
    }
    Expr expr() const { return exact ? Expr::rational(r) : Expr::real(f); }
};

Coef zero_coef() { Coef c; c.r = Rational(0); return c; }

// Exact q-th integer root if it exists.
bool exact_root(long long v, long long q, long long* out) {
    if (v < 0) {
        if (q % 2 == 0) return false;
        long long r;
        if (!exact_root(-v, q, &r)) return false;
        *out = -r;
        return true;
    }
    if (v == 0 || v == 1) { *out = v; return true; }
    long long r = static_cast<long long>(std::llround(std::pow(static_cast<double>(v), 1.0 / static_cast<double>(q))));
    for (long long c = std::max(1LL, r - 2); c <= r + 2; ++c) {
        __int128 p = 1;
        for (long long i = 0; i < q; ++i) {
            p *= c;
            if (p > (__int128)INT64_MAX) break;
        }
        if (p == v) { *out = c; return true; }
    }
    return false;
}

bool rat_int_pow(const Rational& b, long long e, Rational* out) {
    // e >= 0
    __int128 n = 1, d = 1;
    for (long long i = 0; i < e; ++i) {
        n *= b.num;
        d *= b.den;
        if (n > (__int128)INT64_MAX || n < (__int128)INT64_MIN || d > (__int128)INT64_MAX)
            return false;
    }
    *out = Rational(static_cast<long long>(n), static_cast<long long>(d));
    return true;
}

// Try to fold rational^rational exactly. Returns false if not representable.
bool fold_rat_pow(const Rational& b, const Rational& e, Rational* out) {
    if (b.is_zero()) {
        if (e.num > 0) { *out = Rational(0); return true; }
        return false;
    }
    if (b.is_one()) { *out = Rational(1); return true; }
    Rational base = b;
    long long en = e.num, ed = e.den;
    if (en < 0) {
        base = Rational(b.den, b.num);
        en = -en;
    }
    if (ed != 1) {
        if (ed > 6) return false;
        long long rn, rd;
        if (!exact_root(base.num, ed, &rn)) return false;
        if (!exact_root(base.den, ed, &rd)) return false;
        base = Rational(rn, rd);
    }
    if (en > 62) return false;
    return rat_int_pow(base, en, out);
}

const long long kMaxFoldExp = 16;

Expr canon_pow(const Expr& base, const Expr& exponent) {
    if (is_rat(exponent)) {
        const Rational& e = exponent.rat();
        if (e.is_zero()) return Expr::integer(1);
        if (e.is_one()) return base;
        if (is_rat(base)) {
            Rational out;
            if (fold_rat_pow(base.rat(), e, &out)) return Expr::rational(out);
        }
        if (is_float(base)) {
            double v = std::pow(base.fval(), e.to_double());
            if (std::isfinite(v)) return Expr::real(v);
        }
        if (base.kind() == Expr::Kind::Power && e.is_integer()) {
            // (b^a)^n -> b^(a n), safe for integer n.
            return canon_pow(base.kids()[0],
                             canon_product({base.kids()[1], exponent}));
        }
        if (base.kind() == Expr::Kind::Product && e.is_integer()) {
            std::vector<Expr> kids;
            kids.reserve(base.kids().size());
            for (const auto& k : base.kids()) kids.push_back(canon_pow(k, exponent));
            return canon_product(std::move(kids));
        }
        // 0^negative stays a power node; evaluation reports the domain error.
    }
    if (is_float(exponent) && (is_rat(base) || is_float(base))) {
        double bv = is_rat(base) ? base.rat().to_double() : base.fval();
        double v = std::pow(bv, exponent.fval());
        if (std::isfinite(v)) return Expr::real(v);
    }
    if (base.is_one()) return base;
    return Expr::pow(base, exponent);
}

Expr canon_call(Func f, const Expr& arg) {
    if (f == Func::Sqrt) return canon_pow(arg, Expr::rational(1, 2));
    if (arg.is_zero()) {
        switch (f) {
            case Func::Sin: case Func::Tan: case Func::Sinh: case Func::Tanh:
            case Func::Arctan: case Func::LambertW:
                return Expr::integer(0);
            case Func::Cos: case Func::Cosh: case Func::Exp:
                return Expr::integer(1);
            default: break;
        }
    }
    if (f == Func::Ln && arg.is_one()) return Expr::integer(0);
    if (f == Func::Exp) {
        if (arg.kind() == Expr::Kind::Call && arg.fn() == Func::Ln)
            return arg.kids()[0];
        // exp(r * ln(x)) -> x^r for rational r.
        if (arg.kind() == Expr::Kind::Product && arg.kids().size() == 2 &&
            is_rat(arg.kids()[0]) && arg.kids()[1].kind() == Expr::Kind::Call &&
            arg.kids()[1].fn() == Func::Ln) {
            return canon_pow(arg.kids()[1].kids()[0], arg.kids()[0]);
        }
    }
    if (f == Func::Ln && arg.kind() == Expr::Kind::Call && arg.fn() == Func::Exp)
        return arg.kids()[0];
    return Expr::call(f, arg);
}

// Split a canonical child of a sum into (coefficient, key).
// Key is the product of non-constant factors (or rational 1 for constants).
void split_term(const Expr& t, Coef* coef, Expr* key) {
    Coef c;
    if (is_rat(t)) { c.r = t.rat(); *coef = c; *key = Expr::integer(1); return; }
    if (is_float(t)) { c.mul_f(t.fval()); *coef = c; *key = Expr::integer(1); return; }
    if (t.kind() == Expr::Kind::Product) {
        std::vector<Expr> rest;
        for (const auto& k : t.kids()) {
            if (is_rat(k)) c.mul_rat(k.rat());
            else if (is_float(k)) c.mul_f(k.fval());
            else rest.push_back(k);
        }
        *coef = c;
        if (rest.empty()) { *key = Expr::integer(1); return; }
        if (rest.size() == 1) { *key = rest[0]; return; }
        *key = Expr::product(std::move(rest));  // children already canonical+sorted
        return;
    }
    *coef = c;
    *key = t;
}

Expr term_from(const Coef& c, const Expr& key) {
    if (key.is_one()) return c.expr();
    if (c.is_one()) return key;
    std::vector<Expr> kids;
    kids.push_back(c.expr());
    if (key.kind() == Expr::Kind::Product) {
        for (const auto& k : key.kids()) kids.push_back(k);
    } else {
        kids.push_back(key);
    }
    return Expr::product(std::move(kids));
}

// Remove one factor structurally equal to `f` from product key `key`.
// Returns true on success.
bool key_without_factor(const Expr& key, const Expr& f, Expr* out) {
    if (key.same_as(f)) { *out = Expr::integer(1); return true; }
    if (key.kind() != Expr::Kind::Product) return false;
    std::vector<Expr> rest;
    bool removed = false;
    for (const auto& k : key.kids()) {
        if (!removed && k.same_as(f)) { removed = true; continue; }
        rest.push_back(k);
    }
    if (!removed) return false;
    if (rest.empty()) *out = Expr::integer(1);
    else if (rest.size() == 1) *out = rest[0];
    else *out = Expr::product(std::move(rest));
    return true;
}

// Find a factor of the form fn(A)^2 inside a term key; reports A.
bool find_squared_call(const Expr& key, Func fn, Expr* factor, Expr* arg) {
    auto match = [&](const Expr& k) {
        return k.kind() == Expr::Kind::Power && k.kids()[1].same_as(Expr::integer(2)) &&
               k.kids()[0].kind() == Expr::Kind::Call && k.kids()[0].fn() == fn;
    };
    if (match(key)) { *factor = key; *arg = key.kids()[0].kids()[0]; return true; }
    if (key.kind() == Expr::Kind::Product) {
        for (const auto& k : key.kids()) {
            if (match(k)) { *factor = k; *arg = k.kids()[0].kids()[0]; return true; }
        }
    }
    return false;
}

using TermMap = std::map<Expr, Coef, ExprLess>;

void add_term(TermMap& m, const Expr& key, const Coef& c) {
    auto it = m.find(key);
    if (it == m.end()) m.emplace(key, c);
    else it->second.add(c);
}

// sin(A)^2 + cos(A)^2 -> 1 and sinh(A)^2 - cosh(A)^2 -> -1 for terms that are
// syntactically adjacent after collection (same residual factors, matching
// coefficients).
void pythagoras_pass(TermMap& terms) {
    bool changed = true;
    while (changed) {
        changed = false;
        for (auto it = terms.begin(); it != terms.end() && !changed; ++it) {
            if (it->second.is_zero()) continue;
            Expr factor, arg;
            if (find_squared_call(it->first, Func::Sin, &factor, &arg)) {
                Expr partner_factor = canon_pow(Expr::call(Func::Cos, arg), Expr::integer(2));
                Expr residual;
                if (!key_without_factor(it->first, factor, &residual)) continue;
                Expr partner_key = canon_product({residual, partner_factor});
                auto pit = terms.find(partner_key);
                if (pit != terms.end() && pit->second.same(it->second) && !pit->second.is_zero()) {
                    Coef c = it->second;
                    Expr own_key = it->first;
                    terms.erase(partner_key);
                    terms.erase(own_key);
                    add_term(terms, canon(residual), c);
                    changed = true;
                    break;
                }
            }
            if (find_squared_call(it->first, Func::Sinh, &factor, &arg)) {
                Expr partner_factor = canon_pow(Expr::call(Func::Cosh, arg), Expr::integer(2));
                Expr residual;
                if (!key_without_factor(it->first, factor, &residual)) continue;
                Expr partner_key = canon_product({residual, partner_factor});
                auto pit = terms.find(partner_key);
                if (pit != terms.end() && pit->second.same(it->second.negated()) &&
                    !pit->second.is_zero()) {
                    Coef c = it->second.negated();
                    Expr own_key = it->first;
                    terms.erase(partner_key);
                    terms.erase(own_key);
                    add_term(terms, canon(residual), c);
                    changed = true;
                    break;
                }
            }
        }
    }
}

Expr canon_sum(std::vector<Expr> kids) {
    TermMap terms;
    Coef constant = zero_coef();
    std::vector<Expr> stack(kids.rbegin(), kids.rend());
    while (!stack.empty()) {
        Expr k = stack.back();
        stack.pop_back();
        if (k.kind() == Expr::Kind::Sum) {
            for (auto it = k.kids().rbegin(); it != k.kids().rend(); ++it) stack.push_back(*it);
            continue;
        }
        Coef c;
        Expr key;
        split_term(k, &c, &key);
        if (key.is_one()) constant.add(c);
        else add_term(terms, key, c);
    }
    pythagoras_pass(terms);
    std::vector<Expr> out;
    // Fold any constants produced by the pythagoras pass.
    auto cit = terms.find(Expr::integer(1));
    if (cit != terms.end()) {
        constant.add(cit->second);
        terms.erase(cit);
    }
    if (!constant.is_zero()) out.push_back(constant.expr());
    for (const auto& kv : terms) {
        if (kv.second.is_zero()) continue;
        out.push_back(term_from(kv.second, kv.first));
    }
    std::sort(out.begin(), out.end(), [](const Expr& a, const Expr& b) { return compare(a, b) < 0; });
    if (out.empty()) return Expr::integer(0);
    if (out.size() == 1) return out[0];
    return Expr::sum(std::move(out));
}

Expr canon_product(std::vector<Expr> kids) {
    for (int round = 0; round < 4; ++round) {
        Coef coef;
        std::vector<std::pair<Expr, std::vector<Expr>>> bases;  // base -> exponent terms
        auto add_factor = [&](const Expr& b, const Expr& e) {
            for (auto& be : bases) {
                if (be.first.same_as(b)) { be.second.push_back(e); return; }
            }
            bases.push_back({b, {e}});
        };
        std::vector<Expr> stack(kids.rbegin(), kids.rend());
        while (!stack.empty()) {
            Expr k = stack.back();
            stack.pop_back();
            if (k.kind() == Expr::Kind::Product) {
                for (auto it = k.kids().rbegin(); it != k.kids().rend(); ++it) stack.push_back(*it);
                continue;
            }
            if (is_rat(k)) { coef.mul_rat(k.rat()); continue; }
            if (is_float(k)) { coef.mul_f(k.fval()); continue; }
            if (k.kind() == Expr::Kind::Power) { add_factor(k.kids()[0], k.kids()[1]); continue; }
            add_factor(k, Expr::integer(1));
        }
        if (coef.is_zero()) return Expr::integer(0);
        std::vector<Expr> out;
        bool needs_rerun = false;
        for (auto& be : bases) {
            Expr etot = be.second.size() == 1 ? be.second[0] : canon_sum(be.second);
            Expr f = canon_pow(be.first, etot);
            if (is_rat(f)) { coef.mul_rat(f.rat()); continue; }
            if (is_float(f)) { coef.mul_f(f.fval()); continue; }
            if (f.kind() == Expr::Kind::Product) { needs_rerun = true; }
            out.push_back(f);
        }
        if (needs_rerun) {
            if (!coef.is_one()) out.push_back(coef.expr());
            kids = std::move(out);
            continue;
        }
        std::sort(out.begin(), out.end(),
                  [](const Expr& a, const Expr& b) { return compare(a, b) < 0; });
        if (out.empty()) return coef.expr();
        // A bare numeric multiple of a sum distributes, so that term
        // collection can cancel across it.
        if (out.size() == 1 && out[0].kind() == Expr::Kind::Sum && !coef.is_one()) {
            std::vector<Expr> terms;
            terms.reserve(out[0].kids().size());
            for (const auto& t : out[0].kids())
                terms.push_back(canon_product({coef.expr(), t}));
            return canon_sum(std::move(terms));
        }
        if (!coef.is_one()) out.insert(out.begin(), coef.expr());
        if (out.size() == 1) return out[0];
        return Expr::product(std::move(out));
    }
    throw std::logic_error("canon_product failed to stabilize");
}

Expr canon(const Expr& e) {
    switch (e.kind()) {
        case Expr::Kind::Rational:
        case Expr::Kind::Float:
        case Expr::Kind::Symbol:
            return e;
        case Expr::Kind::Call:
            return canon_call(e.fn(), canon(e.kids()[0]));
        case Expr::Kind::Power:
            return canon_pow(canon(e.kids()[0]), canon(e.kids()[1]));
        case Expr::Kind::Product: {
            std::vector<Expr> kids;
            kids.reserve(e.kids().size());
            for (const auto& k : e.kids()) kids.push_back(canon(k));
            return canon_product(std::move(kids));
        }
        case Expr::Kind::Sum: {
            std::vector<Expr> kids;
            kids.reserve(e.kids().size());
            for (const auto& k : e.kids()) kids.push_back(canon(k));
            return canon_sum(std::move(kids));
        }
    }
    throw std::logic_error("bad expression kind");
}

}  // namespace

Expr simplify(const Expr& e) { return canon(e); }

// ---------------------------------------------------------------------------
// Canonicalizing arithmetic
// ---------------------------------------------------------------------------

Expr operator+(const Expr& a, const Expr& b) { return canon_sum({a, b}); }
Expr operator-(const Expr& a, const Expr& b) {
    return canon_sum({a, canon_product({Expr::integer(-1), b})});
}
Expr operator*(const Expr& a, const Expr& b) { return canon_product({a, b}); }
Expr operator/(const Expr& a, const Expr& b) {
    return canon_product({a, canon_pow(b, Expr::integer(-1))});
}
Expr operator-(const Expr& a) { return canon_product({Expr::integer(-1), a}); }
Expr pow(const Expr& base, const Expr& exponent) { return canon_pow(base, exponent); }
Expr pow(const Expr& base, long long exponent) { return canon_pow(base, Expr::integer(exponent)); }
Expr apply(Func f, const Expr& arg) { return canon_call(f, arg); }

// ---------------------------------------------------------------------------
// Differentiation
// ---------------------------------------------------------------------------

namespace {

Expr diff(const Expr& e, const std::string& s) {
    switch (e.kind()) {
        case Expr::Kind::Rational:
        case Expr::Kind::Float:
            return Expr::integer(0);
        case Expr::Kind::Symbol:
            return e.name() == s ? Expr::integer(1) : Expr::integer(0);
        case Expr::Kind::Sum: {
            std::vector<Expr> out;
            for (const auto& k : e.kids()) out.push_back(diff(k, s));
            return canon_sum(std::move(out));
        }
        case Expr::Kind::Product: {
            std::vector<Expr> out;
            const auto& ks = e.kids();
            for (size_t i = 0; i < ks.size(); ++i) {
                Expr di = diff(ks[i], s);
                if (di.is_zero()) continue;
                std::vector<Expr> factors;
                factors.push_back(di);
                for (size_t j = 0; j < ks.size(); ++j)
                    if (j != i) factors.push_back(ks[j]);
                out.push_back(canon_product(std::move(factors)));
            }
            return canon_sum(std::move(out));
        }
        case Expr::Kind::Power: {
            const Expr& b = e.kids()[0];
            const Expr& x = e.kids()[1];
            Expr db = diff(b, s);
            Expr dx = diff(x, s);
            if (dx.is_zero()) {
                // x * b^(x-1) * db
                return x * canon_pow(b, canon_sum({x, Expr::integer(-1)})) * db;
            }
            Expr bx = canon_pow(b, x);
            if (db.is_zero()) return bx * apply(Func::Ln, b) * dx;
            return bx * (dx * apply(Func::Ln, b) + x * db / b);
        }
        case Expr::Kind::Call: {
            const Expr& a = e.kids()[0];
            Expr da = diff(a, s);
            if (da.is_zero()) return Expr::integer(0);
            Expr d;
            switch (e.fn()) {
                case Func::Sin: d = apply(Func::Cos, a); break;
                case Func::Cos: d = -apply(Func::Sin, a); break;
                case Func::Tan: d = Expr::integer(1) + pow(apply(Func::Tan, a), 2); break;
                case Func::Cot: d = -(Expr::integer(1) + pow(apply(Func::Cot, a), 2)); break;
                case Func::Sinh: d = apply(Func::Cosh, a); break;
                case Func::Cosh: d = apply(Func::Sinh, a); break;
                case Func::Tanh: d = Expr::integer(1) - pow(apply(Func::Tanh, a), 2); break;
                case Func::Coth: d = Expr::integer(1) - pow(apply(Func::Coth, a), 2); break;
                case Func::Exp: d = apply(Func::Exp, a); break;
                case Func::Ln: d = pow(a, -1); break;
                case Func::Arctan: d = pow(Expr::integer(1) + pow(a, 2), -1); break;
                case Func::Sqrt:
                    d = Expr::rational(1, 2) * canon_pow(a, Expr::rational(-1, 2));
                    break;
                case Func::LambertW: {
                    Expr w = apply(Func::LambertW, a);
                    d = w / (a * (Expr::integer(1) + w));
                    break;
                }
            }
            return d * da;
        }
    }
    throw std::logic_error("bad expression kind");
}

}  // namespace

Expr differentiate(const Expr& e, const std::string& sym) { return diff(canon(e), sym); }

// ---------------------------------------------------------------------------
// Substitution
// ---------------------------------------------------------------------------

namespace {

Expr subst_raw(const Expr& e, const std::string& s, const Expr& r) {
    switch (e.kind()) {
        case Expr::Kind::Rational:
        case Expr::Kind::Float:
            return e;
        case Expr::Kind::Symbol:
            return e.name() == s ? r : e;
        case Expr::Kind::Call:
            return Expr::call(e.fn(), subst_raw(e.kids()[0], s, r));
        case Expr::Kind::Power:
            return Expr::pow(subst_raw(e.kids()[0], s, r), subst_raw(e.kids()[1], s, r));
        case Expr::Kind::Product: {
            std::vector<Expr> kids;
            for (const auto& k : e.kids()) kids.push_back(subst_raw(k, s, r));
            return Expr::product(std::move(kids));
        }
        case Expr::Kind::Sum: {
            std::vector<Expr> kids;
            for (const auto& k : e.kids()) kids.push_back(subst_raw(k, s, r));
            return Expr::sum(std::move(kids));
        }
    }
    throw std::logic_error("bad expression kind");
}

}  // namespace

Expr substitute(const Expr& e, const std::string& sym, const Expr& replacement) {
    return canon(subst_raw(e, sym, replacement));
}

std::set<std::string> free_symbols(const Expr& e) {
    std::set<std::string> out;
    std::vector<Expr> stack{e};
    while (!stack.empty()) {
        Expr x = stack.back();
        stack.pop_back();
        if (x.kind() == Expr::Kind::Symbol) out.insert(x.name());
        for (const auto& k : x.kids()) stack.push_back(k);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

double eval_at(const Expr& e, const Assignment& a) {
    switch (e.kind()) {
        case Expr::Kind::Rational:
            return e.rat().to_double();
        case Expr::Kind::Float:
            return e.fval();
        case Expr::Kind::Symbol: {
            auto it = a.find(e.name());
            if (it == a.end()) throw EvalError("unbound symbol '" + e.name() + "'", e.str());
            return it->second;
        }
        case Expr::Kind::Sum: {
            double v = 0;
            for (const auto& k : e.kids()) v += eval_at(k, a);
            return v;
        }
        case Expr::Kind::Product: {
            double v = 1;
            for (const auto& k : e.kids()) v *= eval_at(k, a);
            return v;
        }
        case Expr::Kind::Power: {
            double b = eval_at(e.kids()[0], a);
            double x = eval_at(e.kids()[1], a);
            if (b == 0.0 && x < 0.0) throw EvalError("zero raised to negative power", e.str());
            if (b < 0.0) {
                // Negative base only defined for integer exponents.
                double xi = std::round(x);
                if (std::abs(x - xi) > 1e-12)
                    throw EvalError("negative base with non-integer exponent", e.str());
                return std::pow(b, xi);
            }
            return std::pow(b, x);
        }
        case Expr::Kind::Call: {
            double v = eval_at(e.kids()[0], a);
            switch (e.fn()) {
                case Func::Sin: return std::sin(v);
                case Func::Cos: return std::cos(v);
                case Func::Tan: return std::tan(v);
                case Func::Cot: {
                    double s = std::sin(v);
                    if (s == 0.0) throw EvalError("cot at multiple of pi", e.str());
                    return std::cos(v) / s;
                }
                case Func::Sinh: return std::sinh(v);
                case Func::Cosh: return std::cosh(v);
                case Func::Tanh: return std::tanh(v);
                case Func::Coth: {
                    double s = std::sinh(v);
                    if (s == 0.0) throw EvalError("coth at zero", e.str());
                    return std::cosh(v) / s;
                }
                case Func::Exp: return std::exp(v);
                case Func::Ln:
                    if (v <= 0.0) throw EvalError("ln of non-positive value", e.str());
                    return std::log(v);
                case Func::Arctan: return std::atan(v);
                case Func::Sqrt:
                    if (v < 0.0) throw EvalError("sqrt of negative value", e.str());
                    return std::sqrt(v);
                case Func::LambertW:
                    if (v < -std::exp(-1.0)) throw EvalError("lambertW below -1/e", e.str());
                    return lambert_w(v);
            }
            throw std::logic_error("bad function");
        }
    }
    throw std::logic_error("bad expression kind");
}

// ---------------------------------------------------------------------------
// Probabilistic zero test
// ---------------------------------------------------------------------------

double max_abs_on_box(const Expr& e, const Box& box, int n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("sample count must be >= 1");
    auto syms = free_symbols(e);
    for (const auto& s : syms) {
        if (box.ranges.find(s) == box.ranges.end())
            throw std::invalid_argument("no sampling range for symbol '" + s + "'");
    }
    SeededRng rng(seed);
    const int retry_cap = 50 * n;
    int retries = 0;
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        Assignment a;
        for (const auto& s : syms) {
            auto r = box.ranges.at(s);
            a[s] = rng.uniform(r.first, r.second);
        }
        try {
            double v = std::abs(eval_at(e, a));
            if (v > worst) worst = v;
        } catch (const EvalError&) {
            if (++retries > retry_cap) throw;
            --i;
        }
    }
    return worst;
}

bool is_zero_probabilistic(const Expr& e, const Box& box, int n, double tol,
                           std::uint64_t seed) {
    return max_abs_on_box(e, box, n, seed) < tol;
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

namespace {

// Precedence levels: sum 1, product 2, power 3, atom 4.
void print_expr(std::ostringstream& os, const Expr& e, int parent_prec);

void print_float(std::ostringstream& os, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    os << buf;
}

bool starts_negative(const Expr& e) {
    if (e.kind() == Expr::Kind::Rational) return e.rat().num < 0;
    if (e.kind() == Expr::Kind::Float) return e.fval() < 0;
    if (e.kind() == Expr::Kind::Product && !e.kids().empty())
        return starts_negative(e.kids()[0]);
    return false;
}

Expr negate_head(const Expr& e) {
    if (e.kind() == Expr::Kind::Rational) return Expr::rational(-e.rat());
    if (e.kind() == Expr::Kind::Float) return Expr::real(-e.fval());
    if (e.kind() == Expr::Kind::Product) {
        std::vector<Expr> kids = e.kids();
        kids[0] = negate_head(kids[0]);
        if (kids[0].is_one() && kids.size() > 1) kids.erase(kids.begin());
        if (kids.size() == 1) return kids[0];
        return Expr::product(std::move(kids));
    }
    return Expr::product({Expr::integer(-1), e});
}

void print_expr(std::ostringstream& os, const Expr& e, int parent_prec) {
    switch (e.kind()) {
        case Expr::Kind::Rational: {
            bool wrap = (e.rat().num < 0 || !e.rat().is_integer()) && parent_prec >= 2;
            if (wrap) os << "(";
            os << e.rat().str();
            if (wrap) os << ")";
            return;
        }
        case Expr::Kind::Float: {
            bool wrap = e.fval() < 0 && parent_prec >= 2;
            if (wrap) os << "(";
            print_float(os, e.fval());
            if (wrap) os << ")";
            return;
        }
        case Expr::Kind::Symbol:
            os << e.name();
            return;
        case Expr::Kind::Call:
            os << func_name(e.fn()) << "(";
            print_expr(os, e.kids()[0], 0);
            os << ")";
            return;
        case Expr::Kind::Power: {
            if (parent_prec > 3) os << "(";
            print_expr(os, e.kids()[0], 4);
            os << "^";
            const Expr& x = e.kids()[1];
            if (x.kind() == Expr::Kind::Symbol ||
                (x.kind() == Expr::Kind::Rational && x.rat().num >= 0 && x.rat().is_integer())) {
                print_expr(os, x, 4);
            } else {
                os << "(";
                print_expr(os, x, 0);
                os << ")";
            }
            if (parent_prec > 3) os << ")";
            return;
        }
        case Expr::Kind::Product: {
            if (parent_prec > 2) os << "(";
            bool first = true;
            for (const auto& k : e.kids()) {
                if (!first) os << "*";
                print_expr(os, k, 3);
                first = false;
            }
            if (parent_prec > 2) os << ")";
            return;
        }
        case Expr::Kind::Sum: {
            if (parent_prec > 1) os << "(";
            bool first = true;
            for (const auto& k : e.kids()) {
                if (!first) {
                    if (starts_negative(k)) {
                        os << " - ";
                        print_expr(os, negate_head(k), 2);
                        first = false;
                        continue;
                    }
                    os << " + ";
                }
                print_expr(os, k, 2);
                first = false;
            }
            if (parent_prec > 1) os << ")";
            return;
        }
    }
}

}  // namespace

std::string Expr::str() const {
    std::ostringstream os;
    print_expr(os, *this, 0);
    return os.str();
}

}  // namespace kgsym
