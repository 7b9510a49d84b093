#include "kgsym/parse.hpp"

#include <cctype>
#include <map>

namespace kgsym {

namespace {

const std::map<std::string, Func>& function_table() {
    static const std::map<std::string, Func> table = {
        {"sin", Func::Sin},       {"cos", Func::Cos},   {"tan", Func::Tan},
        {"cot", Func::Cot},       {"sinh", Func::Sinh}, {"cosh", Func::Cosh},
        {"tanh", Func::Tanh},     {"coth", Func::Coth}, {"exp", Func::Exp},
        {"ln", Func::Ln},         {"arctan", Func::Arctan},
        {"sqrt", Func::Sqrt},     {"lambertW", Func::LambertW},
    };
    return table;
}

class Parser {
  public:
    explicit Parser(const std::string& text) : s_(text) {}

    Expr run() {
        skip_ws();
        Expr e = parse_expr();
        skip_ws();
        if (pos_ != s_.size()) fail("trailing input", "end of input or operator");
        return e;
    }

  private:
    const std::string& s_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& detail, const std::string& expected) {
        throw ParseError(pos_, expected, detail);
    }

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool peek(char c) {
        skip_ws();
        return pos_ < s_.size() && s_[pos_] == c;
    }

    bool accept(char c) {
        if (peek(c)) { ++pos_; return true; }
        return false;
    }

    void expect(char c, const std::string& what) {
        if (!accept(c)) fail("unexpected input", what);
    }

    Expr parse_expr() {
        std::vector<Expr> terms;
        terms.push_back(parse_term());
        while (true) {
            if (accept('+')) {
                terms.push_back(parse_term());
            } else if (accept('-')) {
                terms.push_back(Expr::product({Expr::integer(-1), parse_term()}));
            } else {
                break;
            }
        }
        if (terms.size() == 1) return terms[0];
        return Expr::sum(std::move(terms));
    }

    Expr parse_term() {
        std::vector<Expr> factors;
        factors.push_back(parse_unary());
        while (true) {
            if (accept('*')) {
                factors.push_back(parse_unary());
            } else if (accept('/')) {
                factors.push_back(Expr::pow(parse_unary(), Expr::integer(-1)));
            } else {
                break;
            }
        }
        if (factors.size() == 1) return factors[0];
        return Expr::product(std::move(factors));
    }

    Expr parse_unary() {
        if (accept('-')) return Expr::product({Expr::integer(-1), parse_unary()});
        return parse_pow();
    }

    Expr parse_pow() {
        Expr base = parse_atom();
        if (accept('^')) return Expr::pow(std::move(base), parse_unary());
        return base;
    }

    Expr parse_atom() {
        skip_ws();
        if (pos_ >= s_.size()) fail("unexpected end of input", "number, identifier or '('");
        char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c))) return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
        if (c == '(') {
            ++pos_;
            Expr e = parse_expr();
            expect(')', "')'");
            return e;
        }
        fail("unexpected character '" + std::string(1, c) + "'",
             "number, identifier or '('");
    }

    Expr parse_number() {
        std::size_t start = pos_;
        long long mantissa = 0;
        int digits = 0;
        int frac_digits = 0;
        auto push_digit = [&](char d) {
            if (digits >= 18) fail("number literal too long", "at most 18 digits");
            mantissa = mantissa * 10 + (d - '0');
            ++digits;
        };
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
            push_digit(s_[pos_++]);
        if (pos_ < s_.size() && s_[pos_] == '.') {
            ++pos_;
            if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_])))
                fail("missing digits after decimal point", "digit");
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
                push_digit(s_[pos_]);
                ++frac_digits;
                ++pos_;
            }
        }
        long long exp10 = 0;
        if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
            std::size_t save = pos_;
            ++pos_;
            bool neg = false;
            if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) {
                neg = s_[pos_] == '-';
                ++pos_;
            }
            if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
                while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
                    exp10 = exp10 * 10 + (s_[pos_] - '0');
                    if (exp10 > 18) fail("exponent too large", "exponent within +-18");
                    ++pos_;
                }
                if (neg) exp10 = -exp10;
            } else {
                // Not an exponent: 'e' belongs to the following identifier.
                pos_ = save;
            }
        }
        (void)start;
        long long net = exp10 - frac_digits;
        Rational r(mantissa, 1);
        while (net > 0) { r = r * Rational(10); --net; }
        while (net < 0) { r = r * Rational(1, 10); ++net; }
        return Expr::rational(r);
    }

    Expr parse_ident() {
        std::size_t start = pos_;
        while (pos_ < s_.size() &&
               (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
            ++pos_;
        std::string name = s_.substr(start, pos_ - start);
        if (peek('(')) {
            auto it = function_table().find(name);
            if (it == function_table().end()) {
                pos_ = start;
                fail("unknown function '" + name + "'", "a built-in function name");
            }
            ++pos_;  // '('
            Expr arg = parse_expr();
            expect(')', "')'");
            return Expr::call(it->second, std::move(arg));
        }
        return Expr::symbol(name);
    }
};

}  // namespace

Expr parse(const std::string& text) { return Parser(text).run(); }

}  // namespace kgsym
