#include "radopt/expr.hpp"

#include "radopt/errors.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <utility>

namespace radopt {

namespace {

struct Num final : Expr {
    double v;
    explicit Num(double x) : v(x) {}
    double eval(Point) const override { return v; }
    ExprPtr derivative(int) const override { return std::make_shared<Num>(0.0); }
    std::string to_string() const override {
        char buf[32];
        snprintf(buf, sizeof buf, "%g", v);
        return buf;
    }
};

struct Var final : Expr {
    int axis; // 0 = x, 1 = y
    explicit Var(int a) : axis(a) {}
    double eval(Point p) const override { return axis == 0 ? p.x : p.y; }
    ExprPtr derivative(int a) const override { return std::make_shared<Num>(a == axis ? 1.0 : 0.0); }
    std::string to_string() const override { return axis == 0 ? "x" : "y"; }
};

struct Neg final : Expr {
    ExprPtr e;
    explicit Neg(ExprPtr x) : e(std::move(x)) {}
    double eval(Point p) const override { return -e->eval(p); }
    ExprPtr derivative(int a) const override { return std::make_shared<Neg>(e->derivative(a)); }
    std::string to_string() const override { return "(-" + e->to_string() + ")"; }
};

struct Bin final : Expr {
    char op;
    ExprPtr l, r;
    Bin(char o, ExprPtr a, ExprPtr b) : op(o), l(std::move(a)), r(std::move(b)) {}
    double eval(Point p) const override {
        double a = l->eval(p), b = r->eval(p);
        switch (op) {
            case '+': return a + b;
            case '-': return a - b;
            case '*': return a * b;
            default: return a / b;
        }
    }
    ExprPtr derivative(int axis) const override {
        ExprPtr dl = l->derivative(axis), dr = r->derivative(axis);
        switch (op) {
            case '+': return std::make_shared<Bin>('+', dl, dr);
            case '-': return std::make_shared<Bin>('-', dl, dr);
            case '*':
                return std::make_shared<Bin>('+', std::make_shared<Bin>('*', dl, r),
                                             std::make_shared<Bin>('*', l, dr));
            default: {
                // (l/r)' = (l'r - lr') / r^2
                ExprPtr num = std::make_shared<Bin>('-', std::make_shared<Bin>('*', dl, r),
                                                    std::make_shared<Bin>('*', l, dr));
                ExprPtr den = std::make_shared<Bin>('*', r, r);
                return std::make_shared<Bin>('/', num, den);
            }
        }
    }
    std::string to_string() const override {
        return "(" + l->to_string() + op + r->to_string() + ")";
    }
};

struct Call final : Expr {
    std::string fn;
    ExprPtr arg;
    Call(std::string f, ExprPtr a) : fn(std::move(f)), arg(std::move(a)) {}
    double eval(Point p) const override {
        double a = arg->eval(p);
        if (fn == "sin") return std::sin(a);
        if (fn == "cos") return std::cos(a);
        return std::exp(a);
    }
    ExprPtr derivative(int axis) const override {
        ExprPtr da = arg->derivative(axis);
        ExprPtr outer;
        if (fn == "sin")
            outer = std::make_shared<Call>("cos", arg);
        else if (fn == "cos")
            outer = std::make_shared<Neg>(std::make_shared<Call>("sin", arg));
        else
            outer = std::make_shared<Call>("exp", arg);
        return std::make_shared<Bin>('*', outer, da);
    }
    std::string to_string() const override { return fn + "(" + arg->to_string() + ")"; }
};

class Parser {
public:
    explicit Parser(const std::string& s) : text_(s) {}

    ExprPtr parse() {
        ExprPtr e = expr();
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected trailing input");
        return e;
    }

private:
    const std::string& text_;
    size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw ConfigError("expression \"" + text_ + "\": " + what + " at position " +
                          std::to_string(pos_ + 1));
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    ExprPtr expr() {
        ExprPtr e = term();
        for (;;) {
            if (accept('+'))
                e = std::make_shared<Bin>('+', e, term());
            else if (accept('-'))
                e = std::make_shared<Bin>('-', e, term());
            else
                return e;
        }
    }

    ExprPtr term() {
        ExprPtr e = factor();
        for (;;) {
            if (accept('*'))
                e = std::make_shared<Bin>('*', e, factor());
            else if (accept('/'))
                e = std::make_shared<Bin>('/', e, factor());
            else
                return e;
        }
    }

    ExprPtr factor() {
        if (accept('-')) return std::make_shared<Neg>(factor());
        if (accept('+')) return factor();
        return primary();
    }

    ExprPtr primary() {
        skip_ws();
        if (pos_ >= text_.size()) fail("unexpected end of expression");
        char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            ExprPtr e = expr();
            if (!accept(')')) fail("missing ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c))) return word();
        fail(std::string("unexpected character '") + c + "'");
    }

    ExprPtr number() {
        size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.' ||
                text_[pos_] == 'e' || text_[pos_] == 'E' ||
                ((text_[pos_] == '+' || text_[pos_] == '-') && pos_ > start &&
                 (text_[pos_ - 1] == 'e' || text_[pos_ - 1] == 'E'))))
            ++pos_;
        try {
            size_t used = 0;
            double v = std::stod(text_.substr(start, pos_ - start), &used);
            if (used != pos_ - start) fail("malformed number");
            return std::make_shared<Num>(v);
        } catch (const std::exception&) {
            pos_ = start;
            fail("malformed number");
        }
    }

    ExprPtr word() {
        size_t start = pos_;
        while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        std::string w = text_.substr(start, pos_ - start);
        if (w == "x") return std::make_shared<Var>(0);
        if (w == "y") return std::make_shared<Var>(1);
        if (w == "pi") return std::make_shared<Num>(3.14159265358979323846);
        if (w == "sin" || w == "cos" || w == "exp") {
            if (!accept('(')) fail("'" + w + "' needs a parenthesized argument");
            ExprPtr a = expr();
            if (!accept(')')) fail("missing ')'");
            return std::make_shared<Call>(w, a);
        }
        pos_ = start;
        fail("unknown identifier '" + w + "'");
    }
};

} // namespace

ExprPtr parse_expression(const std::string& text) {
    return Parser(text).parse();
}

} // namespace radopt
