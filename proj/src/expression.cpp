#include "maxreg/expression.hpp"

#include <cctype>
#include <cmath>
#include <numbers>

#include "maxreg/error.hpp"

namespace maxreg {

enum class Op { num, var, add, sub, mul, div, pow, neg, sin, cos, exp, log, abs, sign };

struct Expression::Node {
    Op op;
    double value = 0.0;
    char var = 0;
    std::shared_ptr<const Node> a, b;
};

namespace {

using NodeP = std::shared_ptr<const Expression::Node>;

NodeP num(double v) { return std::make_shared<Expression::Node>(Expression::Node{Op::num, v, 0, nullptr, nullptr}); }
NodeP var(char c) { return std::make_shared<Expression::Node>(Expression::Node{Op::var, 0.0, c, nullptr, nullptr}); }

bool is_num(const NodeP& n, double v) { return n->op == Op::num && n->value == v; }

NodeP mk(Op op, NodeP a, NodeP b = nullptr) {
    // light constant folding keeps derivatives readable
    if (a->op == Op::num && (!b || b->op == Op::num)) {
        const double x = a->value, y = b ? b->value : 0.0;
        switch (op) {
            case Op::add: return num(x + y);
            case Op::sub: return num(x - y);
            case Op::mul: return num(x * y);
            case Op::div: if (y != 0.0) return num(x / y); break;
            case Op::neg: return num(-x);
            default: break;
        }
    }
    switch (op) {
        case Op::add:
            if (is_num(a, 0)) return b;
            if (is_num(b, 0)) return a;
            break;
        case Op::sub:
            if (is_num(b, 0)) return a;
            if (is_num(a, 0)) return mk(Op::neg, b);
            break;
        case Op::mul:
            if (is_num(a, 0) || is_num(b, 0)) return num(0.0);
            if (is_num(a, 1)) return b;
            if (is_num(b, 1)) return a;
            break;
        case Op::div:
            if (is_num(a, 0)) return num(0.0);
            if (is_num(b, 1)) return a;
            break;
        case Op::pow:
            if (is_num(b, 0)) return num(1.0);
            if (is_num(b, 1)) return a;
            break;
        default: break;
    }
    return std::make_shared<Expression::Node>(Expression::Node{op, 0.0, 0, std::move(a), std::move(b)});
}

class Parser {
public:
    explicit Parser(const std::string& s) : s_(s) {}

    NodeP parse() {
        NodeP n = expr();
        skip();
        if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return n;
    }

private:
    const std::string& s_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& what) {
        throw ValidationError("expression '" + s_ + "' at column " + std::to_string(pos_ + 1) + ": " + what);
    }
    void skip() { while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_; }
    bool eat(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) { ++pos_; return true; }
        return false;
    }

    NodeP expr() {
        NodeP n = term();
        for (;;) {
            if (eat('+')) n = mk(Op::add, n, term());
            else if (eat('-')) n = mk(Op::sub, n, term());
            else return n;
        }
    }
    NodeP term() {
        NodeP n = unary();
        for (;;) {
            if (eat('*')) n = mk(Op::mul, n, unary());
            else if (eat('/')) n = mk(Op::div, n, unary());
            else return n;
        }
    }
    NodeP unary() {
        if (eat('-')) return mk(Op::neg, unary());
        if (eat('+')) return unary();
        return power();
    }
    NodeP power() {
        NodeP base = primary();
        if (eat('^')) return mk(Op::pow, base, unary());
        return base;
    }
    NodeP primary() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end of input");
        if (eat('(')) {
            NodeP n = expr();
            if (!eat(')')) fail("expected ')'");
            return n;
        }
        const char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t used = 0;
            double v;
            try {
                v = std::stod(s_.substr(pos_), &used);
            } catch (const std::exception&) {
                fail("bad number");
            }
            pos_ += used;
            return num(v);
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            const std::string id = s_.substr(start, pos_ - start);
            if (id == "t" || id == "x" || id == "u") return var(id[0]);
            if (id == "pi") return num(std::numbers::pi);
            Op f;
            if (id == "sin") f = Op::sin;
            else if (id == "cos") f = Op::cos;
            else if (id == "exp") f = Op::exp;
            else if (id == "log") f = Op::log;
            else if (id == "abs") f = Op::abs;
            else { pos_ = start; fail("unknown identifier '" + id + "'"); }
            if (!eat('(')) fail("expected '(' after " + id);
            NodeP arg = expr();
            if (!eat(')')) fail("expected ')'");
            return mk(f, arg);
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }
};

double eval_node(const Expression::Node& n, double t, double x, double u) {
    switch (n.op) {
        case Op::num: return n.value;
        case Op::var: return n.var == 't' ? t : n.var == 'x' ? x : u;
        case Op::add: return eval_node(*n.a, t, x, u) + eval_node(*n.b, t, x, u);
        case Op::sub: return eval_node(*n.a, t, x, u) - eval_node(*n.b, t, x, u);
        case Op::mul: return eval_node(*n.a, t, x, u) * eval_node(*n.b, t, x, u);
        case Op::div: return eval_node(*n.a, t, x, u) / eval_node(*n.b, t, x, u);
        case Op::pow: {
            const double b = eval_node(*n.a, t, x, u), e = eval_node(*n.b, t, x, u);
            return std::pow(b, e);
        }
        case Op::neg: return -eval_node(*n.a, t, x, u);
        case Op::sin: return std::sin(eval_node(*n.a, t, x, u));
        case Op::cos: return std::cos(eval_node(*n.a, t, x, u));
        case Op::exp: return std::exp(eval_node(*n.a, t, x, u));
        case Op::log: return std::log(eval_node(*n.a, t, x, u));
        case Op::abs: return std::abs(eval_node(*n.a, t, x, u));
        case Op::sign: {
            const double v = eval_node(*n.a, t, x, u);
            return double((v > 0) - (v < 0));
        }
    }
    return 0.0;
}

bool depends(const NodeP& n, char v) {
    if (!n) return false;
    if (n->op == Op::var) return n->var == v;
    return depends(n->a, v) || depends(n->b, v);
}

NodeP diff(const NodeP& n, char v) {
    if (!depends(n, v)) return num(0.0);
    const NodeP& a = n->a;
    const NodeP& b = n->b;
    switch (n->op) {
        case Op::num: return num(0.0);
        case Op::var: return num(n->var == v ? 1.0 : 0.0);
        case Op::add: return mk(Op::add, diff(a, v), diff(b, v));
        case Op::sub: return mk(Op::sub, diff(a, v), diff(b, v));
        case Op::mul: return mk(Op::add, mk(Op::mul, diff(a, v), b), mk(Op::mul, a, diff(b, v)));
        case Op::div:
            return mk(Op::div, mk(Op::sub, mk(Op::mul, diff(a, v), b), mk(Op::mul, a, diff(b, v))),
                      mk(Op::pow, b, num(2.0)));
        case Op::pow:
            if (!depends(b, v)) {
                // d(a^c) = c a^(c-1) a'
                return mk(Op::mul, mk(Op::mul, b, mk(Op::pow, a, mk(Op::sub, b, num(1.0)))), diff(a, v));
            } else {
                // a^b = exp(b log a)
                NodeP inner = mk(Op::add, mk(Op::mul, diff(b, v), mk(Op::log, a)),
                                 mk(Op::div, mk(Op::mul, b, diff(a, v)), a));
                return mk(Op::mul, n, inner);
            }
        case Op::neg: return mk(Op::neg, diff(a, v));
        case Op::sin: return mk(Op::mul, mk(Op::cos, a), diff(a, v));
        case Op::cos: return mk(Op::neg, mk(Op::mul, mk(Op::sin, a), diff(a, v)));
        case Op::exp: return mk(Op::mul, n, diff(a, v));
        case Op::log: return mk(Op::div, diff(a, v), a);
        case Op::abs: return mk(Op::mul, mk(Op::sign, a), diff(a, v));
        case Op::sign: return num(0.0);
    }
    return num(0.0);
}

std::string to_str(const NodeP& n) {
    auto bin = [&](const char* s) { return "(" + to_str(n->a) + s + to_str(n->b) + ")"; };
    auto fn = [&](const char* s) { return std::string(s) + "(" + to_str(n->a) + ")"; };
    switch (n->op) {
        case Op::num: {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.17g", n->value);
            return buf;
        }
        case Op::var: return std::string(1, n->var);
        case Op::add: return bin(" + ");
        case Op::sub: return bin(" - ");
        case Op::mul: return bin("*");
        case Op::div: return bin("/");
        case Op::pow: return bin("^");
        case Op::neg: return "(-" + to_str(n->a) + ")";
        case Op::sin: return fn("sin");
        case Op::cos: return fn("cos");
        case Op::exp: return fn("exp");
        case Op::log: return fn("log");
        case Op::abs: return fn("abs");
        case Op::sign: return fn("sign");
    }
    return "?";
}

}  // namespace

Expression::Expression(std::shared_ptr<const Node> n, std::string src) : root_(std::move(n)), src_(std::move(src)) {}

Expression Expression::parse(const std::string& src) {
    Parser p(src);
    return Expression(p.parse(), src);
}

Expression Expression::constant(double c) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", c);
    return Expression(num(c), buf);
}

double Expression::eval(double t, double x, double u) const { return eval_node(*root_, t, x, u); }

Expression Expression::derivative(char v) const {
    if (v != 't' && v != 'x' && v != 'u') throw ValidationError("Expression::derivative: variable must be t, x or u");
    NodeP d = diff(root_, v);
    return Expression(d, to_str(d));
}

bool Expression::depends_on(char v) const { return depends(root_, v); }

std::string Expression::str() const { return to_str(root_); }

}  // namespace maxreg
