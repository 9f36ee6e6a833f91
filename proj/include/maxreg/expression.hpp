#pragma once

#include <memory>
#include <string>
#include <vector>

namespace maxreg {

/// Minimal arithmetic expressions over the variables t, x, u.
///
/// Grammar: numbers, identifiers t x u pi, binary + - * / ^ (right assoc), unary minus,
/// parentheses, and the functions sin cos exp log abs. Differentiation is symbolic.
class Expression {
public:
    struct Node;

    static Expression parse(const std::string& src);
    static Expression constant(double c);

    double eval(double t, double x, double u = 0.0) const;
    /// d/dvar, var one of 't', 'x', 'u'.
    Expression derivative(char var) const;
    bool depends_on(char var) const;
    std::string str() const;
    const std::string& source() const { return src_; }

private:
    explicit Expression(std::shared_ptr<const Node> n, std::string src);
    std::shared_ptr<const Node> root_;
    std::string src_;
};

}  // namespace maxreg
