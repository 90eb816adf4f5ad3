#ifndef RADOPT_EXPR_HPP
#define RADOPT_EXPR_HPP

#include "radopt/grid.hpp"

#include <memory>
#include <string>

namespace radopt {

// Arithmetic expressions over x, y and constants with +, -, *, /, sin, cos,
// exp and the named constant pi. Scenario files describe velocity fields,
// diffusivities and reaction rates with these.
class Expr {
public:
    virtual ~Expr() = default;
    virtual double eval(Point p) const = 0;
    // Symbolic partial derivative; axis 0 = x, 1 = y.
    virtual std::shared_ptr<Expr> derivative(int axis) const = 0;
    virtual std::string to_string() const = 0;
};

using ExprPtr = std::shared_ptr<Expr>;

// Throws ConfigError with a character-position anchor on syntax errors.
ExprPtr parse_expression(const std::string& text);

} // namespace radopt

#endif
