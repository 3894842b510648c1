#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace mveg {

// Arithmetic expression over the coordinates of a single strategy point.
//
// Grammar (binary operators left associative except `^`, which binds right
// and tighter than unary minus, so -2^2 = -(2^2) and 2^-1 is accepted):
//   expr    := term (('+'|'-') term)*
//   term    := unary (('*'|'/') unary)*
//   unary   := ('-'|'+')* power
//   power   := primary ('^' unary)?
//   primary := number | name | name '(' expr (',' expr)* ')' | '(' expr ')'
//
// Names resolve to the variables q0..q{dim-1} (coordinates of the point being
// evaluated), the constants pi and e, or one of the functions exp, log, sin,
// cos, sqrt, abs, tanh (one argument) and min, max, pow (two arguments).
class Expression {
public:
    // Parses `text` with variables q0..q{dim-1} in scope. Throws ConfigError
    // on any syntax problem, unknown name, or wrong argument count; the
    // message includes the character position.
    static Expression parse(const std::string& text, std::size_t dim);

    // Evaluates at one point. `coords` must have the dimension given at parse
    // time (DimensionError otherwise). Non-finite results propagate as-is so
    // callers can report which point misbehaved.
    double eval(const std::vector<double>& coords) const;

    std::size_t dim() const { return dim_; }

    // The variables that actually occur, e.g. to warn about constant
    // densities on multi-point spaces. Sorted, duplicate-free.
    const std::vector<std::size_t>& used_variables() const { return used_; }

    enum class Op : unsigned char {
        constant,
        variable,
        add,
        sub,
        mul,
        div,
        pow,
        negate,
        call_exp,
        call_log,
        call_sin,
        call_cos,
        call_sqrt,
        call_abs,
        call_tanh,
        call_min,
        call_max,
    };

    struct Node {
        Op op;
        double value = 0.0;     // constant
        std::size_t index = 0;  // variable
        std::size_t lhs = 0;
        std::size_t rhs = 0;
    };

private:
    Expression() = default;

    double eval_node(std::size_t at, const std::vector<double>& coords) const;

    std::vector<Node> nodes_;
    std::size_t root_ = 0;
    std::size_t dim_ = 0;
    std::vector<std::size_t> used_;
};

}  // namespace mveg
