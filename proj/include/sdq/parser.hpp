#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "sdq/phase_poly.hpp"

namespace sdq {

struct ParseError : Error {
    std::size_t offset;
    ParseError(const std::string& what, std::size_t offset)
        : Error(what + " at byte " + std::to_string(offset)), offset(offset) {}
};

/// Infix expression over rational literals, the imaginary unit i, and variables x1.., p1..,
/// z1.., a1.., b1.., I1..; operators + - * / ^ and parentheses.
struct ExpressionAST {
    enum class Kind { Number, ImaginaryUnit, Variable, Add, Sub, Mul, Div, Neg, Pow };
    Kind kind = Kind::Number;
    std::size_t offset = 0;
    Rational number;   // Number
    char letter = 0;   // Variable
    int index = 0;     // Variable, 1-based
    std::unique_ptr<ExpressionAST> lhs, rhs;  // rhs unused by Neg
};

ExpressionAST parse_expression(std::string_view text);

/// Evaluates the tree exactly. The basis follows from the variable letters unless given; M is
/// inferred from the largest index unless given. Mixed bases, out-of-range indices, division by
/// a non-constant, and powers that are not non-negative integers are errors.
PhasePoly to_polynomial(const ExpressionAST& ast, std::optional<int> M = {}, std::optional<Basis> basis = {});

PhasePoly parse_polynomial(std::string_view text, std::optional<int> M = {}, std::optional<Basis> basis = {});

/// A single exact number such as "3", "-2/7", "1/2+1/3". Decimal literals are rejected.
Rational parse_rational(std::string_view text);

}  // namespace sdq
