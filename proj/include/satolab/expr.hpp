#pragma once

#include <memory>
#include <string>
#include <vector>

#include "satolab/common.hpp"

namespace satolab::expr {

enum class NodeKind { Const, Var, Add, Mul, Neg, Pow };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
    NodeKind kind;
    double value = 0.0;    // Const
    int index = 0;         // Var, 1-based
    int exponent = 0;      // Pow
    NodePtr lhs, rhs;      // Add/Mul use both, Neg/Pow use lhs
};

struct ExprAST {
    NodePtr root;
    int arity = 0;

    double eval(const std::vector<double>& x) const;
    std::string pretty() const;
};

// Grammar: expr := term (('+'|'-') term)*; term := factor ('*' factor)*;
// factor := ['-'] primary ('^' digits)*; primary := number | 'x'digits | '(' expr ')'.
// Whitespace insensitive, left-associative, no implicit multiplication.
ExprAST parse_f_expr(const std::string& text, int arity);

bool structurally_equal(const NodePtr& a, const NodePtr& b);

}  // namespace satolab::expr
