#include "doctest.h"
#include "satolab/expr.hpp"

using namespace satolab;
using namespace satolab::expr;

TEST_SUITE_BEGIN("expr");

TEST_CASE("basic parses and evaluation") {
    ExprAST e1 = parse_f_expr("x1 + x2", 2);
    CHECK(e1.root->kind == NodeKind::Add);
    CHECK(e1.root->lhs->kind == NodeKind::Var);
    CHECK(e1.root->lhs->index == 1);
    CHECK(e1.root->rhs->index == 2);
    CHECK(e1.eval({0.25, 0.5}) == doctest::Approx(0.75));

    ExprAST e2 = parse_f_expr("0.5*x1 - 2*x2^3", 2);
    CHECK(e2.eval({1.0, 1.0}) == doctest::Approx(-1.5));
    CHECK(e2.eval({0.0, 0.5}) == doctest::Approx(-0.25));

    ExprAST e3 = parse_f_expr("(x1 + x2)*x1", 2);
    CHECK(e3.eval({2.0, 3.0}) == doctest::Approx(10.0));

    // exponentiation is left-associative on the factor
    ExprAST e4 = parse_f_expr("x1^2^3", 1);
    CHECK(e4.eval({2.0}) == doctest::Approx(64.0));

    // unary minus
    ExprAST e5 = parse_f_expr("-x1 + 1*x2", 2);
    CHECK(e5.eval({0.5, 0.25}) == doctest::Approx(-0.25));
}

TEST_CASE("errors carry positions") {
    CHECK_THROWS_AS(parse_f_expr("x3", 2), ArityError);
    CHECK_THROWS_AS(parse_f_expr("x0", 2), ArityError);
    CHECK_THROWS_AS(parse_f_expr("x1 + ", 2), SyntaxError);
    CHECK_THROWS_AS(parse_f_expr("(x1", 1), SyntaxError);
    CHECK_THROWS_AS(parse_f_expr("x1 x2", 2), SyntaxError);
    CHECK_THROWS_AS(parse_f_expr("x1^0", 1), SyntaxError);
    try {
        parse_f_expr("x1 + @", 2);
        CHECK(false);
    } catch (const SyntaxError& e) {
        CHECK(e.offset == 5);
    }
}

TEST_CASE("whitespace insensitivity") {
    ExprAST a = parse_f_expr("x1+x2*x1", 2);
    ExprAST b = parse_f_expr("  x1 +  x2 * x1 ", 2);
    CHECK(structurally_equal(a.root, b.root));
}

TEST_CASE("pretty print round-trips") {
    for (const char* text : {"x1 + x2", "0.5*x1 - 2*x2^3", "(x1 + x2)*(x1 - x2)", "x1*x2*x3", "-x1^2 + 0.125",
                             "x1^2^3 - x2"}) {
        int arity = 3;
        ExprAST ast = parse_f_expr(text, arity);
        ExprAST again = parse_f_expr(ast.pretty(), arity);
        CHECK(structurally_equal(ast.root, again.root));
        // and evaluation agrees
        std::vector<double> x{0.37, -0.61, 0.93};
        CHECK(ast.eval(x) == doctest::Approx(again.eval(x)).epsilon(1e-15));
    }
}

TEST_SUITE_END();
