#include "satolab/expr.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

namespace satolab::expr {

namespace {

struct Parser {
    const std::string& s;
    std::size_t pos = 0;
    int arity;

    void skip_ws() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    int peek() {
        skip_ws();
        return pos < s.size() ? s[pos] : -1;
    }
    bool accept(char c) {
        if (peek() == c) {
            ++pos;
            return true;
        }
        return false;
    }

    NodePtr make(NodeKind k) {
        auto n = std::make_shared<Node>();
        n->kind = k;
        return n;
    }

    NodePtr parse_expr() {
        NodePtr lhs = parse_term();
        while (true) {
            if (accept('+')) {
                auto n = std::make_shared<Node>();
                n->kind = NodeKind::Add;
                n->lhs = lhs;
                n->rhs = parse_term();
                lhs = n;
            } else if (accept('-')) {
                auto neg = std::make_shared<Node>();
                neg->kind = NodeKind::Neg;
                neg->lhs = parse_term();
                auto n = std::make_shared<Node>();
                n->kind = NodeKind::Add;
                n->lhs = lhs;
                n->rhs = neg;
                lhs = n;
            } else {
                return lhs;
            }
        }
    }

    NodePtr parse_term() {
        NodePtr lhs = parse_factor();
        while (accept('*')) {
            auto n = std::make_shared<Node>();
            n->kind = NodeKind::Mul;
            n->lhs = lhs;
            n->rhs = parse_factor();
            lhs = n;
        }
        return lhs;
    }

    int parse_digits() {
        skip_ws();
        std::size_t start = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos == start) throw SyntaxError("expected digits", start);
        return std::stoi(s.substr(start, pos - start));
    }

    NodePtr parse_factor() {
        if (accept('-')) {
            auto n = std::make_shared<Node>();
            n->kind = NodeKind::Neg;
            n->lhs = parse_factor();
            return n;
        }
        NodePtr base = parse_primary();
        while (accept('^')) {
            std::size_t at = pos;
            int e = parse_digits();
            if (e <= 0) throw SyntaxError("exponent must be positive", at);
            auto n = std::make_shared<Node>();
            n->kind = NodeKind::Pow;
            n->exponent = e;
            n->lhs = base;
            base = n;
        }
        return base;
    }

    NodePtr parse_primary() {
        int c = peek();
        if (c == '(') {
            ++pos;
            NodePtr inner = parse_expr();
            if (!accept(')')) throw SyntaxError("expected ')'", pos);
            return inner;
        }
        if (c == 'x') {
            std::size_t at = pos;
            ++pos;
            int idx = parse_digits();
            if (idx < 1 || idx > arity)
                throw ArityError("variable x" + std::to_string(idx) + " outside arity " + std::to_string(arity) +
                                 " (byte " + std::to_string(at) + ")");
            auto n = std::make_shared<Node>();
            n->kind = NodeKind::Var;
            n->index = idx;
            return n;
        }
        if (c >= '0' && c <= '9') {
            std::size_t start = pos;
            while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
            if (pos < s.size() && s[pos] == '.') {
                ++pos;
                while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
            }
            auto n = std::make_shared<Node>();
            n->kind = NodeKind::Const;
            n->value = std::stod(s.substr(start, pos - start));
            return n;
        }
        if (c == '.') {
            std::size_t start = pos;
            ++pos;
            std::size_t digs = pos;
            while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
            if (pos == digs) throw SyntaxError("malformed number", start);
            auto n = std::make_shared<Node>();
            n->kind = NodeKind::Const;
            n->value = std::stod(s.substr(start, pos - start));
            return n;
        }
        throw SyntaxError("expected number, variable or '('", pos);
    }
};

double eval_node(const NodePtr& n, const std::vector<double>& x) {
    switch (n->kind) {
        case NodeKind::Const:
            return n->value;
        case NodeKind::Var:
            return x[static_cast<std::size_t>(n->index - 1)];
        case NodeKind::Add:
            return eval_node(n->lhs, x) + eval_node(n->rhs, x);
        case NodeKind::Mul:
            return eval_node(n->lhs, x) * eval_node(n->rhs, x);
        case NodeKind::Neg:
            return -eval_node(n->lhs, x);
        case NodeKind::Pow: {
            double b = eval_node(n->lhs, x);
            double r = 1.0;
            for (int i = 0; i < n->exponent; ++i) r *= b;
            return r;
        }
    }
    return 0.0;
}

void print_node(const NodePtr& n, std::ostringstream& os) {
    switch (n->kind) {
        case NodeKind::Const: {
            os.precision(17);
            os << n->value;
            break;
        }
        case NodeKind::Var:
            os << "x" << n->index;
            break;
        case NodeKind::Add:
            os << "(";
            print_node(n->lhs, os);
            os << " + ";
            print_node(n->rhs, os);
            os << ")";
            break;
        case NodeKind::Mul:
            os << "(";
            print_node(n->lhs, os);
            os << " * ";
            print_node(n->rhs, os);
            os << ")";
            break;
        case NodeKind::Neg:
            os << "-";
            print_node(n->lhs, os);
            break;
        case NodeKind::Pow:
            os << "(";
            print_node(n->lhs, os);
            os << ")^" << n->exponent;
            break;
    }
}

}  // namespace

ExprAST parse_f_expr(const std::string& text, int arity) {
    Parser p{text, 0, arity};
    ExprAST ast;
    ast.arity = arity;
    ast.root = p.parse_expr();
    p.skip_ws();
    if (p.pos != text.size()) throw SyntaxError("trailing input", p.pos);
    return ast;
}

double ExprAST::eval(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) != arity) throw ArityMismatch("evaluation point arity");
    return eval_node(root, x);
}

std::string ExprAST::pretty() const {
    std::ostringstream os;
    print_node(root, os);
    return os.str();
}

bool structurally_equal(const NodePtr& a, const NodePtr& b) {
    if (!a || !b) return a == b;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case NodeKind::Const:
            return a->value == b->value;
        case NodeKind::Var:
            return a->index == b->index;
        case NodeKind::Pow:
            return a->exponent == b->exponent && structurally_equal(a->lhs, b->lhs);
        case NodeKind::Neg:
            return structurally_equal(a->lhs, b->lhs);
        case NodeKind::Add:
        case NodeKind::Mul:
            return structurally_equal(a->lhs, b->lhs) && structurally_equal(a->rhs, b->rhs);
    }
    return false;
}

}  // namespace satolab::expr
