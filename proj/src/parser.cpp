#include "sdq/parser.hpp"

#include <cctype>

namespace sdq {

namespace {

using Kind = ExpressionAST::Kind;

class Parser {
public:
    explicit Parser(std::string_view s) : s_(s) {}

    ExpressionAST run() {
        ExpressionAST e = expr();
        skip();
        if (pos_ != s_.size()) fail(std::string("unexpected '") + s_[pos_] + "'");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError("parse: " + msg, pos_); }

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    static ExpressionAST node(Kind k, std::size_t at, ExpressionAST l, std::optional<ExpressionAST> r = {}) {
        ExpressionAST n;
        n.kind = k;
        n.offset = at;
        n.lhs = std::make_unique<ExpressionAST>(std::move(l));
        if (r) n.rhs = std::make_unique<ExpressionAST>(std::move(*r));
        return n;
    }

    ExpressionAST expr() {
        ExpressionAST e = term();
        while (true) {
            skip();
            std::size_t at = pos_;
            if (accept('+'))
                e = node(Kind::Add, at, std::move(e), term());
            else if (accept('-'))
                e = node(Kind::Sub, at, std::move(e), term());
            else
                return e;
        }
    }

    ExpressionAST term() {
        ExpressionAST e = unary();
        while (true) {
            skip();
            std::size_t at = pos_;
            if (accept('*'))
                e = node(Kind::Mul, at, std::move(e), unary());
            else if (accept('/'))
                e = node(Kind::Div, at, std::move(e), unary());
            else
                return e;
        }
    }

    ExpressionAST unary() {
        skip();
        std::size_t at = pos_;
        if (accept('-')) return node(Kind::Neg, at, unary());
        if (accept('+')) return unary();
        return power();
    }

    ExpressionAST power() {
        ExpressionAST base = primary();
        skip();
        std::size_t at = pos_;
        if (accept('^')) return node(Kind::Pow, at, std::move(base), unary());
        return base;
    }

    ExpressionAST primary() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end of input");
        const std::size_t at = pos_;
        const char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            ExpressionAST e = expr();
            if (!accept(')')) fail("expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t end = pos_;
            while (end < s_.size() && std::isdigit(static_cast<unsigned char>(s_[end]))) ++end;
            if (end < s_.size() && (s_[end] == '.' || s_[end] == 'e' || s_[end] == 'E')) {
                pos_ = end;
                fail("decimal literal; write exact numbers as p/q");
            }
            ExpressionAST n;
            n.kind = Kind::Number;
            n.offset = at;
            n.number = Rational(mpz_class(std::string(s_.substr(pos_, end - pos_))));
            pos_ = end;
            return n;
        }
        if (c == '.') fail("decimal literal; write exact numbers as p/q");
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t end = pos_ + 1;
            while (end < s_.size() && std::isdigit(static_cast<unsigned char>(s_[end]))) ++end;
            std::string_view word = s_.substr(pos_, end - pos_);
            if (end < s_.size() && std::isalpha(static_cast<unsigned char>(s_[end]))) {
                fail("unknown variable '" + std::string(word) + s_[end] + "'");
            }
            ExpressionAST n;
            n.offset = at;
            if (word == "i") {
                n.kind = Kind::ImaginaryUnit;
            } else if (word.size() >= 2 && std::string_view("xpzabI").find(c) != std::string_view::npos) {
                n.kind = Kind::Variable;
                n.letter = c;
                n.index = std::stoi(std::string(word.substr(1)));
                if (n.index < 1) fail("unknown variable '" + std::string(word) + "'");
            } else {
                fail("unknown variable '" + std::string(word) + "'");
            }
            pos_ = end;
            return n;
        }
        fail(std::string("unexpected '") + c + "'");
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

Basis basis_of(char letter) {
    switch (letter) {
        case 'x':
        case 'p': return Basis::Ambient;
        case 'z': return Basis::Chart;
        case 'a':
        case 'b': return Basis::Ladder;
        default: return Basis::Action;
    }
}

void scan(const ExpressionAST& e, std::optional<Basis>& basis, int& max_index, char& max_letter) {
    if (e.kind == Kind::Variable) {
        Basis b = basis_of(e.letter);
        if (basis && *basis != b)
            throw ParseError("parse: variable " + std::string(1, e.letter) + std::to_string(e.index) +
                                 " does not belong to the " + basis_name(*basis) + " basis",
                             e.offset);
        basis = b;
        if (e.index > max_index) {
            max_index = e.index;
            max_letter = e.letter;
        }
    }
    if (e.lhs) scan(*e.lhs, basis, max_index, max_letter);
    if (e.rhs) scan(*e.rhs, basis, max_index, max_letter);
}

PhasePoly eval(const ExpressionAST& e, int M, Basis basis) {
    switch (e.kind) {
        case Kind::Number: return PhasePoly::constant(M, basis, GaussianRational(e.number));
        case Kind::ImaginaryUnit: return PhasePoly::constant(M, basis, GaussianRational::i());
        case Kind::Variable: {
            int var = e.index - 1;
            bool second_half = e.letter == 'p' || e.letter == 'b';
            int limit = basis == Basis::Chart ? 2 * M : M;
            if (var >= limit)
                throw ParseError("parse: unknown variable " + std::string(1, e.letter) + std::to_string(e.index) +
                                     " for M = " + std::to_string(M),
                                 e.offset);
            return PhasePoly::variable(M, basis, second_half ? var + M : var);
        }
        case Kind::Add: return eval(*e.lhs, M, basis) + eval(*e.rhs, M, basis);
        case Kind::Sub: return eval(*e.lhs, M, basis) - eval(*e.rhs, M, basis);
        case Kind::Mul: return eval(*e.lhs, M, basis) * eval(*e.rhs, M, basis);
        case Kind::Neg: return -eval(*e.lhs, M, basis);
        case Kind::Div: {
            PhasePoly d = eval(*e.rhs, M, basis);
            if (d.degree() > 0) throw ParseError("parse: division by a non-constant", e.offset);
            GaussianRational c = d.constant_term();
            if (c.is_zero()) throw ParseError("parse: division by zero", e.offset);
            return eval(*e.lhs, M, basis) * (GaussianRational(1) / c);
        }
        case Kind::Pow: {
            PhasePoly k = eval(*e.rhs, M, basis);
            if (k.degree() > 0) throw ParseError("parse: exponent must be a constant", e.offset);
            GaussianRational c = k.constant_term();
            if (!c.is_real()) throw ParseError("parse: complex power", e.offset);
            if (c.re().get_den() != 1) throw ParseError("parse: fractional power", e.offset);
            if (sgn(c.re()) < 0) throw ParseError("parse: negative power", e.offset);
            if (c.re() > 4096) throw ParseError("parse: power too large", e.offset);
            return eval(*e.lhs, M, basis).pow(static_cast<unsigned>(c.re().get_num().get_ui()));
        }
    }
    throw Error("parse: corrupt expression tree");
}

}  // namespace

ExpressionAST parse_expression(std::string_view text) { return Parser(text).run(); }

PhasePoly to_polynomial(const ExpressionAST& ast, std::optional<int> M, std::optional<Basis> basis) {
    std::optional<Basis> found = basis;
    int max_index = 0;
    char max_letter = 0;
    scan(ast, found, max_index, max_letter);
    Basis b = found.value_or(Basis::Ambient);
    int m = M.value_or(0);
    if (!M) m = std::max(1, b == Basis::Chart ? (max_index + 1) / 2 : max_index);
    if (m < 1) throw Error("parse: M must be positive");
    return eval(ast, m, b);
}

PhasePoly parse_polynomial(std::string_view text, std::optional<int> M, std::optional<Basis> basis) {
    return to_polynomial(parse_expression(text), M, basis);
}

Rational parse_rational(std::string_view text) {
    PhasePoly p = parse_polynomial(text, 1, Basis::Ambient);
    if (p.degree() > 0) throw ParseError("parse: expected a number", 0);
    GaussianRational c = p.constant_term();
    if (!c.is_real()) throw ParseError("parse: expected a real number", 0);
    return c.re();
}

}  // namespace sdq
