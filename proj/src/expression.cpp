#include "mveg/expression.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <map>

#include "mveg/errors.hpp"

namespace mveg {

namespace {

struct Token {
    enum class Kind { number, name, symbol, end };
    Kind kind;
    double number = 0.0;
    std::string text;
    std::size_t pos = 0;
};

class Lexer {
public:
    explicit Lexer(const std::string& text) : text_(text) { advance(); }

    const Token& peek() const { return current_; }

    Token take() {
        Token t = current_;
        advance();
        return t;
    }

private:
    void advance() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        current_.pos = pos_;
        if (pos_ >= text_.size()) {
            current_.kind = Token::Kind::end;
            current_.text.clear();
            return;
        }
        char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const char* start = text_.c_str() + pos_;
            char* end = nullptr;
            double value = std::strtod(start, &end);
            if (end == start)
                throw ConfigError("expression: malformed number at position " + std::to_string(pos_));
            current_.kind = Token::Kind::number;
            current_.number = value;
            current_.text.assign(start, static_cast<std::size_t>(end - start));
            pos_ += static_cast<std::size_t>(end - start);
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                ++pos_;
            current_.kind = Token::Kind::name;
            current_.text = text_.substr(start, pos_ - start);
            return;
        }
        if (std::string("+-*/^(),").find(c) != std::string::npos) {
            current_.kind = Token::Kind::symbol;
            current_.text = std::string(1, c);
            ++pos_;
            return;
        }
        throw ConfigError(std::string("expression: unexpected character '") + c + "' at position " +
                          std::to_string(pos_));
    }

    const std::string& text_;
    std::size_t pos_ = 0;
    Token current_;
};

}  // namespace

class ExpressionParser {
public:
    ExpressionParser(const std::string& text, std::size_t dim, std::vector<Expression::Node>& nodes,
                     std::vector<std::size_t>& used)
        : lexer_(text), dim_(dim), nodes_(nodes), used_(used) {}

    std::size_t run() {
        std::size_t root = parse_expr();
        const Token& t = lexer_.peek();
        if (t.kind != Token::Kind::end)
            throw ConfigError("expression: unexpected trailing input '" + t.text + "' at position " +
                              std::to_string(t.pos));
        return root;
    }

private:
    using Node = Expression::Node;
    using Op = Expression::Op;

    std::size_t push(Node n) {
        nodes_.push_back(n);
        return nodes_.size() - 1;
    }

    bool at_symbol(const char* s) const {
        const Token& t = lexer_.peek();
        return t.kind == Token::Kind::symbol && t.text == s;
    }

    void expect_symbol(const char* s) {
        if (!at_symbol(s)) {
            const Token& t = lexer_.peek();
            throw ConfigError(std::string("expression: expected '") + s + "' at position " +
                              std::to_string(t.pos));
        }
        lexer_.take();
    }

    std::size_t parse_expr() {
        std::size_t lhs = parse_term();
        while (at_symbol("+") || at_symbol("-")) {
            bool plus = at_symbol("+");
            lexer_.take();
            std::size_t rhs = parse_term();
            lhs = push({plus ? Op::add : Op::sub, 0.0, 0, lhs, rhs});
        }
        return lhs;
    }

    std::size_t parse_term() {
        std::size_t lhs = parse_unary();
        while (at_symbol("*") || at_symbol("/")) {
            bool mul = at_symbol("*");
            lexer_.take();
            std::size_t rhs = parse_unary();
            lhs = push({mul ? Op::mul : Op::div, 0.0, 0, lhs, rhs});
        }
        return lhs;
    }

    std::size_t parse_unary() {
        bool negate = false;
        while (at_symbol("-") || at_symbol("+")) {
            if (at_symbol("-")) negate = !negate;
            lexer_.take();
        }
        std::size_t inner = parse_power();
        if (negate) return push({Op::negate, 0.0, 0, inner, 0});
        return inner;
    }

    std::size_t parse_power() {
        std::size_t base = parse_primary();
        if (at_symbol("^")) {
            lexer_.take();
            std::size_t exponent = parse_unary();
            return push({Op::pow, 0.0, 0, base, exponent});
        }
        return base;
    }

    std::size_t parse_primary() {
        const Token t = lexer_.take();
        if (t.kind == Token::Kind::number) return push({Op::constant, t.number, 0, 0, 0});
        if (t.kind == Token::Kind::symbol && t.text == "(") {
            std::size_t inner = parse_expr();
            expect_symbol(")");
            return inner;
        }
        if (t.kind == Token::Kind::name) return parse_name(t);
        throw ConfigError("expression: expected a value at position " + std::to_string(t.pos));
    }

    std::size_t parse_name(const Token& t) {
        static const std::map<std::string, Op> one_arg = {
            {"exp", Op::call_exp},   {"log", Op::call_log}, {"sin", Op::call_sin},
            {"cos", Op::call_cos},   {"sqrt", Op::call_sqrt}, {"abs", Op::call_abs},
            {"tanh", Op::call_tanh},
        };
        static const std::map<std::string, Op> two_arg = {
            {"min", Op::call_min},
            {"max", Op::call_max},
            {"pow", Op::pow},
        };

        if (at_symbol("(")) {
            lexer_.take();
            auto one = one_arg.find(t.text);
            auto two = two_arg.find(t.text);
            if (one == one_arg.end() && two == two_arg.end())
                throw ConfigError("expression: unknown function '" + t.text + "' at position " +
                                  std::to_string(t.pos));
            std::size_t first = parse_expr();
            if (one != one_arg.end()) {
                expect_symbol(")");
                return push({one->second, 0.0, 0, first, 0});
            }
            expect_symbol(",");
            std::size_t second = parse_expr();
            expect_symbol(")");
            return push({two->second, 0.0, 0, first, second});
        }

        if (t.text == "pi") return push({Op::constant, 3.14159265358979323846, 0, 0, 0});
        if (t.text == "e") return push({Op::constant, 2.71828182845904523536, 0, 0, 0});

        if (t.text.size() >= 2 && t.text[0] == 'q') {
            bool digits = std::all_of(t.text.begin() + 1, t.text.end(), [](char c) {
                return std::isdigit(static_cast<unsigned char>(c));
            });
            if (digits) {
                std::size_t index = std::stoul(t.text.substr(1));
                if (index >= dim_)
                    throw ConfigError("expression: variable '" + t.text + "' out of range; this space has " +
                                      std::to_string(dim_) + " coordinate(s), q0..q" + std::to_string(dim_ - 1));
                used_.push_back(index);
                return push({Op::variable, 0.0, index, 0, 0});
            }
        }

        throw ConfigError("expression: unknown name '" + t.text + "' at position " + std::to_string(t.pos));
    }

    Lexer lexer_;
    std::size_t dim_;
    std::vector<Expression::Node>& nodes_;
    std::vector<std::size_t>& used_;
};

Expression Expression::parse(const std::string& text, std::size_t dim) {
    if (dim == 0) throw ConfigError("expression: dimension must be at least 1");
    Expression out;
    out.dim_ = dim;
    ExpressionParser parser(text, dim, out.nodes_, out.used_);
    out.root_ = parser.run();
    std::sort(out.used_.begin(), out.used_.end());
    out.used_.erase(std::unique(out.used_.begin(), out.used_.end()), out.used_.end());
    return out;
}

double Expression::eval(const std::vector<double>& coords) const {
    if (coords.size() != dim_)
        throw DimensionError("expression: expected " + std::to_string(dim_) + " coordinates, got " +
                             std::to_string(coords.size()));
    return eval_node(root_, coords);
}

double Expression::eval_node(std::size_t at, const std::vector<double>& coords) const {
    const Node& n = nodes_[at];
    switch (n.op) {
        case Op::constant: return n.value;
        case Op::variable: return coords[n.index];
        case Op::add: return eval_node(n.lhs, coords) + eval_node(n.rhs, coords);
        case Op::sub: return eval_node(n.lhs, coords) - eval_node(n.rhs, coords);
        case Op::mul: return eval_node(n.lhs, coords) * eval_node(n.rhs, coords);
        case Op::div: return eval_node(n.lhs, coords) / eval_node(n.rhs, coords);
        case Op::pow: return std::pow(eval_node(n.lhs, coords), eval_node(n.rhs, coords));
        case Op::negate: return -eval_node(n.lhs, coords);
        case Op::call_exp: return std::exp(eval_node(n.lhs, coords));
        case Op::call_log: return std::log(eval_node(n.lhs, coords));
        case Op::call_sin: return std::sin(eval_node(n.lhs, coords));
        case Op::call_cos: return std::cos(eval_node(n.lhs, coords));
        case Op::call_sqrt: return std::sqrt(eval_node(n.lhs, coords));
        case Op::call_abs: return std::abs(eval_node(n.lhs, coords));
        case Op::call_tanh: return std::tanh(eval_node(n.lhs, coords));
        case Op::call_min: return std::min(eval_node(n.lhs, coords), eval_node(n.rhs, coords));
        case Op::call_max: return std::max(eval_node(n.lhs, coords), eval_node(n.rhs, coords));
    }
    throw InternalError("expression: unhandled node kind");
}

}  // namespace mveg
