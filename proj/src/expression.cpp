#include "plantflow/expression.hpp"

#include "plantflow/errors.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <vector>

namespace plantflow {

struct Expression::Node {
    enum class Op { Const, X, Y, Add, Sub, Mul, Div, Pow, Neg, Call };
    Op op = Op::Const;
    double value = 0.0;
    double (*fn)(double) = nullptr;
    std::shared_ptr<const Node> a, b;

    double eval(double x, double y) const {
        switch (op) {
            case Op::Const: return value;
            case Op::X: return x;
            case Op::Y: return y;
            case Op::Add: return a->eval(x, y) + b->eval(x, y);
            case Op::Sub: return a->eval(x, y) - b->eval(x, y);
            case Op::Mul: return a->eval(x, y) * b->eval(x, y);
            case Op::Div: return a->eval(x, y) / b->eval(x, y);
            case Op::Pow: return std::pow(a->eval(x, y), b->eval(x, y));
            case Op::Neg: return -a->eval(x, y);
            case Op::Call: return fn(a->eval(x, y));
        }
        return 0.0;
    }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Op = Expression::Node::Op;

struct Function {
    const char* name;
    double (*fn)(double);
};

const Function kFunctions[] = {
    {"sin", [](double v) { return std::sin(v); }},   {"cos", [](double v) { return std::cos(v); }},
    {"tan", [](double v) { return std::tan(v); }},   {"exp", [](double v) { return std::exp(v); }},
    {"log", [](double v) { return std::log(v); }},   {"sqrt", [](double v) { return std::sqrt(v); }},
    {"abs", [](double v) { return std::abs(v); }},   {"tanh", [](double v) { return std::tanh(v); }},
};

NodePtr make(Op op, NodePtr a = nullptr, NodePtr b = nullptr) {
    auto n = std::make_shared<Expression::Node>();
    n->op = op;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

class Parser {
public:
    explicit Parser(const std::string& s) : s_(s) {}

    NodePtr parse() {
        NodePtr n = sum();
        skip();
        if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return n;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError("expression \"" + s_ + "\", column " + std::to_string(pos_ + 1) + ": " + what);
    }
    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool eat(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr sum() {
        NodePtr n = product();
        for (;;) {
            if (eat('+')) n = make(Op::Add, n, product());
            else if (eat('-')) n = make(Op::Sub, n, product());
            else return n;
        }
    }
    NodePtr product() {
        NodePtr n = unary();
        for (;;) {
            if (eat('*')) n = make(Op::Mul, n, unary());
            else if (eat('/')) n = make(Op::Div, n, unary());
            else return n;
        }
    }
    NodePtr unary() {
        if (eat('-')) return make(Op::Neg, unary());
        if (eat('+')) return unary();
        return power();
    }
    NodePtr power() {
        NodePtr base = atom();
        if (eat('^')) return make(Op::Pow, base, unary());
        return base;
    }
    NodePtr atom() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end of expression");
        if (eat('(')) {
            NodePtr n = sum();
            if (!eat(')')) fail("expected ')'");
            return n;
        }
        const char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const char* begin = s_.c_str() + pos_;
            char* end = nullptr;
            const double v = std::strtod(begin, &end);
            if (end == begin) fail("malformed number");
            pos_ += static_cast<std::size_t>(end - begin);
            auto n = std::make_shared<Expression::Node>();
            n->value = v;
            return n;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            const std::size_t start = pos_;
            while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
            const std::string name = s_.substr(start, pos_ - start);
            if (name == "x") return make(Op::X);
            if (name == "y") return make(Op::Y);
            if (name == "pi") {
                auto n = std::make_shared<Expression::Node>();
                n->value = M_PI;
                return n;
            }
            for (const auto& f : kFunctions)
                if (name == f.name) {
                    if (!eat('(')) fail("expected '(' after " + name);
                    auto n = std::make_shared<Expression::Node>();
                    n->op = Op::Call;
                    n->fn = f.fn;
                    n->a = sum();
                    if (!eat(')')) fail("expected ')'");
                    return n;
                }
            pos_ = start;
            fail("unknown identifier '" + name + "'");
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    const std::string& s_;
    std::size_t pos_ = 0;
};

}  // namespace

Expression::Expression(std::string text) : text_(std::move(text)) { root_ = Parser(text_).parse(); }
Expression::Expression(const Expression&) = default;
Expression& Expression::operator=(const Expression&) = default;
Expression::Expression(Expression&&) noexcept = default;
Expression& Expression::operator=(Expression&&) noexcept = default;
Expression::~Expression() = default;

double Expression::operator()(double x, double y) const { return root_->eval(x, y); }

}  // namespace plantflow
