#pragma once

#include "plantflow/linalg.hpp"

#include <memory>
#include <string>

namespace plantflow {

/// Closed-form scalar field f(x, y) parsed from text. Supports numbers,
/// x, y, pi, + - * / ^ (right associative), unary minus, parentheses and
/// sin, cos, tan, exp, log, sqrt, abs, tanh.
class Expression {
public:
    /// Throws ParseError naming the offending column (1-based).
    explicit Expression(std::string text);
    Expression(const Expression&);
    Expression& operator=(const Expression&);
    Expression(Expression&&) noexcept;
    Expression& operator=(Expression&&) noexcept;
    ~Expression();

    double operator()(double x, double y) const;
    double operator()(const Vec2& p) const { return (*this)(p.x(), p.y()); }
    const std::string& text() const { return text_; }

    struct Node;

private:
    std::string text_;
    std::shared_ptr<const Node> root_;
};

}  // namespace plantflow
