#pragma once

#include "plantflow/linalg.hpp"

namespace plantflow::detail {

/// Sign-exact orientation test: > 0 when (a, b, c) turn counter-clockwise.
double orient2d(const Vec2& a, const Vec2& b, const Vec2& c);

/// Sign-exact in-circle test for a counter-clockwise triangle (a, b, c):
/// > 0 when d lies strictly inside its circumcircle.
double incircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d);

}  // namespace plantflow::detail
