#include "predicates.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <limits>

namespace plantflow::detail {

namespace {

using Rational = boost::multiprecision::cpp_rational;

constexpr double kEps = std::numeric_limits<double>::epsilon();
// Shewchuk-style static error bounds (slightly inflated).
constexpr double kOrientBound = (3.0 + 16.0 * kEps) * kEps * 2.0;
constexpr double kIncircleBound = (10.0 + 96.0 * kEps) * kEps * 2.0;

int sign_of(const Rational& r) { return r > 0 ? 1 : (r < 0 ? -1 : 0); }

}  // namespace

double orient2d(const Vec2& a, const Vec2& b, const Vec2& c) {
    const double detleft = (a.x() - c.x()) * (b.y() - c.y());
    const double detright = (a.y() - c.y()) * (b.x() - c.x());
    const double det = detleft - detright;
    const double detsum = std::abs(detleft) + std::abs(detright);
    if (std::abs(det) > kOrientBound * detsum) return det;

    const Rational ax(a.x()), ay(a.y()), bx(b.x()), by(b.y()), cx(c.x()), cy(c.y());
    const Rational exact = (ax - cx) * (by - cy) - (ay - cy) * (bx - cx);
    return static_cast<double>(sign_of(exact));
}

double incircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    const double adx = a.x() - d.x(), ady = a.y() - d.y();
    const double bdx = b.x() - d.x(), bdy = b.y() - d.y();
    const double cdx = c.x() - d.x(), cdy = c.y() - d.y();

    const double bdxcdy = bdx * cdy, cdxbdy = cdx * bdy;
    const double alift = adx * adx + ady * ady;
    const double cdxady = cdx * ady, adxcdy = adx * cdy;
    const double blift = bdx * bdx + bdy * bdy;
    const double adxbdy = adx * bdy, bdxady = bdx * ady;
    const double clift = cdx * cdx + cdy * cdy;

    const double det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) + clift * (adxbdy - bdxady);
    const double permanent = (std::abs(bdxcdy) + std::abs(cdxbdy)) * alift +
                             (std::abs(cdxady) + std::abs(adxcdy)) * blift +
                             (std::abs(adxbdy) + std::abs(bdxady)) * clift;
    if (std::abs(det) > kIncircleBound * permanent) return det;

    const Rational dx(d.x()), dy(d.y());
    const Rational eadx = Rational(a.x()) - dx, eady = Rational(a.y()) - dy;
    const Rational ebdx = Rational(b.x()) - dx, ebdy = Rational(b.y()) - dy;
    const Rational ecdx = Rational(c.x()) - dx, ecdy = Rational(c.y()) - dy;
    const Rational ealift = eadx * eadx + eady * eady;
    const Rational eblift = ebdx * ebdx + ebdy * ebdy;
    const Rational eclift = ecdx * ecdx + ecdy * ecdy;
    const Rational exact = ealift * (ebdx * ecdy - ecdx * ebdy) + eblift * (ecdx * eady - eadx * ecdy) +
                           eclift * (eadx * ebdy - ebdx * eady);
    return static_cast<double>(sign_of(exact));
}

}  // namespace plantflow::detail
