#include "plantflow/geometry.hpp"

#include "plantflow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace plantflow {

namespace {

constexpr double kPi = std::numbers::pi;

// Local frame of a cell side: u points out of the cell centre towards the
// side, v is u rotated by +90 degrees.
struct SideFrame {
    Vec2 u, v;
    double angle;
};

SideFrame frame_of(Side s) {
    switch (s) {
        case Side::Right: return {{1, 0}, {0, 1}, 0.0};
        case Side::Top: return {{0, 1}, {-1, 0}, 0.5 * kPi};
        case Side::Left: return {{-1, 0}, {0, -1}, kPi};
        case Side::Bottom: return {{0, -1}, {1, 0}, 1.5 * kPi};
    }
    return {{1, 0}, {0, 1}, 0.0};
}

Vec2 to_global(const SideFrame& f, double xi, double eta) {
    // u, v have entries in {0, ±1}, so this is exact apart from the final add.
    return Vec2(0.5 + f.u.x() * xi + f.v.x() * eta, 0.5 + f.u.y() * xi + f.v.y() * eta);
}

double wrap01(double t) {
    double w = t - std::floor(t);
    if (w >= 1.0) w = 0.0;
    return w;
}

}  // namespace

std::string to_string(Subdomain s) {
    switch (s) {
        case Subdomain::Z: return "Z";
        case Subdomain::AW: return "AW";
        case Subdomain::AS: return "AS";
        case Subdomain::Macro: return "macro";
    }
    return "?";
}

std::string to_string(SymplastShape s) {
    switch (s) {
        case SymplastShape::None: return "none";
        case SymplastShape::Disk: return "disk";
        case SymplastShape::RoundedSquare: return "rounded_square";
    }
    return "?";
}

std::string to_string(Side s) {
    switch (s) {
        case Side::Left: return "left";
        case Side::Right: return "right";
        case Side::Bottom: return "bottom";
        case Side::Top: return "top";
    }
    return "?";
}

SymplastShape parse_shape(const std::string& name) {
    if (name == "none") return SymplastShape::None;
    if (name == "disk") return SymplastShape::Disk;
    if (name == "rounded_square" || name == "rounded-square") return SymplastShape::RoundedSquare;
    throw GeometryError("unknown symplast shape '" + name + "' (expected none, disk or rounded_square)");
}

Side parse_side(const std::string& name) {
    if (name == "left") return Side::Left;
    if (name == "right") return Side::Right;
    if (name == "bottom") return Side::Bottom;
    if (name == "top") return Side::Top;
    throw GeometryError("unknown plasmodesma side '" + name + "' (expected left, right, bottom or top)");
}

CurvePiece CurvePiece::line(const Vec2& from, const Vec2& to, InterfaceKind kind) {
    CurvePiece p;
    p.type = Type::Line;
    p.a = from;
    p.b = to;
    p.kind = kind;
    return p;
}

CurvePiece CurvePiece::arc(const Vec2& center, double radius, double theta0, double theta1, InterfaceKind kind) {
    CurvePiece p;
    p.type = Type::Arc;
    p.center = center;
    p.radius = radius;
    p.theta0 = theta0;
    p.theta1 = theta1;
    p.a = center + radius * Vec2(std::cos(theta0), std::sin(theta0));
    p.b = center + radius * Vec2(std::cos(theta1), std::sin(theta1));
    p.kind = kind;
    return p;
}

Vec2 CurvePiece::point(double t) const {
    if (t == 0.0) return a;
    if (t == 1.0) return b;
    if (type == Type::Line) return a + t * (b - a);
    const double th = theta0 + t * (theta1 - theta0);
    return center + radius * Vec2(std::cos(th), std::sin(th));
}

double CurvePiece::length() const {
    if (type == Type::Line) return (b - a).norm();
    return radius * std::abs(theta1 - theta0);
}

UnitCellGeometry::UnitCellGeometry(UnitCellSpec spec) : spec_(std::move(spec)) {
    validate();
    auto width_of = [&](Side s) { return channel_half_width(s); };
    auto same = [](const std::optional<double>& p, const std::optional<double>& q) {
        return p.has_value() == q.has_value() && (!p || *p == *q);
    };
    mirror_x_ = same(width_of(Side::Left), width_of(Side::Right));
    mirror_y_ = same(width_of(Side::Bottom), width_of(Side::Top));
    mirror_diag_ = mirror_x_ && mirror_y_ && same(width_of(Side::Right), width_of(Side::Top));
    if (has_symplast()) build_pieces();
}

void UnitCellGeometry::validate() const {
    const auto& s = spec_;
    if (s.shape == SymplastShape::None) {
        if (!s.plasmodesmata.empty())
            throw GeometryError("plasmodesmata require a symplast (shape 'none' has no symplast)");
        return;
    }
    if (!(s.radius > 0.0)) throw GeometryError("symplast radius must be positive");
    if (!(s.wall_thickness > 0.0)) throw GeometryError("wall_thickness must be positive");
    if (s.radius + s.wall_thickness > 0.5)
        throw GeometryError("symplast of size " + std::to_string(s.radius) + " with wall " +
                            std::to_string(s.wall_thickness) + " does not fit in the unit cell (needs size + wall <= 0.5)");
    if (s.shape == SymplastShape::RoundedSquare) {
        if (s.corner_radius < 0.0 || s.corner_radius > s.radius)
            throw GeometryError("corner_radius must lie in [0, half-width]");
    }
    std::set<Side> seen;
    for (const auto& p : s.plasmodesmata) {
        if (!seen.insert(p.side).second)
            throw GeometryError("two plasmodesmata on side '" + to_string(p.side) + "' overlap");
        if (!(p.width > 0.0)) throw GeometryError("plasmodesma width must be positive");
        const double hw = 0.5 * p.width;
        if (s.shape == SymplastShape::Disk && hw > 0.5 * s.radius)
            throw GeometryError("plasmodesma width " + std::to_string(p.width) +
                                " too large for disk radius (needs width <= radius)");
        if (s.shape == SymplastShape::RoundedSquare && hw > s.radius - s.corner_radius)
            throw GeometryError("plasmodesma must attach to the straight part of the rounded square (width/2 <= half-width - corner_radius)");
    }
}

std::optional<double> UnitCellGeometry::channel_half_width(Side s) const {
    for (const auto& p : spec_.plasmodesmata)
        if (p.side == s) return 0.5 * p.width;
    return std::nullopt;
}

double UnitCellGeometry::channel_start(Side s) const {
    const auto hw = channel_half_width(s);
    if (!hw) throw GeometryError("no plasmodesma on side '" + to_string(s) + "'");
    if (spec_.shape == SymplastShape::Disk) return std::sqrt(spec_.radius * spec_.radius - *hw * *hw);
    return spec_.radius;
}

void UnitCellGeometry::build_pieces() {
    const double r = spec_.radius;
    const Side order[4] = {Side::Right, Side::Top, Side::Left, Side::Bottom};
    std::vector<CurvePiece> channel_sides;

    for (Side side : order) {
        const SideFrame f = frame_of(side);
        const auto hw = channel_half_width(side);
        auto local_arc = [&](Vec2 c_local, double rad, double phi0, double phi1, Vec2 p0_local, Vec2 p1_local,
                             InterfaceKind kind) {
            CurvePiece piece = CurvePiece::arc(to_global(f, c_local.x(), c_local.y()), rad, f.angle + phi0,
                                               f.angle + phi1, kind);
            piece.a = to_global(f, p0_local.x(), p0_local.y());
            piece.b = to_global(f, p1_local.x(), p1_local.y());
            pieces_.push_back(piece);
        };
        auto local_line = [&](Vec2 p0_local, Vec2 p1_local, InterfaceKind kind) {
            pieces_.push_back(CurvePiece::line(to_global(f, p0_local.x(), p0_local.y()),
                                               to_global(f, p1_local.x(), p1_local.y()), kind));
        };

        if (spec_.shape == SymplastShape::Disk) {
            const double s = r * std::numbers::sqrt2 * 0.5;
            const Vec2 c0(0.0, 0.0);
            const Vec2 lo(s, -s), mid(r, 0.0), hi(s, s);
            if (hw) {
                const double phi = std::asin(*hw / r);
                const double xs = std::sqrt(r * r - *hw * *hw);
                const Vec2 alo(xs, -*hw), ahi(xs, *hw);
                local_arc(c0, r, -0.25 * kPi, -phi, lo, alo, InterfaceKind::GammaZ);
                local_arc(c0, r, -phi, 0.0, alo, mid, InterfaceKind::GammaAS);
                local_arc(c0, r, 0.0, phi, mid, ahi, InterfaceKind::GammaAS);
                local_arc(c0, r, phi, 0.25 * kPi, ahi, hi, InterfaceKind::GammaZ);
            } else {
                local_arc(c0, r, -0.25 * kPi, 0.0, lo, mid, InterfaceKind::GammaZ);
                local_arc(c0, r, 0.0, 0.25 * kPi, mid, hi, InterfaceKind::GammaZ);
            }
        } else {
            const double rho = spec_.corner_radius;
            const double e = r - rho;
            const double s = rho * std::numbers::sqrt2 * 0.5;
            if (rho > 0.0) {
                local_arc(Vec2(e, -e), rho, -0.25 * kPi, 0.0, Vec2(e + s, -(e + s)), Vec2(r, -e),
                          InterfaceKind::GammaZ);
            }
            if (e > 0.0) {
                if (hw) {
                    if (*hw < e) local_line(Vec2(r, -e), Vec2(r, -*hw), InterfaceKind::GammaZ);
                    local_line(Vec2(r, -*hw), Vec2(r, 0.0), InterfaceKind::GammaAS);
                    local_line(Vec2(r, 0.0), Vec2(r, *hw), InterfaceKind::GammaAS);
                    if (*hw < e) local_line(Vec2(r, *hw), Vec2(r, e), InterfaceKind::GammaZ);
                } else {
                    local_line(Vec2(r, -e), Vec2(r, 0.0), InterfaceKind::GammaZ);
                    local_line(Vec2(r, 0.0), Vec2(r, e), InterfaceKind::GammaZ);
                }
            }
            if (rho > 0.0) {
                local_arc(Vec2(e, e), rho, 0.0, 0.25 * kPi, Vec2(r, e), Vec2(e + s, e + s), InterfaceKind::GammaZ);
            }
        }

        if (hw) {
            const double xs = channel_start(side);
            channel_sides.push_back(CurvePiece::line(to_global(f, xs, -*hw), to_global(f, 0.5, -*hw),
                                                     InterfaceKind::GammaAW));
            channel_sides.push_back(CurvePiece::line(to_global(f, xs, *hw), to_global(f, 0.5, *hw),
                                                     InterfaceKind::GammaAW));
        }
    }
    pieces_.insert(pieces_.end(), channel_sides.begin(), channel_sides.end());
}

bool UnitCellGeometry::in_symplast(const Vec2& y) const {
    const Vec2 d(wrap01(y.x()) - 0.5, wrap01(y.y()) - 0.5);
    switch (spec_.shape) {
        case SymplastShape::None: return false;
        case SymplastShape::Disk: return d.squaredNorm() < spec_.radius * spec_.radius;
        case SymplastShape::RoundedSquare: {
            const double a = spec_.radius, rho = spec_.corner_radius, e = a - rho;
            const double qx = std::abs(d.x()), qy = std::abs(d.y());
            if (qx >= a || qy >= a) return false;
            if (qx > e && qy > e) return (qx - e) * (qx - e) + (qy - e) * (qy - e) < rho * rho;
            return true;
        }
    }
    return false;
}

bool UnitCellGeometry::in_channel(const Vec2& y) const {
    if (in_symplast(y)) return false;
    const Vec2 d(wrap01(y.x()) - 0.5, wrap01(y.y()) - 0.5);
    for (const auto& p : spec_.plasmodesmata) {
        const double hw = 0.5 * p.width;
        switch (p.side) {
            case Side::Right: if (d.x() > 0 && std::abs(d.y()) < hw) return true; break;
            case Side::Left: if (d.x() < 0 && std::abs(d.y()) < hw) return true; break;
            case Side::Top: if (d.y() > 0 && std::abs(d.x()) < hw) return true; break;
            case Side::Bottom: if (d.y() < 0 && std::abs(d.x()) < hw) return true; break;
        }
    }
    return false;
}

Subdomain UnitCellGeometry::classify(const Vec2& y) const {
    if (in_symplast(y)) return Subdomain::Z;
    if (in_channel(y)) return Subdomain::AS;
    return Subdomain::AW;
}

double UnitCellGeometry::area(Subdomain s) const {
    const double r = spec_.radius;
    double z = 0.0, as = 0.0;
    if (spec_.shape == SymplastShape::Disk) {
        z = kPi * r * r;
        for (const auto& p : spec_.plasmodesmata) {
            const double hw = 0.5 * p.width;
            // ∫_{-hw}^{hw} (0.5 - sqrt(r² - t²)) dt
            as += p.width * 0.5 - (hw * std::sqrt(r * r - hw * hw) + r * r * std::asin(hw / r));
        }
    } else if (spec_.shape == SymplastShape::RoundedSquare) {
        const double rho = spec_.corner_radius;
        z = 4.0 * r * r - (4.0 - kPi) * rho * rho;
        for (const auto& p : spec_.plasmodesmata) as += p.width * (0.5 - r);
    }
    switch (s) {
        case Subdomain::Z: return z;
        case Subdomain::AS: return as;
        case Subdomain::AW: return 1.0 - z - as;
        case Subdomain::Macro: return 1.0;
    }
    return 0.0;
}

double UnitCellGeometry::interface_length(InterfaceKind k) const {
    const double r = spec_.radius;
    double perimeter = 0.0, gas = 0.0, gaw = 0.0;
    if (spec_.shape == SymplastShape::Disk) {
        perimeter = 2.0 * kPi * r;
        for (const auto& p : spec_.plasmodesmata) {
            const double hw = 0.5 * p.width;
            gas += 2.0 * r * std::asin(hw / r);
            gaw += 2.0 * (0.5 - std::sqrt(r * r - hw * hw));
        }
    } else if (spec_.shape == SymplastShape::RoundedSquare) {
        const double rho = spec_.corner_radius;
        perimeter = 8.0 * (r - rho) + 2.0 * kPi * rho;
        for (const auto& p : spec_.plasmodesmata) {
            gas += p.width;
            gaw += 2.0 * (0.5 - r);
        }
    }
    switch (k) {
        case InterfaceKind::GammaZ: return perimeter - gas;
        case InterfaceKind::GammaAS: return gas;
        case InterfaceKind::GammaAW: return gaw;
    }
    return 0.0;
}

Vec2 UnitCellGeometry::symplast_normal(const Vec2& p) const {
    const Vec2 d(p.x() - 0.5, p.y() - 0.5);
    if (spec_.shape == SymplastShape::Disk) return d.normalized();
    const double a = spec_.radius, e = a - spec_.corner_radius;
    const double qx = std::abs(d.x()), qy = std::abs(d.y());
    const double sx = d.x() >= 0 ? 1.0 : -1.0, sy = d.y() >= 0 ? 1.0 : -1.0;
    if (spec_.corner_radius > 0.0 && qx > e && qy > e) return Vec2(sx * (qx - e), sy * (qy - e)).normalized();
    if (qx >= qy) return Vec2(sx, 0.0);
    return Vec2(0.0, sy);
}

Vec2 UnitCellGeometry::channel_side_normal(const Vec2& p) const {
    const Vec2 d(p.x() - 0.5, p.y() - 0.5);
    // Horizontal channels (left/right) have sides y = 0.5 ± hw.
    if (std::abs(d.x()) >= std::abs(d.y())) return Vec2(0.0, d.y() >= 0 ? 1.0 : -1.0);
    return Vec2(d.x() >= 0 ? 1.0 : -1.0, 0.0);
}

MacroDomainSpec MacroDomainSpec::rectangle(double x0, double y0, double x1, double y1, double h, double v_left,
                                           double v_right, double v_bottom, double v_top) {
    MacroDomainSpec s;
    s.x0 = x0;
    s.y0 = y0;
    s.x1 = x1;
    s.y1 = y1;
    s.h = h;
    s.segments = {{"left", {x0, y0}, {x0, y1}, v_left},
                  {"right", {x1, y0}, {x1, y1}, v_right},
                  {"bottom", {x0, y0}, {x1, y0}, v_bottom},
                  {"top", {x0, y1}, {x1, y1}, v_top}};
    return s;
}

double boundary_net_flux(const MacroDomainSpec& spec) {
    double total = 0.0;
    for (const auto& seg : spec.segments) total += seg.v_d * (seg.b - seg.a).norm();
    return total;
}

}  // namespace plantflow
