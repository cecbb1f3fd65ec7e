#pragma once

#include "plantflow/linalg.hpp"

#include <optional>
#include <string>
#include <vector>

namespace plantflow {

/// Subdomain tags. Macro is used for every cell of a macroscopic mesh.
enum class Subdomain : int { Z = 0, AW = 1, AS = 2, Macro = 3 };

enum class SymplastShape { None, Disk, RoundedSquare };
enum class Side { Left = 0, Right = 1, Bottom = 2, Top = 3 };
enum class InterfaceKind { GammaZ = 0, GammaAS = 1, GammaAW = 2 };

std::string to_string(Subdomain s);
std::string to_string(SymplastShape s);
std::string to_string(Side s);
SymplastShape parse_shape(const std::string& name);
Side parse_side(const std::string& name);

/// Rectangular channel of the given width, centred on the cell midline,
/// running from the symplast boundary out to one side of the cell.
struct Plasmodesma {
    Side side = Side::Right;
    double width = 0.05;
};

/// Unit cell [0,1]^2 with the symplast centred at (0.5, 0.5). `radius` is the
/// disk radius or the half-width of the rounded square. `wall_thickness` is
/// the minimum apoplast gap required between the symplast and the cell side.
struct UnitCellSpec {
    SymplastShape shape = SymplastShape::Disk;
    double radius = 0.3;
    double corner_radius = 0.1;
    double wall_thickness = 0.1;
    std::vector<Plasmodesma> plasmodesmata;
};

/// Straight line or circular arc, parameterized on t in [0, 1].
struct CurvePiece {
    enum class Type { Line, Arc };
    Type type = Type::Line;
    Vec2 a = Vec2::Zero(), b = Vec2::Zero();
    Vec2 center = Vec2::Zero();
    double radius = 0.0, theta0 = 0.0, theta1 = 0.0;
    InterfaceKind kind = InterfaceKind::GammaZ;

    static CurvePiece line(const Vec2& from, const Vec2& to, InterfaceKind kind);
    static CurvePiece arc(const Vec2& center, double radius, double theta0, double theta1, InterfaceKind kind);

    Vec2 point(double t) const;
    double length() const;
};

class UnitCellGeometry {
public:
    /// Validates the spec; throws GeometryError on any violated invariant.
    explicit UnitCellGeometry(UnitCellSpec spec);

    const UnitCellSpec& spec() const { return spec_; }
    bool has_symplast() const { return spec_.shape != SymplastShape::None; }

    /// Point classifier. Coordinates are wrapped periodically into [0,1)^2.
    Subdomain classify(const Vec2& y) const;
    bool in_symplast(const Vec2& y) const;
    bool in_channel(const Vec2& y) const;

    /// Exact areas |Y_z|, |Y_aw|, |Y_as| (|Y| = 1).
    double area(Subdomain s) const;
    /// Exact lengths of Γz, Γas, Γaw.
    double interface_length(InterfaceKind k) const;

    /// Outward unit normal of Y_z at a point on (or near) its boundary.
    Vec2 symplast_normal(const Vec2& p) const;
    /// Unit normal of a channel side pointing from AS into AW.
    Vec2 channel_side_normal(const Vec2& p) const;

    /// Interface pieces Γz, Γas (oriented counter-clockwise around the
    /// symplast) and Γaw (channel sides) in the full cell.
    const std::vector<CurvePiece>& pieces() const { return pieces_; }

    /// Mirror symmetries about x = 0.5, y = 0.5 and the diagonal y = x.
    bool mirror_x() const { return mirror_x_; }
    bool mirror_y() const { return mirror_y_; }
    bool mirror_diagonal() const { return mirror_diag_; }

    /// Channel half-width on a side, if present.
    std::optional<double> channel_half_width(Side s) const;
    /// Distance from the cell centre to where the channel leaves the symplast.
    double channel_start(Side s) const;

private:
    void validate() const;
    void build_pieces();

    UnitCellSpec spec_;
    std::vector<CurvePiece> pieces_;
    bool mirror_x_ = false, mirror_y_ = false, mirror_diag_ = false;
};

/// Rectangular macroscopic domain with piecewise-constant normal velocity
/// data v_D (positive = outflow) on boundary segments.
struct BoundarySegment {
    std::string name;
    Vec2 a = Vec2::Zero(), b = Vec2::Zero();
    double v_d = 0.0;
};

struct MacroDomainSpec {
    double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;
    double h = 0.125;
    std::vector<BoundarySegment> segments;  // empty: the four sides with v_D = 0

    /// The four sides named left/right/bottom/top with the given values.
    static MacroDomainSpec rectangle(double x0, double y0, double x1, double y1, double h, double v_left = 0.0,
                                     double v_right = 0.0, double v_bottom = 0.0, double v_top = 0.0);
};

/// ∮ v_D dγ over the segments.
double boundary_net_flux(const MacroDomainSpec& spec);

}  // namespace plantflow
