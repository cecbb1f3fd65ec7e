#pragma once

#include "plantflow/linalg.hpp"
#include "plantflow/mesh.hpp"

#include <array>

namespace plantflow::detail {

struct Triangle {
    std::array<Vec2, 3> p;
    std::array<Vec2, 3> grad;  // ∇λ_k
    double area = 0.0;

    Vec2 centroid() const { return (p[0] + p[1] + p[2]) / 3.0; }
    Vec2 midpoint(int k) const { return 0.5 * (p[(k + 1) % 3] + p[(k + 2) % 3]); }
    std::array<double, 3> barycentric(const Vec2& x) const {
        std::array<double, 3> l;
        for (int k = 0; k < 3; ++k) l[k] = 1.0 / 3.0 + grad[k].dot(x - centroid());
        return l;
    }
};

inline Triangle triangle(const SimplicialMesh& m, int c) {
    Triangle t;
    for (int k = 0; k < 3; ++k) t.p[k] = m.vertices[m.cells[c][k]];
    t.area = 0.5 * cross(t.p[1] - t.p[0], t.p[2] - t.p[0]);
    for (int k = 0; k < 3; ++k) t.grad[k] = perp(t.p[(k + 2) % 3] - t.p[(k + 1) % 3]) / (2.0 * t.area);
    return t;
}

/// ∫ K⁻¹ φ̂_k · φ̂_l for the unit outward-flux RT0 functions φ̂_k = (x − P_k)/(2|T|).
inline Eigen::Matrix3d rt0_mass(const Triangle& t, const Mat2& kinv) {
    Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
    const double s = 1.0 / (2.0 * t.area);
    for (int q = 0; q < 3; ++q) {
        const Vec2 x = t.midpoint(q);
        for (int k = 0; k < 3; ++k)
            for (int l = 0; l < 3; ++l) m(k, l) += t.area / 3.0 * s * s * (x - t.p[k]).dot(kinv * (x - t.p[l]));
    }
    return m;
}

/// Degree-5 seven-point rule on a triangle: barycentric points and weights
/// (weights sum to 1).
struct QuadraturePoint {
    std::array<double, 3> l;
    double w;
};

inline const std::array<QuadraturePoint, 7>& dunavant5() {
    static const std::array<QuadraturePoint, 7> rule = [] {
        const double a1 = 0.059715871789770, b1 = 0.470142064105115;
        const double a2 = 0.797426985353087, b2 = 0.101286507323456;
        const double w0 = 0.225, w1 = 0.132394152788506, w2 = 0.125939180544827;
        return std::array<QuadraturePoint, 7>{{{{1.0 / 3, 1.0 / 3, 1.0 / 3}, w0},
                                               {{a1, b1, b1}, w1},
                                               {{b1, a1, b1}, w1},
                                               {{b1, b1, a1}, w1},
                                               {{a2, b2, b2}, w2},
                                               {{b2, a2, b2}, w2},
                                               {{b2, b2, a2}, w2}}};
    }();
    return rule;
}

inline Vec2 point(const Triangle& t, const std::array<double, 3>& l) { return l[0] * t.p[0] + l[1] * t.p[1] + l[2] * t.p[2]; }

}  // namespace plantflow::detail
