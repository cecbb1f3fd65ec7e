#pragma once

#include "plantflow/linalg.hpp"

#include <array>
#include <functional>
#include <random>
#include <set>
#include <utility>
#include <vector>

namespace plantflow::detail {

/// Piecewise-linear constraint segment. `curve` >= 0 refers to a curved
/// parent evaluated through the curve callback; -1 means straight.
struct Segment {
    int v0 = -1, v1 = -1;
    int curve = -1;
    double t0 = 0.0, t1 = 1.0;
    int marker = 0;
    int twin = -1;  // periodic twin, split in lock-step
};

struct RefineOptions {
    double h = 0.1;
    double min_angle_deg = 20.0;
    int max_vertices = 400000;
};

using CurveEval = std::function<Vec2(int curve, double t)>;

/// Incremental Delaunay triangulation (Bowyer-Watson with exact predicates)
/// inside a large super-triangle, plus Ruppert-style refinement of a convex
/// region whose boundary and interior constraints are given as segments.
class Triangulator {
public:
    Triangulator(std::vector<Vec2> region_polygon, CurveEval curves);

    int insert(const Vec2& p);
    int add_segment(const Segment& s);
    void link_twins(int a, int b);

    /// Splits encroached or over-long segments and skinny or oversized
    /// triangles until the quality targets hold. Throws MeshError on failure.
    void refine(const RefineOptions& options);
    void split_segment(int s);

    const std::vector<Vec2>& points() const { return pts_; }
    const std::vector<Segment>& segments() const { return segs_; }
    /// Triangles not touching the super-triangle, counter-clockwise.
    std::vector<std::array<int, 3>> region_triangles() const;
    bool has_edge(int a, int b) const;
    int num_super() const { return 3; }

private:
    struct Tri {
        std::array<int, 3> v;
        std::array<int, 3> n;  // neighbour across the edge opposite v[i]
        bool alive = true;
    };

    int locate(const Vec2& p) const;
    bool find_edge(int a, int b, int& tri, int& local) const;
    bool segment_needs_split(int s, double h) const;
    void fix_segments(double h);
    bool inside_region(const Vec2& p) const;
    bool is_super(int v) const { return v < 3; }
    int new_tri(int a, int b, int c);

    std::vector<Vec2> region_;
    CurveEval curves_;
    std::vector<Vec2> pts_;
    std::vector<Tri> tris_;
    std::vector<int> free_;
    std::vector<int> vtri_;
    std::vector<Segment> segs_;
    mutable int last_ = 0;
    mutable std::mt19937 rng_{12345u};
};

}  // namespace plantflow::detail
