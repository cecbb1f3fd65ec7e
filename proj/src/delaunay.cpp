#include "delaunay.hpp"

#include "plantflow/errors.hpp"
#include "predicates.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace plantflow::detail {

namespace {

Vec2 circumcenter(const Vec2& a, const Vec2& b, const Vec2& c) {
    const Vec2 ab = b - a, ac = c - a;
    const double d = 2.0 * cross(ab, ac);
    const double ab2 = ab.squaredNorm(), ac2 = ac.squaredNorm();
    return a + Vec2(ac.y() * ab2 - ab.y() * ac2, ab.x() * ac2 - ac.x() * ab2) / d;
}

}  // namespace

Triangulator::Triangulator(std::vector<Vec2> region_polygon, CurveEval curves)
    : region_(std::move(region_polygon)), curves_(std::move(curves)) {
    Vec2 lo = region_.front(), hi = region_.front();
    for (const auto& p : region_) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    const Vec2 c = 0.5 * (lo + hi);
    const double span = std::max(1.0, (hi - lo).maxCoeff()) * 40.0;
    pts_ = {c + Vec2(-span, -span), c + Vec2(span, -span), c + Vec2(0.0, span)};
    vtri_ = {0, 0, 0};
    tris_.push_back(Tri{{0, 1, 2}, {-1, -1, -1}, true});
    last_ = 0;
}

int Triangulator::new_tri(int a, int b, int c) {
    Tri t{{a, b, c}, {-1, -1, -1}, true};
    if (!free_.empty()) {
        const int id = free_.back();
        free_.pop_back();
        tris_[id] = t;
        return id;
    }
    tris_.push_back(t);
    return static_cast<int>(tris_.size()) - 1;
}

int Triangulator::locate(const Vec2& p) const {
    int t = last_;
    if (t < 0 || t >= static_cast<int>(tris_.size()) || !tris_[t].alive) {
        t = -1;
        for (int i = static_cast<int>(tris_.size()) - 1; i >= 0; --i)
            if (tris_[i].alive) {
                t = i;
                break;
            }
    }
    const std::size_t guard = 4 * tris_.size() + 100;
    for (std::size_t step = 0; step < guard; ++step) {
        const Tri& tr = tris_[t];
        const int start = static_cast<int>(rng_() % 3u);
        bool moved = false;
        for (int k = 0; k < 3; ++k) {
            const int i = (start + k) % 3;
            const int a = tr.v[(i + 1) % 3], b = tr.v[(i + 2) % 3];
            if (orient2d(pts_[a], pts_[b], p) < 0) {
                if (tr.n[i] < 0) throw MeshError("point lies outside the triangulated region");
                t = tr.n[i];
                moved = true;
                break;
            }
        }
        if (!moved) {
            last_ = t;
            return t;
        }
    }
    throw MeshError("point location did not terminate");
}

int Triangulator::insert(const Vec2& p) {
    const int t0 = locate(p);
    for (int k = 0; k < 3; ++k)
        if (pts_[tris_[t0].v[k]] == p) return tris_[t0].v[k];

    const int idx = static_cast<int>(pts_.size());
    pts_.push_back(p);
    vtri_.push_back(-1);

    std::vector<int> cavity{t0};
    std::vector<int> stack{t0};
    std::vector<char> in_cavity(tris_.size(), 0), visited(tris_.size(), 0);
    in_cavity[t0] = visited[t0] = 1;
    while (!stack.empty()) {
        const int t = stack.back();
        stack.pop_back();
        for (int i = 0; i < 3; ++i) {
            const int nb = tris_[t].n[i];
            if (nb < 0 || visited[nb]) continue;
            visited[nb] = 1;
            const auto& v = tris_[nb].v;
            if (incircle(pts_[v[0]], pts_[v[1]], pts_[v[2]], p) > 0) {
                in_cavity[nb] = 1;
                cavity.push_back(nb);
                stack.push_back(nb);
            }
        }
    }

    struct Rim {
        int a, b, outside;
    };
    std::vector<Rim> rim;
    for (int t : cavity)
        for (int i = 0; i < 3; ++i) {
            const int nb = tris_[t].n[i];
            if (nb >= 0 && in_cavity[nb]) continue;
            rim.push_back({tris_[t].v[(i + 1) % 3], tris_[t].v[(i + 2) % 3], nb});
        }
    for (int t : cavity) {
        tris_[t].alive = false;
        free_.push_back(t);
    }

    std::vector<std::pair<int, int>> starts, ends;  // (vertex, triangle)
    starts.reserve(rim.size());
    ends.reserve(rim.size());
    for (const auto& r : rim) {
        const int nt = new_tri(r.a, r.b, idx);
        tris_[nt].n[2] = r.outside;
        if (r.outside >= 0) {
            auto& o = tris_[r.outside];
            for (int j = 0; j < 3; ++j)
                if (o.v[j] != r.a && o.v[j] != r.b) o.n[j] = nt;
        }
        starts.emplace_back(r.a, nt);
        ends.emplace_back(r.b, nt);
        vtri_[r.a] = vtri_[r.b] = vtri_[idx] = nt;
    }
    auto lookup = [](const std::vector<std::pair<int, int>>& m, int key) {
        for (const auto& [k, t] : m)
            if (k == key) return t;
        throw MeshError("Delaunay cavity is not a simple polygon");
    };
    for (const auto& [a, nt] : starts) {
        auto& tr = tris_[nt];
        tr.n[0] = lookup(starts, tr.v[1]);
        tr.n[1] = lookup(ends, a);
    }
    last_ = starts.front().second;
    return idx;
}

bool Triangulator::find_edge(int a, int b, int& tri, int& local) const {
    const int start = vtri_[a];
    if (start < 0) return false;
    int t = start;
    for (std::size_t guard = 0; guard < 10000; ++guard) {
        const Tri& tr = tris_[t];
        int la = -1;
        for (int k = 0; k < 3; ++k)
            if (tr.v[k] == a) la = k;
        if (la < 0) return false;
        for (int k = 0; k < 3; ++k)
            if (tr.v[k] == b) {
                tri = t;
                local = 3 - la - k;  // index of the vertex opposite edge (a, b)
                return true;
            }
        const int next = tr.n[(la + 2) % 3];
        if (next < 0 || next == start) return false;
        t = next;
    }
    return false;
}

bool Triangulator::has_edge(int a, int b) const {
    int t, l;
    return find_edge(a, b, t, l);
}

int Triangulator::add_segment(const Segment& s) {
    segs_.push_back(s);
    return static_cast<int>(segs_.size()) - 1;
}

void Triangulator::link_twins(int a, int b) {
    segs_[a].twin = b;
    segs_[b].twin = a;
}

bool Triangulator::segment_needs_split(int s, double h) const {
    const Segment& sg = segs_[s];
    const Vec2& p0 = pts_[sg.v0];
    const Vec2& p1 = pts_[sg.v1];
    const double len2 = (p1 - p0).squaredNorm();
    if (len2 > h * h) return true;
    int t, l;
    if (!find_edge(sg.v0, sg.v1, t, l)) return true;
    const int opposite[2] = {tris_[t].v[l], tris_[t].n[l]};
    for (int k = 0; k < 2; ++k) {
        int w = -1;
        if (k == 0) {
            w = opposite[0];
        } else {
            const int nb = opposite[1];
            if (nb < 0) continue;
            for (int j = 0; j < 3; ++j)
                if (tris_[nb].v[j] != sg.v0 && tris_[nb].v[j] != sg.v1) w = tris_[nb].v[j];
        }
        if (w < 0 || is_super(w)) continue;
        if ((p0 - pts_[w]).dot(p1 - pts_[w]) <= 1e-14 * len2) return true;
    }
    return false;
}

void Triangulator::split_segment(int s) {
    auto split_one = [this](int id) {
        const Segment sg = segs_[id];
        const double tm = 0.5 * (sg.t0 + sg.t1);
        const Vec2 m = sg.curve >= 0 ? curves_(sg.curve, tm) : Vec2(0.5 * (pts_[sg.v0] + pts_[sg.v1]));
        const int vm = insert(m);
        Segment first = sg, second = sg;
        first.v1 = vm;
        first.t1 = tm;
        second.v0 = vm;
        second.t0 = tm;
        segs_[id] = first;
        segs_.push_back(second);
        return static_cast<int>(segs_.size()) - 1;
    };
    const int twin = segs_[s].twin;
    const int second = split_one(s);
    if (twin >= 0) {
        const int twin_second = split_one(twin);
        segs_[s].twin = twin;
        segs_[twin].twin = s;
        segs_[second].twin = twin_second;
        segs_[twin_second].twin = second;
    }
}

void Triangulator::fix_segments(double h) {
    for (int pass = 0; pass < 100000; ++pass) {
        bool changed = false;
        for (int s = 0; s < static_cast<int>(segs_.size()); ++s) {
            if (segment_needs_split(s, h)) {
                split_segment(s);
                changed = true;
            }
        }
        if (!changed) return;
    }
    throw MeshError("segment recovery did not terminate");
}

bool Triangulator::inside_region(const Vec2& p) const {
    const std::size_t n = region_.size();
    for (std::size_t i = 0; i < n; ++i)
        if (orient2d(region_[i], region_[(i + 1) % n], p) < 0) return false;
    return true;
}

void Triangulator::refine(const RefineOptions& options) {
    const double h = options.h;
    const double rmax = 0.65 * h;
    const double ratio_max = 1.0 / (2.0 * std::sin(options.min_angle_deg * std::numbers::pi / 180.0));
    fix_segments(h);

    auto is_bad = [&](const Tri& tr, Vec2& center) {
        const Vec2& a = pts_[tr.v[0]];
        const Vec2& b = pts_[tr.v[1]];
        const Vec2& c = pts_[tr.v[2]];
        const double la = (b - c).norm(), lb = (c - a).norm(), lc = (a - b).norm();
        const double area = 0.5 * cross(b - a, c - a);
        const double r = la * lb * lc / (4.0 * area);
        const double lmin = std::min({la, lb, lc});
        center = circumcenter(a, b, c);
        return r > rmax || r / lmin > ratio_max;
    };

    for (int round = 0; round < 100000; ++round) {
        std::vector<std::pair<int, std::array<int, 3>>> bad;
        for (int t = 0; t < static_cast<int>(tris_.size()); ++t) {
            const Tri& tr = tris_[t];
            if (!tr.alive || is_super(tr.v[0]) || is_super(tr.v[1]) || is_super(tr.v[2])) continue;
            Vec2 c;
            if (is_bad(tr, c)) bad.emplace_back(t, tr.v);
        }
        if (bad.empty()) return;

        for (const auto& [t, verts] : bad) {
            if (static_cast<int>(pts_.size()) > options.max_vertices)
                throw MeshError("mesh refinement exceeded " + std::to_string(options.max_vertices) + " vertices");
            const Tri& tr = tris_[t];
            if (!tr.alive || tr.v != verts) continue;
            Vec2 c;
            if (!is_bad(tr, c)) continue;

            std::vector<int> encroached;
            for (int s = 0; s < static_cast<int>(segs_.size()); ++s) {
                const Vec2& p0 = pts_[segs_[s].v0];
                const Vec2& p1 = pts_[segs_[s].v1];
                if ((p0 - c).dot(p1 - c) < 0.0) encroached.push_back(s);
            }
            if (!encroached.empty()) {
                for (int s : encroached) {
                    const Vec2& p0 = pts_[segs_[s].v0];
                    const Vec2& p1 = pts_[segs_[s].v1];
                    if ((p0 - c).dot(p1 - c) < 0.0) split_segment(s);
                }
                fix_segments(h);
                continue;
            }
            if (!inside_region(c)) {
                const Vec2 g = (pts_[verts[0]] + pts_[verts[1]] + pts_[verts[2]]) / 3.0;
                int best = -1;
                double best_t = 2.0;
                for (int s = 0; s < static_cast<int>(segs_.size()); ++s) {
                    const Vec2& p0 = pts_[segs_[s].v0];
                    const Vec2& p1 = pts_[segs_[s].v1];
                    const double o1 = orient2d(p0, p1, g), o2 = orient2d(p0, p1, c);
                    const double o3 = orient2d(g, c, p0), o4 = orient2d(g, c, p1);
                    if (o1 * o2 > 0 || o3 * o4 > 0) continue;
                    const Vec2 d = c - g, e = p1 - p0;
                    const double denom = cross(d, e);
                    const double tpar = denom != 0.0 ? cross(p0 - g, e) / denom : 0.0;
                    if (tpar < best_t) {
                        best_t = tpar;
                        best = s;
                    }
                }
                if (best < 0) throw MeshError("circumcenter left the region without crossing a segment");
                split_segment(best);
                fix_segments(h);
                continue;
            }
            insert(c);
        }
        fix_segments(h);
    }
    throw MeshError("quality refinement did not terminate");
}

std::vector<std::array<int, 3>> Triangulator::region_triangles() const {
    std::vector<std::array<int, 3>> out;
    for (const auto& tr : tris_)
        if (tr.alive && !is_super(tr.v[0]) && !is_super(tr.v[1]) && !is_super(tr.v[2])) out.push_back(tr.v);
    return out;
}

}  // namespace plantflow::detail
