#include "pdm/delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>
#include <utility>

#include "pdm/errors.hpp"

namespace pdm {

double orient2d(const DtPoint& a, const DtPoint& b, const DtPoint& c) {
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

double incircle(const DtPoint& a, const DtPoint& b, const DtPoint& c, const DtPoint& d) {
    const double adx = a.x - d.x, ady = a.y - d.y;
    const double bdx = b.x - d.x, bdy = b.y - d.y;
    const double cdx = c.x - d.x, cdy = c.y - d.y;
    const double ad2 = adx * adx + ady * ady;
    const double bd2 = bdx * bdx + bdy * bdy;
    const double cd2 = cdx * cdx + cdy * cdy;
    return adx * (bdy * cd2 - cdy * bd2) - ady * (bdx * cd2 - cdx * bd2) +
           ad2 * (bdx * cdy - cdx * bdy);
}

namespace {

struct WorkTriangle {
    int a, b, c;       // CCW vertex indices
    double ccx, ccy;   // circumcenter
    double rr;         // squared circumradius
    bool alive = true;
};

WorkTriangle make_triangle(const std::vector<DtPoint>& pts, int ia, int ib, int ic) {
    const DtPoint& a = pts[ia];
    DtPoint b = pts[ib];
    DtPoint c = pts[ic];
    int jb = ib, jc = ic;
    if (orient2d(a, b, c) < 0) {
        std::swap(b, c);
        std::swap(jb, jc);
    }
    const double bx = b.x - a.x, by = b.y - a.y;
    const double cx = c.x - a.x, cy = c.y - a.y;
    const double d = 2.0 * (bx * cy - by * cx);
    if (d == 0.0) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "delaunay: degenerate triangle in cavity fill: (" << a.x << ", " << a.y << "), ("
            << b.x << ", " << b.y << "), (" << c.x << ", " << c.y << ")";
        throw InternalError(msg.str());
    }
    const double b2 = bx * bx + by * by;
    const double c2 = cx * cx + cy * cy;
    const double ux = (cy * b2 - by * c2) / d;
    const double uy = (bx * c2 - cx * b2) / d;
    WorkTriangle t{};
    t.a = ia;
    t.b = jb;
    t.c = jc;
    t.ccx = a.x + ux;
    t.ccy = a.y + uy;
    t.rr = ux * ux + uy * uy;
    return t;
}

// Determinant sign with a static floating-point error filter; the magnitude
// sum bounds the rounding error of the determinant evaluation.  Values inside
// the filter band count as cocircular and therefore outside, which keeps
// cocircular cases deterministic.
bool incircle_filtered(const DtPoint& a, const DtPoint& b, const DtPoint& c, const DtPoint& d) {
    const double adx = a.x - d.x, ady = a.y - d.y;
    const double bdx = b.x - d.x, bdy = b.y - d.y;
    const double cdx = c.x - d.x, cdy = c.y - d.y;
    const double ad2 = adx * adx + ady * ady;
    const double bd2 = bdx * bdx + bdy * bdy;
    const double cd2 = cdx * cdx + cdy * cdy;
    const double det = adx * (bdy * cd2 - cdy * bd2) - ady * (bdx * cd2 - cdx * bd2) +
                       ad2 * (bdx * cdy - cdx * bdy);
    const double perm = std::fabs(adx) * (std::fabs(bdy) * cd2 + std::fabs(cdy) * bd2) +
                        std::fabs(ady) * (std::fabs(bdx) * cd2 + std::fabs(cdx) * bd2) +
                        ad2 * (std::fabs(bdx * cdy) + std::fabs(cdx * bdy));
    return det > 1.2e-15 * perm;
}

// Cheap center-radius test, falling back to the filtered determinant whenever
// the distance lands near the circle.
bool inside_circumcircle(const std::vector<DtPoint>& pts, const WorkTriangle& t,
                         const DtPoint& p) {
    const double dx = p.x - t.ccx;
    const double dy = p.y - t.ccy;
    const double d2 = dx * dx + dy * dy;
    if (d2 < t.rr * (1.0 - 1e-7)) return true;
    if (d2 > t.rr * (1.0 + 1e-7)) return false;
    return incircle_filtered(pts[static_cast<std::size_t>(t.a)],
                             pts[static_cast<std::size_t>(t.b)],
                             pts[static_cast<std::size_t>(t.c)], p);
}

} // namespace

std::vector<DtTriangle> build_delaunay(std::span<const DtPoint> points) {
    const int n = static_cast<int>(points.size());
    if (n < 3) throw TriangulationError("delaunay: need at least 3 points");

    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (points[i].x == points[j].x && points[i].y == points[j].y) {
                throw TriangulationError("delaunay: duplicate input points");
            }
        }
    }

    double lo_x = points[0].x, hi_x = points[0].x;
    double lo_y = points[0].y, hi_y = points[0].y;
    for (const DtPoint& p : points) {
        lo_x = std::min(lo_x, p.x);
        hi_x = std::max(hi_x, p.x);
        lo_y = std::min(lo_y, p.y);
        hi_y = std::max(hi_y, p.y);
    }
    const double span = std::max({hi_x - lo_x, hi_y - lo_y, 1.0});

    bool collinear = true;
    for (int i = 1; i + 1 < n && collinear; ++i) {
        if (std::fabs(orient2d(points[0], points[i], points[i + 1])) > 1e-12 * span * span) {
            collinear = false;
        }
    }
    if (collinear) {
        // The scan above only covers consecutive triples; confirm against all pairs.
        for (int i = 1; i < n && collinear; ++i) {
            for (int j = i + 1; j < n && collinear; ++j) {
                if (std::fabs(orient2d(points[0], points[i], points[j])) > 1e-12 * span * span) {
                    collinear = false;
                }
            }
        }
        if (collinear) throw TriangulationError("delaunay: all input points are collinear");
    }

    // Super-rectangle far enough out that hull-adjacent circumcircles cannot
    // reach it; far enough in that the predicates stay well conditioned.
    const double cx = 0.5 * (lo_x + hi_x);
    const double cy = 0.5 * (lo_y + hi_y);
    const double half = 1000.0 * span;

    std::vector<DtPoint> pts(points.begin(), points.end());
    pts.push_back({cx - half, cy - half});
    pts.push_back({cx + half, cy - half});
    pts.push_back({cx + half, cy + half});
    pts.push_back({cx - half, cy + half});
    const int s0 = n, s1 = n + 1, s2 = n + 2, s3 = n + 3;

    std::vector<WorkTriangle> tris;
    tris.reserve(static_cast<std::size_t>(2 * n + 8));
    tris.push_back(make_triangle(pts, s0, s1, s2));
    tris.push_back(make_triangle(pts, s0, s2, s3));

    std::vector<int> bad;
    std::map<std::pair<int, int>, std::pair<int, int>> edges;  // undirected -> (count, directed a)
    for (int idx = 0; idx < n; ++idx) {
        const DtPoint& p = pts[idx];
        bad.clear();
        for (int ti = 0; ti < static_cast<int>(tris.size()); ++ti) {
            if (tris[ti].alive && inside_circumcircle(pts, tris[ti], p)) bad.push_back(ti);
        }
        if (bad.empty()) throw InternalError("delaunay: insertion point outside all circumcircles");

        edges.clear();
        for (int ti : bad) {
            const WorkTriangle& t = tris[ti];
            const int e[3][2] = {{t.a, t.b}, {t.b, t.c}, {t.c, t.a}};
            for (const auto& ab : e) {
                const auto key = std::minmax(ab[0], ab[1]);
                auto [it, fresh] = edges.try_emplace(key, std::pair<int, int>{0, ab[0]});
                it->second.first += 1;
                if (!fresh) it->second.second = -1;
            }
        }
        for (int ti : bad) tris[ti].alive = false;
        for (const auto& [key, info] : edges) {
            if (info.first == 1) {
                // Boundary edge of the cavity, kept in its CCW direction so the
                // fan triangle (a, b, idx) stays CCW.
                const int a = info.second;
                const int b = (a == key.first) ? key.second : key.first;
                tris.push_back(make_triangle(pts, a, b, idx));
            } else if (info.first != 2) {
                throw InternalError("delaunay: inconsistent cavity boundary");
            }
        }
    }

    std::vector<DtTriangle> out;
    out.reserve(tris.size());
    for (const WorkTriangle& t : tris) {
        if (!t.alive) continue;
        if (t.a >= n || t.b >= n || t.c >= n) continue;
        DtTriangle dt{{t.a, t.b, t.c}};
        // Canonical form: smallest index first (rotation keeps orientation).
        while (dt.v[0] != std::min({dt.v[0], dt.v[1], dt.v[2]})) {
            dt.v = {dt.v[1], dt.v[2], dt.v[0]};
        }
        out.push_back(dt);
    }
    std::sort(out.begin(), out.end(),
              [](const DtTriangle& l, const DtTriangle& r) { return l.v < r.v; });
    if (out.empty()) throw TriangulationError("delaunay: no triangles over the input set");
    return out;
}

} // namespace pdm
