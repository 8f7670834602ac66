#pragma once

#include <array>
#include <span>
#include <vector>

namespace pdm {

struct DtPoint {
    double x = 0;
    double y = 0;
};

/// Counter-clockwise triangle, vertex indices into the input point list.
struct DtTriangle {
    std::array<int, 3> v{};
};

/// Twice the signed area of triangle (a, b, c); positive when counter-clockwise.
double orient2d(const DtPoint& a, const DtPoint& b, const DtPoint& c);

/// In-circle determinant: positive when d lies strictly inside the
/// circumcircle of the counter-clockwise triangle (a, b, c).
double incircle(const DtPoint& a, const DtPoint& b, const DtPoint& c, const DtPoint& d);

/// Delaunay triangulation of the exact input point set by incremental
/// Bowyer-Watson insertion over a super-rectangle bootstrap.  Cocircular
/// ties are resolved deterministically by the fixed insertion order.
/// Throws TriangulationError for fewer than three points, duplicate points,
/// or an all-collinear input.
std::vector<DtTriangle> build_delaunay(std::span<const DtPoint> points);

} // namespace pdm
