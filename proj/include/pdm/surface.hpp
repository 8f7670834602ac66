#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "pdm/demand.hpp"

namespace pdm {

/// Surface node: a sample point with its exact demand moments.
struct SurfaceVertex {
    double p = 0;      ///< price ($, integer-valued by construction)
    double v = 0;      ///< advertising ($MM)
    double mu = 0;     ///< exact mean demand at (p, v)
    double sigma = 0;  ///< exact demand standard deviation at (p, v)
};

struct SurfaceTriangle {
    std::array<int, 3> v{};     ///< CCW vertex indices
    std::uint32_t code = 0;     ///< DLog binary code, code_width bits
};

struct SurfaceDomain {
    double p_min = 0;
    double p_max = 0;
    double v_min = 0;
    double v_max = 0;

    bool contains(double p, double v) const {
        return p >= p_min && p <= p_max && v >= v_min && v <= v_max;
    }
};

/// Piecewise-linear approximation of the demand moments over a price x
/// advertising rectangle.  Immutable once built; safe to share across threads.
struct Surface {
    std::vector<SurfaceVertex> vertices;
    std::vector<SurfaceTriangle> triangles;
    SurfaceDomain domain;
    int bit_budget = 0;
    int code_width = 0;
    std::uint64_t params_hash = 0;
};

/// Location result: owner triangle plus barycentric weights over its vertices.
struct BarycentricHit {
    int triangle = -1;
    std::array<double, 3> weights{};
};

/// Slice of one triangle along a vertical price line, as an advertising range.
struct SliceInterval {
    int triangle = -1;
    double v_lo = 0;
    double v_hi = 0;
};

/// Number of binary variables needed to index n alternatives.
int code_width_for(std::size_t n);

/// Assigns distinct code_width_for(n)-bit codes to the triangles in index order.
void assign_dlog_codes(std::vector<SurfaceTriangle>& triangles);

/// Hash of a parameter set, stored in surface dumps to tie them to their source.
std::uint64_t params_fingerprint(const PdmParams& params);

/// Builds the adaptively refined moment surface: starts from the four corners
/// of the domain, repeatedly triangulates, finds the triangle whose centroid
/// has the largest Euclidean norm of the moment percentage errors, compares
/// that norm against the triangle's edge midpoints, and inserts the worst
/// point with its price rounded to the nearest integer.  Stops before any
/// insertion that would push the code width past bit_budget.
Surface refine_surface(const PdmParams& params, const SurfaceDomain& domain, int bit_budget = 10);

/// Owner triangle of (p, v) under the lowest-index tie break, with clamped
/// and normalized barycentric weights.  Throws DomainError outside the domain.
BarycentricHit locate_point(const Surface& surface, double p, double v);

/// Barycentric interpolation of the vertex moments at (p, v).
DemandMoments eval_surface(const Surface& surface, double p, double v);

/// Interpolation restricted to one triangle's affine patch.  (p, v) must lie
/// in the closed triangle up to rounding.
DemandMoments eval_in_triangle(const Surface& surface, int triangle, double p, double v);

/// Signed percentage errors ((mu - mu_hat) / mu, (sigma - sigma_hat) / sigma)
/// of the surface against the exact moments at (p, v).
std::array<double, 2> surface_percentage_error(const Surface& surface, const PdmParams& params,
                                               double p, double v);

/// All triangle slices cut by the vertical line price = p, in triangle order.
/// Crossing coordinates are computed once per canonical edge so callers that
/// enumerate per-triangle or per-line see bitwise-identical breakpoints.
std::vector<SliceInterval> price_slices(const Surface& surface, double p);

/// Serialization as a structured text document; numeric fields survive a
/// round trip bit-exactly.
std::string dump_surface(const Surface& surface);
Surface load_surface(const std::string& text);

} // namespace pdm
