#include "pdm/surface.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "pdm/delaunay.hpp"
#include "pdm/errors.hpp"

namespace pdm {

namespace {

struct Candidate {
    double p = 0;
    double v = 0;
    double norm = -1;
    int rank = 0;  // 0 = centroid, 1..3 = edge midpoint, used as the tie break
};

SurfaceVertex make_vertex(const PdmParams& params, double p, double v) {
    const DemandMoments m = demand_moments(p, v, params);
    return SurfaceVertex{p, v, m.mu, m.sigma};
}

// Percentage-error norm at (p, v) against the interpolation over one triangle,
// expressed by barycentric weights w of its vertices a, b, c.
double error_norm(const PdmParams& params, const SurfaceVertex& a, const SurfaceVertex& b,
                  const SurfaceVertex& c, const std::array<double, 3>& w, double p, double v) {
    const DemandMoments exact = demand_moments(p, v, params);
    if (exact.mu == 0.0) throw UndefinedValueError("surface: percentage error undefined at mu = 0");
    const double mu_hat = w[0] * a.mu + w[1] * b.mu + w[2] * c.mu;
    const double sg_hat = w[0] * a.sigma + w[1] * b.sigma + w[2] * c.sigma;
    const double e_mu = (exact.mu - mu_hat) / exact.mu;
    const double e_sg = (exact.sigma - sg_hat) / exact.sigma;
    return std::sqrt(e_mu * e_mu + e_sg * e_sg);
}

// Candidates landing within a sliver of an existing vertex are treated as
// duplicates: the price grid is integral, so only the advertising coordinate
// needs a tolerance, scaled to the domain height.  Without it the integer
// rounding of candidate prices can stack near-identical vertices into one
// column and degrade the triangulation.
bool duplicates_existing(const std::vector<SurfaceVertex>& vertices, double p, double v,
                         double v_tol) {
    for (const SurfaceVertex& s : vertices) {
        if (s.p == p && std::fabs(s.v - v) <= v_tol) return true;
    }
    return false;
}

std::vector<SurfaceTriangle> triangulate(const std::vector<SurfaceVertex>& vertices) {
    std::vector<DtPoint> pts;
    pts.reserve(vertices.size());
    for (const SurfaceVertex& s : vertices) pts.push_back({s.p, s.v});
    std::vector<SurfaceTriangle> out;
    for (const DtTriangle& t : build_delaunay(pts)) out.push_back({t.v, 0});
    return out;
}

// Crossing of one edge with the vertical line price = p.  Endpoints are taken
// in canonical (lower vertex index first) order so every caller computes the
// same floating-point value.  A vertical edge lying on the line reports both
// endpoints.
int edge_crossings(const Surface& s, int i, int j, double p, double out[2]) {
    if (i > j) std::swap(i, j);
    const SurfaceVertex& a = s.vertices[static_cast<std::size_t>(i)];
    const SurfaceVertex& b = s.vertices[static_cast<std::size_t>(j)];
    if (a.p == b.p) {
        if (a.p != p) return 0;
        out[0] = std::min(a.v, b.v);
        out[1] = std::max(a.v, b.v);
        return 2;
    }
    if ((a.p - p) * (b.p - p) > 0) return 0;
    const double f = (p - a.p) / (b.p - a.p);
    out[0] = a.v + f * (b.v - a.v);
    return 1;
}

} // namespace

int code_width_for(std::size_t n) {
    if (n <= 1) return 0;
    return std::bit_width(n - 1);
}

void assign_dlog_codes(std::vector<SurfaceTriangle>& triangles) {
    for (std::size_t i = 0; i < triangles.size(); ++i) {
        triangles[i].code = static_cast<std::uint32_t>(i);
    }
}

std::uint64_t params_fingerprint(const PdmParams& params) {
    const double fields[] = {params.m,     params.a0,      params.pi_p,    params.alpha,
                             params.beta,  params.delta,   params.eta,     params.pi_m,
                             params.gamma_p, params.gamma_b, params.p_ref, params.v0,
                             params.t};
    std::uint64_t h = 1469598103934665603ull;
    for (double f : fields) {
        std::uint64_t bits;
        std::memcpy(&bits, &f, sizeof bits);
        for (int k = 0; k < 8; ++k) {
            h ^= (bits >> (8 * k)) & 0xffu;
            h *= 1099511628211ull;
        }
    }
    return h;
}

Surface refine_surface(const PdmParams& params, const SurfaceDomain& domain, int bit_budget) {
    params.validate();
    if (bit_budget < 1) throw ModelError("refine_surface: bit budget must be at least 1");
    if (!(domain.p_min < domain.p_max) || !(domain.v_min < domain.v_max)) {
        throw DomainError("refine_surface: empty domain rectangle");
    }

    std::vector<SurfaceVertex> vertices = {
        make_vertex(params, domain.p_min, domain.v_min),
        make_vertex(params, domain.p_max, domain.v_min),
        make_vertex(params, domain.p_max, domain.v_max),
        make_vertex(params, domain.p_min, domain.v_max),
    };
    std::vector<SurfaceTriangle> triangles = triangulate(vertices);
    if (code_width_for(triangles.size()) > bit_budget) {
        throw ModelError("refine_surface: bit budget below the initial two-triangle surface");
    }

    while (true) {
        // Rank triangles by the percentage-error norm of their centroid.
        std::vector<std::pair<double, int>> by_centroid;
        by_centroid.reserve(triangles.size());
        std::vector<std::array<Candidate, 4>> cand_sets(triangles.size());
        for (int ti = 0; ti < static_cast<int>(triangles.size()); ++ti) {
            const SurfaceTriangle& t = triangles[static_cast<std::size_t>(ti)];
            const SurfaceVertex& a = vertices[static_cast<std::size_t>(t.v[0])];
            const SurfaceVertex& b = vertices[static_cast<std::size_t>(t.v[1])];
            const SurfaceVertex& c = vertices[static_cast<std::size_t>(t.v[2])];
            auto& cs = cand_sets[static_cast<std::size_t>(ti)];
            const double cp = (a.p + b.p + c.p) / 3.0;
            const double cv = (a.v + b.v + c.v) / 3.0;
            cs[0] = {cp, cv, error_norm(params, a, b, c, {1 / 3.0, 1 / 3.0, 1 / 3.0}, cp, cv), 0};
            const SurfaceVertex* e[3][2] = {{&a, &b}, {&b, &c}, {&c, &a}};
            const std::array<double, 3> mid_w[3] = {
                {0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}};
            for (int k = 0; k < 3; ++k) {
                const double mp = 0.5 * (e[k][0]->p + e[k][1]->p);
                const double mv = 0.5 * (e[k][0]->v + e[k][1]->v);
                cs[k + 1] = {mp, mv, error_norm(params, a, b, c, mid_w[k], mp, mv), k + 1};
            }
            by_centroid.push_back({cs[0].norm, ti});
        }
        std::sort(by_centroid.begin(), by_centroid.end(), [](const auto& l, const auto& r) {
            if (l.first != r.first) return l.first > r.first;
            return l.second < r.second;
        });

        // Worst triangle first; within a triangle the centroid and the three
        // edge midpoints compete by error norm, centroid winning ties.
        const double v_tol = 1e-6 * (domain.v_max - domain.v_min);
        bool inserted = false;
        bool budget_hit = false;
        for (const auto& [norm, ti] : by_centroid) {
            std::array<Candidate, 4> cs = cand_sets[static_cast<std::size_t>(ti)];
            std::stable_sort(cs.begin(), cs.end(), [](const Candidate& l, const Candidate& r) {
                if (l.norm != r.norm) return l.norm > r.norm;
                return l.rank < r.rank;
            });
            for (const Candidate& c : cs) {
                const double rounded_p = std::round(c.p);
                if (duplicates_existing(vertices, rounded_p, c.v, v_tol)) continue;
                std::vector<SurfaceVertex> next_vertices = vertices;
                next_vertices.push_back(make_vertex(params, rounded_p, c.v));
                std::vector<SurfaceTriangle> next_triangles;
                try {
                    next_triangles = triangulate(next_vertices);
                } catch (const InternalError&) {
                    continue;  // numerically degenerate insertion, try the next candidate
                }
                if (code_width_for(next_triangles.size()) > bit_budget) {
                    budget_hit = true;
                    break;
                }
                vertices = std::move(next_vertices);
                triangles = std::move(next_triangles);
                inserted = true;
                break;
            }
            if (inserted || budget_hit) break;
        }
        if (!inserted) break;  // budget reached or every candidate already present
    }

    assign_dlog_codes(triangles);
    Surface s;
    s.vertices = std::move(vertices);
    s.triangles = std::move(triangles);
    s.domain = domain;
    s.bit_budget = bit_budget;
    s.code_width = code_width_for(s.triangles.size());
    s.params_hash = params_fingerprint(params);
    return s;
}

BarycentricHit locate_point(const Surface& surface, double p, double v) {
    if (!surface.domain.contains(p, v)) {
        std::ostringstream msg;
        msg << "locate_point: (" << p << ", " << v << ") outside the surface domain";
        throw DomainError(msg.str());
    }
    const double scale = (surface.domain.p_max - surface.domain.p_min) *
                         (surface.domain.v_max - surface.domain.v_min);
    for (int ti = 0; ti < static_cast<int>(surface.triangles.size()); ++ti) {
        const SurfaceTriangle& t = surface.triangles[static_cast<std::size_t>(ti)];
        const SurfaceVertex& a = surface.vertices[static_cast<std::size_t>(t.v[0])];
        const SurfaceVertex& b = surface.vertices[static_cast<std::size_t>(t.v[1])];
        const SurfaceVertex& c = surface.vertices[static_cast<std::size_t>(t.v[2])];
        const double area = (b.p - a.p) * (c.v - a.v) - (b.v - a.v) * (c.p - a.p);
        if (area <= 0) continue;
        const double w0 = ((b.p - p) * (c.v - v) - (b.v - v) * (c.p - p)) / area;
        const double w1 = ((c.p - p) * (a.v - v) - (c.v - v) * (a.p - p)) / area;
        const double w2 = ((a.p - p) * (b.v - v) - (a.v - v) * (b.p - p)) / area;
        const double tol = 1e-9 * std::max(1.0, scale / std::fabs(area));
        if (w0 < -tol || w1 < -tol || w2 < -tol) continue;
        BarycentricHit hit;
        hit.triangle = ti;
        hit.weights = {std::max(w0, 0.0), std::max(w1, 0.0), std::max(w2, 0.0)};
        const double sum = hit.weights[0] + hit.weights[1] + hit.weights[2];
        for (double& w : hit.weights) w /= sum;
        return hit;
    }
    throw InternalError("locate_point: domain point not covered by any triangle");
}

DemandMoments eval_in_triangle(const Surface& surface, int triangle, double p, double v) {
    const SurfaceTriangle& t = surface.triangles[static_cast<std::size_t>(triangle)];
    const SurfaceVertex& a = surface.vertices[static_cast<std::size_t>(t.v[0])];
    const SurfaceVertex& b = surface.vertices[static_cast<std::size_t>(t.v[1])];
    const SurfaceVertex& c = surface.vertices[static_cast<std::size_t>(t.v[2])];
    const double area = (b.p - a.p) * (c.v - a.v) - (b.v - a.v) * (c.p - a.p);
    const double w0 = ((b.p - p) * (c.v - v) - (b.v - v) * (c.p - p)) / area;
    const double w1 = ((c.p - p) * (a.v - v) - (c.v - v) * (a.p - p)) / area;
    const double w2 = 1.0 - w0 - w1;
    DemandMoments m;
    m.mu = w0 * a.mu + w1 * b.mu + w2 * c.mu;
    m.sigma = w0 * a.sigma + w1 * b.sigma + w2 * c.sigma;
    return m;
}

DemandMoments eval_surface(const Surface& surface, double p, double v) {
    const BarycentricHit hit = locate_point(surface, p, v);
    const SurfaceTriangle& t = surface.triangles[static_cast<std::size_t>(hit.triangle)];
    DemandMoments m;
    m.mu = m.sigma = 0;
    for (int k = 0; k < 3; ++k) {
        const SurfaceVertex& s = surface.vertices[static_cast<std::size_t>(t.v[k])];
        m.mu += hit.weights[static_cast<std::size_t>(k)] * s.mu;
        m.sigma += hit.weights[static_cast<std::size_t>(k)] * s.sigma;
    }
    return m;
}

std::array<double, 2> surface_percentage_error(const Surface& surface, const PdmParams& params,
                                               double p, double v) {
    const DemandMoments exact = demand_moments(p, v, params);
    if (exact.mu == 0.0) throw UndefinedValueError("surface: percentage error undefined at mu = 0");
    const DemandMoments approx = eval_surface(surface, p, v);
    return {(exact.mu - approx.mu) / exact.mu, (exact.sigma - approx.sigma) / exact.sigma};
}

std::vector<SliceInterval> price_slices(const Surface& surface, double p) {
    std::vector<SliceInterval> out;
    double cross[2];
    for (int ti = 0; ti < static_cast<int>(surface.triangles.size()); ++ti) {
        const SurfaceTriangle& t = surface.triangles[static_cast<std::size_t>(ti)];
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        bool any = false;
        const int e[3][2] = {{t.v[0], t.v[1]}, {t.v[1], t.v[2]}, {t.v[2], t.v[0]}};
        for (const auto& ij : e) {
            const int k = edge_crossings(surface, ij[0], ij[1], p, cross);
            for (int q = 0; q < k; ++q) {
                lo = std::min(lo, cross[q]);
                hi = std::max(hi, cross[q]);
                any = true;
            }
        }
        if (any) out.push_back({ti, lo, hi});
    }
    return out;
}

std::string dump_surface(const Surface& surface) {
    nlohmann::json j;
    j["format"] = "pdm-surface";
    j["version"] = 1;
    j["domain"] = {{"p_min", surface.domain.p_min},
                   {"p_max", surface.domain.p_max},
                   {"v_min", surface.domain.v_min},
                   {"v_max", surface.domain.v_max}};
    j["bit_budget"] = surface.bit_budget;
    j["code_width"] = surface.code_width;
    {
        std::ostringstream hex;
        hex << std::hex << surface.params_hash;
        j["params_hash"] = hex.str();
    }
    nlohmann::json verts = nlohmann::json::array();
    for (const SurfaceVertex& s : surface.vertices) {
        verts.push_back({s.p, s.v, s.mu, s.sigma});
    }
    j["vertices"] = std::move(verts);
    nlohmann::json tris = nlohmann::json::array();
    for (const SurfaceTriangle& t : surface.triangles) {
        std::string bits;
        for (int k = surface.code_width - 1; k >= 0; --k) {
            bits.push_back((t.code >> k) & 1u ? '1' : '0');
        }
        tris.push_back({{"v", t.v}, {"code", bits}});
    }
    j["triangles"] = std::move(tris);
    return j.dump(2) + "\n";
}

Surface load_surface(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("surface: invalid JSON: ") + e.what());
    }
    try {
        if (j.at("format") != "pdm-surface") throw ParseError("surface: unrecognized format tag");
        Surface s;
        const auto& d = j.at("domain");
        s.domain = {d.at("p_min").get<double>(), d.at("p_max").get<double>(),
                    d.at("v_min").get<double>(), d.at("v_max").get<double>()};
        s.bit_budget = j.at("bit_budget").get<int>();
        s.code_width = j.at("code_width").get<int>();
        s.params_hash = std::stoull(j.at("params_hash").get<std::string>(), nullptr, 16);
        for (const auto& row : j.at("vertices")) {
            if (row.size() != 4) throw ParseError("surface: vertex rows need 4 fields");
            s.vertices.push_back({row[0].get<double>(), row[1].get<double>(),
                                  row[2].get<double>(), row[3].get<double>()});
        }
        std::vector<std::uint32_t> codes;
        for (const auto& row : j.at("triangles")) {
            SurfaceTriangle t;
            const auto& idx = row.at("v");
            for (int k = 0; k < 3; ++k) {
                t.v[static_cast<std::size_t>(k)] = idx.at(static_cast<std::size_t>(k)).get<int>();
                if (t.v[static_cast<std::size_t>(k)] < 0 ||
                    t.v[static_cast<std::size_t>(k)] >= static_cast<int>(s.vertices.size())) {
                    throw ParseError("surface: triangle vertex index out of range");
                }
            }
            const std::string bits = row.at("code").get<std::string>();
            if (static_cast<int>(bits.size()) != s.code_width) {
                throw ParseError("surface: code width mismatch");
            }
            t.code = 0;
            for (char ch : bits) {
                if (ch != '0' && ch != '1') throw ParseError("surface: malformed code bit string");
                t.code = (t.code << 1) | static_cast<std::uint32_t>(ch == '1');
            }
            codes.push_back(t.code);
            s.triangles.push_back(t);
        }
        std::sort(codes.begin(), codes.end());
        if (std::adjacent_find(codes.begin(), codes.end()) != codes.end()) {
            throw ParseError("surface: duplicate DLog codes");
        }
        if (code_width_for(s.triangles.size()) > s.code_width) {
            throw ParseError("surface: code width below ceil(log2(triangle count))");
        }
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("surface: missing or mistyped field: ") + e.what());
    }
}

} // namespace pdm
