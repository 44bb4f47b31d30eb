#include "fractile/geom2d.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

namespace fractile::geom {

Mat2 Mat2::inverse() const {
    double dt = det();
    if (dt == 0.0) raise(Errc::degenerate_image, "singular linear part");
    double inv = 1.0 / dt;
    return {d * inv, -b * inv, -c * inv, a * inv};
}

double spectral_norm(const Mat2& m) {
    // Largest singular value from the eigenvalues of M^T M.
    double t = m.a * m.a + m.b * m.b + m.c * m.c + m.d * m.d;
    double dt = m.det();
    double disc = t * t - 4.0 * dt * dt;
    if (disc < 0.0) disc = 0.0;
    return std::sqrt(0.5 * (t + std::sqrt(disc)));
}

AffineMap AffineMap::identity() {
    AffineMap f;
    f.linear = Mat2{};
    f.shift = Vec2{};
    f.kind = MapKind::similarity;
    f.ratio = 1.0;
    f.spectral_bound = 1.0;
    return f;
}

AffineMap AffineMap::similarity(double ratio, double rotation_rad, bool reflect, Vec2 shift) {
    AffineMap f;
    Mat2 r = Mat2::rotation(rotation_rad);
    if (reflect) {
        // R * diag(1,-1)
        r = Mat2{r.a, -r.b, r.c, -r.d};
    }
    f.linear = Mat2{ratio * r.a, ratio * r.b, ratio * r.c, ratio * r.d};
    f.shift = shift;
    f.kind = MapKind::similarity;
    f.ratio = ratio;
    f.spectral_bound = ratio;
    return f;
}

AffineMap AffineMap::affine(const Mat2& linear, Vec2 shift) {
    AffineMap f;
    f.linear = linear;
    f.shift = shift;
    f.kind = MapKind::general_affine;
    f.ratio = 0.0;
    f.spectral_bound = spectral_norm(linear);
    return f;
}

AffineMap AffineMap::inverse() const {
    AffineMap f;
    f.linear = linear.inverse();
    f.shift = -f.linear.apply(shift);
    f.kind = kind;
    f.ratio = kind == MapKind::similarity ? 1.0 / ratio : 0.0;
    f.spectral_bound = spectral_norm(f.linear);
    return f;
}

AffineMap compose(const AffineMap& f, const AffineMap& g) {
    AffineMap h;
    h.linear = f.linear.mul(g.linear);
    h.shift = f.linear.apply(g.shift) + f.shift;
    if (f.kind == MapKind::similarity && g.kind == MapKind::similarity) {
        h.kind = MapKind::similarity;
        h.ratio = f.ratio * g.ratio;
        h.spectral_bound = h.ratio;
    } else {
        h.kind = MapKind::general_affine;
        h.ratio = 0.0;
        h.spectral_bound = spectral_norm(h.linear);
    }
    return h;
}

double dist_point_segment(Vec2 p, const Segment& s) {
    Vec2 d = s.b - s.a;
    double l2 = dot(d, d);
    if (l2 == 0.0) return dist(p, s.a);
    double t = dot(p - s.a, d) / l2;
    t = std::clamp(t, 0.0, 1.0);
    return dist(p, s.a + t * d);
}

static double ring_signed_area(const std::vector<Vec2>& v) {
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        Vec2 a = v[i], b = v[(i + 1) % v.size()];
        s += cross(a, b);
    }
    return 0.5 * s;
}

double ConvexPoly::area() const { return ring_signed_area(v); }

double ConvexPoly::perimeter() const {
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) s += dist(v[i], v[(i + 1) % v.size()]);
    return s;
}

double ConvexPoly::diameter() const {
    double best = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = i + 1; j < v.size(); ++j) best = std::max(best, dist(v[i], v[j]));
    return best;
}

Vec2 ConvexPoly::centroid() const {
    double a6 = 0.0;
    Vec2 c;
    for (std::size_t i = 0; i < v.size(); ++i) {
        Vec2 p = v[i], q = v[(i + 1) % v.size()];
        double w = cross(p, q);
        a6 += w;
        c = c + (p + q) * w;
    }
    if (a6 == 0.0) return v.empty() ? Vec2{} : v[0];
    return c * (1.0 / (3.0 * a6));
}

void ConvexPoly::bounding_box(Vec2& lo, Vec2& hi) const {
    lo = hi = v.at(0);
    for (Vec2 p : v) {
        lo.x = std::min(lo.x, p.x);
        lo.y = std::min(lo.y, p.y);
        hi.x = std::max(hi.x, p.x);
        hi.y = std::max(hi.y, p.y);
    }
}

bool ConvexPoly::contains(Vec2 p, double pad) const {
    for (std::size_t i = 0; i < v.size(); ++i) {
        Vec2 a = v[i], b = v[(i + 1) % v.size()];
        Vec2 e = b - a;
        double len = norm(e);
        if (len == 0.0) continue;
        // left-of-edge test, scaled to a true distance
        if (cross(e, p - a) < -pad * len) return false;
    }
    return true;
}

double ConvexPoly::boundary_distance(Vec2 p) const {
    // For interior points of a convex polygon the edge-line distances realize
    // the boundary distance.
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < v.size(); ++i) {
        Vec2 a = v[i], b = v[(i + 1) % v.size()];
        Vec2 e = b - a;
        double len = norm(e);
        if (len == 0.0) continue;
        best = std::min(best, cross(e, p - a) / len);
    }
    return best;
}

std::optional<ConvexPoly> normalize_ring(std::vector<Vec2> ring, Tol tol) {
    if (ring.size() < 3) return std::nullopt;
    double sa = ring_signed_area(ring);
    if (sa < 0.0) {
        std::reverse(ring.begin(), ring.end());
        sa = -sa;
    }
    if (sa <= tol.area) return std::nullopt;

    // Drop duplicate and (near-)collinear vertices until stable.
    bool changed = true;
    while (changed && ring.size() >= 3) {
        changed = false;
        std::vector<Vec2> out;
        out.reserve(ring.size());
        std::size_t n = ring.size();
        for (std::size_t i = 0; i < n; ++i) {
            Vec2 prev = ring[(i + n - 1) % n];
            Vec2 cur = ring[i];
            Vec2 next = ring[(i + 1) % n];
            if (dist(cur, prev) <= tol.len) {
                changed = true;
                continue;
            }
            Vec2 e1 = cur - prev, e2 = next - cur;
            if (cross(e1, e2) <= tol.len * (norm(e1) + norm(e2))) {
                changed = true;
                continue;
            }
            out.push_back(cur);
        }
        ring = std::move(out);
    }
    if (ring.size() < 3) return std::nullopt;
    if (ring_signed_area(ring) <= tol.area) return std::nullopt;
    return ConvexPoly{std::move(ring)};
}

ConvexPoly convex_hull(std::span<const Vec2> points, Tol tol) {
    if (points.size() < 3) raise(Errc::degenerate_hull, "need at least 3 points");
    std::vector<Vec2> pts(points.begin(), points.end());
    std::sort(pts.begin(), pts.end(), [](Vec2 a, Vec2 b) {
        return a.x < b.x || (a.x == b.x && a.y < b.y);
    });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }),
              pts.end());

    auto build = [&](auto begin, auto end) {
        std::vector<Vec2> chain;
        for (auto it = begin; it != end; ++it) {
            while (chain.size() >= 2 &&
                   cross(chain[chain.size() - 1] - chain[chain.size() - 2],
                         *it - chain[chain.size() - 1]) <= 0.0)
                chain.pop_back();
            chain.push_back(*it);
        }
        return chain;
    };
    std::vector<Vec2> lower = build(pts.begin(), pts.end());
    std::vector<Vec2> upper = build(pts.rbegin(), pts.rend());
    std::vector<Vec2> ring(lower.begin(), lower.end() - (lower.empty() ? 0 : 1));
    ring.insert(ring.end(), upper.begin(), upper.end() - (upper.empty() ? 0 : 1));

    auto poly = normalize_ring(std::move(ring), tol);
    if (!poly) raise(Errc::degenerate_hull, "input points are (near-)collinear");
    return *poly;
}

ConvexPoly apply_poly(const AffineMap& f, const ConvexPoly& p, Tol) {
    std::vector<Vec2> ring;
    ring.reserve(p.size());
    for (Vec2 q : p.v) ring.push_back(f(q));
    if (f.linear.det() < 0.0) std::reverse(ring.begin(), ring.end());
    // Tolerances must follow the image scale, not the caller's scale, so that
    // small tiles map cleanly.
    double d = 0.0;
    for (std::size_t i = 1; i < ring.size(); ++i) d = std::max(d, dist(ring[0], ring[i]));
    auto out = normalize_ring(std::move(ring), Tol::for_diameter(std::max(d, 1e-300)));
    if (!out || out->size() != p.size())
        raise(Errc::degenerate_image, "affine image degenerated");
    return *out;
}

std::optional<ConvexPoly> clip_halfplane(const ConvexPoly& p, Vec2 n, double c, Tol tol) {
    double nl = norm(n);
    if (nl == 0.0) return p;
    n = n * (1.0 / nl);
    c /= nl;

    std::vector<Vec2> out;
    out.reserve(p.size() + 2);
    std::size_t m = p.size();
    for (std::size_t i = 0; i < m; ++i) {
        Vec2 a = p.v[i], b = p.v[(i + 1) % m];
        double da = dot(n, a) - c;
        double db = dot(n, b) - c;
        if (da <= 0.0) out.push_back(a);
        if ((da < 0.0 && db > 0.0) || (da > 0.0 && db < 0.0)) {
            double t = da / (da - db);
            out.push_back(a + t * (b - a));
        }
    }
    return normalize_ring(std::move(out), tol);
}

std::optional<ConvexPoly> intersect(const ConvexPoly& p, const ConvexPoly& q, Tol tol) {
    Vec2 plo, phi, qlo, qhi;
    p.bounding_box(plo, phi);
    q.bounding_box(qlo, qhi);
    if (plo.x > qhi.x || qlo.x > phi.x || plo.y > qhi.y || qlo.y > phi.y) return std::nullopt;

    std::optional<ConvexPoly> cur = p;
    std::size_t m = q.size();
    for (std::size_t i = 0; i < m && cur; ++i) {
        Vec2 a = q.v[i], b = q.v[(i + 1) % m];
        Vec2 e = b - a;
        Vec2 nrm{e.y, -e.x};  // outward for CCW
        cur = clip_halfplane(*cur, nrm, dot(nrm, a), tol);
    }
    return cur;
}

double intersection_area(const ConvexPoly& p, const ConvexPoly& q, Tol tol) {
    auto r = intersect(p, q, tol);
    return r ? r->area() : 0.0;
}

double CellSet::total_area() const {
    double s = 0.0;
    for (const auto& c : cells) s += c.area();
    return s;
}

CellSet subtract(const CellSet& region, const ConvexPoly& p, Tol tol) {
    CellSet out;
    Vec2 plo, phi;
    p.bounding_box(plo, phi);
    for (const auto& cell : region.cells) {
        Vec2 clo, chi;
        cell.bounding_box(clo, chi);
        if (clo.x > phi.x || plo.x > chi.x || clo.y > phi.y || plo.y > chi.y) {
            out.cells.push_back(cell);
            continue;
        }
        std::optional<ConvexPoly> rest = cell;
        std::size_t m = p.size();
        for (std::size_t i = 0; i < m && rest; ++i) {
            Vec2 a = p.v[i], b = p.v[(i + 1) % m];
            Vec2 e = b - a;
            Vec2 nrm{e.y, -e.x};
            double c = dot(nrm, a);
            // piece on the outside of this edge is disjoint from p
            if (auto piece = clip_halfplane(*rest, -nrm, -c, tol)) out.cells.push_back(*piece);
            rest = clip_halfplane(*rest, nrm, c, tol);
        }
        // whatever remains lies inside p and is discarded
    }
    return out;
}

// Collinear overlap length of two segments, or 0.
static double collinear_overlap(const Segment& s, const Segment& t, Tol tol) {
    Vec2 d = s.b - s.a;
    double len = norm(d);
    if (len <= tol.len) return 0.0;
    Vec2 u = d * (1.0 / len);
    if (std::abs(cross(u, t.a - s.a)) > tol.len) return 0.0;
    if (std::abs(cross(u, t.b - s.a)) > tol.len) return 0.0;
    double p0 = dot(u, t.a - s.a);
    double p1 = dot(u, t.b - s.a);
    if (p0 > p1) std::swap(p0, p1);
    double lo = std::max(0.0, p0), hi = std::min(len, p1);
    return std::max(0.0, hi - lo);
}

std::vector<Segment> exposed_segments(const CellSet& cells, Tol tol) {
    std::vector<Segment> result;
    std::size_t n = cells.cells.size();
    for (std::size_t i = 0; i < n; ++i) {
        const auto& poly = cells.cells[i];
        std::size_t m = poly.size();
        for (std::size_t e = 0; e < m; ++e) {
            Segment edge{poly.v[e], poly.v[(e + 1) % m]};
            Vec2 d = edge.b - edge.a;
            double len = norm(d);
            if (len <= tol.len) continue;
            Vec2 u = d * (1.0 / len);
            // Portions of [0,len] covered by collinear edges of sibling cells.
            std::vector<std::pair<double, double>> covered;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                const auto& other = cells.cells[j];
                std::size_t mo = other.size();
                for (std::size_t f = 0; f < mo; ++f) {
                    Segment oe{other.v[f], other.v[(f + 1) % mo]};
                    if (std::abs(cross(u, oe.a - edge.a)) > tol.len) continue;
                    if (std::abs(cross(u, oe.b - edge.a)) > tol.len) continue;
                    double p0 = dot(u, oe.a - edge.a);
                    double p1 = dot(u, oe.b - edge.a);
                    if (p0 > p1) std::swap(p0, p1);
                    double lo = std::max(0.0, p0), hi = std::min(len, p1);
                    if (hi - lo > tol.len) covered.emplace_back(lo, hi);
                }
            }
            std::sort(covered.begin(), covered.end());
            double cursor = 0.0;
            auto emit = [&](double lo, double hi) {
                if (hi - lo > tol.len)
                    result.push_back(Segment{edge.a + lo * u, edge.a + hi * u});
            };
            for (auto [lo, hi] : covered) {
                if (lo > cursor) emit(cursor, lo);
                cursor = std::max(cursor, hi);
            }
            if (cursor < len) emit(cursor, len);
        }
    }
    return result;
}

bool Component::contains(Vec2 p, double pad) const {
    for (const auto& cell : cells.cells)
        if (cell.contains(p, pad)) return true;
    return false;
}

double Component::boundary_distance(Vec2 p) const {
    if (is_convex && convex_outline) return convex_outline->boundary_distance(p);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& s : exposed) best = std::min(best, dist_point_segment(p, s));
    return best;
}

InscribedDisk inradius_convex(const ConvexPoly& p) {
    // Chebyshev center: maximize rho subject to n_e . x + rho <= c_e.
    struct Constraint {
        Vec2 n;
        double c;
    };
    std::vector<Constraint> cs;
    std::size_t m = p.size();
    cs.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
        Vec2 a = p.v[i], b = p.v[(i + 1) % m];
        Vec2 e = b - a;
        double len = norm(e);
        if (len == 0.0) continue;
        Vec2 n{e.y / len, -e.x / len};
        cs.push_back({n, dot(n, a)});
    }
    double scale = p.diameter();
    double slack = 1e-12 * std::max(scale, 1.0);

    InscribedDisk best;
    best.radius = -1.0;
    std::size_t k = cs.size();
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j)
            for (std::size_t l = j + 1; l < k; ++l) {
                // Solve the 3x3 system with rows [n.x, n.y, 1 | c].
                const Constraint* t[3] = {&cs[i], &cs[j], &cs[l]};
                double a11 = t[0]->n.x, a12 = t[0]->n.y;
                double a21 = t[1]->n.x, a22 = t[1]->n.y;
                double a31 = t[2]->n.x, a32 = t[2]->n.y;
                double b1 = t[0]->c, b2 = t[1]->c, b3 = t[2]->c;
                double det = a11 * (a22 - a32) - a12 * (a21 - a31) + (a21 * a32 - a22 * a31);
                if (std::abs(det) < 1e-12) continue;
                double x = (b1 * (a22 - a32) - a12 * (b2 - b3) + (b2 * a32 - a22 * b3)) / det;
                double y = (a11 * (b2 - b3) - b1 * (a21 - a31) + (a21 * b3 - b2 * a31)) / det;
                double r = (a11 * (a22 * b3 - a32 * b2) - a12 * (a21 * b3 - a31 * b2) +
                            b1 * (a21 * a32 - a31 * a22)) /
                           det;
                if (r < 0.0) continue;
                bool feasible = true;
                for (const auto& cc : cs)
                    if (dot(cc.n, Vec2{x, y}) + r > cc.c + slack) {
                        feasible = false;
                        break;
                    }
                if (!feasible) continue;
                if (r > best.radius + slack ||
                    (std::abs(r - best.radius) <= slack &&
                     (x < best.center.x || (x == best.center.x && y < best.center.y)))) {
                    best.radius = r;
                    best.center = {x, y};
                }
            }
    if (best.radius < 0.0) {
        best.radius = 0.0;
        best.center = p.centroid();
    }
    return best;
}

InscribedDisk inradius_component(const Component& c, double tol) {
    if (c.is_convex && c.convex_outline) return inradius_convex(*c.convex_outline);

    Vec2 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    Vec2 hi{-lo.x, -lo.y};
    for (const auto& cell : c.cells.cells) {
        Vec2 clo, chi;
        cell.bounding_box(clo, chi);
        lo.x = std::min(lo.x, clo.x);
        lo.y = std::min(lo.y, clo.y);
        hi.x = std::max(hi.x, chi.x);
        hi.y = std::max(hi.y, chi.y);
    }
    auto value = [&](Vec2 p) {
        double d = c.boundary_distance(p);
        return c.contains(p, 0.0) ? d : -d;
    };

    // Grid seeding, then pattern-search refinement of the best seeds.
    const int res = 48;
    Vec2 span = hi - lo;
    std::vector<std::pair<double, Vec2>> seeds;
    for (int iy = 0; iy <= res; ++iy)
        for (int ix = 0; ix <= res; ++ix) {
            Vec2 p{lo.x + span.x * ix / res, lo.y + span.y * iy / res};
            double f = value(p);
            if (f > 0.0) seeds.emplace_back(f, p);
        }
    std::sort(seeds.begin(), seeds.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
    if (seeds.size() > 6) seeds.resize(6);

    InscribedDisk best;
    for (auto [f0, p0] : seeds) {
        Vec2 p = p0;
        double f = f0;
        double step = std::max(span.x, span.y) / res;
        while (step > 0.25 * tol) {
            bool improved = false;
            static const std::array<Vec2, 8> dirs{Vec2{1, 0}, Vec2{-1, 0}, Vec2{0, 1},
                                                  Vec2{0, -1}, Vec2{1, 1}, Vec2{1, -1},
                                                  Vec2{-1, 1}, Vec2{-1, -1}};
            for (Vec2 d : dirs) {
                Vec2 q = p + step * d;
                double fq = value(q);
                if (fq > f) {
                    f = fq;
                    p = q;
                    improved = true;
                }
            }
            if (!improved) step *= 0.5;
        }
        if (f > best.radius) {
            best.radius = f;
            best.center = p;
        }
    }
    return best;
}

std::vector<Component> components(const CellSet& cells, Tol tol) {
    std::size_t n = cells.cells.size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    };

    auto edges_of = [](const ConvexPoly& p) {
        std::vector<Segment> out;
        for (std::size_t i = 0; i < p.size(); ++i)
            out.push_back({p.v[i], p.v[(i + 1) % p.size()]});
        return out;
    };
    std::vector<std::vector<Segment>> edges;
    edges.reserve(n);
    for (const auto& c : cells.cells) edges.push_back(edges_of(c));

    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            if (find(i) == find(j)) continue;
            bool adjacent = false;
            for (const auto& a : edges[i]) {
                for (const auto& b : edges[j])
                    if (collinear_overlap(a, b, tol) > tol.len) {
                        adjacent = true;
                        break;
                    }
                if (adjacent) break;
            }
            if (adjacent) parent[find(i)] = find(j);
        }

    std::vector<std::vector<std::size_t>> groups(n);
    for (std::size_t i = 0; i < n; ++i) groups[find(i)].push_back(i);

    std::vector<Component> out;
    for (auto& g : groups) {
        if (g.empty()) continue;
        Component comp;
        std::vector<Vec2> allv;
        for (std::size_t idx : g) {
            comp.cells.cells.push_back(cells.cells[idx]);
            for (Vec2 p : cells.cells[idx].v) allv.push_back(p);
        }
        comp.area = comp.cells.total_area();
        comp.exposed = exposed_segments(comp.cells, tol);
        comp.perimeter = 0.0;
        for (const auto& s : comp.exposed) comp.perimeter += s.length();

        ConvexPoly hull = convex_hull(allv, tol);
        if (hull.area() - comp.area <=
            std::max(tol.area * double(g.size() + 1), 1e-12 * hull.area())) {
            comp.is_convex = true;
            comp.convex_outline = hull;
        }
        double diam = hull.diameter();
        InscribedDisk disk = inradius_component(comp, std::max(tol.len, 1e-9 * diam));
        comp.inradius = disk.radius;
        comp.incenter = disk.center;
        out.push_back(std::move(comp));
    }

    // Deterministic generator order: area descending (quantized by the area
    // tolerance so congruent twins tie), then incenter lexicographic.
    auto qarea = [&](double a) { return std::floor(a / std::max(tol.area, 1e-300) + 0.5); };
    std::sort(out.begin(), out.end(), [&](const Component& a, const Component& b) {
        double qa = qarea(a.area), qb = qarea(b.area);
        if (qa != qb) return qa > qb;
        if (a.incenter.x != b.incenter.x) return a.incenter.x < b.incenter.x;
        return a.incenter.y < b.incenter.y;
    });
    return out;
}

std::optional<ConvexPoly> erode(const ConvexPoly& p, double eps, Tol tol) {
    if (eps == 0.0) return p;
    std::optional<ConvexPoly> cur = p;
    std::size_t m = p.size();
    for (std::size_t i = 0; i < m && cur; ++i) {
        Vec2 a = p.v[i], b = p.v[(i + 1) % m];
        Vec2 e = b - a;
        double len = norm(e);
        if (len == 0.0) continue;
        Vec2 n{e.y / len, -e.x / len};
        cur = clip_halfplane(*cur, n, dot(n, a) - eps, tol);
    }
    return cur;
}

double inner_tube_area(const ConvexPoly& p, double eps, Tol tol) {
    if (eps <= 0.0) return 0.0;
    auto inner = erode(p, eps, tol);
    return p.area() - (inner ? inner->area() : 0.0);
}

static double point_poly_distance(Vec2 p, const ConvexPoly& poly) {
    if (poly.contains(p, 0.0)) return 0.0;
    double best = std::numeric_limits<double>::infinity();
    std::size_t m = poly.size();
    for (std::size_t i = 0; i < m; ++i)
        best = std::min(best, dist_point_segment(p, Segment{poly.v[i], poly.v[(i + 1) % m]}));
    return best;
}

double hausdorff(const ConvexPoly& p, const ConvexPoly& q) {
    double h = 0.0;
    for (Vec2 v : p.v) h = std::max(h, point_poly_distance(v, q));
    for (Vec2 v : q.v) h = std::max(h, point_poly_distance(v, p));
    return h;
}

}  // namespace fractile::geom
