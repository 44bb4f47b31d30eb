#pragma once

// Tolerance-based planar convex geometry: polygons, affine images, halfplane
// clipping, region subtraction into convex cells, Chebyshev centers and inner
// parallel bodies. Everything is a value type; all operations are pure.

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "fractile/errors.hpp"

namespace fractile::geom {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double px, double py) : x(px), y(py) {}

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator-() const { return {-x, -y}; }
};

inline Vec2 operator*(double s, Vec2 v) { return v * s; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double dist(Vec2 a, Vec2 b) { return norm(a - b); }

// 2x2 matrix [[a,b],[c,d]], row major.
struct Mat2 {
    double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

    Vec2 apply(Vec2 v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }
    Mat2 mul(const Mat2& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
    }
    double det() const { return a * d - b * c; }
    Mat2 inverse() const;
    static Mat2 rotation(double rad) {
        double co = std::cos(rad), si = std::sin(rad);
        return {co, -si, si, co};
    }
};

// Largest singular value (spectral norm), closed form.
double spectral_norm(const Mat2& m);

// Absolute tolerances; derive them from the diameter of the geometry at hand.
struct Tol {
    double len = 1e-9;    // length threshold
    double area = 1e-12;  // area threshold

    static Tol for_diameter(double diam) { return Tol{1e-9 * diam, 1e-12 * diam * diam}; }
};

enum class MapKind { similarity, general_affine };

// Contracting planar affine map. For similarities linear = ratio * (orthogonal).
struct AffineMap {
    Mat2 linear;
    Vec2 shift;
    MapKind kind = MapKind::general_affine;
    double ratio = 0.0;           // similarity ratio; 0 for general affine
    double spectral_bound = 0.0;  // largest singular value of linear

    Vec2 operator()(Vec2 p) const { return linear.apply(p) + shift; }

    static AffineMap identity();
    // ratio * R(rotation) * (reflect ? diag(1,-1) : I) x + shift
    static AffineMap similarity(double ratio, double rotation_rad, bool reflect, Vec2 shift);
    static AffineMap affine(const Mat2& linear, Vec2 shift);

    AffineMap inverse() const;
};

// f after g: x -> f(g(x)). Similarity kind propagates with ratio r_f * r_g.
AffineMap compose(const AffineMap& f, const AffineMap& g);

struct Segment {
    Vec2 a, b;
    double length() const { return dist(a, b); }
};

double dist_point_segment(Vec2 p, const Segment& s);

// Counterclockwise convex polygon, strictly convex up to tolerance.
struct ConvexPoly {
    std::vector<Vec2> v;

    std::size_t size() const { return v.size(); }
    double area() const;
    double perimeter() const;
    double diameter() const;
    Vec2 centroid() const;
    void bounding_box(Vec2& lo, Vec2& hi) const;
    // Signed distance convention: inside iff every edge constraint holds up to pad.
    bool contains(Vec2 p, double pad = 0.0) const;
    // Distance from an interior point to the polygon boundary (min over edges).
    double boundary_distance(Vec2 p) const;
};

// Normalize a vertex ring into a valid CCW convex polygon: dedupe, drop
// near-collinear vertices, orient. Returns nullopt when the result degenerates
// (fewer than 3 vertices or area within tolerance of zero).
std::optional<ConvexPoly> normalize_ring(std::vector<Vec2> ring, Tol tol);

// Minimal CCW hull of a point set; throws DegenerateHull for (near-)collinear input.
ConvexPoly convex_hull(std::span<const Vec2> points, Tol tol);

// Image polygon under an affine map; reverses orientation when det < 0.
// Throws DegenerateImage if the image fails the convexity invariants.
ConvexPoly apply_poly(const AffineMap& f, const ConvexPoly& p, Tol tol);

// p intersect {x : dot(n,x) <= c}; n need not be unit length for the cut
// itself but offsets are interpreted in units of |n|.
std::optional<ConvexPoly> clip_halfplane(const ConvexPoly& p, Vec2 n, double c, Tol tol);

std::optional<ConvexPoly> intersect(const ConvexPoly& p, const ConvexPoly& q, Tol tol);
double intersection_area(const ConvexPoly& p, const ConvexPoly& q, Tol tol);

// Finite union of interior-disjoint convex cells.
struct CellSet {
    std::vector<ConvexPoly> cells;

    double total_area() const;
    bool empty() const { return cells.empty(); }
};

// region minus p, as interior-disjoint convex cells (cells fully inside p are
// dropped; cells crossing p are split along p's edge lines).
CellSet subtract(const CellSet& region, const ConvexPoly& p, Tol tol);

// Edge-connected component of a cell set.
struct Component {
    CellSet cells;
    double area = 0.0;
    double perimeter = 0.0;  // outer (exposed) boundary length
    double inradius = 0.0;
    Vec2 incenter;
    bool is_convex = false;
    // Present when the union of cells is convex: its outline polygon.
    std::optional<ConvexPoly> convex_outline;
    // Boundary of the union: cell edge portions not shared with a sibling cell.
    std::vector<Segment> exposed;

    bool contains(Vec2 p, double pad = 0.0) const;
    // Distance from an interior point to the exposed boundary.
    double boundary_distance(Vec2 p) const;
};

// Partition cells by edge adjacency (shared collinear overlap longer than
// tol.len); components sorted by (area desc, incenter lexicographic).
std::vector<Component> components(const CellSet& cells, Tol tol);

struct InscribedDisk {
    double radius = 0.0;
    Vec2 center;
};

// Chebyshev center of a convex polygon (largest inscribed disk), solved as a
// 3-variable LP over the edge constraints.
InscribedDisk inradius_convex(const ConvexPoly& p);

// Inradius of a possibly nonconvex component, to absolute accuracy ~tol:
// convex components delegate to inradius_convex, otherwise grid seeding plus
// hill climbing on distance-to-exposed-boundary.
InscribedDisk inradius_component(const Component& c, double tol);

// Inner parallel body {x in p : dist(x, boundary) >= eps}; nullopt iff the
// body is empty (eps >= inradius).
std::optional<ConvexPoly> erode(const ConvexPoly& p, double eps, Tol tol);

// area(p) - area(erode(p, eps)); equals area(p) once eps >= inradius.
double inner_tube_area(const ConvexPoly& p, double eps, Tol tol);

// Hausdorff distance between convex polygons (max vertex-to-polygon distance,
// both directions).
double hausdorff(const ConvexPoly& p, const ConvexPoly& q);

// Exposed boundary of a cell union: for every cell edge, the sub-intervals not
// covered by overlapping collinear edges of other cells.
std::vector<Segment> exposed_segments(const CellSet& cells, Tol tol);

}  // namespace fractile::geom
