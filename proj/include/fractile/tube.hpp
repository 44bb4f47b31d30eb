#pragma once

// Inner tube volumes of the tiling: the exact head/tail split over tiles, an
// independent per-tile enumeration route, a Monte Carlo oracle, tube curves
// and asymptotic slope estimation.

#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

#include "fractile/tiling.hpp"

namespace fractile::tube {

// Inner tube area of generator q at radius eps. Exact (halfplane erosion) for
// convex generators; Monte Carlo with a fixed seed otherwise (flagged).
struct VEps {
    double value = 0.0;
    bool approximate = false;
};
VEps v_eps_generator(const tiling::TilingSpec& spec, std::size_t q, double eps);

// Total tile area S = sum_q area(G_q) / (1 - sum_j r_j^2).
double total_tile_area(const tiling::TilingSpec& spec);

struct TubeValue {
    double value = 0.0;
    std::size_t head_tiles = 0;  // tiles with inradius >= eps
    double tail_mass = 0.0;      // closed-form area of the fully-immersed tail
    bool approximate = false;
};

// V(eps): head = sum over tiles with g_q rho_w >= eps of rho_w^2 v_q(eps/rho_w),
// grouped by exact scale class; tail = S - head full areas (those tiles lie
// entirely within their own tube). Throws DivergentTail when sum r_j^2 >= 1.
TubeValue tube_volume(const tiling::TilingSpec& spec, double eps,
                      const ifs::Budget& budget = {});

// Same number via explicit tile-by-tile enumeration (TileStream); the
// independent code path for consistency checks.
TubeValue tube_volume_by_tiles(const tiling::TilingSpec& spec, double eps,
                               const ifs::Budget& budget = {});

struct TubeCurve {
    std::vector<double> eps;     // descending geometric grid
    std::vector<double> value;   // V(eps)
    std::vector<std::size_t> head_tiles;
    std::vector<double> tail_mass;
    bool approximate = false;
    double min_gen_inradius = 0.0;
    double max_gen_inradius = 0.0;
};

TubeCurve tube_curve(const tiling::TilingSpec& spec, double eps_max, double eps_min,
                     int points_per_decade, const ifs::Budget& budget = {});

struct McTube {
    double estimate = 0.0;
    double std_error = 0.0;
    std::size_t samples = 0;
    std::size_t hits = 0;
    std::size_t unresolved = 0;  // descent hit the depth cap (counted as miss)
    double unresolved_fraction = 0.0;
};

// Rejection-sample the hull, locate each point's tile by word-tree descent,
// and test distance to the tile boundary. Deterministic for a fixed seed.
McTube monte_carlo_tube(const tiling::TilingSpec& spec, double eps, std::size_t n_samples,
                        std::uint64_t seed = 0x5EED);

struct SlopeReport {
    double slope = 0.0;
    double intercept = 0.0;
    double window_lo = 0.0;
    double window_hi = 0.0;
    // max - min of log(V(eps) eps^{D-2}) over one multiplicative period at the
    // small end; set when D and a lattice base are supplied.
    std::optional<double> oscillation;
};

// Least-squares slope of log V against log eps over the smallest decade of the
// grid. Requires the curve to reach at least two decades below the smallest
// generator inradius.
SlopeReport asymptotic_slope(const TubeCurve& curve, std::optional<double> dimension = {},
                             std::optional<double> lattice_base = {});

// CSV with the fixed header eps,V_exact,V_mc,mc_stderr,head_tiles,tail_mass;
// 17 significant digits; MC columns empty unless provided.
void write_curve_csv(std::ostream& out, const TubeCurve& curve,
                     const std::vector<McTube>* mc = nullptr);

}  // namespace fractile::tube
