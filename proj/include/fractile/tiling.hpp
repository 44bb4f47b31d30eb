#pragma once

// Construction of the canonical tiling: generators from the hull complement,
// hull iterates and tilesets, best-first tile enumeration by inradius, the
// structure-theorem verifier and the SVG renderer.

#include <cstddef>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "fractile/geom2d.hpp"
#include "fractile/ifs.hpp"

namespace fractile::tiling {

struct Generator {
    geom::Component comp;
    double inradius = 0.0;  // g_q
    double area = 0.0;
};

struct TilingSpec {
    ifs::IfsSystem sys;
    geom::ConvexPoly hull;
    ifs::HullEstimate hull_estimate;
    ifs::ValidationReport validation;
    std::vector<Generator> generators;  // index q, deterministic order
    geom::Tol tol;

    std::size_t generator_count() const { return generators.size(); }
    double hull_area() const { return hull.area(); }
    double generator_area_total() const;
    double max_generator_inradius() const;
    double min_generator_inradius() const;
};

// Validates the system and derives generators; throws NotAdmissible when the
// tileset or nontriviality condition fails.
TilingSpec build_tiling(const ifs::IfsSystem& sys, const ifs::Budget& budget = {},
                        double tau_hull_rel = 1e-9);

// C_0 = {C}, C_k = {phi_w(C) : |w| = k}, cells in word-lexicographic order.
std::vector<geom::CellSet> hull_iterates(const TilingSpec& spec, int k,
                                         const ifs::Budget& budget = {});

struct Tileset {
    int k = 0;
    geom::CellSet cells;
    double area = 0.0;
};

// T_k = closure(C_{k-1} minus C_k), as a convex-cell decomposition.
Tileset tileset(const TilingSpec& spec, int k, const ifs::Budget& budget = {});

struct TileHandle {
    ifs::Word word;
    std::size_t q = 0;       // generator index
    geom::AffineMap map;     // phi_w
    double scale = 1.0;      // rho_w (self-similar systems)
    double inradius = 0.0;   // g_q * rho_w
    int level = 1;           // |word| + 1
};

// Best-first stream of tiles with inradius >= r_min, nonincreasing inradius,
// ties broken by word (lexicographic), then q. Self-similar systems only.
class TileStream {
  public:
    TileStream(const TilingSpec& spec, double r_min);
    std::optional<TileHandle> next();

  private:
    struct Node {
        double inradius;
        double scale;
        std::size_t q;
        ifs::Word word;
    };
    struct NodeAfter {
        bool operator()(const Node& a, const Node& b) const;
    };
    const TilingSpec* spec_;
    double r_min_;
    std::priority_queue<Node, std::vector<Node>, NodeAfter> frontier_;
};

std::vector<TileHandle> tiles_down_to(const TilingSpec& spec, double r_min,
                                      const ifs::Budget& budget = {});

// Level-order enumeration (all levels <= max_level); works for general affine
// systems where inradius ordering is undefined.
std::vector<TileHandle> tiles_by_level(const TilingSpec& spec, int max_level,
                                       const ifs::Budget& budget = {});

// Area-based checks of the structure theorems up to k_max:
//  - sym-diff between Phi(T_k) and T_{k+1},
//  - tileset areas against the (sum_j |det|)^{k-1} recursion,
//  - completeness: C splits into T_1..T_k plus C_k.
struct StructureReport {
    int k_max = 0;
    std::vector<double> symdiff_rel;          // k = 1 .. k_max-1
    std::vector<double> tileset_area_rel;     // k = 1 .. k_max
    double completeness_rel = 0.0;
    std::vector<std::size_t> tiles_per_level; // cell counts of each tileset

    double worst() const;
};

StructureReport verify_structure(const TilingSpec& spec, int k_max,
                                 const ifs::Budget& budget = {});

struct RenderOptions {
    std::optional<int> depth;      // tiles of level <= depth
    std::optional<double> r_min;   // or tiles with inradius >= r_min
    double stroke_width_rel = 1e-3;
};

// Deterministic SVG: hull outline plus tile cells colored by level; byte
// identical across runs for fixed inputs.
std::string render_svg(const TilingSpec& spec, const RenderOptions& opt,
                       const ifs::Budget& budget = {});

}  // namespace fractile::tiling
