#include "fractile/tiling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace fractile::tiling {

using geom::CellSet;
using geom::ConvexPoly;
using geom::Tol;
using geom::Vec2;

double TilingSpec::generator_area_total() const {
    double s = 0.0;
    for (const auto& g : generators) s += g.area;
    return s;
}

double TilingSpec::max_generator_inradius() const {
    double s = 0.0;
    for (const auto& g : generators) s = std::max(s, g.inradius);
    return s;
}

double TilingSpec::min_generator_inradius() const {
    double s = std::numeric_limits<double>::infinity();
    for (const auto& g : generators) s = std::min(s, g.inradius);
    return s;
}

TilingSpec build_tiling(const ifs::IfsSystem& sys, const ifs::Budget& budget,
                        double tau_hull_rel) {
    TilingSpec spec;
    spec.sys = sys;
    spec.hull_estimate = ifs::estimate_hull(sys, tau_hull_rel, budget);
    spec.hull = spec.hull_estimate.hull;
    spec.tol = Tol::for_diameter(spec.hull.diameter());
    spec.validation = ifs::validate(sys, spec.hull, spec.tol);
    if (!spec.validation.admissible()) {
        std::string why;
        if (!spec.validation.contraction_ok) why = "a map is not a strict contraction";
        else if (!spec.validation.tileset_ok) why = "hull images overlap with positive area";
        else why = "attractor is convex (no tiles exist)";
        raise(Errc::not_admissible, "system \"" + sys.name + "\" is not admissible: " + why);
    }

    CellSet rest;
    rest.cells.push_back(spec.hull);
    for (const auto& f : sys.maps)
        rest = geom::subtract(rest, geom::apply_poly(f, spec.hull, spec.tol), spec.tol);

    auto comps = geom::components(rest, spec.tol);
    if (comps.size() > budget.component_cap)
        raise(Errc::too_many_components,
              "generator count " + std::to_string(comps.size()) + " exceeds the cap");
    for (auto& c : comps) {
        Generator g;
        g.inradius = c.inradius;
        g.area = c.area;
        g.comp = std::move(c);
        spec.generators.push_back(std::move(g));
    }
    return spec;
}

std::vector<CellSet> hull_iterates(const TilingSpec& spec, int k, const ifs::Budget& budget) {
    std::vector<CellSet> out;
    CellSet cur;
    cur.cells.push_back(spec.hull);
    out.push_back(cur);
    double count = 1.0;
    for (int level = 1; level <= k; ++level) {
        count *= double(spec.sys.map_count());
        if (count > double(budget.cap))
            raise(Errc::budget_exceeded, "hull iterate exceeds the cell budget");
        CellSet next;
        next.cells.reserve(std::size_t(count));
        for (const auto& f : spec.sys.maps)
            for (const auto& cell : out.back().cells)
                next.cells.push_back(geom::apply_poly(f, cell, spec.tol));
        out.push_back(std::move(next));
    }
    return out;
}

Tileset tileset(const TilingSpec& spec, int k, const ifs::Budget& budget) {
    if (k < 1) raise(Errc::parse_error, "tileset level must be >= 1");
    auto iterates = hull_iterates(spec, k, budget);
    CellSet cur = iterates[std::size_t(k) - 1];
    for (const auto& poly : iterates[std::size_t(k)].cells)
        cur = geom::subtract(cur, poly, spec.tol);
    Tileset t;
    t.k = k;
    t.area = cur.total_area();
    t.cells = std::move(cur);
    return t;
}

bool TileStream::NodeAfter::operator()(const Node& a, const Node& b) const {
    // priority_queue pops the "largest"; we want largest inradius, then
    // lexicographically smaller word, then smaller q.
    if (a.inradius != b.inradius) return a.inradius < b.inradius;
    if (a.word.letters != b.word.letters) return ifs::word_less(b.word, a.word);
    return a.q > b.q;
}

TileStream::TileStream(const TilingSpec& spec, double r_min) : spec_(&spec), r_min_(r_min) {
    if (!spec.sys.self_similar)
        raise(Errc::not_self_similar,
              "inradius-ordered enumeration needs a self-similar system (use tiles_by_level)");
    if (!(r_min > 0.0)) raise(Errc::parse_error, "r_min must be positive");
    for (std::size_t q = 0; q < spec.generators.size(); ++q) {
        double g = spec.generators[q].inradius;
        if (g >= r_min) frontier_.push(Node{g, 1.0, q, ifs::Word{}});
    }
}

std::optional<TileHandle> TileStream::next() {
    if (frontier_.empty()) return std::nullopt;
    Node top = frontier_.top();
    frontier_.pop();

    double g = spec_->generators[top.q].inradius;
    for (std::size_t j = 0; j < spec_->sys.map_count(); ++j) {
        double scale = top.scale * spec_->sys.ratios[j];
        if (g * scale >= r_min_) {
            Node child;
            child.inradius = g * scale;
            child.scale = scale;
            child.q = top.q;
            child.word = top.word;
            child.word.letters.push_back(std::uint8_t(j));
            frontier_.push(std::move(child));
        }
    }

    TileHandle h;
    h.word = std::move(top.word);
    h.q = top.q;
    h.map = ifs::map_of_word(spec_->sys, h.word);
    h.scale = top.scale;
    h.inradius = top.inradius;
    h.level = int(h.word.length()) + 1;
    return h;
}

std::vector<TileHandle> tiles_down_to(const TilingSpec& spec, double r_min,
                                      const ifs::Budget& budget) {
    TileStream stream(spec, r_min);
    std::vector<TileHandle> out;
    while (auto t = stream.next()) {
        out.push_back(std::move(*t));
        if (out.size() > budget.cap)
            raise(Errc::budget_exceeded, "tile enumeration exceeds the budget");
    }
    return out;
}

std::vector<TileHandle> tiles_by_level(const TilingSpec& spec, int max_level,
                                       const ifs::Budget& budget) {
    std::vector<TileHandle> out;
    double words = 1.0;
    for (int level = 1; level <= max_level; ++level) {
        if (words * double(spec.generator_count()) + double(out.size()) > double(budget.cap))
            raise(Errc::budget_exceeded, "tile enumeration exceeds the budget");
        for (const auto& w : ifs::WordRange(spec.sys.map_count(), std::size_t(level) - 1)) {
            geom::AffineMap m = ifs::map_of_word(spec.sys, w);
            for (std::size_t q = 0; q < spec.generator_count(); ++q) {
                TileHandle h;
                h.word = w;
                h.q = q;
                h.map = m;
                h.scale = spec.sys.self_similar ? m.ratio : 0.0;
                h.inradius =
                    spec.sys.self_similar ? spec.generators[q].inradius * m.ratio : 0.0;
                h.level = level;
                out.push_back(std::move(h));
            }
        }
        words *= double(spec.sys.map_count());
    }
    return out;
}

double StructureReport::worst() const {
    double w = completeness_rel;
    for (double x : symdiff_rel) w = std::max(w, x);
    for (double x : tileset_area_rel) w = std::max(w, x);
    return w;
}

// Total pairwise intersection area between two interior-disjoint cell sets.
static double cellset_intersection_area(const CellSet& a, const CellSet& b, Tol tol) {
    struct Box {
        Vec2 lo, hi;
    };
    auto boxes = [](const CellSet& s) {
        std::vector<Box> out;
        out.reserve(s.cells.size());
        for (const auto& c : s.cells) {
            Box box;
            c.bounding_box(box.lo, box.hi);
            out.push_back(box);
        }
        return out;
    };
    auto ba = boxes(a), bb = boxes(b);
    double total = 0.0, comp = 0.0;
    for (std::size_t i = 0; i < a.cells.size(); ++i)
        for (std::size_t j = 0; j < b.cells.size(); ++j) {
            if (ba[i].lo.x > bb[j].hi.x || bb[j].lo.x > ba[i].hi.x ||
                ba[i].lo.y > bb[j].hi.y || bb[j].lo.y > ba[i].hi.y)
                continue;
            double v = geom::intersection_area(a.cells[i], b.cells[j], tol);
            double t = total + v;  // Kahan
            comp += (std::abs(total) >= std::abs(v)) ? (total - t) + v : (v - t) + total;
            total = t;
        }
    return total + comp;
}

StructureReport verify_structure(const TilingSpec& spec, int k_max, const ifs::Budget& budget) {
    StructureReport rep;
    rep.k_max = k_max;
    double hull_area = spec.hull_area();
    double det_sum = 0.0;
    for (const auto& f : spec.sys.maps) det_sum += std::abs(f.linear.det());
    double gen_area = spec.generator_area_total();

    std::vector<Tileset> sets;
    sets.reserve(std::size_t(k_max));
    for (int k = 1; k <= k_max; ++k) sets.push_back(tileset(spec, k, budget));

    double expected = gen_area;
    double covered = 0.0;
    for (int k = 1; k <= k_max; ++k) {
        const auto& tk = sets[std::size_t(k) - 1];
        rep.tiles_per_level.push_back(tk.cells.cells.size());
        rep.tileset_area_rel.push_back(std::abs(tk.area - expected) /
                                       std::max(expected, 1e-300));
        covered += tk.area;
        expected *= det_sum;

        if (k < k_max) {
            CellSet image;
            image.cells.reserve(tk.cells.cells.size() * spec.sys.map_count());
            for (const auto& f : spec.sys.maps)
                for (const auto& cell : tk.cells.cells)
                    image.cells.push_back(geom::apply_poly(f, cell, spec.tol));
            const auto& next = sets[std::size_t(k)];
            double inter = cellset_intersection_area(image, next.cells, spec.tol);
            double symdiff = image.total_area() + next.area - 2.0 * inter;
            rep.symdiff_rel.push_back(std::abs(symdiff) / hull_area);
        }
    }

    auto iterates = hull_iterates(spec, k_max, budget);
    double ck_area = iterates.back().total_area();
    rep.completeness_rel = std::abs(hull_area - covered - ck_area) / hull_area;
    return rep;
}

// ---------------------------------------------------------------------------
// SVG rendering

static const char* kLevelPalette[] = {
    "#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#b07aa1",
    "#76b7b2", "#edc948", "#ff9da7", "#9c755f", "#bab0ac",
};

static void append_num(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    out += buf;
}

static void append_points(std::string& out, const ConvexPoly& poly, double ytop) {
    for (std::size_t i = 0; i < poly.size(); ++i) {
        if (i) out += ' ';
        append_num(out, poly.v[i].x);
        out += ',';
        append_num(out, ytop - poly.v[i].y);  // svg y axis points down
    }
}

std::string render_svg(const TilingSpec& spec, const RenderOptions& opt,
                       const ifs::Budget& budget) {
    std::vector<TileHandle> tiles;
    if (opt.r_min) {
        tiles = tiles_down_to(spec, *opt.r_min, budget);
    } else {
        int depth = opt.depth.value_or(0);
        if (depth > 0) tiles = tiles_by_level(spec, depth, budget);
    }

    Vec2 lo, hi;
    spec.hull.bounding_box(lo, hi);
    Vec2 span = hi - lo;
    double pad = 0.05 * std::max(span.x, span.y);
    double ytop = hi.y + lo.y;  // reflect about the bbox midline
    double stroke = opt.stroke_width_rel * std::max(span.x, span.y);

    std::string svg;
    svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"";
    append_num(svg, lo.x - pad);
    svg += ' ';
    append_num(svg, lo.y - pad);
    svg += ' ';
    append_num(svg, span.x + 2.0 * pad);
    svg += ' ';
    append_num(svg, span.y + 2.0 * pad);
    svg += "\">\n";

    for (const auto& t : tiles) {
        const auto& gen = spec.generators[t.q];
        const char* color = kLevelPalette[std::size_t(t.level - 1) %
                                          (sizeof kLevelPalette / sizeof *kLevelPalette)];
        svg += "<g class=\"tile\" data-level=\"" + std::to_string(t.level) + "\" data-q=\"" +
               std::to_string(t.q + 1) + "\" data-word=\"" + ifs::word_string(t.word) +
               "\" fill=\"" + color + "\">\n";
        for (const auto& cell : gen.comp.cells.cells) {
            ConvexPoly img = geom::apply_poly(t.map, cell, spec.tol);
            svg += "<polygon points=\"";
            append_points(svg, img, ytop);
            svg += "\"/>\n";
        }
        svg += "</g>\n";
    }

    svg += "<polygon class=\"hull\" fill=\"none\" stroke=\"#000000\" stroke-width=\"";
    append_num(svg, stroke);
    svg += "\" points=\"";
    append_points(svg, spec.hull, ytop);
    svg += "\"/>\n</svg>\n";
    return svg;
}

}  // namespace fractile::tiling
