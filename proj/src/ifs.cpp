#include "fractile/ifs.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace fractile::ifs {

using geom::AffineMap;
using geom::Mat2;
using geom::Vec2;

bool word_less(const Word& a, const Word& b) {
    return std::lexicographical_compare(a.letters.begin(), a.letters.end(),
                                        b.letters.begin(), b.letters.end());
}

std::string word_string(const Word& w) {
    std::string s;
    s.reserve(w.length());
    for (auto l : w.letters) {
        unsigned digit = unsigned(l) + 1;
        if (digit <= 9) {
            s.push_back(char('0' + digit));
        } else {
            if (!s.empty()) s.push_back('.');
            s += std::to_string(digit);
            s.push_back('.');
        }
    }
    return s;
}

WordRange::iterator::iterator(std::size_t j, std::size_t k, bool end) : j_(j), done_(end) {
    if (!end) w_.letters.assign(k, 0);
}

WordRange::iterator& WordRange::iterator::operator++() {
    auto& d = w_.letters;
    std::size_t i = d.size();
    while (i > 0) {
        --i;
        if (d[i] + 1u < j_) {
            ++d[i];
            std::fill(d.begin() + i + 1, d.end(), std::uint8_t(0));
            return *this;
        }
    }
    done_ = true;
    return *this;
}

std::size_t WordRange::count() const {
    std::size_t n = 1;
    for (std::size_t i = 0; i < k_; ++i) n *= j_;
    return n;
}

// ---------------------------------------------------------------------------
// config loading

static Vec2 parse_vec(const nlohmann::json& j, const char* what) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        raise(Errc::parse_error, std::string(what) + " must be [x, y]");
    return {j[0].get<double>(), j[1].get<double>()};
}

static AffineMap parse_map(const nlohmann::json& m) {
    if (!m.is_object() || !m.contains("type"))
        raise(Errc::parse_error, "map entry must be an object with a \"type\"");
    std::string type = m.at("type").get<std::string>();
    Vec2 t = parse_vec(m.at("translation"), "translation");
    if (type == "similarity") {
        double ratio = m.at("ratio").get<double>();
        double rot_deg = m.value("rotation_deg", 0.0);
        bool reflect = m.value("reflect", false);
        if (!(ratio > 0.0)) raise(Errc::parse_error, "similarity ratio must be positive");
        if (ratio >= 1.0) raise(Errc::not_contractive, "similarity ratio must be < 1");
        return AffineMap::similarity(ratio, rot_deg * std::numbers::pi / 180.0, reflect, t);
    }
    if (type == "affine") {
        const auto& mm = m.at("matrix");
        if (!mm.is_array() || mm.size() != 2 || mm[0].size() != 2 || mm[1].size() != 2)
            raise(Errc::parse_error, "affine matrix must be [[a,b],[c,d]]");
        Mat2 lin{mm[0][0].get<double>(), mm[0][1].get<double>(), mm[1][0].get<double>(),
                 mm[1][1].get<double>()};
        AffineMap f = AffineMap::affine(lin, t);
        if (f.spectral_bound >= 1.0)
            raise(Errc::not_contractive, "affine map is not a strict contraction");
        return f;
    }
    raise(Errc::parse_error, "unknown map type \"" + type + "\"");
}

LoadedConfig load_config(const nlohmann::json& doc) {
    if (!doc.is_object()) raise(Errc::parse_error, "config root must be an object");
    LoadedConfig cfg;
    cfg.name = doc.value("name", std::string("unnamed"));
    int dim = doc.value("dimension", 2);

    if (doc.contains("ratios")) {
        const auto& rr = doc.at("ratios");
        if (!rr.is_array() || rr.size() < 2)
            raise(Errc::too_few_maps, "ratios-only config needs at least 2 ratios");
        for (const auto& r : rr) {
            double x = r.get<double>();
            if (!(x > 0.0)) raise(Errc::parse_error, "ratios must be positive");
            if (x >= 1.0) raise(Errc::not_contractive, "ratio must be < 1");
            cfg.ratios.push_back(x);
        }
        return cfg;  // geometry unsupported, scaling data only
    }

    if (dim != 2)
        raise(Errc::parse_error,
              "dimension " + std::to_string(dim) + " needs a ratios-only config");
    if (!doc.contains("maps")) raise(Errc::parse_error, "config has neither maps nor ratios");

    IfsSystem sys;
    sys.name = cfg.name;
    for (const auto& m : doc.at("maps")) sys.maps.push_back(parse_map(m));
    if (sys.map_count() < 2) raise(Errc::too_few_maps, "a system needs at least 2 maps");

    sys.self_similar = std::all_of(sys.maps.begin(), sys.maps.end(), [](const AffineMap& f) {
        return f.kind == geom::MapKind::similarity;
    });
    if (sys.self_similar) {
        for (const auto& f : sys.maps) sys.ratios.push_back(f.ratio);
        cfg.ratios = sys.ratios;
    }
    cfg.system = std::move(sys);
    return cfg;
}

LoadedConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(Errc::parse_error, "cannot open config file " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        raise(Errc::parse_error, std::string("malformed JSON: ") + e.what());
    }
    try {
        return load_config(doc);
    } catch (Error&) {
        throw;
    } catch (const nlohmann::json::exception& e) {
        raise(Errc::parse_error, std::string("bad config: ") + e.what());
    }
}

IfsSystem load_system(const nlohmann::json& doc) {
    LoadedConfig cfg = load_config(doc);
    if (!cfg.system)
        raise(Errc::geometry_unsupported, "config \"" + cfg.name + "\" carries no 2-D geometry");
    return *cfg.system;
}

// ---------------------------------------------------------------------------

Vec2 fixed_point(const AffineMap& f) {
    // (I - L) x = shift; I - L is invertible for strict contractions.
    Mat2 m{1.0 - f.linear.a, -f.linear.b, -f.linear.c, 1.0 - f.linear.d};
    Mat2 inv = m.inverse();
    return inv.apply(f.shift);
}

geom::AffineMap map_of_word(const IfsSystem& sys, const Word& w) {
    AffineMap acc = AffineMap::identity();
    for (auto l : w.letters) {
        if (l >= sys.map_count()) raise(Errc::parse_error, "word letter out of range");
        acc = geom::compose(acc, sys.maps[l]);
    }
    return acc;
}

std::vector<Vec2> sample_attractor(const IfsSystem& sys, int depth, const Budget& budget) {
    std::size_t j = sys.map_count();
    double count = double(j);
    for (int i = 0; i < depth; ++i) {
        count *= double(j);
        if (count > double(budget.cap))
            raise(Errc::budget_exceeded, "attractor sample would exceed the point budget");
    }

    std::vector<Vec2> seeds;
    seeds.reserve(j);
    for (const auto& f : sys.maps) seeds.push_back(fixed_point(f));

    std::vector<Vec2> cur = seeds;
    for (int d = 0; d < depth; ++d) {
        std::vector<Vec2> next;
        next.reserve(cur.size() * j);
        for (const auto& f : sys.maps)
            for (Vec2 p : cur) next.push_back(f(p));
        cur = std::move(next);
    }
    cur.insert(cur.end(), seeds.begin(), seeds.end());
    return cur;
}

HullEstimate estimate_hull(const IfsSystem& sys, double tau_rel, const Budget& budget) {
    std::size_t j = sys.map_count();

    // Self-scaled tolerances from the spread of the map fixed points.
    double diam0 = 0.0;
    std::vector<Vec2> seeds;
    for (const auto& f : sys.maps) seeds.push_back(fixed_point(f));
    for (std::size_t a = 0; a < seeds.size(); ++a)
        for (std::size_t b = a + 1; b < seeds.size(); ++b)
            diam0 = std::max(diam0, geom::dist(seeds[a], seeds[b]));
    geom::Tol tol = geom::Tol::for_diameter(std::max(diam0, 1e-12));

    auto hull_at = [&](int m) {
        auto pts = sample_attractor(sys, m, budget);
        return geom::convex_hull(pts, tol);
    };
    auto points_at = [&](int m) {
        double n = double(j);
        for (int i = 0; i < m; ++i) n *= double(j);
        return n;
    };

    geom::ConvexPoly prev = hull_at(1);
    double last_gap = std::numeric_limits<double>::infinity();
    for (int m = 2;; ++m) {
        if (points_at(m) > double(budget.cap)) {
            HullEstimate est;
            est.hull = prev;
            est.sample_depth = m - 1;
            est.stabilization_gap = last_gap;
            est.stabilized = false;
            return est;
        }
        geom::ConvexPoly cur = hull_at(m);
        last_gap = geom::hausdorff(prev, cur);
        if (last_gap <= tau_rel * cur.diameter()) {
            HullEstimate est;
            est.hull = cur;
            est.sample_depth = m;
            est.stabilization_gap = last_gap;
            est.stabilized = true;
            return est;
        }
        prev = std::move(cur);
    }
}

ValidationReport validate(const IfsSystem& sys, const geom::ConvexPoly& hull, geom::Tol tol) {
    ValidationReport rep;
    rep.contraction_ok = std::all_of(sys.maps.begin(), sys.maps.end(),
                                     [](const AffineMap& f) { return f.spectral_bound < 1.0; });

    std::vector<geom::ConvexPoly> images;
    images.reserve(sys.map_count());
    for (const auto& f : sys.maps) images.push_back(geom::apply_poly(f, hull, tol));

    for (std::size_t a = 0; a < images.size(); ++a)
        for (std::size_t b = a + 1; b < images.size(); ++b) {
            double ov = geom::intersection_area(images[a], images[b], tol);
            if (ov > tol.area) rep.offending_pairs.push_back({a, b, ov});
        }
    rep.tileset_ok = rep.offending_pairs.empty();

    geom::CellSet rest;
    rest.cells.push_back(hull);
    for (const auto& img : images) rest = geom::subtract(rest, img, tol);
    rep.residual_area = rest.total_area();
    rep.nontrivial_ok = rep.residual_area > tol.area;
    return rep;
}

IfsSystem koch_family(std::complex<double> xi) {
    double s = std::norm(xi) + std::norm(1.0 - xi);
    if (!(s < 1.0))
        raise(Errc::inadmissible_parameter,
              "koch family needs |xi|^2 + |1-xi|^2 < 1 (got " + std::to_string(s) + ")");
    IfsSystem sys;
    sys.name = "koch_family";
    std::complex<double> om = 1.0 - xi;
    sys.maps.push_back(
        AffineMap::similarity(std::abs(xi), std::arg(xi), true, Vec2{0.0, 0.0}));
    sys.maps.push_back(AffineMap::similarity(std::abs(om), std::arg(om), true,
                                             Vec2{xi.real(), xi.imag()}));
    sys.self_similar = true;
    sys.ratios = {std::abs(xi), std::abs(om)};
    return sys;
}

}  // namespace fractile::ifs
