#pragma once

// The self-affine system model: config loading, contraction/tileset/
// nontriviality checks, word combinatorics, attractor sampling and hull
// estimation. Systems are immutable after load; everything here is pure.

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fractile/geom2d.hpp"

#include "json.hpp"

namespace fractile::ifs {

struct IfsSystem {
    std::string name;
    std::vector<geom::AffineMap> maps;  // J >= 2
    bool self_similar = false;
    std::vector<double> ratios;  // r_j when self_similar

    std::size_t map_count() const { return maps.size(); }
};

// Enumeration caps for the exponential parts of the pipeline.
struct Budget {
    std::size_t cap = 4'000'000;          // points / words / atoms / tiles
    std::size_t component_cap = 10'000;   // generator count
};

// Index string over the maps, stored 0-based; the empty word is the identity.
struct Word {
    std::vector<std::uint8_t> letters;

    std::size_t length() const { return letters.size(); }
    bool operator==(const Word&) const = default;
};

// Lexicographic order (as 0-based digit strings of fixed length).
bool word_less(const Word& a, const Word& b);
std::string word_string(const Word& w);  // 1-based digits, e.g. "132"

// Streaming enumeration of all J^k words of length k in lexicographic order.
class WordRange {
  public:
    WordRange(std::size_t j, std::size_t k) : j_(j), k_(k) {}

    class iterator {
      public:
        iterator() = default;
        iterator(std::size_t j, std::size_t k, bool end);
        const Word& operator*() const { return w_; }
        iterator& operator++();
        bool operator!=(const iterator& o) const { return done_ != o.done_; }

      private:
        std::size_t j_ = 0;
        Word w_;
        bool done_ = true;
    };

    iterator begin() const { return iterator(j_, k_, false); }
    iterator end() const { return iterator(j_, k_, true); }
    std::size_t count() const;

  private:
    std::size_t j_;
    std::size_t k_;
};

struct HullEstimate {
    geom::ConvexPoly hull;
    int sample_depth = 0;
    double stabilization_gap = 0.0;
    bool stabilized = false;  // false = NoStabilization (result still usable)
};

struct OffendingPair {
    std::size_t j = 0;  // 0-based map indices, j < l
    std::size_t l = 0;
    double overlap_area = 0.0;
};

struct ValidationReport {
    bool contraction_ok = false;
    bool tileset_ok = false;
    bool nontrivial_ok = false;
    std::vector<OffendingPair> offending_pairs;
    double residual_area = 0.0;  // area(C) - area(union of images)

    bool admissible() const { return contraction_ok && tileset_ok && nontrivial_ok; }
};

// A parsed config: 2-D map systems carry a full IfsSystem; ratios-only
// configs (geometry_unsupported) carry just the scaling ratios.
struct LoadedConfig {
    std::string name;
    std::optional<IfsSystem> system;
    std::vector<double> ratios;

    bool geometry_supported() const { return system.has_value(); }
};

LoadedConfig load_config(const nlohmann::json& doc);
LoadedConfig load_config_file(const std::string& path);

// Convenience wrapper for configs that must carry 2-D geometry.
IfsSystem load_system(const nlohmann::json& doc);

geom::Vec2 fixed_point(const geom::AffineMap& f);

// phi_w = phi_{w_1} o ... o phi_{w_k}; the empty word gives the identity.
geom::AffineMap map_of_word(const IfsSystem& sys, const Word& w);

// {phi_w(p_j) : |w| = m, p_j the map fixed points} plus the fixed points
// themselves. Every returned point lies on the attractor.
std::vector<geom::Vec2> sample_attractor(const IfsSystem& sys, int depth,
                                         const Budget& budget = {});

// Hull of attractor samples at increasing depth until the Hausdorff gap
// between successive hulls drops below tau_rel * diameter (or the budget is
// reached, in which case the estimate is returned flagged).
HullEstimate estimate_hull(const IfsSystem& sys, double tau_rel = 1e-9,
                           const Budget& budget = {});

ValidationReport validate(const IfsSystem& sys, const geom::ConvexPoly& hull, geom::Tol tol);

// phi_1(z) = xi conj(z), phi_2(z) = (1-xi)(conj(z)-1)+1; admissible iff
// |xi|^2 + |1-xi|^2 < 1.
IfsSystem koch_family(std::complex<double> xi);

}  // namespace fractile::ifs
