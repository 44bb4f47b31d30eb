#pragma once

// Scaling and geometric measures, their Mellin transforms and closed-form
// zeta functions, the real dimension D, lattice detection, and the complex
// dimension scan with residues.

#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

#include "fractile/ifs.hpp"
#include "fractile/tiling.hpp"

#include "json.hpp"

namespace fractile::spectra {

using cplx = std::complex<double>;

struct Atom {
    double x = 0.0;       // location, >= 1 for scaling measures
    double weight = 0.0;  // positive integer count (exactly representable)
};

enum class MeasureKind { scaling, geometric_q, geometric_total };

struct AtomicMeasure {
    MeasureKind kind = MeasureKind::scaling;
    int q = -1;           // generator index for geometric_q
    double r_min = 0.0;   // truncation threshold used to build the measure
    std::vector<Atom> atoms;

    double total_weight() const;
};

// One atom at 1/r_w per word with r_w >= r_min (empty word included),
// duplicates merged within 1e-12 relative.
AtomicMeasure scaling_measure(const std::vector<double>& ratios, double r_min,
                              const ifs::Budget& budget = {});

// Atoms at 1/(g_q r_w) over all generators, merged.
AtomicMeasure geometric_measure(const tiling::TilingSpec& spec, double rho_min,
                                const ifs::Budget& budget = {});
// The per-generator (q-th) geometric measures, same truncation rule.
std::vector<AtomicMeasure> geometric_measures_by_generator(const tiling::TilingSpec& spec,
                                                           double rho_min,
                                                           const ifs::Budget& budget = {});

// sum of weight * x^{-s}, compensated, in descending-weight order.
cplx mellin(const AtomicMeasure& mu, cplx s);

struct ZetaModel {
    std::vector<double> ratios;       // r_j, in (0,1)
    std::vector<double> gen_inradii;  // g_q; empty for a pure scaling model

    static ZetaModel from_tiling(const tiling::TilingSpec& spec);
    static ZetaModel scaling_only(std::vector<double> ratios);
    bool geometric() const { return !gen_inradii.empty(); }
};

// zeta_s(s) = 1/(1 - sum_j r_j^s); throws NearPole within 1e-14 of the pole set.
cplx zeta_s(const ZetaModel& m, cplx s);
// zeta_g(s) = (sum_q g_q^s) * zeta_s(s)
cplx zeta_g(const ZetaModel& m, cplx s);
// per-generator term g_q^s * zeta_s(s)
cplx zeta_gq(const ZetaModel& m, std::size_t q, cplx s);

// Unique D > 0 with sum_j r_j^D = 1 (bracketing + bisection + Newton polish).
double real_dimension(const ZetaModel& m);

struct LatticeStructure {
    bool is_lattice = false;
    double base = 0.0;           // r with r_j = base^{k_j}
    std::vector<int> exponents;  // k_j
    double period = 0.0;         // 2*pi / ln(1/base)
};

LatticeStructure detect_lattice(const ZetaModel& m);

struct ComplexDim {
    cplx omega;
    cplx residue;                  // residue of zeta_s (simple poles)
    int order = 1;
    bool is_real_D = false;
    bool cancelled = false;        // numerator zero of zeta_g at this pole
    double residue_contour_gap = 0.0;  // relative gap vs contour validation
};

struct Window {
    double re_lo = -1.0;
    double re_hi = 3.0;
    double im_max = 40.0;
};

struct DimensionScan {
    double D = 0.0;
    LatticeStructure lattice;
    std::vector<ComplexDim> poles;       // sorted by Re desc, then Im asc
    std::vector<cplx> numerator_zeros;   // roots of sum_q g_q^s in the window
    std::vector<Window> unresolved;      // cells with winding > 1 at minimum size
    Window window;
};

// Poles of zeta_s (and cancellations/zeros of the numerator when the model is
// geometric) inside the window. Lattice systems use the polynomial route;
// nonlattice systems use argument-principle subdivision plus Newton.
DimensionScan complex_dimensions(const ZetaModel& m, const Window& w,
                                 double im_cap = 1000.0);

struct ResidueCheckReport {
    cplx closed_form;
    cplx contour;
    double rel_gap = 0.0;
    double higher_order_ratio = 0.0;  // |c_-2| / (|c_-1| * radius)
    bool simple = false;
};

// Compare the closed-form residue at omega against a trapezoid contour
// integral of zeta_s on a small circle.
ResidueCheckReport residue_check(const ZetaModel& m, cplx omega);

nlohmann::ordered_json scan_to_json(const std::string& system_name, const DimensionScan& scan);

}  // namespace fractile::spectra
