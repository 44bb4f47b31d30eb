#include "fractile/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace fractile::spectra {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

cplx pow_rs(double r, cplx s) { return std::exp(s * std::log(r)); }

struct KahanC {
    cplx sum{0.0, 0.0};
    cplx comp{0.0, 0.0};
    void add(cplx v) {
        cplx y = v - comp;
        cplx t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
};

struct KahanR {
    double sum = 0.0, comp = 0.0;
    void add(double v) {
        double y = v - comp;
        double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
};

// All products r_w over words with r_w >= limit (empty word included when
// 1 >= limit), unsorted.
std::vector<double> word_products(const std::vector<double>& ratios, double limit,
                                  std::size_t cap) {
    std::vector<double> out;
    if (1.0 < limit) return out;
    std::vector<double> stack{1.0};
    while (!stack.empty()) {
        double rho = stack.back();
        stack.pop_back();
        out.push_back(rho);
        if (out.size() > cap)
            raise(Errc::budget_exceeded, "word enumeration exceeds the atom budget");
        for (double r : ratios) {
            double child = rho * r;
            if (child >= limit) stack.push_back(child);
        }
    }
    return out;
}

// Merge sorted locations within 1e-12 relative into weighted atoms.
std::vector<Atom> merge_locations(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    std::vector<Atom> atoms;
    std::size_t i = 0;
    while (i < xs.size()) {
        double anchor = xs[i];
        double weight = 0.0;
        while (i < xs.size() && xs[i] <= anchor * (1.0 + 1e-12)) {
            weight += 1.0;
            ++i;
        }
        atoms.push_back({anchor, weight});
    }
    return atoms;
}

}  // namespace

double AtomicMeasure::total_weight() const {
    double s = 0.0;
    for (const auto& a : atoms) s += a.weight;
    return s;
}

AtomicMeasure scaling_measure(const std::vector<double>& ratios, double r_min,
                              const ifs::Budget& budget) {
    if (!(r_min > 0.0 && r_min < 1.0))
        raise(Errc::parse_error, "scaling measure needs 0 < r_min < 1");
    auto products = word_products(ratios, r_min, budget.cap);
    std::vector<double> xs;
    xs.reserve(products.size());
    for (double rho : products) xs.push_back(1.0 / rho);
    AtomicMeasure mu;
    mu.kind = MeasureKind::scaling;
    mu.r_min = r_min;
    mu.atoms = merge_locations(std::move(xs));
    return mu;
}

std::vector<AtomicMeasure> geometric_measures_by_generator(const tiling::TilingSpec& spec,
                                                           double rho_min,
                                                           const ifs::Budget& budget) {
    if (!spec.sys.self_similar)
        raise(Errc::not_self_similar, "geometric measures need a self-similar system");
    if (!(rho_min > 0.0)) raise(Errc::parse_error, "rho_min must be positive");
    std::vector<AtomicMeasure> out;
    for (std::size_t q = 0; q < spec.generator_count(); ++q) {
        double g = spec.generators[q].inradius;
        AtomicMeasure mu;
        mu.kind = MeasureKind::geometric_q;
        mu.q = int(q);
        mu.r_min = rho_min;
        auto products = word_products(spec.sys.ratios, rho_min / g, budget.cap);
        std::vector<double> xs;
        xs.reserve(products.size());
        for (double rho : products) xs.push_back(1.0 / (g * rho));
        mu.atoms = merge_locations(std::move(xs));
        out.push_back(std::move(mu));
    }
    return out;
}

AtomicMeasure geometric_measure(const tiling::TilingSpec& spec, double rho_min,
                                const ifs::Budget& budget) {
    auto per_q = geometric_measures_by_generator(spec, rho_min, budget);
    std::vector<double> xs;
    for (const auto& mu : per_q)
        for (const auto& a : mu.atoms)
            for (double w = 0.0; w < a.weight; w += 1.0) xs.push_back(a.x);
    AtomicMeasure mu;
    mu.kind = MeasureKind::geometric_total;
    mu.r_min = rho_min;
    mu.atoms = merge_locations(std::move(xs));
    return mu;
}

cplx mellin(const AtomicMeasure& mu, cplx s) {
    std::vector<Atom> atoms = mu.atoms;
    std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) {
        if (a.weight != b.weight) return a.weight > b.weight;
        return a.x < b.x;
    });
    KahanC acc;
    for (const auto& a : atoms) acc.add(a.weight * std::exp(-s * std::log(a.x)));
    return acc.sum;
}

ZetaModel ZetaModel::from_tiling(const tiling::TilingSpec& spec) {
    if (!spec.sys.self_similar)
        raise(Errc::not_self_similar, "zeta models need a self-similar system");
    ZetaModel m;
    m.ratios = spec.sys.ratios;
    for (const auto& g : spec.generators) m.gen_inradii.push_back(g.inradius);
    return m;
}

ZetaModel ZetaModel::scaling_only(std::vector<double> ratios) {
    ZetaModel m;
    m.ratios = std::move(ratios);
    return m;
}

static cplx ratio_sum(const std::vector<double>& rs, cplx s) {
    KahanC acc;
    for (double r : rs) acc.add(pow_rs(r, s));
    return acc.sum;
}

cplx zeta_s(const ZetaModel& m, cplx s) {
    cplx denom = 1.0 - ratio_sum(m.ratios, s);
    if (std::abs(denom) <= 1e-14)
        raise(Errc::near_pole, "zeta_s evaluated within 1e-14 of a pole");
    return 1.0 / denom;
}

cplx zeta_g(const ZetaModel& m, cplx s) { return ratio_sum(m.gen_inradii, s) * zeta_s(m, s); }

cplx zeta_gq(const ZetaModel& m, std::size_t q, cplx s) {
    return pow_rs(m.gen_inradii.at(q), s) * zeta_s(m, s);
}

double real_dimension(const ZetaModel& m) {
    auto f = [&](double s) {
        double acc = 0.0;
        for (double r : m.ratios) acc += std::pow(r, s);
        return acc;
    };
    double hi = 1.0;
    while (f(hi) >= 1.0) {
        hi *= 2.0;
        if (hi > 1e6) raise(Errc::parse_error, "real dimension bracket failed");
    }
    double lo = 0.0;
    for (int i = 0; i < 200 && hi - lo > 1e-14 * std::max(1.0, hi); ++i) {
        double mid = 0.5 * (lo + hi);
        (f(mid) >= 1.0 ? lo : hi) = mid;
    }
    double d = 0.5 * (lo + hi);
    // One Newton polish: f' = sum r^s ln r.
    double fp = 0.0;
    for (double r : m.ratios) fp += std::pow(r, d) * std::log(r);
    if (fp != 0.0) d -= (f(d) - 1.0) / fp;
    return d;
}

LatticeStructure detect_lattice(const ZetaModel& m) {
    LatticeStructure out;
    std::vector<double> logs;
    for (double r : m.ratios) logs.push_back(std::log(1.0 / r));

    // Rational dependence of logs: t_j = log(1/r_j)/log(1/r_1) ~ p_j/q_j.
    std::vector<long> ps, qs;
    for (double x : logs) {
        double t = x / logs[0];
        bool found = false;
        for (long q = 1; q <= 64 && !found; ++q) {
            double pd = std::round(t * double(q));
            if (pd < 1.0) continue;
            if (std::abs(t - pd / double(q)) <= 1e-10) {
                ps.push_back(long(pd));
                qs.push_back(q);
                found = true;
            }
        }
        if (!found) return out;  // nonlattice within detector precision
    }
    long lcm = 1;
    for (long q : qs) {
        lcm = lcm / std::gcd(lcm, q) * q;
        if (lcm > 64) return out;
    }
    std::vector<long> ks;
    for (std::size_t i = 0; i < ps.size(); ++i) ks.push_back(ps[i] * (lcm / qs[i]));
    long g = 0;
    for (long k : ks) g = std::gcd(g, k);
    for (long& k : ks) k /= g;
    double x_base = logs[0] * double(g) / double(lcm);

    double base = std::exp(-x_base);
    for (std::size_t i = 0; i < m.ratios.size(); ++i) {
        if (ks[i] > 64) return out;
        if (std::abs(m.ratios[i] - std::pow(base, double(ks[i]))) > 1e-10) return out;
    }
    out.is_lattice = true;
    out.base = base;
    for (long k : ks) out.exponents.push_back(int(k));
    out.period = kTwoPi / x_base;
    return out;
}

// ---------------------------------------------------------------------------
// pole search

namespace {

struct Moments {
    cplx m0, m1;  // residue and first moment (order indicator)
};

Moments contour_moments(const ZetaModel& m, cplx omega, double radius, int nodes = 64) {
    KahanC a0, a1;
    for (int k = 0; k < nodes; ++k) {
        double th = kTwoPi * double(k) / double(nodes);
        cplx e{std::cos(th), std::sin(th)};
        cplx val = zeta_s(m, omega + radius * e);
        a0.add(val * e);
        a1.add(val * e * e);
    }
    return {a0.sum * (radius / double(nodes)), a1.sum * (radius * radius / double(nodes))};
}

cplx closed_residue(const ZetaModel& m, cplx omega) {
    KahanC acc;
    for (double r : m.ratios) acc.add(pow_rs(r, omega) * std::log(1.0 / r));
    return 1.0 / acc.sum;
}

// Generic holomorphic function with derivative, for argument-principle scans.
struct Holo {
    std::function<cplx(cplx)> f;
    std::function<cplx(cplx)> df;
};

// Newton refinement; returns nullopt if it fails to reach tol.
std::optional<cplx> newton(const Holo& h, cplx s0, double tol, int iters = 60) {
    cplx s = s0;
    for (int i = 0; i < iters; ++i) {
        cplx f = h.f(s);
        if (std::abs(f) <= tol) return s;
        cplx d = h.df(s);
        if (std::abs(d) < 1e-300) return std::nullopt;
        s -= f / d;
    }
    return std::abs(h.f(s)) <= tol ? std::optional<cplx>(s) : std::nullopt;
}

// Winding number of h.f around a rectangle, by adaptive argument tracking.
struct BoundaryHitsZero {};

double arg_change(const Holo& h, cplx a, cplx b, int depth) {
    cplx fa = h.f(a), fb = h.f(b);
    double sc = std::max(std::abs(fa), std::abs(fb));
    if (std::abs(fa) < 1e-13 * std::max(1.0, sc) || std::abs(fb) < 1e-13 * std::max(1.0, sc))
        throw BoundaryHitsZero{};
    double d = std::arg(fb / fa);
    if (std::abs(d) <= 1.4 || depth >= 44) return d;
    cplx mid = 0.5 * (a + b);
    return arg_change(h, a, mid, depth + 1) + arg_change(h, mid, b, depth + 1);
}

int winding(const Holo& h, cplx lo, cplx hi) {
    cplx c1{hi.real(), lo.imag()};
    cplx c2{hi.real(), hi.imag()};
    cplx c3{lo.real(), hi.imag()};
    double total = arg_change(h, lo, c1, 0) + arg_change(h, c1, c2, 0) +
                   arg_change(h, c2, c3, 0) + arg_change(h, c3, lo, 0);
    return int(std::lround(total / kTwoPi));
}

struct ScanAccumulator {
    std::vector<cplx> roots;
    std::vector<Window> unresolved;
};

void subdivide(const Holo& h, cplx lo, cplx hi, double min_side, double root_tol,
               ScanAccumulator& acc, int depth = 0) {
    int w;
    try {
        w = winding(h, lo, hi);
    } catch (const BoundaryHitsZero&) {
        // Nudge the cell outward a little; fixed relative jitter keeps runs
        // deterministic.
        double jx = 1e-4 * (hi.real() - lo.real()) + 1e-12;
        double jy = 1e-4 * (hi.imag() - lo.imag()) + 1e-12;
        if (depth > 60) {
            acc.unresolved.push_back({lo.real(), hi.real(), hi.imag()});
            return;
        }
        subdivide(h, lo - cplx{jx, jy}, hi + cplx{jx, jy}, min_side, root_tol, acc, depth + 1);
        return;
    }
    if (w == 0) return;
    double sx = hi.real() - lo.real(), sy = hi.imag() - lo.imag();
    if (std::max(sx, sy) <= min_side) {
        if (w == 1) {
            if (auto r = newton(h, 0.5 * (lo + hi), root_tol)) {
                acc.roots.push_back(*r);
                return;
            }
        }
        acc.unresolved.push_back({lo.real(), hi.real(), hi.imag()});
        return;
    }
    cplx mid = 0.5 * (lo + hi);
    subdivide(h, lo, mid, min_side, root_tol, acc, depth + 1);
    subdivide(h, cplx{mid.real(), lo.imag()}, cplx{hi.real(), mid.imag()}, min_side, root_tol,
              acc, depth + 1);
    subdivide(h, cplx{lo.real(), mid.imag()}, cplx{mid.real(), hi.imag()}, min_side, root_tol,
              acc, depth + 1);
    subdivide(h, mid, hi, min_side, root_tol, acc, depth + 1);
}

// Deduplicate complex values within tol; keeps first occurrences.
std::vector<cplx> dedupe(std::vector<cplx> v, double tol) {
    std::vector<cplx> out;
    for (cplx z : v) {
        bool seen = false;
        for (cplx w : out)
            if (std::abs(z - w) <= tol) {
                seen = true;
                break;
            }
        if (!seen) out.push_back(z);
    }
    return out;
}

std::vector<std::pair<cplx, int>> poly_roots_with_order(const std::vector<double>& coeff) {
    // coeff[i] multiplies z^i; leading coefficient nonzero.
    std::size_t deg = coeff.size() - 1;
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(Eigen::Index(deg), Eigen::Index(deg));
    for (std::size_t i = 0; i + 1 < deg; ++i) comp(Eigen::Index(i + 1), Eigen::Index(i)) = 1.0;
    for (std::size_t i = 0; i < deg; ++i)
        comp(Eigen::Index(i), Eigen::Index(deg - 1)) = -coeff[i] / coeff[deg];
    Eigen::EigenSolver<Eigen::MatrixXd> solver(comp);
    std::vector<cplx> roots;
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i)
        roots.push_back(solver.eigenvalues()(i));
    std::sort(roots.begin(), roots.end(), [](cplx a, cplx b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    std::vector<std::pair<cplx, int>> out;
    for (cplx z : roots) {
        if (!out.empty() && std::abs(z - out.back().first) <= 1e-8 * std::max(1.0, std::abs(z)))
            out.back().second += 1;
        else
            out.emplace_back(z, 1);
    }
    return out;
}

}  // namespace

DimensionScan complex_dimensions(const ZetaModel& m, const Window& w, double im_cap) {
    if (w.im_max > im_cap)
        raise(Errc::window_too_large, "imaginary window exceeds the configured cap");
    if (!(w.re_hi >= w.re_lo) || w.re_hi - w.re_lo > 100.0)
        raise(Errc::window_too_large, "real window is empty or too wide");

    DimensionScan scan;
    scan.window = w;
    scan.D = real_dimension(m);
    scan.lattice = detect_lattice(m);

    Holo fs{[&](cplx s) { return ratio_sum(m.ratios, s) - 1.0; },
            [&](cplx s) {
                KahanC acc;
                for (double r : m.ratios) acc.add(pow_rs(r, s) * std::log(r));
                return acc.sum;
            }};

    std::vector<std::pair<cplx, int>> raw;  // pole, order
    std::vector<Window> unresolved;

    if (scan.lattice.is_lattice) {
        // 1 - sum_j z^{k_j} with z = base^s.
        int deg = *std::max_element(scan.lattice.exponents.begin(),
                                    scan.lattice.exponents.end());
        std::vector<double> coeff(std::size_t(deg) + 1, 0.0);
        coeff[0] = 1.0;
        for (int k : scan.lattice.exponents) coeff[std::size_t(k)] -= 1.0;
        double log_base = std::log(scan.lattice.base);  // negative
        for (auto [z0, order] : poly_roots_with_order(coeff)) {
            double mod = std::abs(z0);
            if (mod < 1e-12) continue;
            double re_s = std::log(mod) / log_base;
            if (re_s < w.re_lo - 1e-9 || re_s > w.re_hi + 1e-9) continue;
            double theta = std::arg(z0);
            // s_n = (ln|z0| + i(theta + 2 pi n)) / ln(base)
            double denom = -log_base;  // = ln(1/base) > 0
            long n_lo = long(std::ceil((-w.im_max * denom - theta) / kTwoPi - 1e-12));
            long n_hi = long(std::floor((w.im_max * denom - theta) / kTwoPi + 1e-12));
            for (long n = n_lo; n <= n_hi; ++n) {
                double im_s = -(theta + kTwoPi * double(n)) / denom;
                cplx omega{re_s, im_s};
                if (order == 1) {
                    if (auto polished = newton(fs, omega, 1e-13)) omega = *polished;
                }
                raw.emplace_back(omega, order);
            }
        }
    } else {
        ScanAccumulator acc;
        // Scan the upper half and mirror; jittered bounds avoid samples
        // landing exactly on the real-axis zeros.
        double jitter = 1.2345e-7;
        cplx lo{w.re_lo - jitter, -2.0 * jitter};
        cplx hi{w.re_hi + jitter, w.im_max + jitter};
        subdivide(fs, lo, hi, 1e-4, 1e-12, acc);
        auto roots = dedupe(std::move(acc.roots), 1e-9);
        for (cplx z : roots) {
            raw.emplace_back(z, 1);
            if (z.imag() > 1e-9) raw.emplace_back(std::conj(z), 1);
        }
        unresolved = std::move(acc.unresolved);
    }

    double h_scale = 0.0;
    for (const auto& [omega, order] : raw) {
        ComplexDim dim;
        dim.omega = omega;
        dim.order = order;
        dim.is_real_D = std::abs(omega.imag()) <= 1e-9 &&
                        std::abs(omega.real() - scan.D) <= 1e-9 * std::max(1.0, scan.D);
        if (order == 1) {
            dim.residue = closed_residue(m, omega);
            Moments mom = contour_moments(m, omega, 1e-3);
            dim.residue_contour_gap =
                std::abs(mom.m0 - dim.residue) / std::max(std::abs(dim.residue), 1e-300);
        }
        if (m.geometric()) {
            KahanC h;
            double hs = 0.0;
            for (double g : m.gen_inradii) {
                h.add(pow_rs(g, omega));
                hs += std::pow(g, omega.real());
            }
            h_scale = hs;
            dim.cancelled = std::abs(h.sum) <= 1e-10 * h_scale;
        }
        scan.poles.push_back(dim);
    }
    (void)h_scale;

    // Zeros of the numerator h(s) = sum_q g_q^s; impossible with one generator.
    if (m.geometric() && m.gen_inradii.size() >= 2) {
        Holo hh{[&](cplx s) { return ratio_sum(m.gen_inradii, s); },
                [&](cplx s) {
                    KahanC acc;
                    for (double g : m.gen_inradii) acc.add(pow_rs(g, s) * std::log(g));
                    return acc.sum;
                }};
        ScanAccumulator acc;
        double jitter = 1.2345e-7;
        subdivide(hh, cplx{w.re_lo - jitter, -2.0 * jitter},
                  cplx{w.re_hi + jitter, w.im_max + jitter}, 1e-4, 1e-10, acc);
        auto zeros = dedupe(std::move(acc.roots), 1e-9);
        for (cplx z : zeros) {
            scan.numerator_zeros.push_back(z);
            if (z.imag() > 1e-9) scan.numerator_zeros.push_back(std::conj(z));
        }
        for (const auto& u : acc.unresolved) unresolved.push_back(u);
    }

    scan.unresolved = std::move(unresolved);
    auto by_position = [](const auto& a, const auto& b) {
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() < b.imag();
    };
    std::sort(scan.poles.begin(), scan.poles.end(),
              [&](const ComplexDim& a, const ComplexDim& b) {
                  return by_position(a.omega, b.omega);
              });
    std::sort(scan.numerator_zeros.begin(), scan.numerator_zeros.end(), by_position);
    return scan;
}

ResidueCheckReport residue_check(const ZetaModel& m, cplx omega) {
    ResidueCheckReport rep;
    rep.closed_form = closed_residue(m, omega);
    Moments mom = contour_moments(m, omega, 1e-3);
    rep.contour = mom.m0;
    rep.rel_gap = std::abs(mom.m0 - rep.closed_form) / std::max(std::abs(rep.closed_form), 1e-300);
    rep.higher_order_ratio = std::abs(mom.m1) / std::max(std::abs(mom.m0) * 1e-3, 1e-300);
    rep.simple = rep.rel_gap <= 1e-6 && rep.higher_order_ratio <= 0.1;
    return rep;
}

nlohmann::ordered_json scan_to_json(const std::string& system_name, const DimensionScan& scan) {
    nlohmann::ordered_json j;
    j["system"] = system_name;
    j["D"] = scan.D;
    j["lattice"] = {{"is_lattice", scan.lattice.is_lattice},
                    {"base", scan.lattice.base},
                    {"exponents", scan.lattice.exponents},
                    {"oscillation_period", scan.lattice.period}};
    auto poles = nlohmann::ordered_json::array();
    for (const auto& p : scan.poles) {
        poles.push_back({{"re", p.omega.real()},
                         {"im", p.omega.imag()},
                         {"order", p.order},
                         {"residue_re", p.residue.real()},
                         {"residue_im", p.residue.imag()},
                         {"residue_contour_gap", p.residue_contour_gap},
                         {"is_real_D", p.is_real_D},
                         {"cancelled", p.cancelled}});
    }
    j["poles"] = std::move(poles);
    auto zeros = nlohmann::ordered_json::array();
    for (cplx z : scan.numerator_zeros) zeros.push_back({{"re", z.real()}, {"im", z.imag()}});
    j["zeros_of_numerator"] = std::move(zeros);
    auto unresolved = nlohmann::ordered_json::array();
    for (const auto& u : scan.unresolved)
        unresolved.push_back({{"re_lo", u.re_lo}, {"re_hi", u.re_hi}, {"im", u.im_max}});
    j["unresolved_cells"] = std::move(unresolved);
    j["window"] = {{"re_lo", scan.window.re_lo},
                   {"re_hi", scan.window.re_hi},
                   {"im_max", scan.window.im_max}};
    j["tolerances"] = {{"pole_equation", 1e-9}, {"residue_gap", 1e-6}, {"min_cell_side", 1e-4}};
    return j;
}

}  // namespace fractile::spectra
