#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "platonic/random.hpp"
#include "platonic/sections.hpp"

namespace platonic {

// ---------------------------------------------------------------- box counting

struct Point2 {
    double x, y;
};

/// n log-spaced box sizes from `coarse` down to `fine` (fractions of the unit box).
inline std::vector<double> log_scales(double coarse = 1.0 / 4, double fine = 1.0 / 128, int n = 8) {
    std::vector<double> s(n);
    for (int i = 0; i < n; ++i) s[i] = coarse * std::pow(fine / coarse, n == 1 ? 0.0 : double(i) / (n - 1));
    return s;
}

/// Points mapped affinely onto [0, 1]^2 axis by axis; a flat axis maps to 0.
inline std::vector<Point2> rescale_unit(const std::vector<Point2>& pts) {
    if (pts.empty()) return {};
    double x0 = pts[0].x, x1 = x0, y0 = pts[0].y, y1 = y0;
    for (auto p : pts) {
        x0 = std::min(x0, p.x);
        x1 = std::max(x1, p.x);
        y0 = std::min(y0, p.y);
        y1 = std::max(y1, p.y);
    }
    std::vector<Point2> out;
    out.reserve(pts.size());
    for (auto p : pts) out.push_back({x1 > x0 ? (p.x - x0) / (x1 - x0) : 0.0, y1 > y0 ? (p.y - y0) / (y1 - y0) : 0.0});
    return out;
}

/// Occupied boxes of side s over points already in the unit box.
inline std::size_t occupied_boxes(const std::vector<Point2>& unit, double s) {
    const auto n = static_cast<std::int64_t>(std::ceil(1.0 / s - 1e-12));
    std::vector<std::int64_t> ids;
    ids.reserve(unit.size());
    for (auto p : unit) {
        auto i = std::min<std::int64_t>(static_cast<std::int64_t>(p.x / s), n - 1);
        auto j = std::min<std::int64_t>(static_cast<std::int64_t>(p.y / s), n - 1);
        ids.push_back(i * n + j);
    }
    std::sort(ids.begin(), ids.end());
    return static_cast<std::size_t>(std::unique(ids.begin(), ids.end()) - ids.begin());
}

struct BoxCount {
    double dimension = 0;
    std::vector<double> scales_used;
    std::vector<std::size_t> counts;
};

/// Least-squares slope of log N(s) against log(1/s).
///
/// With a few hundred points the finest boxes hold at most one point each and
/// N(s) flattens at the point count. Scales where N(s) exceeds
/// points / saturation_ratio are dropped, keeping at least the three coarsest.
/// saturation_ratio <= 0 keeps every scale.
inline BoxCount box_counting(const std::vector<Point2>& pts, const std::vector<double>& scales,
                             double saturation_ratio = 4.0) {
    if (scales.size() < 3) throw std::invalid_argument("box counting needs at least three scales");
    BoxCount r;
    if (pts.size() < 2) return r;
    auto unit = rescale_unit(pts);
    bool distinct = false;
    for (auto p : unit)
        if (p.x != unit[0].x || p.y != unit[0].y) distinct = true;
    if (!distinct) return r;

    std::vector<double> s = scales;
    std::sort(s.begin(), s.end(), std::greater<>());
    const double cap = saturation_ratio > 0 ? double(pts.size()) / saturation_ratio : INFINITY;
    for (std::size_t i = 0; i < s.size(); ++i) {
        std::size_t c = occupied_boxes(unit, s[i]);
        if (i >= 3 && double(c) > cap) break;
        r.scales_used.push_back(s[i]);
        r.counts.push_back(c);
    }
    const double m = double(r.counts.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < r.counts.size(); ++i) {
        double x = std::log(1 / r.scales_used[i]), y = std::log(double(r.counts[i]));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    r.dimension = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    return r;
}

inline double box_counting_dimension(const std::vector<Point2>& pts, const std::vector<double>& scales,
                                     double saturation_ratio = 4.0) {
    return box_counting(pts, scales, saturation_ratio).dimension;
}

// ------------------------------------------------------------- classification

enum class SectionLabel { curve_like, ambiguous_curve_like, scattered, insufficient };

inline std::string_view label_name(SectionLabel l) {
    switch (l) {
        case SectionLabel::curve_like: return "curve-like";
        case SectionLabel::ambiguous_curve_like: return "ambiguous-curve-like";
        case SectionLabel::scattered: return "scattered";
        case SectionLabel::insufficient: return "insufficient";
    }
    return "?";
}

struct ClassifierConfig {
    double curve_max = 1.3;
    double scatter_min = 1.6;
    std::size_t min_points = 100;
    std::vector<double> scales = log_scales();
    double saturation_ratio = 4.0;
};

struct SectionVerdict {
    double dimension = 0;
    std::size_t points = 0;
    double scale_coarse = 0;
    double scale_fine = 0;
    int scales_used = 0;
    SectionLabel label = SectionLabel::insufficient;
};

inline SectionVerdict classify_points(const std::vector<Point2>& pts, const ClassifierConfig& cfg = {}) {
    SectionVerdict v;
    v.points = pts.size();
    if (pts.size() < cfg.min_points) return v;
    auto bc = box_counting(pts, cfg.scales, cfg.saturation_ratio);
    v.dimension = bc.dimension;
    v.scales_used = int(bc.scales_used.size());
    if (!bc.scales_used.empty()) {
        v.scale_coarse = bc.scales_used.front();
        v.scale_fine = bc.scales_used.back();
    }
    v.label = v.dimension <= cfg.curve_max    ? SectionLabel::curve_like
              : v.dimension >= cfg.scatter_min ? SectionLabel::scattered
                                               : SectionLabel::ambiguous_curve_like;
    return v;
}

inline std::vector<Point2> recorded_points(const SectionPointSet& s) {
    std::vector<Point2> p;
    p.reserve(s.points.size());
    for (const auto& x : s.points) p.push_back({x.rec1, x.rec2});
    return p;
}

inline SectionVerdict classify_section(const SectionPointSet& s, const ClassifierConfig& cfg = {}) {
    return classify_points(recorded_points(s), cfg);
}

// --------------------------------------------------------------------- regions

/// Two-dimensional configuration charts used by region analysis.
inline bool is_planar_chart(Chart c) {
    return c == Chart::sphere || c == Chart::plane_polar || c == Chart::plane_cartesian;
}

struct RasterBox {
    double lo[2], hi[2];
    bool periodic[2];
};

inline RasterBox raster_box(Chart c) {
    switch (c) {
        case Chart::sphere: return {{0, 0}, {pi, two_pi}, {false, true}};
        case Chart::plane_polar: return {{0, 0}, {6, two_pi}, {false, true}};
        case Chart::plane_cartesian: return {{-2 * pi, -2 * pi}, {2 * pi, 2 * pi}, {false, false}};
        default: throw std::invalid_argument("region raster needs a two-dimensional chart");
    }
}

/// Connected sign-constant component of the region factor f containing a seed,
/// on an n x n raster of cell centres.
struct Region {
    Chart chart = Chart::sphere;
    RasterBox box{};
    int n = 512;
    Coords seed{};
    int sign = 0;
    std::vector<std::uint8_t> mask;  ///< row-major, index i * n + j (i along q[0])
    std::vector<int> cells;          ///< flat indices of member cells, ascending

    double cell_size(int axis) const { return (box.hi[axis] - box.lo[axis]) / n; }
    Coords centre(int cell) const {
        int i = cell / n, j = cell % n;
        return {box.lo[0] + (i + 0.5) * cell_size(0), box.lo[1] + (j + 0.5) * cell_size(1), 0, 0};
    }
    int cell_of(const Coords& q) const {
        double a = (q[0] - box.lo[0]) / cell_size(0);
        double b = q[1] - box.lo[1];
        if (box.periodic[1]) b = b - two_pi * std::floor(b / two_pi);
        b /= cell_size(1);
        int i = int(std::floor(a)), j = int(std::floor(b));
        if (i < 0 || i >= n || j < 0 || j >= n) return -1;
        return i * n + j;
    }
    bool contains(const Coords& q) const {
        int c = cell_of(q);
        return c >= 0 && mask[c];
    }
    std::size_t size() const { return cells.size(); }
};

/// Flood fill of the sign component of spec.region_factor around `seed`.
/// Cells whose corners and centre do not share one sign, or whose centre value
/// is within one gradient-scaled cell diagonal of zero, act as walls.
inline Region find_region(const PotentialSpec& spec, const Coords& seed, int n = 512) {
    if (!is_planar_chart(spec.chart)) throw std::invalid_argument("find_region: two-dimensional chart required");
    Region r;
    r.chart = spec.chart;
    r.box = raster_box(spec.chart);
    r.n = n;
    r.seed = seed;
    const auto& f = spec.region_factor;
    const double dx = r.cell_size(0), dy = r.cell_size(1);
    const double diag = std::hypot(dx, dy);

    auto cell_sign = [&](int i, int j) -> int {
        const double x = r.box.lo[0] + (i + 0.5) * dx, y = r.box.lo[1] + (j + 0.5) * dy;
        double c = f({x, y, 0, 0});
        if (!std::isfinite(c) || c == 0) return 0;
        int sg = c > 0 ? 1 : -1;
        for (int a = -1; a <= 1; a += 2)
            for (int b = -1; b <= 1; b += 2) {
                double v = f({x + 0.5 * a * dx, y + 0.5 * b * dy, 0, 0});
                if (!(v * sg > 0)) return 0;
            }
        double gx = (f({x + 0.5 * dx, y, 0, 0}) - f({x - 0.5 * dx, y, 0, 0})) / dx;
        double gy = (f({x, y + 0.5 * dy, 0, 0}) - f({x, y - 0.5 * dy, 0, 0})) / dy;
        if (std::abs(c) <= std::hypot(gx, gy) * diag) return 0;
        return sg;
    };

    int start = r.cell_of(seed);
    if (start < 0) throw std::invalid_argument("find_region: seed outside the raster");
    double fs = f(seed);
    if (!std::isfinite(fs) || fs == 0) throw std::invalid_argument("find_region: seed on the singular set");
    r.sign = fs > 0 ? 1 : -1;
    if (cell_sign(start / n, start % n) != r.sign)
        throw std::invalid_argument("find_region: seed too close to the singular set");

    std::vector<std::int8_t> memo(std::size_t(n) * n, 2);
    auto sign_at = [&](int i, int j) {
        auto& m = memo[std::size_t(i) * n + j];
        if (m == 2) m = std::int8_t(cell_sign(i, j));
        return int(m);
    };
    r.mask.assign(std::size_t(n) * n, 0);
    std::vector<int> stack{start};
    r.mask[start] = 1;
    while (!stack.empty()) {
        int c = stack.back();
        stack.pop_back();
        r.cells.push_back(c);
        const int i = c / n, j = c % n;
        const int nb[4][2] = {{i - 1, j}, {i + 1, j}, {i, j - 1}, {i, j + 1}};
        for (const auto& ab : nb) {
            int a = ab[0], b = ab[1];
            if (r.box.periodic[0]) a = (a + n) % n;
            if (r.box.periodic[1]) b = (b + n) % n;
            if (a < 0 || a >= n || b < 0 || b >= n) continue;
            int k = a * n + b;
            if (r.mask[k] || sign_at(a, b) != r.sign) continue;
            r.mask[k] = 1;
            stack.push_back(k);
        }
    }
    std::sort(r.cells.begin(), r.cells.end());
    return r;
}

/// Potential minimum over the region's cell centres.
inline double region_min_potential(const PotentialSpec& spec, const Region& r) {
    double m = INFINITY;
    for (int c : r.cells) {
        double v = spec.value(r.centre(c));
        if (std::isfinite(v)) m = std::min(m, v);
    }
    return m;
}

// ------------------------------------------------------------ IC sampling

/// Metric scale factors h_i of the kinetic term 1/2 sum (p_i / h_i)^2.
inline std::array<double, 2> planar_metric(Chart c, const Coords& q) {
    switch (c) {
        case Chart::sphere: return {1.0, std::sin(q[0])};
        case Chart::plane_polar: return {1.0, q[0]};
        default: return {1.0, 1.0};
    }
}

/// Random state of energy `energy`: uniform cell of the region with uniform
/// jitter, rejected unless V < energy; the kinetic energy is split by a
/// uniformly random direction in the orthonormal momentum frame.
inline std::optional<PhaseState> sample_initial_condition(const PotentialSpec& spec, const Region& r, double energy,
                                                          Rng& rng, int max_tries = 100000) {
    if (r.cells.empty()) return std::nullopt;
    for (int t = 0; t < max_tries; ++t) {
        int c = r.cells[rng.below(r.cells.size())];
        Coords q = r.centre(c);
        q[0] += (rng.uniform() - 0.5) * r.cell_size(0);
        q[1] += (rng.uniform() - 0.5) * r.cell_size(1);
        double fq = spec.region_factor(q);
        if (!(fq * r.sign > 0)) continue;
        double v = spec.value(q);
        if (!std::isfinite(v) || v >= energy) continue;
        double phi = rng.uniform(0, two_pi);
        double k = std::sqrt(2 * (energy - v));
        auto h = planar_metric(spec.chart, q);
        PhaseState s;
        s.chart = spec.chart;
        s.q = q;
        s.p = {k * std::cos(phi) * h[0], k * std::sin(phi) * h[1], 0, 0};
        return s;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------- confinement

/// True iff f keeps one strict sign at every sample of the orbit.
inline bool confinement_check(const OrbitTrace& orbit, const std::function<double(const Coords&)>& f) {
    int sign = 0;
    for (const auto& s : orbit.states) {
        double v = f(s.q);
        int sg = v > 0 ? 1 : (v < 0 ? -1 : 0);
        if (sg == 0) return false;
        if (sign == 0) sign = sg;
        if (sg != sign) return false;
    }
    return true;
}

/// Uses the system's region factor, evaluated in the potential's own coordinates.
inline bool confinement_check(const OrbitTrace& orbit) {
    const auto& sys = orbit.system;
    const auto& rf = sys.potential.region_factor;
    if (!sys.lifted()) return confinement_check(orbit, rf);
    return confinement_check(orbit, [&](const Coords& q) { return rf(detail::angular_coords(sys, q)); });
}

// -------------------------------------------------------------- critical points

enum class CriticalType { minimum, maximum, saddle, degenerate };

inline std::string_view critical_type_name(CriticalType t) {
    switch (t) {
        case CriticalType::minimum: return "min";
        case CriticalType::maximum: return "max";
        case CriticalType::saddle: return "saddle";
        case CriticalType::degenerate: return "degenerate";
    }
    return "?";
}

struct CriticalPoint {
    Coords q{};
    double value = 0;
    double grad_norm = 0;
    CriticalType type = CriticalType::degenerate;
};

struct CriticalSearch {
    std::vector<CriticalPoint> points;
    int starts = 0;
    int converged = 0;
    bool ok() const { return converged > 0; }
};

namespace detail {

inline std::array<double, 3> fd_hessian(const PotentialSpec& spec, const Coords& q, double h = 1e-5) {
    auto g = [&](int axis, double d) {
        Coords x = q;
        x[axis] += d;
        auto r = spec.gradient(x);
        return r ? *r : Gradient{NAN, NAN, NAN, NAN};
    };
    auto a = g(0, h), b = g(0, -h), c = g(1, h), d = g(1, -h);
    double hxx = (a[0] - b[0]) / (2 * h), hyy = (c[1] - d[1]) / (2 * h);
    double hxy = 0.5 * ((a[1] - b[1]) / (2 * h) + (c[0] - d[0]) / (2 * h));
    return {hxx, hxy, hyy};
}

inline double grad_norm(const Gradient& g) { return std::hypot(g[0], g[1]); }

}  // namespace detail

/// Damped Newton on grad V = 0 from `starts` random cells of the region.
/// Iterates stay inside the region; converged points (|grad V| <= tol) closer
/// than merge_tol are merged, and each is typed by its finite-difference Hessian.
inline CriticalSearch find_critical_points(const PotentialSpec& spec, const Region& region, int starts = 32,
                                           std::uint64_t seed = 1, double tol = 1e-8, double merge_tol = 1e-6) {
    CriticalSearch out;
    Rng rng(seed);
    auto inside = [&](const Coords& q) {
        double f = spec.region_factor(q);
        return f * region.sign > 0 && std::isfinite(spec.value(q)) &&
               chart_singularity_distance(spec.chart, q) > 1e-6;
    };
    for (int s = 0; s < starts && !region.cells.empty(); ++s) {
        ++out.starts;
        Coords q = region.centre(region.cells[rng.below(region.cells.size())]);
        if (!inside(q)) continue;
        bool conv = false;
        for (int it = 0; it < 200; ++it) {
            auto g = spec.gradient(q);
            if (!g) break;
            double gn = detail::grad_norm(*g);
            if (gn <= tol) {
                conv = true;
                break;
            }
            auto H = detail::fd_hessian(spec, q);
            double det = H[0] * H[2] - H[1] * H[1];
            Coords d{};
            if (std::isfinite(det) && std::abs(det) > 1e-14 * (H[0] * H[0] + H[2] * H[2] + 1e-300)) {
                d[0] = -(H[2] * (*g)[0] - H[1] * (*g)[1]) / det;
                d[1] = -(-H[1] * (*g)[0] + H[0] * (*g)[1]) / det;
            } else {
                d[0] = -(*g)[0];
                d[1] = -(*g)[1];
            }
            // cap the step at a tenth of the raster extent
            double len = std::hypot(d[0], d[1]), cap = 0.1 * (region.box.hi[0] - region.box.lo[0]);
            if (len > cap) {
                d[0] *= cap / len;
                d[1] *= cap / len;
            }
            double lam = 1.0;
            bool moved = false;
            for (int k = 0; k < 40; ++k, lam *= 0.5) {
                Coords qn{q[0] + lam * d[0], q[1] + lam * d[1], 0, 0};
                if (!inside(qn)) continue;
                auto gn2 = spec.gradient(qn);
                if (!gn2) continue;
                if (detail::grad_norm(*gn2) < gn * (1 - 1e-4 * lam) || k == 39) {
                    q = qn;
                    moved = true;
                    break;
                }
            }
            if (!moved) break;
        }
        if (!conv) continue;
        ++out.converged;
        if (region.box.periodic[1]) q[1] = q[1] - two_pi * std::floor(q[1] / two_pi);
        bool dup = false;
        for (const auto& p : out.points) {
            double d1 = q[1] - p.q[1];
            if (region.box.periodic[1]) d1 = std::remainder(d1, two_pi);
            if (std::hypot(q[0] - p.q[0], d1) <= merge_tol) dup = true;
        }
        if (dup) continue;
        CriticalPoint cp;
        cp.q = q;
        cp.value = spec.value(q);
        cp.grad_norm = detail::grad_norm(*spec.gradient(q));
        auto H = detail::fd_hessian(spec, q);
        double det = H[0] * H[2] - H[1] * H[1], tr = H[0] + H[2];
        double scale = H[0] * H[0] + H[2] * H[2] + 2 * H[1] * H[1];
        if (std::abs(det) <= 1e-10 * scale) cp.type = CriticalType::degenerate;
        else if (det < 0) cp.type = CriticalType::saddle;
        else cp.type = tr > 0 ? CriticalType::minimum : CriticalType::maximum;
        out.points.push_back(cp);
    }
    std::sort(out.points.begin(), out.points.end(), [](const CriticalPoint& a, const CriticalPoint& b) {
        return a.q[0] != b.q[0] ? a.q[0] < b.q[0] : a.q[1] < b.q[1];
    });
    return out;
}

// ----------------------------------------------------------------- integrals

/// max over samples of |I(t) - I(0)| / (1 + |I(0)|). For "H" the trace's own
/// relative deviation |H(t) - H(0)| / |H(0)| is used so both records agree.
inline double integral_drift(const OrbitTrace& orbit, std::string_view which) {
    if (orbit.states.empty()) return 0;
    if (which == "H") {
        double m = 0;
        for (double d : orbit.rel_drift) m = std::max(m, d);
        return m;
    }
    auto I0 = integrals(orbit.system, orbit.states.front());
    if (!I0 || !I0->get(which))
        throw std::invalid_argument("integral " + std::string(which) + " is not defined for " +
                                    std::string(level_name(orbit.system.level)) + " / " + orbit.system.potential.name);
    const double v0 = *I0->get(which);
    double m = 0;
    for (const auto& s : orbit.states) {
        auto I = integrals(orbit.system, s);
        if (!I) return INFINITY;
        m = std::max(m, std::abs(*I->get(which) - v0) / (1 + std::abs(v0)));
    }
    return m;
}

// ------------------------------------------------------------- region report

struct RegionReport {
    Coords seed{};
    int sign = 0;
    std::size_t cells = 0;
    bool confined = true;
    int orbits_tested = 0;
    std::vector<CriticalPoint> critical_points;
    bool critical_search_converged = false;
};

/// Confinement over the given orbits plus the critical points of the region.
inline RegionReport region_report(const PotentialSpec& spec, const Region& region,
                                  const std::vector<OrbitTrace>& orbits, int starts = 32, std::uint64_t seed = 1) {
    RegionReport r;
    r.seed = region.seed;
    r.sign = region.sign;
    r.cells = region.size();
    for (const auto& o : orbits) {
        ++r.orbits_tested;
        if (!confinement_check(o)) r.confined = false;
    }
    auto cs = find_critical_points(spec, region, starts, seed);
    r.critical_points = cs.points;
    r.critical_search_converged = cs.ok();
    return r;
}

}  // namespace platonic
