#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "platonic/integrators.hpp"

namespace platonic {

/// A phase-space variable: coordinate q[index] or momentum p[index].
struct PhaseVar {
    bool momentum = false;
    int index = 0;

    double operator()(const PhaseState& s) const { return momentum ? s.p[index] : s.q[index]; }
    bool operator==(const PhaseVar&) const = default;
};

/// Accepts coordinate names of the chart ("theta", "p_theta") and the
/// positional forms "q1".."q4", "p1".."p4".
inline PhaseVar parse_phase_var(Chart c, std::string_view s) {
    auto bad = [&] { return std::invalid_argument("unknown phase variable '" + std::string(s) + "' for chart " +
                                                  std::string(chart_name(c))); };
    if (s.size() == 2 && (s[0] == 'q' || s[0] == 'p') && std::isdigit(static_cast<unsigned char>(s[1]))) {
        int i = s[1] - '1';
        if (i < 0 || i >= chart_dim(c)) throw bad();
        return {s[0] == 'p', i};
    }
    bool mom = s.starts_with("p_");
    std::string_view name = mom ? s.substr(2) : s;
    int i = coordinate_index(c, name);
    if (i < 0) throw bad();
    return {mom, i};
}

inline std::string phase_var_name(Chart c, PhaseVar v) {
    std::string n(coordinate_name(c, v.index));
    return v.momentum ? "p_" + n : n;
}

enum class Direction { positive, negative, both };

inline std::string_view direction_name(Direction d) {
    switch (d) {
        case Direction::positive: return "positive";
        case Direction::negative: return "negative";
        case Direction::both: return "both";
    }
    return "?";
}

inline Direction parse_direction(std::string_view s) {
    if (s == "positive" || s == "+") return Direction::positive;
    if (s == "negative" || s == "-") return Direction::negative;
    if (s == "both") return Direction::both;
    throw std::invalid_argument("unknown direction: " + std::string(s));
}

/// One phase variable pinned to a value, crossings filtered by the sign of
/// its rate, and two variables recorded.
struct SectionSpec {
    PhaseVar trigger;
    double value = 0;
    Direction direction = Direction::positive;
    PhaseVar rec1;
    PhaseVar rec2;
    double tolerance = 1e-10;     ///< on |trigger - value| after refinement
    bool periodic = false;        ///< trigger is an angle; residual taken mod 2 pi
    double singular_guard = 1e-8; ///< crossings closer than this to the singular set are discarded
    int max_bisections = 200;
};

/// Builds a spec from names, marking angle triggers periodic.
inline SectionSpec make_section_spec(Chart c, std::string_view trigger, double value, Direction dir,
                                     std::string_view rec1, std::string_view rec2) {
    SectionSpec s;
    s.trigger = parse_phase_var(c, trigger);
    s.value = value;
    s.direction = dir;
    s.rec1 = parse_phase_var(c, rec1);
    s.rec2 = parse_phase_var(c, rec2);
    if (s.rec1 == s.rec2) throw std::invalid_argument("recording pair must be two distinct variables");
    s.periodic = !s.trigger.momentum && is_periodic(c, s.trigger.index);
    return s;
}

/// Signed distance of the trigger variable from the section value.
inline double trigger_residual(const SectionSpec& spec, const PhaseState& s) {
    double d = spec.trigger(s) - spec.value;
    return spec.periodic ? std::remainder(d, two_pi) : d;
}

/// A sign change of the residual between consecutive samples. For periodic
/// triggers the jump through the branch cut at +-pi is not a crossing.
inline bool brackets(const SectionSpec& spec, double ga, double gb) {
    bool change = (ga < 0 && gb >= 0) || (ga > 0 && gb <= 0);
    if (!change) return false;
    return !spec.periodic || std::abs(gb - ga) < pi;
}

enum class RefineStatus { ok, not_bracketing, max_iterations, step_failed };

inline std::string_view refine_status_name(RefineStatus r) {
    switch (r) {
        case RefineStatus::ok: return "ok";
        case RefineStatus::not_bracketing: return "not-bracketing";
        case RefineStatus::max_iterations: return "max-iterations";
        case RefineStatus::step_failed: return "step-failed";
    }
    return "?";
}

template <class State>
struct Refined {
    State state{};
    double tau = 0;       ///< sub-step from the bracket start
    double residual = 0;  ///< residual at the returned state
    int iterations = 0;
    RefineStatus status = RefineStatus::ok;
};

/// Bisection on the sub-step tau in [0, h]: `step(a, tau)` re-integrates from
/// the bracket start and returns std::optional<State>; `g` is the residual.
template <class State, class Step, class G>
Refined<State> bisect_crossing(Step&& step, const State& a, double h, G&& g, double tol, int max_iter = 200) {
    Refined<State> r;
    double ga = g(a);
    auto sb = step(a, h);
    if (!sb) {
        r.status = RefineStatus::step_failed;
        return r;
    }
    double gb = g(*sb);
    r.state = std::abs(ga) <= std::abs(gb) ? a : *sb;
    r.tau = std::abs(ga) <= std::abs(gb) ? 0.0 : h;
    r.residual = std::min(std::abs(ga), std::abs(gb));
    if (std::abs(gb) <= tol) {
        r.state = *sb;
        r.tau = h;
        r.residual = std::abs(gb);
        return r;
    }
    if (!((ga < 0 && gb > 0) || (ga > 0 && gb < 0))) {
        r.status = std::abs(ga) <= tol ? RefineStatus::ok : RefineStatus::not_bracketing;
        return r;
    }
    double lo = 0, hi = h;
    for (r.iterations = 1; r.iterations <= max_iter; ++r.iterations) {
        double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        auto sm = step(a, mid);
        if (!sm) {
            r.status = RefineStatus::step_failed;
            return r;
        }
        double gm = g(*sm);
        if (std::abs(gm) < r.residual) {
            r.state = *sm;
            r.tau = mid;
            r.residual = std::abs(gm);
        }
        if (std::abs(gm) <= tol) return r;
        if ((gm < 0) == (ga < 0)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    r.iterations = std::min(r.iterations, max_iter);
    r.status = RefineStatus::max_iterations;
    return r;
}

/// Refines a crossing between two consecutive orbit samples by bisection on
/// sub-step re-integration with the given method.
inline Refined<PhaseState> refine_crossing(const HamiltonianSystem& sys, const PhaseState& s_before,
                                           const PhaseState& s_after, const SectionSpec& spec,
                                           Method method = Method::rk4_fixed) {
    double ga = trigger_residual(spec, s_before), gb = trigger_residual(spec, s_after);
    if (!brackets(spec, ga, gb) && std::abs(gb) > spec.tolerance) {
        Refined<PhaseState> r;
        r.state = s_before;
        r.residual = std::abs(ga);
        r.status = RefineStatus::not_bracketing;
        return r;
    }
    auto step = [&](const PhaseState& a, double tau) { return method_step(method, sys, a, tau); };
    auto g = [&](const PhaseState& s) { return trigger_residual(spec, s); };
    return bisect_crossing<PhaseState>(step, s_before, s_after.t - s_before.t, g, spec.tolerance,
                                       spec.max_bisections);
}

struct SectionPoint {
    double t_cross = 0;
    double rec1 = 0;
    double rec2 = 0;
    PhaseState state;
};

struct SectionPointSet {
    SectionSpec spec;
    std::vector<SectionPoint> points;
    int ic_id = 0;
    double energy = 0;            ///< H at the initial condition
    int discarded_singular = 0;   ///< crossings dropped near the singular set
    int refine_failures = 0;
    double max_drift = 0;         ///< of the underlying orbit
    Termination status = Termination::completed;

    std::size_t size() const { return points.size(); }
};

namespace detail {

/// First-order distance |f| / |grad f| to the zero set of the region factor,
/// in the potential's own coordinates.
inline double wall_distance(const HamiltonianSystem& sys, const Coords& q) {
    Coords x = sys.lifted() ? angular_coords(sys, q) : q;
    const auto& f = sys.potential.region_factor;
    const int d = chart_dim(sys.potential.chart);
    double v = f(x), g2 = 0;
    for (int i = 0; i < d; ++i) {
        Coords a = x, b = x;
        a[i] += 1e-7;
        b[i] -= 1e-7;
        double gi = (f(a) - f(b)) / 2e-7;
        g2 += gi * gi;
    }
    if (g2 == 0) return v == 0 ? 0.0 : INFINITY;
    return std::abs(v) / std::sqrt(g2);
}

inline bool direction_ok(const HamiltonianSystem& sys, const SectionSpec& spec, const PhaseState& s, double ga,
                         double gb) {
    if (spec.direction == Direction::both) return true;
    double rate = gb - ga;
    if (auto v = hamilton_rhs(sys, s)) {
        double r = spec.trigger.momentum ? v->dp[spec.trigger.index] : v->dq[spec.trigger.index];
        if (r != 0) rate = r;
    }
    return spec.direction == Direction::positive ? rate > 0 : rate < 0;
}

}  // namespace detail

/// Recorded angles are normalized to [0, 2 pi) for display.
inline double recorded_value(Chart c, PhaseVar v, const PhaseState& s) {
    double x = v(s);
    return !v.momentum && is_periodic(c, v.index) ? wrap_angle(x) : x;
}

/// Extracts the refined crossings of an existing trace.
inline SectionPointSet section_of_trace(const OrbitTrace& trace, const SectionSpec& spec, int ic_id = 0) {
    SectionPointSet out;
    out.spec = spec;
    out.ic_id = ic_id;
    out.energy = trace.initial_energy;
    out.max_drift = trace.max_drift;
    out.status = trace.status;
    const auto& sys = trace.system;
    const auto& st = trace.states;
    for (std::size_t i = 1; i < st.size(); ++i) {
        double ga = trigger_residual(spec, st[i - 1]), gb = trigger_residual(spec, st[i]);
        if (!brackets(spec, ga, gb)) continue;
        auto r = refine_crossing(sys, st[i - 1], st[i], spec, trace.method);
        if (r.status != RefineStatus::ok) {
            ++out.refine_failures;
            continue;
        }
        if (!detail::direction_ok(sys, spec, r.state, ga, gb)) continue;
        if (detail::wall_distance(sys, r.state.q) < spec.singular_guard ||
            chart_singularity_distance(sys.chart, r.state.q) < spec.singular_guard) {
            ++out.discarded_singular;
            continue;
        }
        out.points.push_back({r.state.t, recorded_value(sys.chart, spec.rec1, r.state),
                              recorded_value(sys.chart, spec.rec2, r.state), r.state});
    }
    return out;
}

/// Integrates the orbit through s0 and records its section points in time order.
inline SectionPointSet compute_section(const HamiltonianSystem& sys, const PhaseState& s0,
                                       const IntegratorConfig& cfg, const SectionSpec& spec, int ic_id = 0) {
    return section_of_trace(integrate(sys, s0, cfg), spec, ic_id);
}

/// Deterministic merge of several point sets, ordered by (ic_id, t_cross).
struct MergedPoint {
    int ic_id;
    double t_cross, rec1, rec2, energy;
};

inline std::vector<MergedPoint> merge_sections(const std::vector<SectionPointSet>& sets) {
    std::vector<MergedPoint> out;
    for (const auto& s : sets)
        for (const auto& p : s.points) out.push_back({s.ic_id, p.t_cross, p.rec1, p.rec2, s.energy});
    std::stable_sort(out.begin(), out.end(), [](const MergedPoint& a, const MergedPoint& b) {
        return a.ic_id != b.ic_id ? a.ic_id < b.ic_id : a.t_cross < b.t_cross;
    });
    return out;
}

}  // namespace platonic
