#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "platonic/dynamics.hpp"

namespace platonic {

template <std::size_t N>
using Vec = std::array<double, N>;

// Generic steppers. The right-hand side is a callable
//   std::optional<Vec<N>> f(double t, const Vec<N>& y)
// returning nullopt where it cannot be evaluated.

template <std::size_t N, class F>
std::optional<Vec<N>> rk4_step(F&& f, double t, const Vec<N>& y, double h) {
    auto axpy = [](const Vec<N>& a, double s, const Vec<N>& b) {
        Vec<N> r;
        for (std::size_t i = 0; i < N; ++i) r[i] = a[i] + s * b[i];
        return r;
    };
    auto k1 = f(t, y);
    if (!k1) return std::nullopt;
    auto k2 = f(t + 0.5 * h, axpy(y, 0.5 * h, *k1));
    if (!k2) return std::nullopt;
    auto k3 = f(t + 0.5 * h, axpy(y, 0.5 * h, *k2));
    if (!k3) return std::nullopt;
    auto k4 = f(t + h, axpy(y, h, *k3));
    if (!k4) return std::nullopt;
    Vec<N> out;
    for (std::size_t i = 0; i < N; ++i)
        out[i] = y[i] + h / 6.0 * ((*k1)[i] + 2.0 * (*k2)[i] + 2.0 * (*k3)[i] + (*k4)[i]);
    return out;
}

/// One Dormand-Prince 5(4) trial step: the propagated fifth-order solution and
/// the difference to the embedded fourth-order one.
template <std::size_t N>
struct EmbeddedTrial {
    Vec<N> y;
    Vec<N> error;
};

template <std::size_t N, class F>
std::optional<EmbeddedTrial<N>> dopri5_trial(F&& f, double t, const Vec<N>& y, double h) {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                            b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                            e6 = 22.0 / 525, e7 = -1.0 / 40;

    Vec<N> tmp;
    auto stage = [&](auto&&... terms) {
        for (std::size_t i = 0; i < N; ++i) {
            double s = 0;
            ((s += terms.first * (*terms.second)[i]), ...);
            tmp[i] = y[i] + h * s;
        }
        return tmp;
    };
    using P = std::pair<double, const Vec<N>*>;
    auto k1 = f(t, y);
    if (!k1) return std::nullopt;
    auto k2 = f(t + c2 * h, stage(P{a21, &*k1}));
    if (!k2) return std::nullopt;
    auto k3 = f(t + c3 * h, stage(P{a31, &*k1}, P{a32, &*k2}));
    if (!k3) return std::nullopt;
    auto k4 = f(t + c4 * h, stage(P{a41, &*k1}, P{a42, &*k2}, P{a43, &*k3}));
    if (!k4) return std::nullopt;
    auto k5 = f(t + c5 * h, stage(P{a51, &*k1}, P{a52, &*k2}, P{a53, &*k3}, P{a54, &*k4}));
    if (!k5) return std::nullopt;
    auto k6 = f(t + h, stage(P{a61, &*k1}, P{a62, &*k2}, P{a63, &*k3}, P{a64, &*k4}, P{a65, &*k5}));
    if (!k6) return std::nullopt;
    EmbeddedTrial<N> out;
    out.y = stage(P{b1, &*k1}, P{b3, &*k3}, P{b4, &*k4}, P{b5, &*k5}, P{b6, &*k6});
    auto k7 = f(t + h, out.y);
    if (!k7) return std::nullopt;
    for (std::size_t i = 0; i < N; ++i)
        out.error[i] = h * (e1 * (*k1)[i] + e3 * (*k3)[i] + e4 * (*k4)[i] + e5 * (*k5)[i] + e6 * (*k6)[i] +
                            e7 * (*k7)[i]);
    return out;
}

struct Tolerances {
    double relative = 1e-10;
    double absolute = 1e-10;
};

template <std::size_t N>
double error_norm(const Vec<N>& y0, const Vec<N>& y1, const Vec<N>& err, const Tolerances& tol) {
    double e = 0;
    for (std::size_t i = 0; i < N; ++i) {
        double sc = tol.absolute + tol.relative * std::max(std::abs(y0[i]), std::abs(y1[i]));
        e = std::max(e, std::abs(err[i]) / sc);
    }
    return e;
}

template <std::size_t N>
struct AdaptiveStep {
    Vec<N> y{};
    double h_used = 0;       ///< accepted step (signed)
    double h_next = 0;       ///< proposal for the following step
    double error_norm = 0;   ///< scaled error of the accepted step, <= 1
    Vec<N> error{};          ///< raw estimate y5 - y4
    int rejections = 0;
    bool ok = false;
};

/// Takes one accepted step starting from trial size `h`. Rejected trials are
/// retried with a step scaled by 0.9 err^(-1/5), clamped to [0.2, 5]; a trial
/// that hits an unevaluable point is retried at a quarter of the size.
template <std::size_t N, class F>
AdaptiveStep<N> adaptive_step(F&& f, double t, const Vec<N>& y, double h, const Tolerances& tol,
                              double min_step = 1e-14, int max_rejections = 200) {
    AdaptiveStep<N> r;
    for (; r.rejections <= max_rejections; ++r.rejections) {
        if (std::abs(h) < min_step) break;
        auto trial = dopri5_trial<N>(f, t, y, h);
        if (!trial) {
            h *= 0.25;
            continue;
        }
        double en = error_norm(y, trial->y, trial->error, tol);
        double fac = en == 0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
        if (en <= 1.0) {
            r.y = trial->y;
            r.error = trial->error;
            r.error_norm = en;
            r.h_used = h;
            r.h_next = h * fac;
            r.ok = true;
            return r;
        }
        h *= std::min(fac, 1.0);
    }
    return r;
}

// Hamiltonian orbits.

enum class Method { rk4_fixed, adaptive_embedded };

inline std::string_view method_name(Method m) { return m == Method::rk4_fixed ? "rk4-fixed" : "adaptive-embedded"; }

inline Method parse_method(std::string_view s) {
    if (s == "rk4-fixed") return Method::rk4_fixed;
    if (s == "adaptive-embedded") return Method::adaptive_embedded;
    throw std::invalid_argument("unknown method: " + std::string(s));
}

/// Default step and drift threshold reproduce the reference protocol:
/// h = 0.002 and at most 1e-3 percent relative energy deviation.
struct IntegratorConfig {
    Method method = Method::rk4_fixed;
    double step = 0.002;
    Tolerances tol{};
    std::optional<double> t_start;  ///< defaults to the initial state's time
    double t_end = 50.0;
    double drift_abort = 1e-5;
    double initial_adaptive_step = 0.01;
    double min_step = 1e-14;
    std::size_t max_steps = 100'000'000;
};

enum class Termination { completed, drift_exceeded, guard_tripped, singular, step_underflow, max_steps };

inline std::string_view termination_name(Termination t) {
    switch (t) {
        case Termination::completed: return "completed";
        case Termination::drift_exceeded: return "drift-exceeded";
        case Termination::guard_tripped: return "guard-tripped";
        case Termination::singular: return "singular";
        case Termination::step_underflow: return "step-underflow";
        case Termination::max_steps: return "max-steps";
    }
    return "?";
}

struct OrbitTrace {
    HamiltonianSystem system;
    Method method = Method::rk4_fixed;
    std::vector<PhaseState> states;  ///< time ordered
    std::vector<double> energy;
    std::vector<double> rel_drift;   ///< |H(t) - H(0)| / |H(0)| (absolute when H(0) = 0)
    std::vector<double> steps;       ///< steps[i] = t_i - t_{i-1}; steps[0] = 0
    double initial_energy = 0;
    double max_drift = 0;
    Termination status = Termination::completed;

    bool ok() const { return status == Termination::completed; }
    std::size_t size() const { return states.size(); }
};

using PhaseVec = Vec<2 * max_dof>;

inline PhaseVec pack(const PhaseState& s) {
    PhaseVec y{};
    for (int i = 0; i < max_dof; ++i) {
        y[i] = s.q[i];
        y[max_dof + i] = s.p[i];
    }
    return y;
}

inline PhaseState unpack(Chart chart, const PhaseVec& y, double t) {
    PhaseState s;
    s.chart = chart;
    s.t = t;
    for (int i = 0; i < max_dof; ++i) {
        s.q[i] = y[i];
        s.p[i] = y[max_dof + i];
    }
    return s;
}

/// Hamilton's equations in the packed (q, p) layout used by the steppers.
inline auto phase_flow(const HamiltonianSystem& sys) {
    return [&sys](double, const PhaseVec& y) -> std::optional<PhaseVec> {
        Coords q, p;
        for (int i = 0; i < max_dof; ++i) {
            q[i] = y[i];
            p[i] = y[max_dof + i];
        }
        auto v = hamilton_rhs(sys, q, p);
        if (!v) return std::nullopt;
        PhaseVec d{};
        for (int i = 0; i < max_dof; ++i) {
            d[i] = v->dq[i];
            d[max_dof + i] = v->dp[i];
        }
        return d;
    };
}

/// Classical four-stage RK4 update of a phase state.
inline std::optional<PhaseState> rk4_step(const HamiltonianSystem& sys, const PhaseState& s, double h) {
    auto y = rk4_step<2 * max_dof>(phase_flow(sys), s.t, pack(s), h);
    if (!y) return std::nullopt;
    return unpack(s.chart, *y, s.t + h);
}

/// Single uncontrolled Dormand-Prince step (fifth-order solution).
inline std::optional<PhaseState> dopri5_step(const HamiltonianSystem& sys, const PhaseState& s, double h) {
    auto r = dopri5_trial<2 * max_dof>(phase_flow(sys), s.t, pack(s), h);
    if (!r) return std::nullopt;
    return unpack(s.chart, r->y, s.t + h);
}

/// One step of the given method with exactly the step h (no error control).
inline std::optional<PhaseState> method_step(Method m, const HamiltonianSystem& sys, const PhaseState& s, double h) {
    return m == Method::rk4_fixed ? rk4_step(sys, s, h) : dopri5_step(sys, s, h);
}

struct AdaptivePhaseStep {
    PhaseState state;
    double accepted_step = 0;
    double next_step = 0;
    double error_estimate = 0;  ///< max-norm of y5 - y4
    double error_norm = 0;      ///< tolerance-scaled error
    bool ok = false;
};

inline AdaptivePhaseStep adaptive_step_contract(const HamiltonianSystem& sys, const PhaseState& s, double h_try,
                                                const Tolerances& tol, double min_step = 1e-14) {
    auto r = adaptive_step<2 * max_dof>(phase_flow(sys), s.t, pack(s), h_try, tol, min_step);
    AdaptivePhaseStep out;
    out.ok = r.ok;
    if (!r.ok) return out;
    out.state = unpack(s.chart, r.y, s.t + r.h_used);
    out.accepted_step = r.h_used;
    out.next_step = r.h_next;
    out.error_norm = r.error_norm;
    for (double e : r.error) out.error_estimate = std::max(out.error_estimate, std::abs(e));
    return out;
}

namespace detail {

inline double relative_deviation(double h, double h0) {
    return h0 != 0 ? std::abs(h - h0) / std::abs(h0) : std::abs(h - h0);
}

/// Why a step from s could not be evaluated: an explicit Euler predictor
/// tells a chart-guard exit apart from running into the potential's wall.
inline Termination classify_failed_step(const HamiltonianSystem& sys, const PhaseState& s, double h) {
    auto v = hamilton_rhs(sys, s);
    if (!v) return check_state(sys, s) == Fault::chart_guard ? Termination::guard_tripped : Termination::singular;
    PhaseState e = s;
    for (int i = 0; i < sys.dof(); ++i) {
        e.q[i] += h * v->dq[i];
        e.p[i] += h * v->dp[i];
    }
    return check_state(sys, e) == Fault::chart_guard ? Termination::guard_tripped : Termination::singular;
}

/// Integrates from s0 to t_end in one direction, appending to `trace`
/// (s0 itself is not appended).
inline void integrate_branch(OrbitTrace& trace, const PhaseState& s0, double t_end, const IntegratorConfig& cfg) {
    const HamiltonianSystem& sys = trace.system;
    const double span = t_end - s0.t;
    if (span == 0) return;
    const double dir = span > 0 ? 1.0 : -1.0;

    PhaseState s = s0;
    auto record = [&](const PhaseState& n, double h) -> bool {
        Fault f = check_state(sys, n);
        if (f != Fault::none) {
            trace.status = f == Fault::chart_guard ? Termination::guard_tripped : Termination::singular;
            return false;
        }
        double e = *hamiltonian_value(sys, n);
        double d = relative_deviation(e, trace.initial_energy);
        trace.states.push_back(n);
        trace.energy.push_back(e);
        trace.rel_drift.push_back(d);
        trace.steps.push_back(h);
        trace.max_drift = std::max(trace.max_drift, d);
        if (d > cfg.drift_abort) {
            trace.status = Termination::drift_exceeded;
            return false;
        }
        return true;
    };

    if (cfg.method == Method::rk4_fixed) {
        const double h = std::abs(cfg.step);
        const double ratio = std::abs(span) / h;
        std::size_t n = static_cast<std::size_t>(std::llround(ratio));
        if (std::abs(ratio - double(n)) > 1e-9 * std::max(1.0, ratio)) n = static_cast<std::size_t>(std::ceil(ratio));
        if (n > cfg.max_steps) {
            trace.status = Termination::max_steps;
            return;
        }
        for (std::size_t i = 1; i <= n; ++i) {
            const double t_next = (i == n) ? t_end : s0.t + dir * h * double(i);
            auto next = rk4_step(sys, s, t_next - s.t);
            if (!next) {
                trace.status = classify_failed_step(sys, s, t_next - s.t);
                return;
            }
            next->t = t_next;
            double step = t_next - s.t;
            if (!record(*next, step)) return;
            s = *next;
        }
        return;
    }

    double h = dir * std::min(std::abs(cfg.initial_adaptive_step), std::abs(span));
    for (std::size_t i = 0; i < cfg.max_steps; ++i) {
        const double remaining = t_end - s.t;
        if (remaining * dir <= 0) return;
        bool last = std::abs(h) >= std::abs(remaining);
        if (last) h = remaining;
        auto r = adaptive_step_contract(sys, s, h, cfg.tol, cfg.min_step);
        if (!r.ok) {
            Termination why = classify_failed_step(sys, s, h);
            trace.status = why == Termination::guard_tripped ? why : Termination::step_underflow;
            return;
        }
        PhaseState n = r.state;
        if (last && r.accepted_step == remaining) n.t = t_end;
        if (!record(n, n.t - s.t)) return;
        s = n;
        h = r.next_step;
    }
    trace.status = Termination::max_steps;
}

}  // namespace detail

/// Integrates the orbit through s0 over [t_start, t_end] (t_start defaults to
/// s0.t). When s0.t lies strictly inside, the backward branch is integrated
/// first and the trace is merged in time order. Stops early, keeping the
/// partial trace, when the drift threshold or a chart guard trips.
inline OrbitTrace integrate(const HamiltonianSystem& sys, const PhaseState& s0, const IntegratorConfig& cfg) {
    OrbitTrace trace;
    trace.system = sys;
    trace.method = cfg.method;
    if (cfg.method == Method::rk4_fixed && !(cfg.step > 0)) throw std::invalid_argument("step must be > 0");
    if (cfg.method == Method::adaptive_embedded && !(cfg.tol.relative > 0 && cfg.tol.absolute > 0))
        throw std::invalid_argument("tolerances must be > 0");
    Fault f = check_state(sys, s0);
    if (f != Fault::none) {
        trace.status = f == Fault::chart_guard ? Termination::guard_tripped : Termination::singular;
        return trace;
    }
    trace.initial_energy = *hamiltonian_value(sys, s0);

    const double t_start = cfg.t_start.value_or(s0.t);
    const bool forward = cfg.t_end >= t_start;
    const bool inside = forward ? (s0.t > t_start) : (s0.t < t_start);
    if (inside) {
        OrbitTrace back;
        back.system = sys;
        back.initial_energy = trace.initial_energy;
        detail::integrate_branch(back, s0, t_start, cfg);
        const std::size_t nb = back.states.size();
        for (std::size_t i = nb; i-- > 0;) {
            trace.states.push_back(back.states[i]);
            trace.energy.push_back(back.energy[i]);
            trace.rel_drift.push_back(back.rel_drift[i]);
            // step leading into sample i from the earlier (merged-order) sample
            trace.steps.push_back(trace.steps.empty() ? 0.0 : -back.steps[i + 1]);
        }
        trace.max_drift = back.max_drift;
        if (!back.ok()) {
            trace.status = back.status;
            trace.states.push_back(s0);
            trace.energy.push_back(trace.initial_energy);
            trace.rel_drift.push_back(0);
            trace.steps.push_back(trace.steps.empty() ? 0.0 : -back.steps[0]);
            return trace;
        }
        trace.states.push_back(s0);
        trace.energy.push_back(trace.initial_energy);
        trace.rel_drift.push_back(0);
        trace.steps.push_back(nb ? -back.steps[0] : 0.0);
    } else {
        trace.states.push_back(s0);
        trace.energy.push_back(trace.initial_energy);
        trace.rel_drift.push_back(0);
        trace.steps.push_back(0);
    }
    detail::integrate_branch(trace, s0, cfg.t_end, cfg);
    return trace;
}

}  // namespace platonic
