#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "platonic/diagnostics.hpp"
#include "platonic/sections.hpp"

namespace platonic {

/// Region seeds used when none is given: a point inside one separated region.
inline Coords default_region_seed(const PotentialSpec& spec) {
    const std::string& n = spec.name;
    if (n == "V_I") return {1.3820858, 5.6548668, 0, 0};
    if (n == "V_4") return {1.0, 0.5, 0, 0};
    if (n == "Ca2") return {1.0, pi / 6, 0, 0};
    if (n == "dihedral") return {1.0, pi / (2 * spec.parameter("k")), 0, 0};
    if (spec.chart == Chart::plane_polar) return {1.0, 0.5, 0, 0};
    if (spec.chart == Chart::plane_cartesian) return {0.5, 0.3, 0, 0};
    return {0.9553, pi / 4, 0, 0};
}

struct SweepConfig {
    PotentialSpec potential;
    Coords region_seed{};
    std::optional<double> energy;  ///< default: energy_factor above the region minimum
    double energy_factor = 1.3;
    int n_ic = 4;
    std::uint64_t seed = 42;
    IntegratorConfig integrator = [] {
        IntegratorConfig c;
        c.t_start = -100;
        c.t_end = 100;
        return c;
    }();
    std::string trigger = "psi";
    std::optional<double> trigger_value;  ///< default: the seed's value of the trigger coordinate
    Direction direction = Direction::positive;
    std::string rec1 = "theta";
    std::string rec2 = "p_theta";
    ClassifierConfig classifier;
    unsigned threads = 0;  ///< 0: hardware concurrency
};

struct SweepEntry {
    int ic_id = 0;
    PhaseState s0;
    SectionPointSet set;
    SectionVerdict verdict;
};

struct SweepResult {
    std::string potential;
    Chart chart = Chart::sphere;
    Coords region_seed{};
    int region_sign = 0;
    double region_min = 0;
    double energy = 0;
    SectionSpec spec;
    std::vector<SweepEntry> entries;
    int sampling_failures = 0;

    double fraction_curve_like() const {
        if (entries.empty()) return 0;
        auto n = std::count_if(entries.begin(), entries.end(),
                               [](const SweepEntry& e) { return e.verdict.label == SectionLabel::curve_like; });
        return double(n) / entries.size();
    }
    int count(SectionLabel l) const {
        return int(std::count_if(entries.begin(), entries.end(), [&](const SweepEntry& e) { return e.verdict.label == l; }));
    }
    bool aborted() const {
        return std::any_of(entries.begin(), entries.end(),
                           [](const SweepEntry& e) { return e.set.status != Termination::completed; });
    }
    std::vector<SectionPointSet> sets() const {
        std::vector<SectionPointSet> s;
        for (const auto& e : entries) s.push_back(e.set);
        return s;
    }
};

inline double default_energy(double region_min, double factor) {
    if (region_min > 0) return factor * region_min;
    return region_min + (factor - 1) * std::max(1.0, std::abs(region_min));
}

inline SectionSpec sweep_section_spec(const SweepConfig& cfg) {
    const Chart c = cfg.potential.chart;
    double value = 0;
    if (cfg.trigger_value) {
        value = *cfg.trigger_value;
    } else {
        auto v = parse_phase_var(c, cfg.trigger);
        if (!v.momentum) value = cfg.region_seed[v.index];
    }
    return make_section_spec(c, cfg.trigger, value, cfg.direction, cfg.rec1, cfg.rec2);
}

/// Runs `fn(i)` for i in [0, n) on up to `threads` workers.
template <class Fn>
void parallel_for(int n, unsigned threads, Fn&& fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, std::max(1, n));
    if (threads <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w)
        pool.emplace_back([&] {
            for (int i; (i = next.fetch_add(1)) < n;) fn(i);
        });
    for (auto& t : pool) t.join();
}

/// Seeded random-IC sweep: ICs are drawn sequentially from one generator, then
/// integrated in parallel, so results do not depend on the thread count.
inline SweepResult run_sweep(const SweepConfig& cfg) {
    if (cfg.n_ic < 1) throw std::invalid_argument("n_ic must be positive");
    if (cfg.potential.full_hamiltonian) throw std::invalid_argument("sweeps need a natural potential, not KM2");
    SweepResult out;
    out.potential = cfg.potential.name;
    out.chart = cfg.potential.chart;
    out.region_seed = cfg.region_seed;
    out.spec = sweep_section_spec(cfg);
    auto region = find_region(cfg.potential, cfg.region_seed);
    out.region_sign = region.sign;
    out.region_min = region_min_potential(cfg.potential, region);
    out.energy = cfg.energy ? *cfg.energy : default_energy(out.region_min, cfg.energy_factor);
    if (!(out.energy > out.region_min))
        throw std::invalid_argument("energy " + std::to_string(out.energy) + " is not above the region minimum " +
                                    std::to_string(out.region_min));

    Rng rng(cfg.seed);
    std::vector<PhaseState> ics;
    while (int(ics.size()) < cfg.n_ic) {
        auto s = sample_initial_condition(cfg.potential, region, out.energy, rng);
        if (!s) {
            ++out.sampling_failures;
            if (out.sampling_failures > 10) throw std::runtime_error("could not sample initial conditions");
            continue;
        }
        ics.push_back(*s);
    }
    auto sys = make_system(cfg.potential, natural_level(cfg.potential.chart));
    out.entries.resize(ics.size());
    parallel_for(int(ics.size()), cfg.threads, [&](int i) {
        auto& e = out.entries[i];
        e.ic_id = i;
        e.s0 = ics[i];
        e.set = compute_section(sys, ics[i], cfg.integrator, out.spec, i);
        e.verdict = classify_section(e.set, cfg.classifier);
    });
    return out;
}

inline nlohmann::ordered_json state_json(const PhaseState& s) {
    nlohmann::ordered_json j;
    const int d = chart_dim(s.chart);
    for (int i = 0; i < d; ++i) j[std::string(coordinate_name(s.chart, i))] = s.q[i];
    for (int i = 0; i < d; ++i) j["p_" + std::string(coordinate_name(s.chart, i))] = s.p[i];
    j["t"] = s.t;
    return j;
}

/// potential, seed, IC list, per-IC dimension and label, fraction curve-like.
inline nlohmann::ordered_json verdict_json(const SweepResult& r, std::uint64_t seed) {
    using json = nlohmann::ordered_json;
    const Chart c = r.chart;
    json j;
    j["potential"] = r.potential;
    j["seed"] = seed;
    j["region_seed"] = {r.region_seed[0], r.region_seed[1]};
    j["region_sign"] = r.region_sign;
    j["region_min_potential"] = r.region_min;
    j["energy"] = r.energy;
    j["section"] = {{"trigger", phase_var_name(c, r.spec.trigger)},
                    {"value", r.spec.value},
                    {"direction", std::string(direction_name(r.spec.direction))},
                    {"record", {phase_var_name(c, r.spec.rec1), phase_var_name(c, r.spec.rec2)}}};
    json ics = json::array();
    for (const auto& e : r.entries) {
        json x;
        x["ic_id"] = e.ic_id;
        x["initial_state"] = state_json(e.s0);
        x["points"] = e.verdict.points;
        x["dimension"] = e.verdict.dimension;
        x["label"] = std::string(label_name(e.verdict.label));
        x["scales_used"] = e.verdict.scales_used;
        x["discarded_singular"] = e.set.discarded_singular;
        x["refine_failures"] = e.set.refine_failures;
        x["max_drift"] = e.set.max_drift;
        x["status"] = std::string(termination_name(e.set.status));
        ics.push_back(x);
    }
    j["initial_conditions"] = ics;
    j["fraction_curve_like"] = r.fraction_curve_like();
    j["scattered"] = r.count(SectionLabel::scattered);
    return j;
}

/// ICs from JSON: an array of objects keyed by coordinate names ("theta",
/// "p_psi", ...) or by "q" and "p" arrays; missing entries are zero.
inline std::vector<PhaseState> parse_initial_conditions(const nlohmann::json& arr, Chart c) {
    if (!arr.is_array()) throw std::invalid_argument("initial conditions must be a JSON array");
    std::vector<PhaseState> out;
    const int d = chart_dim(c);
    for (const auto& o : arr) {
        if (!o.is_object()) throw std::invalid_argument("initial condition must be a JSON object");
        PhaseState s;
        s.chart = c;
        for (auto it = o.begin(); it != o.end(); ++it) {
            const std::string& k = it.key();
            if (k == "q" || k == "p") {
                auto v = it.value().get<std::vector<double>>();
                if (int(v.size()) != d) throw std::invalid_argument("'" + k + "' needs " + std::to_string(d) + " entries");
                for (int i = 0; i < d; ++i) (k == "q" ? s.q : s.p)[i] = v[i];
            } else if (k == "t") {
                s.t = it.value().get<double>();
            } else {
                auto var = parse_phase_var(c, k);
                (var.momentum ? s.p : s.q)[var.index] = it.value().get<double>();
            }
        }
        out.push_back(s);
    }
    return out;
}

}  // namespace platonic
