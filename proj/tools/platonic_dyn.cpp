// Batch front end: catalog, orbit, section, sweep, validate, jacobi.
#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "platonic/io.hpp"
#include "platonic/sweep.hpp"
#include "platonic/validation.hpp"

using namespace platonic;
using json = io::json;

namespace {

enum Exit { ok = 0, validation_failed = 2, numerical_abort = 3, usage = 4 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Flags {
    std::string potential = "V_T";
    std::vector<std::string> params;
    bool negate = false;
    std::string level;
    double harmonic_k = 0;
    std::string ic_file;
    double tmax = 50;
    double tmin = NAN;
    double step = 0.002;
    bool adaptive = false;
    double tol = 1e-10;
    double drift_abort = 1e-5;
    std::string trigger;
    double trigger_value = NAN;
    std::string direction = "positive";
    std::string record;
    int n_ic = 4;
    std::uint64_t seed = 42;
    double energy = NAN;
    double energy_factor = 1.3;
    double curve_max = 1.3, scatter_min = 1.6;
    int min_points = 100;
    std::string out_dir = "out";
    std::string config;
};

const char* ic_names[] = {"theta", "psi", "rho", "u", "r", "x", "y", "z"};

void add_common(CLI::App* s, Flags& f, std::map<std::string, CLI::Option*>& ic_opts) {
    s->add_option("--potential", f.potential, "catalog name (see catalog)");
    s->add_option("--params", f.params, "potential parameters k=v")->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    s->add_flag("--negate", f.negate, "use -V");
    s->add_option("--level", f.level, "sphere | plane | euclid3 | euclid4");
    s->add_option("--harmonic-k", f.harmonic_k, "k of the (k/2) rho^2 term on lifted levels");
    for (auto n : ic_names) {
        static std::map<std::string, double> sink;
        std::string q = n;
        ic_opts[q] = s->add_option("--" + q + "0", sink[q], "initial " + q);
        ic_opts["p_" + q] = s->add_option("--p" + q + "0", sink["p_" + q], "initial p_" + q);
    }
    s->add_option("--ic-file", f.ic_file, "JSON array of initial conditions");
    s->add_option("--tmax", f.tmax, "end of the time window");
    s->add_option("--tmin", f.tmin, "start of the time window (default -tmax)");
    s->add_option("--step", f.step, "rk4 step");
    s->add_flag("--adaptive", f.adaptive, "embedded 5(4) adaptive integrator");
    s->add_option("--tol", f.tol, "adaptive tolerance (relative and absolute)");
    s->add_option("--drift-abort", f.drift_abort, "abort when |H - H0| / |H0| exceeds this");
    s->add_option("--energy", f.energy, "energy level");
    s->add_option("--out-dir", f.out_dir, "output directory");
    s->add_option("--config", f.config, "key=value file mirroring the flags");
}

void add_section_flags(CLI::App* s, Flags& f) {
    s->add_option("--section-trigger", f.trigger, "phase variable pinned by the section");
    s->add_option("--section-value", f.trigger_value, "section value (default: the start's value)");
    s->add_option("--direction", f.direction, "positive | negative | both");
    s->add_option("--record", f.record, "recorded pair, e.g. theta,p_theta");
}

double read_or_nan(CLI::Option* o) { return o->count() ? o->as<double>() : NAN; }

std::map<std::string, double> parse_params(const std::vector<std::string>& kv) {
    std::map<std::string, double> out;
    for (const auto& s : kv) {
        auto eq = s.find('=');
        if (eq == std::string::npos) throw UsageError("--params expects k=v, got '" + s + "'");
        try {
            std::size_t used = 0;
            double v = std::stod(s.substr(eq + 1), &used);
            if (used != s.size() - eq - 1) throw std::invalid_argument("");
            out[s.substr(0, eq)] = v;
        } catch (const std::logic_error&) {
            throw UsageError("bad parameter value in '" + s + "'");
        }
    }
    return out;
}

std::vector<double> parse_tuple(const std::string& s, std::size_t n) {
    std::vector<double> v;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            std::size_t used = 0;
            v.push_back(std::stod(tok, &used));
            if (used != tok.size()) throw std::invalid_argument("");
        } catch (const std::logic_error&) {
            throw UsageError("bad number '" + tok + "'");
        }
    }
    if (v.size() != n) throw UsageError("expected " + std::to_string(n) + " comma-separated numbers");
    return v;
}

std::pair<std::string, std::string> parse_record(const std::string& s, Chart c) {
    if (s.empty()) {
        if (c == Chart::sphere) return {"theta", "p_theta"};
        return {std::string(coordinate_name(c, 0)), "p_" + std::string(coordinate_name(c, 0))};
    }
    auto comma = s.find(',');
    if (comma == std::string::npos) throw UsageError("--record expects two names separated by a comma");
    return {s.substr(0, comma), s.substr(comma + 1)};
}

PotentialSpec build_potential(const Flags& f) {
    auto V = make_potential(f.potential, parse_params(f.params));
    return f.negate ? negate(V) : V;
}

HamiltonianSystem build_system(const Flags& f, const PotentialSpec& V) {
    Level l = f.level.empty() ? natural_level(V.chart) : parse_level(f.level);
    return make_system(V, l, f.harmonic_k);
}

IntegratorConfig build_integrator(const Flags& f) {
    IntegratorConfig c;
    c.method = f.adaptive ? Method::adaptive_embedded : Method::rk4_fixed;
    c.step = f.step;
    c.tol = {f.tol, f.tol};
    c.t_end = f.tmax;
    c.t_start = std::isnan(f.tmin) ? -f.tmax : f.tmin;
    c.drift_abort = f.drift_abort;
    if (!(c.t_end > *c.t_start)) throw UsageError("empty time window");
    return c;
}

/// Scales the momenta so that H takes the requested value.
PhaseState match_energy(const HamiltonianSystem& sys, PhaseState s, double E) {
    PhaseState z = s;
    z.p = {};
    auto h0 = hamiltonian_value(sys, z), h = hamiltonian_value(sys, s);
    if (!h0 || !h) throw UsageError("singular initial condition");
    double kin = *h - *h0;
    if (E < *h0) throw UsageError("energy " + io::num(E) + " is below the potential " + io::num(*h0) + " at the start");
    if (kin <= 0) throw UsageError("--energy needs a nonzero momentum direction");
    double a = std::sqrt((E - *h0) / kin);
    for (auto& p : s.p) p *= a;
    return s;
}

std::vector<PhaseState> initial_conditions(const Flags& f, const HamiltonianSystem& sys,
                                           const std::map<std::string, CLI::Option*>& ic_opts) {
    std::vector<PhaseState> out;
    bool inline_given = std::any_of(ic_opts.begin(), ic_opts.end(), [](auto& kv) { return kv.second->count() > 0; });
    if (!f.ic_file.empty()) {
        if (inline_given) throw UsageError("give either --ic-file or inline initial conditions, not both");
        std::ifstream in(f.ic_file);
        if (!in) throw UsageError("cannot read " + f.ic_file);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const std::exception& e) {
            throw UsageError(f.ic_file + ": " + e.what());
        }
        out = parse_initial_conditions(j, sys.chart);
    } else {
        PhaseState s;
        s.chart = sys.chart;
        for (const auto& [name, opt] : ic_opts) {
            if (!opt->count()) continue;
            auto var = parse_phase_var(sys.chart, name);
            (var.momentum ? s.p : s.q)[var.index] = read_or_nan(opt);
        }
        if (!inline_given) throw UsageError("no initial condition: use --theta0/--psi0/... or --ic-file");
        out.push_back(s);
    }
    if (out.empty()) throw UsageError("no initial conditions");
    for (auto& s : out) {
        if (!std::isnan(f.energy)) s = match_energy(sys, s, f.energy);
        if (check_state(sys, s) != Fault::none)
            throw UsageError("singular initial condition (" + std::string(fault_name(check_state(sys, s))) + ")");
    }
    return out;
}

json effective_config(const CLI::App* s) {
    json j = json::object();
    for (const CLI::Option* o : s->get_options()) {
        if (o->get_lnames().empty()) continue;
        const std::string& n = o->get_lnames().front();
        if (n == "help") continue;
        if (o->count()) {
            auto r = o->results();
            j[n] = r.size() == 1 ? json(r.front()) : json(r);
        } else if (!o->get_default_str().empty()) {
            j[n] = o->get_default_str();
        }
    }
    return j;
}

unsigned thread_cap() {
    if (const char* e = std::getenv("PLATONIC_DYN_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(e, &end, 10);
        if (end == e || *end || v < 1) throw UsageError("PLATONIC_DYN_THREADS must be a positive integer");
        return unsigned(v);
    }
    return 0;
}

std::string render_csv(const std::vector<MergedPoint>& pts) {
    std::ostringstream o;
    io::write_section_csv(o, pts);
    return o.str();
}

// ---- commands ----

int cmd_catalog(const Flags& f, bool as_json, bool write) {
    auto j = io::catalog_json();
    if (as_json) {
        std::cout << j.dump(2) << '\n';
    } else {
        for (const auto& p : j["potentials"]) {
            std::cout << p["name"].get<std::string>() << "  chart=" << p["chart"].get<std::string>();
            if (!p["symmetry"].is_null()) std::cout << "  symmetry=" << p["symmetry"].get<std::string>();
            if (!p["parameters"].empty()) std::cout << "  parameters=" << p["parameters"].dump();
            std::cout << "\n    singular set: " << p["singular_set"].get<std::string>() << '\n';
        }
        for (const auto& g : j["groups"])
            std::cout << "group " << g["name"].get<std::string>() << " order " << g["order"].get<int>() << '\n';
    }
    if (write) {
        io::RunDir dir(f.out_dir, "catalog");
        dir.write("catalog.json", j.dump(2) + "\n");
        dir.finish(ok);
    }
    return ok;
}

int cmd_orbit(const Flags& f, const CLI::App* sub, const std::map<std::string, CLI::Option*>& ic_opts) {
    auto V = build_potential(f);
    auto sys = build_system(f, V);
    auto cfg = build_integrator(f);
    auto ics = initial_conditions(f, sys, ic_opts);
    io::RunDir dir(f.out_dir, "orbit");
    dir.manifest.config = effective_config(sub);
    dir.manifest.seed = f.seed;
    int code = ok;
    try {
        for (std::size_t i = 0; i < ics.size(); ++i) {
            auto tr = integrate(sys, ics[i], cfg);
            std::string label = ics.size() == 1 ? "orbit" : "orbit_" + std::to_string(i);
            std::ostringstream o;
            io::write_orbit_csv(o, tr);
            dir.write(label + ".csv", o.str());
            dir.manifest.max_drift[label] = tr.max_drift;
            std::cout << label << ": " << tr.size() << " samples, t in [" << io::num(tr.states.front().t) << ", "
                      << io::num(tr.states.back().t) << "], max drift " << io::num(tr.max_drift) << ", "
                      << termination_name(tr.status) << '\n';
            if (!tr.ok()) {
                dir.manifest.aborts.push_back(label + ": " + std::string(termination_name(tr.status)) + " at t=" +
                                              io::num(tr.states.back().t));
                code = numerical_abort;
            }
        }
    } catch (...) {
        dir.finish(numerical_abort);
        throw;
    }
    dir.finish(code);
    return code;
}

SectionSpec section_from_flags(const Flags& f, Chart c, const PhaseState& first) {
    auto [r1, r2] = parse_record(f.record, c);
    std::string trig = f.trigger.empty() ? (psi_index(c) >= 0 ? "psi" : std::string(coordinate_name(c, 0))) : f.trigger;
    double value = f.trigger_value;
    if (std::isnan(value)) {
        auto v = parse_phase_var(c, trig);
        value = v.momentum ? 0.0 : v(first);
    }
    return make_section_spec(c, trig, value, parse_direction(f.direction), r1, r2);
}

int cmd_section(const Flags& f, const CLI::App* sub, const std::map<std::string, CLI::Option*>& ic_opts) {
    auto V = build_potential(f);
    auto sys = build_system(f, V);
    auto cfg = build_integrator(f);
    auto ics = initial_conditions(f, sys, ic_opts);
    auto spec = section_from_flags(f, sys.chart, ics.front());
    io::RunDir dir(f.out_dir, "section");
    dir.manifest.config = effective_config(sub);
    dir.manifest.seed = f.seed;
    std::vector<SectionPointSet> sets(ics.size());
    parallel_for(int(ics.size()), thread_cap(), [&](int i) { sets[i] = compute_section(sys, ics[i], cfg, spec, i); });
    int code = ok;
    for (const auto& s : sets) {
        std::string label = "ic_" + std::to_string(s.ic_id);
        dir.manifest.max_drift[label] = s.max_drift;
        auto v = classify_section(s);
        std::cout << label << ": " << s.size() << " points, dimension " << io::num(v.dimension) << ", "
                  << label_name(v.label) << ", " << termination_name(s.status) << '\n';
        if (s.status != Termination::completed) {
            dir.manifest.aborts.push_back(label + ": " + std::string(termination_name(s.status)));
            code = numerical_abort;
        }
    }
    dir.write("section.csv", render_csv(merge_sections(sets)));
    auto plot = io::section_plot(sets, V.name + " section " + phase_var_name(sys.chart, spec.trigger) + " = " +
                                           io::num(spec.value));
    plot.xlabel = phase_var_name(sys.chart, spec.rec1);
    plot.ylabel = phase_var_name(sys.chart, spec.rec2);
    dir.write("section.svg", io::render_svg(plot));
    dir.finish(code);
    return code;
}

int cmd_sweep(const Flags& f, const CLI::App* sub, const std::map<std::string, CLI::Option*>& ic_opts) {
    SweepConfig sc;
    sc.potential = build_potential(f);
    const Chart c = sc.potential.chart;
    if (is_planar_chart(c) || c == Chart::sphere) {
        sc.region_seed = default_region_seed(sc.potential);
    } else {
        throw UsageError("sweeps run on sphere and plane potentials only");
    }
    for (int i = 0; i < chart_dim(c); ++i) {
        auto it = ic_opts.find(std::string(coordinate_name(c, i)));
        if (it != ic_opts.end() && it->second->count()) sc.region_seed[i] = read_or_nan(it->second);
    }
    if (!f.ic_file.empty()) throw UsageError("sweep samples its initial conditions; use section for --ic-file");
    if (!std::isnan(f.energy)) sc.energy = f.energy;
    sc.energy_factor = f.energy_factor;
    sc.n_ic = f.n_ic;
    sc.seed = f.seed;
    sc.integrator = build_integrator(f);
    auto [r1, r2] = parse_record(f.record, c);
    sc.trigger = f.trigger.empty() ? "psi" : f.trigger;
    if (!std::isnan(f.trigger_value)) sc.trigger_value = f.trigger_value;
    sc.direction = parse_direction(f.direction);
    sc.rec1 = r1;
    sc.rec2 = r2;
    sc.classifier.curve_max = f.curve_max;
    sc.classifier.scatter_min = f.scatter_min;
    sc.classifier.min_points = f.min_points;
    sc.threads = thread_cap();

    io::RunDir dir(f.out_dir, "sweep");
    dir.manifest.config = effective_config(sub);
    dir.manifest.seed = f.seed;
    SweepResult r;
    try {
        r = run_sweep(sc);
    } catch (const std::invalid_argument& e) {
        dir.manifest.aborts.push_back(std::string("setup: ") + e.what());
        dir.finish(usage);
        throw UsageError(e.what());
    }
    int code = ok;
    for (const auto& e : r.entries) {
        std::string label = "ic_" + std::to_string(e.ic_id);
        dir.write("section_" + label + ".csv", render_csv(merge_sections({e.set})));
        dir.manifest.max_drift[label] = e.set.max_drift;
        std::cout << label << ": " << e.verdict.points << " points, dimension " << io::num(e.verdict.dimension)
                  << ", " << label_name(e.verdict.label) << ", max drift " << io::num(e.set.max_drift) << '\n';
        if (e.set.status != Termination::completed) {
            dir.manifest.aborts.push_back(label + ": " + std::string(termination_name(e.set.status)));
            code = numerical_abort;
        }
    }
    std::cout << "energy " << io::num(r.energy) << ", fraction curve-like " << io::num(r.fraction_curve_like())
              << ", scattered " << r.count(SectionLabel::scattered) << '\n';
    auto verdict = verdict_json(r, f.seed);
    verdict["classifier"] = {{"curve_max", sc.classifier.curve_max},
                             {"scatter_min", sc.classifier.scatter_min},
                             {"min_points", sc.classifier.min_points}};
    dir.write("verdict.json", verdict.dump(2) + "\n");
    auto plot = io::section_plot(r.sets(), r.potential + " sweep, E = " + io::num(r.energy));
    plot.xlabel = phase_var_name(c, r.spec.rec1);
    plot.ylabel = phase_var_name(c, r.spec.rec2);
    dir.write("sweep.svg", io::render_svg(plot));
    dir.finish(code);
    return code;
}

int cmd_validate(const Flags& f, bool perturb, int samples, bool write) {
    ValidationOptions o;
    o.perturb_i60 = perturb;
    o.samples = samples;
    auto rep = run_validation(o);
    for (const auto& c : rep.checks)
        std::cout << (c.passed ? "pass " : "FAIL ") << c.group << ": " << c.name << " = " << io::num(c.value)
                  << " (threshold " << io::num(c.threshold) << ")" << (c.detail.empty() ? "" : "  " + c.detail)
                  << '\n';
    std::cout << (rep.ok() ? "all checks passed" : std::to_string(rep.failures()) + " checks failed") << '\n';
    int code = rep.ok() ? ok : validation_failed;
    if (write) {
        io::RunDir dir(f.out_dir, "validate");
        dir.manifest.config = {{"perturb-i60", perturb}, {"samples", samples}};
        dir.write("validation.json", rep.to_json().dump(2) + "\n");
        dir.finish(code);
    }
    return code;
}

int cmd_jacobi(const std::string& fwd, const std::string& inv) {
    if (fwd.empty() == inv.empty()) throw UsageError("jacobi needs exactly one of --forward, --inverse");
    std::array<double, 4> out{};
    if (!fwd.empty()) {
        auto v = parse_tuple(fwd, 4);
        out = jacobi_forward({{v[0], v[1], v[2], v[3]}});
    } else {
        auto v = parse_tuple(inv, 4);
        out = jacobi_inverse({v[0], v[1], v[2], v[3]}).x;
    }
    for (int i = 0; i < 4; ++i) {
        double x = std::abs(out[i]) < 1e-15 ? 0.0 : out[i];
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.15g", x);
        std::cout << (i ? "," : "") << buf;
    }
    std::cout << '\n';
    return ok;
}

/// Splices key=value lines of a --config file in front of the command-line
/// flags, so explicit flags (parsed later, last one wins) override the file.
std::vector<std::string> expand_config(const std::vector<std::string>& args, CLI::App& app) {
    if (args.empty()) return args;
    CLI::App* sub = nullptr;
    for (auto* s : app.get_subcommands({}))
        if (s->get_name() == args[0]) sub = s;
    if (!sub) return args;
    std::string path;
    for (std::size_t i = 1; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    }
    if (path.empty()) return args;
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read config " + path);
    std::vector<std::string> extra;
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto trim = [](std::string s) {
            auto a = s.find_first_not_of(" \t\r"), b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        line = trim(line.substr(0, line.find('#')));
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']') {
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        if (!section.empty() && section != sub->get_name()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw UsageError(path + ":" + std::to_string(lineno) + ": expected key=value");
        std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
        std::replace(key.begin(), key.end(), '_', '-');
        if (val.size() >= 2 && val.front() == '"' && val.back() == '"') val = val.substr(1, val.size() - 2);
        if (key == "config") continue;
        const CLI::Option* opt = sub->get_option_no_throw("--" + key);
        if (!opt) throw UsageError(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
        if (opt->get_type_size() == 0) {
            if (val == "true" || val == "1") extra.push_back("--" + key);
            else if (val != "false" && val != "0")
                throw UsageError(path + ":" + std::to_string(lineno) + ": flag '" + key + "' takes true or false");
            continue;
        }
        std::stringstream ss(val);
        std::string tok;
        std::vector<std::string> toks;
        while (ss >> tok) toks.push_back(tok);
        if (toks.empty()) continue;
        extra.push_back("--" + key);
        extra.insert(extra.end(), toks.begin(), toks.end());
    }
    std::vector<std::string> out{args[0]};
    out.insert(out.end(), extra.begin(), extra.end());
    out.insert(out.end(), args.begin() + 1, args.end());
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Natural Hamiltonian systems with polyhedral symmetry: orbits, sections, sweeps"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast)->always_capture_default();
    Flags f;
    std::map<std::string, std::map<std::string, CLI::Option*>> ic_opts;

    auto* cat = app.add_subcommand("catalog", "list potentials and groups");
    bool cat_json = false;
    cat->add_flag("--json", cat_json, "print JSON");
    cat->add_option("--out-dir", f.out_dir, "also write catalog.json and a manifest here");

    auto* orbit = app.add_subcommand("orbit", "integrate orbits and write CSV");
    add_common(orbit, f, ic_opts["orbit"]);

    auto* section = app.add_subcommand("section", "sections of given initial conditions, CSV and SVG");
    add_common(section, f, ic_opts["section"]);
    add_section_flags(section, f);

    auto* sweep = app.add_subcommand("sweep", "seeded random-IC sweep with classification");
    add_common(sweep, f, ic_opts["sweep"]);
    add_section_flags(sweep, f);
    sweep->add_option("--n-ic", f.n_ic, "number of initial conditions");
    sweep->add_option("--seed", f.seed, "RNG seed");
    sweep->add_option("--energy-factor", f.energy_factor, "E = factor * region minimum when --energy is absent");
    sweep->add_option("--curve-max", f.curve_max, "dimension at or below which a section is curve-like");
    sweep->add_option("--scatter-min", f.scatter_min, "dimension at or above which a section is scattered");
    sweep->add_option("--min-points", f.min_points, "fewer points are insufficient");

    auto* validate = app.add_subcommand("validate", "run the invariant suite");
    bool perturb = false;
    int samples = 1000;
    validate->add_flag("--perturb-i60", perturb, "perturb a stored I60 matrix by 1e-3");
    validate->add_option("--samples", samples, "random points per check");
    validate->add_option("--out-dir", f.out_dir, "also write validation.json and a manifest here");

    auto* jac = app.add_subcommand("jacobi", "positions <-> Jacobi coordinates of four points on a line");
    std::string fwd, inv;
    jac->add_option("--forward", fwd, "x1,x2,x3,x4");
    jac->add_option("--inverse", inv, "u1,u2,u3,u4");

    try {
        std::vector<std::string> args(argv + 1, argv + argc);
        args = expand_config(args, app);
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return usage;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return usage;
    }

    try {
        if (*cat) return cmd_catalog(f, cat_json, cat->get_option("--out-dir")->count() > 0);
        if (*orbit) return cmd_orbit(f, orbit, ic_opts["orbit"]);
        if (*section) return cmd_section(f, section, ic_opts["section"]);
        if (*sweep) return cmd_sweep(f, sweep, ic_opts["sweep"]);
        if (*validate) return cmd_validate(f, perturb, samples, validate->get_option("--out-dir")->count() > 0);
        if (*jac) return cmd_jacobi(fwd, inv);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return usage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return usage;
    } catch (const std::out_of_range& e) {
        std::cerr << "error: " << e.what() << '\n';
        return usage;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return numerical_abort;
    }
    return usage;
}
