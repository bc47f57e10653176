#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "platonic/diagnostics.hpp"
#include "platonic/polyhedral.hpp"
#include "platonic/potentials.hpp"
#include "platonic/sections.hpp"

namespace platonic::io {

using json = nlohmann::ordered_json;

inline constexpr const char* catalog_version = "1";

/// Round-trip formatting; the same double always prints the same way.
inline std::string num(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

/// t, q..., p..., H, rel_drift with the chart's coordinate names.
inline void write_orbit_csv(std::ostream& os, const OrbitTrace& tr) {
    const Chart c = tr.system.chart;
    const int d = chart_dim(c);
    os << "t";
    for (int i = 0; i < d; ++i) os << ',' << coordinate_name(c, i);
    for (int i = 0; i < d; ++i) os << ",p_" << coordinate_name(c, i);
    os << ",H,rel_drift\n";
    for (std::size_t k = 0; k < tr.states.size(); ++k) {
        const auto& s = tr.states[k];
        os << num(s.t);
        for (int i = 0; i < d; ++i) os << ',' << num(s.q[i]);
        for (int i = 0; i < d; ++i) os << ',' << num(s.p[i]);
        os << ',' << num(tr.energy[k]) << ',' << num(tr.rel_drift[k]) << '\n';
    }
}

inline void write_section_csv(std::ostream& os, const std::vector<MergedPoint>& pts) {
    os << "ic_id,t_cross,rec1,rec2,energy\n";
    for (const auto& p : pts)
        os << p.ic_id << ',' << num(p.t_cross) << ',' << num(p.rec1) << ',' << num(p.rec2) << ',' << num(p.energy)
           << '\n';
}

// ---- svg ----

struct ScatterSeries {
    std::string label;
    std::vector<Point2> points;
};

struct ScatterPlot {
    std::string title;
    std::string xlabel;
    std::string ylabel;
    std::vector<ScatterSeries> series;
    int width = 640;
    int height = 520;
};

/// Fixed palette first, then evenly spread hues.
inline std::string series_color(std::size_t i) {
    static const char* base[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                 "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f"};
    if (i < std::size(base)) return base[i];
    double h = std::fmod(i * 137.508, 360.0);
    char buf[48];
    std::snprintf(buf, sizeof buf, "hsl(%.0f,70%%,45%%)", h);
    return buf;
}

inline std::string xml_escape(const std::string& s) {
    std::string o;
    for (char c : s) {
        switch (c) {
            case '&': o += "&amp;"; break;
            case '<': o += "&lt;"; break;
            case '>': o += "&gt;"; break;
            case '"': o += "&quot;"; break;
            default: o += c;
        }
    }
    return o;
}

/// Tick positions at 1, 2, 5 times a power of ten.
inline std::vector<double> nice_ticks(double lo, double hi, int target = 6) {
    if (!(hi > lo)) return {lo};
    double raw = (hi - lo) / target;
    double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0})
        if (m * mag >= raw) {
            step = m * mag;
            break;
        }
    std::vector<double> t;
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * step; v += step) t.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
    return t;
}

inline std::string render_svg(const ScatterPlot& plot) {
    const double W = plot.width, H = plot.height;
    const double ml = 70, mr = 150, mt = 40, mb = 55;
    const double pw = W - ml - mr, ph = H - mt - mb;

    double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
    for (const auto& s : plot.series)
        for (const auto& p : s.points) {
            x0 = std::min(x0, p.x);
            x1 = std::max(x1, p.x);
            y0 = std::min(y0, p.y);
            y1 = std::max(y1, p.y);
        }
    if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    auto pad = [](double& a, double& b) {
        double w = b - a;
        if (w <= 0) w = std::max(1.0, std::abs(a));
        a -= 0.05 * w;
        b += 0.05 * w;
    };
    pad(x0, x1);
    pad(y0, y1);
    auto sx = [&](double x) { return ml + (x - x0) / (x1 - x0) * pw; };
    auto sy = [&](double y) { return mt + ph - (y - y0) / (y1 - y0) * ph; };

    std::ostringstream o;
    char buf[160];
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << plot.width << "\" height=\"" << plot.height
      << "\" viewBox=\"0 0 " << plot.width << ' ' << plot.height << "\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << ml + pw / 2 << "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
      << xml_escape(plot.title) << "</text>\n";
    std::snprintf(buf, sizeof buf, "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" fill=\"none\" stroke=\"black\"/>\n",
                  ml, mt, pw, ph);
    o << buf;
    o << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
    for (double t : nice_ticks(x0, x1)) {
        std::snprintf(buf, sizeof buf, "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"black\"/>", sx(t),
                      mt + ph, sx(t), mt + ph + 5);
        o << buf;
        std::snprintf(buf, sizeof buf, "<text x=\"%.2f\" y=\"%.2f\" text-anchor=\"middle\">%g</text>\n", sx(t),
                      mt + ph + 18, t);
        o << buf;
    }
    for (double t : nice_ticks(y0, y1)) {
        std::snprintf(buf, sizeof buf, "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"black\"/>", ml - 5,
                      sy(t), ml, sy(t));
        o << buf;
        std::snprintf(buf, sizeof buf, "<text x=\"%.2f\" y=\"%.2f\" text-anchor=\"end\">%g</text>\n", ml - 8,
                      sy(t) + 4, t);
        o << buf;
    }
    o << "</g>\n";
    std::snprintf(buf, sizeof buf, "<text x=\"%.2f\" y=\"%.2f\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">",
                  ml + pw / 2, H - 12);
    o << buf << xml_escape(plot.xlabel) << "</text>\n";
    std::snprintf(buf, sizeof buf,
                  "<text transform=\"translate(18,%.2f) rotate(-90)\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">",
                  mt + ph / 2);
    o << buf << xml_escape(plot.ylabel) << "</text>\n";

    for (std::size_t i = 0; i < plot.series.size(); ++i) {
        const auto& s = plot.series[i];
        o << "<g fill=\"" << series_color(i) << "\">\n";
        for (const auto& p : s.points) {
            std::snprintf(buf, sizeof buf, "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"1.4\"/>\n", sx(p.x), sy(p.y));
            o << buf;
        }
        o << "</g>\n";
    }
    // legend
    o << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
    const std::size_t shown = std::min<std::size_t>(plot.series.size(), 24);
    for (std::size_t i = 0; i < shown; ++i) {
        double ly = mt + 10 + 16 * i;
        std::snprintf(buf, sizeof buf, "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"4\" fill=\"%s\"/>", ml + pw + 16, ly,
                      series_color(i).c_str());
        o << buf;
        std::snprintf(buf, sizeof buf, "<text x=\"%.2f\" y=\"%.2f\">", ml + pw + 26, ly + 4);
        o << buf << xml_escape(plot.series[i].label) << " (" << plot.series[i].points.size() << ")</text>\n";
    }
    if (shown < plot.series.size()) {
        std::snprintf(buf, sizeof buf, "<text x=\"%.2f\" y=\"%.2f\">+%zu more</text>\n", ml + pw + 16,
                      mt + 14 + 16 * shown, plot.series.size() - shown);
        o << buf;
    }
    o << "</g>\n</svg>\n";
    return o.str();
}

/// One series per initial condition, labelled by ic id.
inline ScatterPlot section_plot(const std::vector<SectionPointSet>& sets, const std::string& title) {
    ScatterPlot p;
    p.title = title;
    for (const auto& s : sets) {
        ScatterSeries ser;
        ser.label = "ic " + std::to_string(s.ic_id);
        ser.points = recorded_points(s);
        p.series.push_back(std::move(ser));
    }
    return p;
}

// ---- json ----

inline json catalog_json() {
    json out;
    out["catalog_version"] = catalog_version;
    json pots = json::array();
    for (const auto& s : catalog()) {
        json e;
        e["name"] = s.name;
        e["chart"] = std::string(chart_name(s.chart));
        json par = json::object();
        for (const auto& [k, v] : s.parameters) par[k] = v;
        e["parameters"] = par;
        e["symmetry"] = s.symmetry ? json(*s.symmetry) : json(nullptr);
        e["generator"] = s.generator ? json(std::string(polynomial_name(*s.generator))) : json(nullptr);
        e["singular_set"] = s.singular_set;
        e["axisymmetric"] = s.axisymmetric;
        e["separable"] = s.separable_profile ? json(s.separable_profile->description) : json(nullptr);
        e["full_hamiltonian"] = s.full_hamiltonian;
        pots.push_back(e);
    }
    out["potentials"] = pots;
    json groups = json::array();
    for (const char* g : {"T12", "O24", "I60"}) {
        auto grp = symmetry_group(g);
        groups.push_back({{"name", g}, {"order", grp.order}, {"elements", grp.elements.size()}});
    }
    out["groups"] = groups;
    return out;
}

// ---- run directory and manifest ----

struct RunManifest {
    std::string command;
    json config = json::object();
    std::uint64_t seed = 0;
    std::map<std::string, double> max_drift;  ///< per orbit label
    std::vector<std::string> aborts;          ///< "label: reason"
    std::vector<std::string> files;
    double wall_time = 0;
    int exit_code = 0;

    json to_json() const {
        json j;
        j["command"] = command;
        j["config"] = config;
        j["seed"] = seed;
        j["catalog_version"] = catalog_version;
        json d = json::object();
        for (const auto& [k, v] : max_drift) d[k] = v;
        j["max_drift"] = d;
        j["aborts"] = aborts;
        j["aborted"] = !aborts.empty();
        j["files"] = files;
        j["wall_time_seconds"] = wall_time;
        j["exit_code"] = exit_code;
        return j;
    }
};

/// Output directory that records every file it writes into the manifest.
class RunDir {
public:
    RunDir(std::filesystem::path root, std::string command) : root_(std::move(root)) {
        manifest.command = std::move(command);
        std::filesystem::create_directories(root_);
    }

    void write(const std::string& name, const std::string& content) {
        std::ofstream f(root_ / name, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + (root_ / name).string());
        f << content;
        if (!f) throw std::runtime_error("write failed: " + (root_ / name).string());
        if (std::find(manifest.files.begin(), manifest.files.end(), name) == manifest.files.end())
            manifest.files.push_back(name);
    }

    /// Written last; lists itself.
    void finish(int exit_code) {
        manifest.exit_code = exit_code;
        manifest.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        if (std::find(manifest.files.begin(), manifest.files.end(), "manifest.json") == manifest.files.end())
            manifest.files.push_back("manifest.json");
        std::ofstream f(root_ / "manifest.json", std::ios::binary);
        f << manifest.to_json().dump(2) << '\n';
    }

    const std::filesystem::path& root() const { return root_; }

    RunManifest manifest;

private:
    std::filesystem::path root_;
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace platonic::io
