#pragma once

// CSV and JSON serialization. Numbers are written with %.17g, so a value
// round-trips exactly and identical runs give identical bytes.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "halfgl/diagnostics.hpp"
#include "halfgl/domain.hpp"
#include "halfgl/energy.hpp"
#include "halfgl/extension.hpp"
#include "halfgl/halfharmonic.hpp"
#include "halfgl/solver.hpp"

namespace halfgl::io {

using nlohmann::json;

inline std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

/// Writes text with LF endings (binary mode, no newline translation).
inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class Csv {
public:
    explicit Csv(const std::vector<std::string>& header) {
        for (std::size_t i = 0; i < header.size(); ++i) text_ += (i ? "," : "") + header[i];
        text_ += '\n';
    }
    Csv& row(const std::vector<double>& values) {
        for (std::size_t i = 0; i < values.size(); ++i) text_ += (i ? "," : "") + num(values[i]);
        text_ += '\n';
        return *this;
    }
    const std::string& str() const { return text_; }
    void save(const std::string& path) const { write_text(path, text_); }

private:
    std::string text_;
};

inline std::vector<std::string> coord_header(int n) {
    return n == 1 ? std::vector<std::string>{"x"} : std::vector<std::string>{"x", "y"};
}

inline Csv field_csv(const Field& v) {
    const GridSpec& g = v.grid();
    auto header = coord_header(g.n);
    for (int c = 0; c < v.components(); ++c) header.push_back("v" + std::to_string(c + 1));
    Csv csv(header);
    for (std::size_t k = 0; k < g.nodes(); ++k) {
        const Point p = g.point(k);
        std::vector<double> row{p[0]};
        if (g.n == 2) row.push_back(p[1]);
        for (int c = 0; c < v.components(); ++c) row.push_back(v(k, c));
        csv.row(row);
    }
    return csv;
}

inline json grid_manifest(const GridSpec& g, int m, const WindowDomain* omega = nullptr) {
    json j{{"n", g.n}, {"L", g.L}, {"N", g.N}, {"m", m}};
    if (omega) {
        j["shape"] = to_string(omega->shape());
        j["a"] = omega->half_width();
    }
    return j;
}

inline Csv extension_csv(const ExtensionField& u) {
    const GridSpec& g = u.base();
    auto header = coord_header(g.n);
    header.push_back("t");
    for (int c = 0; c < u.components(); ++c) header.push_back("u" + std::to_string(c + 1));
    Csv csv(header);
    for (std::size_t j = 0; j < u.hgrid().layers(); ++j) {
        for (std::size_t k = 0; k < g.nodes(); ++k) {
            const Point p = g.point(k);
            std::vector<double> row{p[0]};
            if (g.n == 2) row.push_back(p[1]);
            row.push_back(u.hgrid().height(j));
            for (int c = 0; c < u.components(); ++c) row.push_back(u(j, k, c));
            csv.row(row);
        }
    }
    return csv;
}

inline json slab_manifest(const HalfSpaceGrid& hg) {
    return json{{"T", hg.top()}, {"M", hg.layers() - 1}, {"grading", hg.grading()}};
}

inline Csv energy_csv(const std::vector<EnergyReport>& reports) {
    Csv csv({"epsilon", "dirichlet_half", "potential", "total"});
    for (const auto& r : reports) csv.row({r.epsilon, r.dirichlet_half, r.potential, r.total});
    return csv;
}

inline Csv trace_csv(const SolveResult& r) {
    Csv csv({"iter", "total", "residual"});
    for (std::size_t i = 0; i < r.energy_trace.size(); ++i) {
        const double res = i < r.residual_trace.size() ? r.residual_trace[i] : r.final_residual;
        csv.row({static_cast<double>(i), r.energy_trace[i], res});
    }
    return csv;
}

inline Csv sweep_csv(const SweepReport& s) {
    Csv csv({"epsilon", "total", "potential_L1_K", "multiplier_L2_err", "defect_count"});
    for (const auto& e : s.entries)
        csv.row({e.epsilon, e.total, e.potential_l1_k, e.multiplier_l2_err, static_cast<double>(s.defects.points.size())});
    return csv;
}

inline Csv monotonicity_csv(const MonotonicityTrace& t) {
    Csv csv({"r", "value"});
    for (std::size_t i = 0; i < t.radii.size(); ++i) csv.row({t.radii[i], t.values[i]});
    return csv;
}

inline json to_json(const BlaschkeParams& p) {
    return json{{"d", p.d}, {"theta", p.theta}, {"lambda", p.lambda}, {"a", p.a}, {"conjugate", p.conjugate}};
}

inline BlaschkeParams blaschke_from_json(const json& j) {
    BlaschkeParams p = BlaschkeParams::canonical(j.value("d", 1));
    p.theta = j.value("theta", p.theta);
    if (j.contains("lambda")) p.lambda = j.at("lambda").get<std::vector<double>>();
    if (j.contains("a")) p.a = j.at("a").get<std::vector<double>>();
    p.conjugate = j.value("conjugate", p.conjugate);
    p.validate();
    return p;
}

}  // namespace halfgl::io
