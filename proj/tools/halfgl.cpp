// halfgl: experiment runner for the fractional Ginzburg-Landau laboratory.
//
//   halfgl run <config> [--out DIR]
//   halfgl plots <dir>
//   halfgl list-experiments
//
// Exit codes: 0 all checks pass, 1 a check failed, 2 bad config or input,
// 3 numerical failure.

#include <fftw3.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "experiments.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace halfgl;
using namespace halfgl::cli;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

/// key = value lines, optional [section] headers, '#' comments. Values that
/// parse as JSON (numbers, booleans, arrays, quoted strings) keep that type;
/// anything else is a bare string.
json parse_key_value(const std::string& text) {
    json root = json::object();
    std::string section;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        const std::string raw = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        if (!section.empty()) key = section + "." + key;
        json value = json::parse(raw, nullptr, false);
        if (value.is_discarded()) value = raw;
        std::string ptr = "/";
        for (char c : key) ptr += c == '.' ? '/' : c;
        root[json::json_pointer(ptr)] = value;
    }
    return root;
}

json load_config(const std::string& path) {
    if (!fs::is_regular_file(path)) throw ConfigError("config file not found: " + path);
    const std::string text = io::read_text(path);
    if (fs::path(path).extension() == ".json") {
        try {
            return json::parse(text);
        } catch (const json::parse_error& e) {
            throw ConfigError(std::string("invalid JSON in ") + path + ": " + e.what());
        }
    }
    return parse_key_value(text);
}

json manifest(const Config& cfg, const std::string& experiment, const Run* run, const std::string& status,
              const std::string& error = "") {
    json m;
    m["experiment"] = experiment;
    m["status"] = status;
    m["config"] = cfg.resolved();
    m["input"] = cfg.raw();
    m["versions"] = {{"halfgl", kVersion}, {"fftw", std::string(fftw_version)}, {"compiler", __VERSION__}};
    const json& r = cfg.resolved();
    m["seed"] = r.contains("solver") && r.at("solver").contains("seed") ? r.at("solver").at("seed") : json(0);
    if (run) {
        m["files"] = run->files();
        json checks = json::array();
        for (const auto& c : run->checks()) checks.push_back({{"line", c.line}, {"pass", c.pass}});
        m["checks"] = checks;
    }
    if (!error.empty()) m["error"] = error;
    return m;
}

void write_manifest(const fs::path& out, const json& m) { io::write_text((out / "manifest.json").string(), m.dump(2) + "\n"); }

int run_command(const std::string& config_path, const std::string& out_override) {
    json raw;
    try {
        raw = load_config(config_path);
    } catch (const std::exception& e) {
        std::cerr << "halfgl: " << e.what() << "\n";
        return 2;
    }
    Config cfg(raw);
    std::string name;
    try {
        name = cfg.get<std::string>("experiment", "");
    } catch (const std::exception& e) {
        std::cerr << "halfgl: " << e.what() << "\n";
        return 2;
    }
    const auto& list = experiments();
    const auto it = std::find_if(list.begin(), list.end(), [&](const Experiment& e) { return name == e.name; });
    if (it == list.end()) {
        std::cerr << "halfgl: unknown experiment '" << name << "' (see list-experiments)\n";
        return 2;
    }
    fs::path out = out_override.empty() ? fs::path(cfg.get<std::string>("output", "halfgl_out/" + name)) : fs::path(out_override);
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) {
        std::cerr << "halfgl: cannot create output directory " << out << ": " << ec.message() << "\n";
        return 2;
    }

    Run run(cfg, out);
    write_manifest(out, manifest(cfg, name, nullptr, "incomplete"));
    int code = 0;
    std::string error;
    try {
        it->fn(run);
    } catch (const ConfigError& e) {
        error = e.what();
        code = 2;
    } catch (const InvalidArgument& e) {
        error = e.what();
        code = 2;
    } catch (const nlohmann::json::exception& e) {
        error = e.what();
        code = 2;
    } catch (const NumericalError& e) {
        error = e.what();
        code = 3;
    } catch (const std::exception& e) {
        error = e.what();
        code = 3;
    }

    std::string summary;
    bool all = true;
    for (const auto& c : run.checks()) {
        summary += c.line + "\n";
        all = all && c.pass;
    }
    if (code != 0) summary += "error: " + error + "\n";
    io::write_text((out / "summary.txt").string(), summary);
    std::cout << summary;
    if (code != 0) {
        std::cerr << "halfgl: " << error << "\n";
        write_manifest(out, manifest(cfg, name, &run, "incomplete", error));
        return code;
    }
    write_manifest(out, manifest(cfg, name, &run, "complete"));
    return all ? 0 : 1;
}

/// One plotting script per CSV family; members of a family are overlaid.
std::string plot_script(const std::string& family, const std::vector<std::string>& csvs, const std::string& header) {
    std::vector<std::string> cols;
    std::stringstream ss(header);
    for (std::string c; std::getline(ss, c, ',');) cols.push_back(trim(c));
    std::string x = cols.empty() ? "" : cols.front();
    std::vector<std::string> ys(cols.begin() + (cols.empty() ? 0 : 1), cols.end());
    bool log = false;
    if (family == "sweep") {
        ys = {"potential_L1_K"};
        log = true;
    } else if (family == "monotonicity") {
        ys = {"value"};
    } else if (family == "trace") {
        ys = {"total"};
    }
    std::string files;
    for (const auto& f : csvs) files += (files.empty() ? "\"" : ", \"") + f + "\"";
    std::string s;
    s += "# Plot the " + family + " CSVs (generated by halfgl plots; run with python3).\n";
    s += "import csv\nimport os\nimport matplotlib\nmatplotlib.use(\"Agg\")\nimport matplotlib.pyplot as plt\n\n";
    s += "here = os.path.dirname(os.path.abspath(__file__))\n";
    s += "fig, ax = plt.subplots()\n";
    s += "for name in [" + files + "]:\n";
    s += "    with open(os.path.join(here, name)) as f:\n        rows = list(csv.DictReader(f))\n";
    s += "    x = [float(r[\"" + x + "\"]) for r in rows]\n";
    for (const auto& y : ys) {
        const std::string label = csvs.size() > 1 ? "name[:-4] + \" " + y + "\"" : "\"" + y + "\"";
        s += "    ax.plot(x, [float(r[\"" + y + "\"]) for r in rows], marker=\".\", label=" + label + ")\n";
    }
    if (log) s += "ax.set_xscale(\"log\")\nax.set_yscale(\"log\")\n";
    s += "ax.set_xlabel(\"" + x + "\")\nax.legend()\n";
    s += "fig.savefig(os.path.join(here, \"" + family + ".png\"), dpi=150)\n";
    return s;
}

int plots_command(const std::string& dir) {
    if (!fs::is_directory(dir)) {
        std::cerr << "halfgl: not a directory: " << dir << "\n";
        return 2;
    }
    std::vector<fs::path> csvs;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".csv") csvs.push_back(e.path());
    std::sort(csvs.begin(), csvs.end());
    if (csvs.empty()) {
        std::cerr << "halfgl: no result CSVs in " << dir << "\n";
        return 2;
    }
    // v_0.csv, v_1.csv, ... share one family
    std::map<std::string, std::vector<std::string>> families;
    for (const auto& p : csvs) {
        std::string stem = p.stem().string();
        const auto us = stem.find_last_of('_');
        if (us != std::string::npos && us + 1 < stem.size() &&
            std::all_of(stem.begin() + static_cast<long>(us) + 1, stem.end(), ::isdigit))
            stem = stem.substr(0, us);
        families[stem].push_back(p.filename().string());
    }
    for (const auto& [family, files] : families) {
        std::string header;
        {
            std::ifstream in(fs::path(dir) / files.front());
            std::getline(in, header);
        }
        const fs::path script = fs::path(dir) / ("plot_" + family + ".py");
        io::write_text(script.string(), plot_script(family, files, header));
        std::cout << script.string() << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"halfgl: fractional Ginzburg-Landau experiments"};
    app.require_subcommand(1);
    std::string config, out, dir;
    auto* run = app.add_subcommand("run", "run the experiment described by a config file");
    run->add_option("config", config, "config file (.json, otherwise key = value)")->required();
    run->add_option("--out", out, "output directory (overrides the config)");
    auto* plots = app.add_subcommand("plots", "write plotting scripts for the CSVs in a result directory");
    plots->add_option("dir", dir, "result directory")->required();
    app.add_subcommand("list-experiments", "list experiment names");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    if (*run) return run_command(config, out);
    if (*plots) return plots_command(dir);
    for (const auto& e : experiments()) std::cout << e.name << "\t" << e.summary << "\n";
    return 0;
}
