#pragma once

// Command-line surface: configuration, dispatch and report files.
// Reports are a JSON summary plus long-format CSV tables; both are
// byte-identical for a given configuration, whatever the thread count.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "conformal_lab.hpp"
#include "core.hpp"
#include "extension.hpp"
#include "fractal_lab.hpp"
#include "functions.hpp"
#include "gp_lab.hpp"
#include "graphs.hpp"
#include "parallel.hpp"
#include "seminorms.hpp"
#include "spectral.hpp"

namespace tracelab::cli {

inline constexpr int schema_version = 1;

/// Bad command, flag or parameter: exit status 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// --help was given; what() holds the help text.
struct HelpRequest : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline const std::vector<std::string>& commands()
{
    static const std::vector<std::string> c{"norm",      "spectrum",     "extend",    "gp-profile",    "gp-reconstruct",
                                            "gp-local",  "pencil",       "sg-energy", "sg-trace",      "sc-resistance",
                                            "strip",     "quadrant",     "counterexample", "constant-c"};
    return c;
}

struct ExperimentConfig {
    std::string command;

    // function family
    std::string family = "gaussian";
    double scale = 1.0;
    double alpha = 0.25;
    double cx = 0.0;
    double cy = 0.0;
    double a = 1.0;      // linear x coefficient
    double b = 0.0;      // linear y coefficient
    double value = 0.0;  // constant value, linear offset
    std::string family2 = "constant";  // second trace (strip, quadrant)
    double a2 = 0.0;
    double value2 = 0.0;

    // graph family
    std::string graph = "interval-line";
    double delta = 1.0;
    double radius = 1.0;

    // norm
    std::string kind = "half-line";
    double beta = 0.0;  // 0: the gasket exponent
    std::string exterior = "constant";
    bool no_straight = false;

    // discretization
    double R = 8.0;
    std::size_t N = 32;
    bool per_edge = false;
    double h = 1.0 / 32.0;

    // graph paper
    int m = 2;
    std::vector<int> levels{0, -1, -2, -3, -4};
    double region = 2.0;

    // fractals
    int level = 5;
    std::vector<double> boundary{0.0, 0.0, 1.0};
    std::string source = "harmonic";
    int depth = 4;

    // conformal
    std::vector<double> Rs{8.0, 16.0, 32.0, 64.0};

    // kernel constant
    int T = 1000;
    std::string side = "half";

    // perturbation of reconstruction data
    double perturb = 0.0;
    std::uint64_t seed = 0;

    // output (not part of the echoed configuration)
    std::string out;
    bool export_graph = false;
    unsigned threads = 1;
};

namespace detail {

inline std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline double to_double(const std::string& key, const std::string& s)
{
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw UsageError("--" + key + " expects a number, got '" + s + "'");
    }
}

inline long long to_int(const std::string& key, const std::string& s)
{
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw UsageError("--" + key + " expects an integer, got '" + s + "'");
    }
}

inline bool to_bool(const std::string& key, const std::string& s)
{
    if (s == "true" || s == "1" || s.empty()) return true;
    if (s == "false" || s == "0") return false;
    throw UsageError("--" + key + " expects true or false, got '" + s + "'");
}

inline std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep))
        if (!cur.empty()) out.push_back(cur);
    return out;
}

inline std::vector<double> to_list(const std::string& key, const std::string& s)
{
    std::vector<double> out;
    for (const auto& p : split(s, ',')) out.push_back(to_double(key, p));
    if (out.empty()) throw UsageError("--" + key + " expects a comma-separated list");
    return out;
}

/// "0..-4" or "0,-1,-2".
inline std::vector<int> to_levels(const std::string& s)
{
    std::vector<int> out;
    const auto dots = s.find("..");
    if (dots != std::string::npos) {
        const auto lo = static_cast<int>(to_int("levels", s.substr(0, dots)));
        const auto hi = static_cast<int>(to_int("levels", s.substr(dots + 2)));
        const int step = hi < lo ? -1 : 1;
        for (int n = lo;; n += step) {
            out.push_back(n);
            if (n == hi) break;
        }
        return out;
    }
    for (const auto& p : split(s, ',')) out.push_back(static_cast<int>(to_int("levels", p)));
    if (out.empty()) throw UsageError("--levels expects a range a..b or a list");
    return out;
}

template <class T>
std::string join(const std::vector<T>& v)
{
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        if constexpr (std::is_floating_point_v<T>) {
            s += fmt(v[i]);
        } else {
            s += std::to_string(v[i]);
        }
    }
    return s;
}

}  // namespace detail

/// Keys accepted as flags (--key) and as JSON config fields.
inline const std::vector<std::string>& config_keys()
{
    static const std::vector<std::string> k{
        "family", "scale",  "alpha",     "cx",    "cy",       "a",      "b",        "value",  "family2",
        "a2",     "value2", "graph",     "delta", "radius",   "kind",   "beta",     "exterior", "no-straight",
        "R",      "N",      "per-edge",  "h",     "m",        "levels", "region",   "level",  "boundary",
        "source", "depth",  "Rs",        "T",     "side",     "perturb", "seed",    "out",    "export-graph",
        "threads"};
    return k;
}

inline std::string describe(const std::string& key)
{
    static const std::map<std::string, std::string> d{
        {"family", "constant, linear, gaussian, cauchy, radial-power, smooth-step, harmonic2d"},
        {"scale", "family width"},
        {"alpha", "radial-power exponent"},
        {"cx", "family center x"},
        {"cy", "family center y"},
        {"a", "linear x coefficient"},
        {"b", "linear y coefficient"},
        {"value", "constant value / linear offset"},
        {"family2", "second trace family (strip, quadrant)"},
        {"a2", "second trace linear coefficient"},
        {"value2", "second trace constant value"},
        {"graph", "interval-line, half-line-pair, integer-graph, square, graph-paper, circle, pencil"},
        {"delta", "graph spacing / square side"},
        {"radius", "circle radius"},
        {"kind", "half-line, half-graph, tilde-half-line, integer-graph, square, graph-paper, circle, pencil-tilde, h-beta"},
        {"beta", "H^beta exponent (0: gasket value)"},
        {"exterior", "constant or none"},
        {"no-straight", "drop straight-through junction terms"},
        {"R", "window half-width"},
        {"N", "samples per unit length (per edge with --per-edge)"},
        {"per-edge", "N counts cells per edge"},
        {"h", "plane grid spacing"},
        {"m", "graph-paper base"},
        {"levels", "levels a..b or a,b,c"},
        {"region", "gp-local region half-width (centered at cx, cy)"},
        {"level", "fractal level"},
        {"boundary", "gasket boundary values v0,v1,v2"},
        {"source", "harmonic or family"},
        {"depth", "deepest H^beta trace level"},
        {"Rs", "window sizes for counterexample"},
        {"T", "kernel constant window"},
        {"side", "kernel constant: half or full"},
        {"perturb", "move one coarse reconstruction sample by this much"},
        {"seed", "seed choosing the perturbed sample"},
        {"out", "output directory (default $TRACELAB_OUT or .)"},
        {"export-graph", "also write the graph as JSON"},
        {"threads", "worker threads"}};
    const auto it = d.find(key);
    return it == d.end() ? std::string{} : it->second;
}

inline const std::vector<std::string>& flag_keys()
{
    static const std::vector<std::string> k{"no-straight", "per-edge", "export-graph"};
    return k;
}

/// Sets one field from its textual form.
inline void apply(ExperimentConfig& c, const std::string& key, const std::string& v)
{
    using namespace detail;
    if (key == "family") c.family = v;
    else if (key == "scale") c.scale = to_double(key, v);
    else if (key == "alpha") c.alpha = to_double(key, v);
    else if (key == "cx") c.cx = to_double(key, v);
    else if (key == "cy") c.cy = to_double(key, v);
    else if (key == "a") c.a = to_double(key, v);
    else if (key == "b") c.b = to_double(key, v);
    else if (key == "value") c.value = to_double(key, v);
    else if (key == "family2") c.family2 = v;
    else if (key == "a2") c.a2 = to_double(key, v);
    else if (key == "value2") c.value2 = to_double(key, v);
    else if (key == "graph") c.graph = v;
    else if (key == "delta") c.delta = to_double(key, v);
    else if (key == "radius") c.radius = to_double(key, v);
    else if (key == "kind") c.kind = v;
    else if (key == "beta") c.beta = to_double(key, v);
    else if (key == "exterior") c.exterior = v;
    else if (key == "no-straight") c.no_straight = to_bool(key, v);
    else if (key == "R") c.R = to_double(key, v);
    else if (key == "N") {
        const long long n = to_int(key, v);
        if (n < 2) throw UsageError("--N must be at least 2");
        c.N = static_cast<std::size_t>(n);
    } else if (key == "per-edge") c.per_edge = to_bool(key, v);
    else if (key == "h") c.h = to_double(key, v);
    else if (key == "m") c.m = static_cast<int>(to_int(key, v));
    else if (key == "levels") c.levels = to_levels(v);
    else if (key == "region") c.region = to_double(key, v);
    else if (key == "level") c.level = static_cast<int>(to_int(key, v));
    else if (key == "boundary") c.boundary = to_list(key, v);
    else if (key == "source") c.source = v;
    else if (key == "depth") c.depth = static_cast<int>(to_int(key, v));
    else if (key == "Rs") c.Rs = to_list(key, v);
    else if (key == "T") c.T = static_cast<int>(to_int(key, v));
    else if (key == "side") c.side = v;
    else if (key == "perturb") c.perturb = to_double(key, v);
    else if (key == "seed") {
        const long long s = to_int(key, v);
        if (s < 0) throw UsageError("--seed must be non-negative");
        c.seed = static_cast<std::uint64_t>(s);
    } else if (key == "out") c.out = v;
    else if (key == "export-graph") c.export_graph = to_bool(key, v);
    else if (key == "threads") {
        const long long t = to_int(key, v);
        if (t < 1 || t > 1024) throw UsageError("--threads must lie in 1..1024");
        c.threads = static_cast<unsigned>(t);
    } else throw UsageError("unknown configuration key '" + key + "'");
}

/// Applies a JSON config object; scalars and arrays are accepted.
inline void apply_json(ExperimentConfig& c, const nlohmann::json& j)
{
    if (!j.is_object()) throw UsageError("config file must hold a JSON object");
    for (const auto& [key, val] : j.items()) {
        if (key == "command") {
            if (!val.is_string()) throw UsageError("config 'command' must be a string");
            c.command = val.get<std::string>();
            continue;
        }
        std::string text;
        if (val.is_string()) {
            text = val.get<std::string>();
        } else if (val.is_boolean()) {
            text = val.get<bool>() ? "true" : "false";
        } else if (val.is_number_integer()) {
            text = std::to_string(val.get<long long>());
        } else if (val.is_number()) {
            text = detail::fmt(val.get<double>());
        } else if (val.is_array()) {
            for (std::size_t i = 0; i < val.size(); ++i) {
                if (!val[i].is_number()) throw UsageError("config '" + key + "' must be a list of numbers");
                if (i) text += ",";
                text += val[i].is_number_integer() ? std::to_string(val[i].get<long long>()) : detail::fmt(val[i].get<double>());
            }
        } else {
            throw UsageError("config '" + key + "' has an unsupported type");
        }
        apply(c, key, text);
    }
}

inline ExperimentConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read config file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw UsageError("config file '" + path + "' is not valid JSON: " + e.what());
    }
    ExperimentConfig c;
    apply_json(c, j);
    return c;
}

/// Resolved configuration as echoed into reports (no output plumbing).
inline nlohmann::json to_json(const ExperimentConfig& c)
{
    nlohmann::json j;
    j["command"] = c.command;
    j["family"] = {{"name", c.family}, {"scale", c.scale}, {"alpha", c.alpha}, {"center", {c.cx, c.cy}},
                   {"a", c.a},         {"b", c.b},         {"value", c.value}};
    j["family2"] = {{"name", c.family2}, {"a", c.a2}, {"value", c.value2}};
    j["graph"] = {{"name", c.graph}, {"delta", c.delta}, {"radius", c.radius}};
    j["kind"] = c.kind;
    j["beta"] = c.beta;
    j["exterior"] = c.exterior;
    j["include_straight"] = !c.no_straight;
    j["R"] = c.R;
    j["N"] = c.N;
    j["per_edge"] = c.per_edge;
    j["h"] = c.h;
    j["m"] = c.m;
    j["levels"] = c.levels;
    j["region"] = c.region;
    j["level"] = c.level;
    j["boundary"] = c.boundary;
    j["source"] = c.source;
    j["depth"] = c.depth;
    j["Rs"] = c.Rs;
    j["T"] = c.T;
    j["side"] = c.side;
    j["perturb"] = c.perturb;
    j["seed"] = c.seed;
    return j;
}

/// Parses `tracelab <command> [--flag value]...`. A --config file is read
/// first and explicit flags override it.
inline ExperimentConfig parse_command_line(int argc, const char* const* argv)
{
    CLI::App app{"tracelab: trace norms on graphs, fractals and the plane"};
    app.set_help_flag("--help", "print this help");
    std::string command, config_path;
    std::string names;
    for (const auto& k : commands()) names += (names.empty() ? "" : ", ") + k;
    app.add_option("command", command, "one of: " + names)->required();
    app.add_option("--config", config_path, "JSON config file");
    std::map<std::string, std::string> given;
    std::map<std::string, CLI::Option*> opts;
    for (const auto& k : config_keys()) {
        const bool is_flag = std::find(flag_keys().begin(), flag_keys().end(), k) != flag_keys().end();
        opts[k] = is_flag ? app.add_flag("--" + k)->description(describe(k)) : app.add_option("--" + k, given[k], describe(k));
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        throw HelpRequest(app.help());
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }
    ExperimentConfig c = config_path.empty() ? ExperimentConfig{} : load_config(config_path);
    for (const auto& k : config_keys()) {
        if (opts[k]->count() == 0) continue;
        const bool is_flag = std::find(flag_keys().begin(), flag_keys().end(), k) != flag_keys().end();
        apply(c, k, is_flag ? "true" : given[k]);
    }
    c.command = command;
    return c;
}

namespace detail {

inline FunctionFamily make_family(const std::string& name, const ExperimentConfig& c, double a, double value)
{
    const Point center{c.cx, c.cy};
    if (name == "constant") return FunctionFamily::constant(value);
    if (name == "linear") return FunctionFamily::linear(a, c.b, value);
    if (c.scale <= 0.0) throw UsageError("--scale must be positive");
    if (name == "gaussian") return FunctionFamily::gaussian(c.scale, center);
    if (name == "cauchy") return FunctionFamily::cauchy(c.scale, center);
    if (name == "radial-power") {
        if (c.alpha <= 0.0) throw UsageError("--alpha must be positive");
        return FunctionFamily::radial_power(c.alpha, c.scale, center);
    }
    if (name == "smooth-step") return FunctionFamily::step(c.scale, center);
    if (name == "harmonic2d") return FunctionFamily::harmonic(center);
    throw UsageError("unknown function family '" + name +
                     "' (constant, linear, gaussian, cauchy, radial-power, smooth-step, harmonic2d)");
}

inline FunctionFamily family(const ExperimentConfig& c) { return make_family(c.family, c, c.a, c.value); }
inline FunctionFamily family2(const ExperimentConfig& c) { return make_family(c.family2, c, c.a2, c.value2); }

inline GraphFamily graph_family(const ExperimentConfig& c)
{
    static const std::vector<FamilyTag> tags{FamilyTag::interval_line, FamilyTag::half_line_pair,
                                             FamilyTag::integer_graph, FamilyTag::square,
                                             FamilyTag::graph_paper,   FamilyTag::circle,
                                             FamilyTag::pencil};
    for (FamilyTag t : tags)
        if (to_string(t) == c.graph) return {t, c.delta, c.radius};
    throw UsageError("unknown graph family '" + c.graph +
                     "' (interval-line, half-line-pair, integer-graph, square, graph-paper, circle, pencil)");
}

inline NormKind norm_kind(const ExperimentConfig& c)
{
    static const std::vector<NormTag> tags{NormTag::half_graph,  NormTag::half_line,   NormTag::tilde_half_line,
                                           NormTag::integer_graph, NormTag::square,    NormTag::graph_paper,
                                           NormTag::circle,      NormTag::pencil_tilde, NormTag::h_beta};
    for (NormTag t : tags) {
        if (to_string(t) != c.kind) continue;
        if (t == NormTag::h_beta) return NormKind::h_beta(c.beta == 0.0 ? sg_beta() : c.beta);
        return NormKind::of(t);
    }
    throw UsageError("unknown norm kind '" + c.kind + "'");
}

inline NormOptions norm_options(const ExperimentConfig& c)
{
    NormOptions o;
    if (c.exterior == "constant") o.exterior = Exterior::constant_extension;
    else if (c.exterior == "none") o.exterior = Exterior::none;
    else throw UsageError("--exterior must be 'constant' or 'none'");
    o.include_straight = !c.no_straight;
    return o;
}

inline Resolution resolution(const ExperimentConfig& c)
{
    return c.per_edge ? Resolution::per_edge(c.N) : Resolution::per_unit(c.N);
}

inline void check_common(const ExperimentConfig& c)
{
    if (!(c.R > 0.0) || !std::isfinite(c.R)) throw UsageError("--R must be positive");
    if (!(c.h > 0.0) || !std::isfinite(c.h)) throw UsageError("--h must be positive");
    if (!(c.delta > 0.0)) throw UsageError("--delta must be positive");
    if (!(c.radius > 0.0)) throw UsageError("--radius must be positive");
    if (c.m < 2) throw UsageError("--m must be at least 2");
    if (!(c.region > 0.0)) throw UsageError("--region must be positive");
    if (c.perturb < 0.0) throw UsageError("--perturb must be non-negative");
}

/// Long-format CSV. Every row ends with the resolution and window columns.
class Table {
public:
    Table(std::vector<std::string> columns, std::size_t resolution, double spacing, const Window& w)
        : columns_(std::move(columns))
    {
        suffix_ = "," + std::to_string(resolution) + "," + fmt(spacing) + "," + fmt(w.xmin()) + "," + fmt(w.xmax()) +
                  "," + fmt(w.ymin()) + "," + fmt(w.ymax());
    }

    void set_context(std::size_t resolution, double spacing, const Window& w)
    {
        suffix_ = "," + std::to_string(resolution) + "," + fmt(spacing) + "," + fmt(w.xmin()) + "," + fmt(w.xmax()) +
                  "," + fmt(w.ymin()) + "," + fmt(w.ymax());
    }

    void row(const std::vector<std::string>& cells)
    {
        require(cells.size() == columns_.size(), "csv row has the wrong number of cells");
        std::string s;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) s += ",";
            s += cells[i];
        }
        body_ += s + suffix_ + "\n";
    }

    std::string str() const
    {
        std::string h;
        for (std::size_t i = 0; i < columns_.size(); ++i) {
            if (i) h += ",";
            h += columns_[i];
        }
        return h + ",resolution,spacing,xmin,xmax,ymin,ymax\n" + body_;
    }

private:
    std::vector<std::string> columns_;
    std::string suffix_;
    std::string body_;
};

}  // namespace detail

/// Everything a run produces; files are written by run().
struct RunResult {
    int status = 0;
    nlohmann::json summary;
    std::map<std::string, std::string> files;  // file name -> contents
};

namespace detail {

inline Window line_window(const ExperimentConfig& c) { return Window(c.R); }

inline EdgeFunction sample_line(const FunctionFamily& fam, const ExperimentConfig& c, const Window& w)
{
    return sample_on_graph(fam, share(build_graph({FamilyTag::interval_line}, w)), resolution(c));
}

inline nlohmann::json profile_json(const NormProfile& p)
{
    return {{"m", p.m},          {"levels", p.levels}, {"deltas", p.deltas}, {"norms", p.norms},
            {"energy", p.energy}, {"sup", p.sup()},    {"inf", p.inf()},
            {"sup_over_energy", p.energy > 0.0 ? p.sup() / p.energy : 0.0},
            {"energy_over_inf", p.inf() > 0.0 ? p.energy / p.inf() : 0.0}};
}

inline std::string profile_csv(const NormProfile& p, double h)
{
    Table t({"n", "delta", "norm", "energy", "ratio"}, 0, h, p.window);
    for (std::size_t k = 0; k < p.levels.size(); ++k) {
        t.set_context(p.resolution[k], h, p.window);
        t.row({std::to_string(p.levels[k]), fmt(p.deltas[k]), fmt(p.norms[k]), fmt(p.energy),
               fmt(p.norms[k] > 0.0 ? p.energy / p.norms[k] : 0.0)});
    }
    return t.str();
}

inline PlaneField plane(const ExperimentConfig& c) { return sample_plane(family(c), Window(c.R), c.h); }

inline void cmd_norm(const ExperimentConfig& c, RunResult& r)
{
    const GraphFamily gf = graph_family(c);
    const auto g = share(build_graph(gf, Window(c.R)));
    const auto f = sample_on_graph(family(c), g, resolution(c));
    NormOptions o = norm_options(c);
    o.refinement = true;
    const NormReport rep = seminorm(f, norm_kind(c), o);
    r.summary["result"] = tracelab::to_json(rep, true);
    Table t({"term", "value"}, rep.resolution, rep.spacing, rep.window);
    for (const auto& term : rep.breakdown) t.row({term.label, fmt(term.value)});
    t.row({"total", fmt(rep.value)});
    r.files[c.command + ".csv"] = t.str();
    if (c.export_graph) r.files[c.command + ".graph.json"] = tracelab::to_json(*g).dump(2) + "\n";
}

inline void cmd_spectrum(const ExperimentConfig& c, RunResult& r)
{
    const auto f = sample_line(family(c), c, line_window(c));
    const auto s = line_spectrum(f);
    const double half = spectral_half_norm(s);
    const double spatial = seminorm(f, NormKind::of(NormTag::half_line), norm_options(c)).value;
    r.summary["result"] = {{"spectral_half", half},
                           {"spectral_tilde", spectral_tilde_norm(s)},
                           {"spectral_l2", spectral_l2(s)},
                           {"half_line", spatial},
                           {"ratio", half > 0.0 ? spatial / half : 0.0},
                           {"target", "4*pi^2"},
                           {"bins", s.size()},
                           {"dxi", s.dxi}};
    Table t({"xi", "re", "im"}, f.cells(0), s.spacing, s.window);
    for (std::size_t k = 0; k < s.size(); ++k) t.row({fmt(s.xi[k]), fmt(s.amp[k].real()), fmt(s.amp[k].imag())});
    r.files[c.command + ".csv"] = t.str();
}

inline void cmd_extend(const ExperimentConfig& c, RunResult& r)
{
    const Window w = line_window(c);
    const auto f = sample_line(family(c), c, w);
    const auto ext = poisson_extend(f, c.h, w);
    const auto e = plane_energy(ext.field);
    const double trace = seminorm(f, NormKind::of(NormTag::half_line), norm_options(c)).value;
    r.summary["result"] = {{"energy", e.value},
                           {"trace_half_line", trace},
                           {"trace_over_energy", e.value > 0.0 ? trace / e.value : 0.0},
                           {"nx", e.nx},
                           {"ny", e.ny},
                           {"warnings", ext.warnings}};
    const PlaneField& F = ext.field;
    Table t({"x", "y", "value"}, f.cells(0), F.h, w);
    for (std::size_t j = 0; j < F.ny; ++j)
        for (std::size_t i = 0; i < F.nx; ++i) t.row({fmt(F.x(i)), fmt(F.y(j)), fmt(F.at(i, j))});
    r.files[c.command + ".csv"] = t.str();
}

inline void cmd_gp_profile(const ExperimentConfig& c, RunResult& r)
{
    GpOptions o;
    o.include_straight = !c.no_straight;
    const auto p = trace_profile(plane(c), c.m, c.levels, o);
    r.summary["result"] = profile_json(p);
    r.files[c.command + ".csv"] = profile_csv(p, c.h);
}

inline void cmd_pencil(const ExperimentConfig& c, RunResult& r)
{
    const auto p = pencil_profile(plane(c), c.m, c.levels, norm_options(c));
    r.summary["result"] = profile_json(p);
    r.files[c.command + ".csv"] = profile_csv(p, c.h);
}

inline void cmd_gp_local(const ExperimentConfig& c, RunResult& r)
{
    const Window region(c.region, {c.cx, c.cy});
    const auto lc = localized_compare(plane(c), region, c.m, c.levels);
    r.summary["result"] = profile_json(lc.profile);
    r.summary["result"]["energy_over_sup"] = lc.ratio;
    r.files[c.command + ".csv"] = profile_csv(lc.profile, c.h);
}

inline void cmd_gp_reconstruct(const ExperimentConfig& c, RunResult& r)
{
    const PlaneField F = plane(c);
    auto traces = level_traces(F, c.m, c.levels);
    if (c.perturb > 0.0) {
        // Move one sample of the coarsest level, chosen by the seed.
        std::mt19937_64 rng(c.seed);
        auto& coarse = traces.front();
        std::uniform_int_distribution<std::size_t> pick_edge(0, coarse.samples.size() - 1);
        auto& s = coarse.samples[pick_edge(rng)];
        std::uniform_int_distribution<std::size_t> pick(0, s.size() - 1);
        s[pick(rng)] += c.perturb;
    }
    const auto rec = reconstruct_from_traces(traces, true);
    const double original = plane_energy(F).value;
    r.summary["result"] = {{"original_energy", original},
                           {"reconstructed_energy", rec.energy},
                           {"energy_ratio", original > 0.0 ? rec.energy / original : 0.0},
                           {"level_norms", rec.level_norms},
                           {"sup", rec.sup},
                           {"energy_over_sup", rec.ratio}};
    const Window w = tracelab::detail::field_window(F);
    Table t({"n", "delta", "norm"}, 0, c.h, w);
    for (std::size_t k = 0; k < c.levels.size(); ++k) {
        t.set_context(traces[k].cells(0), c.h, w);
        t.row({std::to_string(c.levels[k]), fmt(tracelab::detail::level_delta(c.m, c.levels[k])), fmt(rec.level_norms[k])});
    }
    r.files[c.command + ".csv"] = t.str();
}

inline VertexFunction fractal_data(const ExperimentConfig& c, FractalKind kind)
{
    const int top = kind == FractalKind::sg ? sg_max_level : sc_max_level;
    if (c.level < 0 || c.level > top)
        throw UsageError("--level must lie in 0.." + std::to_string(top) + " for " + to_string(kind));
    if (c.source == "family") return sample_vertices(share(build_fractal(kind, c.level)), family(c));
    if (c.source != "harmonic") throw UsageError("--source must be 'harmonic' or 'family'");
    if (kind != FractalKind::sg) throw UsageError("harmonic boundary data is only defined on the gasket");
    if (c.boundary.size() != 3) throw UsageError("--boundary expects three values");
    return sg_harmonic_extend(sg_boundary(c.boundary[0], c.boundary[1], c.boundary[2]), c.level).f;
}

inline Window unit_square() { return Window(0.5, {0.5, 0.5}); }

inline void cmd_sg_energy(const ExperimentConfig& c, RunResult& r)
{
    if (c.level < 2) throw UsageError("sg-energy needs --level >= 2");
    const auto f = fractal_data(c, FractalKind::sg);
    const auto p = sg_renormalized_profile(f);
    nlohmann::json rows = nlohmann::json::array();
    const std::string label = c.source == "harmonic" ? "harmonic(" + join(c.boundary) + ")" : c.family;
    Table t({"m", "energy", "renormalized", "profile"}, 0, 0.0, unit_square());
    for (const auto& row : p.rows) {
        t.set_context(std::size_t{1} << row.m, std::ldexp(1.0, -row.m), unit_square());
        t.row({std::to_string(row.m), fmt(row.energy), fmt(row.renormalized), label});
        rows.push_back({{"m", row.m}, {"energy", row.energy}, {"renormalized", row.renormalized}});
    }
    r.summary["result"] = {{"rows", rows}, {"monotone", p.monotone}, {"limit_estimate", p.limit_estimate}};
    r.files[c.command + ".csv"] = t.str();
    if (c.export_graph) r.files[c.command + ".graph.json"] = tracelab::to_json(to_metric_graph(*f.approx)).dump(2) + "\n";
}

inline void cmd_sg_trace(const ExperimentConfig& c, RunResult& r)
{
    const auto f = fractal_data(c, FractalKind::sg);
    const double beta = c.beta == 0.0 ? sg_beta() : c.beta;
    if (c.depth < 0 || c.depth >= c.level) throw UsageError("--depth must lie in 0..level-1");
    const auto rows = h_beta_trace_profile(f, beta, c.depth);
    double lo = rows.front().norm, hi = rows.front().norm;
    nlohmann::json out = nlohmann::json::array();
    Table t({"m", "norm", "renormalized"}, 0, 0.0, unit_square());
    for (const auto& row : rows) {
        lo = std::min(lo, row.norm);
        hi = std::max(hi, row.norm);
        t.set_context(std::size_t{1} << (c.level - row.m), std::ldexp(1.0, -c.level), unit_square());
        t.row({std::to_string(row.m), fmt(row.norm), fmt(row.renormalized)});
        out.push_back({{"m", row.m}, {"norm", row.norm}, {"renormalized", row.renormalized}});
    }
    r.summary["result"] = {{"beta", beta}, {"rows", out}, {"max_over_min", lo > 0.0 ? hi / lo : 0.0}};
    r.files[c.command + ".csv"] = t.str();
}

inline void cmd_sc_resistance(const ExperimentConfig& c, RunResult& r)
{
    if (c.level < 1 || c.level > sc_max_level) throw UsageError("--level must lie in 1.." + std::to_string(sc_max_level));
    const auto rows = sc_renorm_estimate(c.level);
    nlohmann::json out = nlohmann::json::array();
    Table t({"m", "resistance", "ratio", "vertices"}, 0, 0.0, unit_square());
    for (const auto& row : rows) {
        t.set_context(static_cast<std::size_t>(std::llround(std::pow(3.0, row.m))), std::pow(3.0, -row.m), unit_square());
        t.row({std::to_string(row.m), fmt(row.resistance), fmt(row.ratio), std::to_string(row.vertices)});
        out.push_back({{"m", row.m}, {"resistance", row.resistance}, {"ratio", row.ratio}, {"vertices", row.vertices}});
    }
    const double r_hat = rows.back().ratio;
    r.summary["result"] = {{"rows", out}, {"r_estimate", r_hat}, {"beta", sc_beta(r_hat)}};
    r.files[c.command + ".csv"] = t.str();
}

inline void cmd_strip(const ExperimentConfig& c, RunResult& r)
{
    const Window w = line_window(c);
    const auto t = make_strip_trace(sample_line(family(c), c, w), sample_line(family2(c), c, w));
    const auto s = strip_trace_norm(t, norm_options(c));
    const Exterior ext = norm_options(c).exterior;
    const double s0 = sinh_kernel_norm(t.f0, ext), s1 = sinh_kernel_norm(t.f1, ext);
    const double sinh_total = s0 + s1 + s.l2;
    r.summary["result"] = {{"tilde0", s.tilde0}, {"tilde1", s.tilde1}, {"l2", s.l2},
                           {"total", s.total()}, {"sinh0", s0},          {"sinh1", s1},
                           {"sinh_total", sinh_total},
                           {"sinh_over_tilde", s.total() > 0.0 ? sinh_total / s.total() : 0.0}};
    Table tb({"term", "value"}, t.f0.cells(0), t.f0.spacing(0), w);
    tb.row({"tilde0", fmt(s.tilde0)});
    tb.row({"tilde1", fmt(s.tilde1)});
    tb.row({"l2", fmt(s.l2)});
    tb.row({"sinh0", fmt(s0)});
    tb.row({"sinh1", fmt(s1)});
    r.files[c.command + ".csv"] = tb.str();
}

inline void cmd_quadrant(const ExperimentConfig& c, RunResult& r)
{
    const Window w(0.5 * c.R, {0.5 * c.R, 0.0});
    const auto f0 = sample_line(family(c), c, w);
    const auto f1 = sample_line(family2(c), c, w);
    const auto q = quadrant_trace_norm(f0, f1);
    r.summary["result"] = {{"weighted0", q.weighted0}, {"weighted1", q.weighted1}, {"junction", q.junction}, {"total", q.total()}};
    Table t({"term", "value"}, f0.cells(0), f0.spacing(0), w);
    t.row({"weighted0", fmt(q.weighted0)});
    t.row({"weighted1", fmt(q.weighted1)});
    t.row({"junction", fmt(q.junction)});
    r.files[c.command + ".csv"] = t.str();
}

inline void cmd_counterexample(const ExperimentConfig& c, RunResult& r)
{
    for (double R : c.Rs)
        if (!(R > 0.0)) throw UsageError("--Rs must hold positive window sizes");
    if (c.per_edge) throw UsageError("counterexample uses a per-unit resolution");
    const auto rows = counterexample_growth(c.Rs, c.N, family(c));
    nlohmann::json out = nlohmann::json::array();
    Table t({"R", "full", "tilde"}, 0, 0.0, Window(c.Rs.front()));
    for (const auto& row : rows) {
        const auto cells = static_cast<std::size_t>(std::llround(2.0 * row.R * static_cast<double>(c.N)));
        t.set_context(cells, 2.0 * row.R / static_cast<double>(cells), Window(row.R));
        t.row({fmt(row.R), fmt(row.full), fmt(row.tilde)});
        out.push_back({{"R", row.R}, {"full", row.full}, {"tilde", row.tilde}});
    }
    nlohmann::json res = {{"rows", out}};
    if (rows.size() >= 2) {
        res["log_slope"] = log_slope(rows);
        const auto& a = rows[rows.size() - 2];
        const auto& b = rows.back();
        res["tilde_last_change"] = a.tilde != 0.0 ? std::abs(b.tilde - a.tilde) / a.tilde : 0.0;
    }
    r.summary["result"] = res;
    r.files[c.command + ".csv"] = t.str();
}

inline void cmd_constant_c(const ExperimentConfig& c, RunResult& r)
{
    KernelSide side = KernelSide::half_doubled;
    if (c.side == "full") side = KernelSide::full;
    else if (c.side != "half") throw UsageError("--side must be 'half' or 'full'");
    if (c.T < 8) throw UsageError("--T must be at least 8");
    const double v = kernel_constant(side, c.T);
    const double target = 4.0 * pi * pi;
    r.summary["result"] = {{"c", v}, {"target", "4*pi^2"}, {"target_value", target}, {"rel_err", std::abs(v - target) / target}};
}

}  // namespace detail

/// Runs one experiment in memory. Usage errors and module rejections come
/// back as status 2 and 1 with an error object in the summary.
inline RunResult execute(const ExperimentConfig& c)
{
    RunResult r;
    r.summary["schema_version"] = schema_version;
    r.summary["command"] = c.command;
    r.summary["config"] = to_json(c);
    parallel::set_threads(c.threads);
    try {
        detail::check_common(c);
        const std::string& k = c.command;
        if (k == "norm") detail::cmd_norm(c, r);
        else if (k == "spectrum") detail::cmd_spectrum(c, r);
        else if (k == "extend") detail::cmd_extend(c, r);
        else if (k == "gp-profile") detail::cmd_gp_profile(c, r);
        else if (k == "gp-reconstruct") detail::cmd_gp_reconstruct(c, r);
        else if (k == "gp-local") detail::cmd_gp_local(c, r);
        else if (k == "pencil") detail::cmd_pencil(c, r);
        else if (k == "sg-energy") detail::cmd_sg_energy(c, r);
        else if (k == "sg-trace") detail::cmd_sg_trace(c, r);
        else if (k == "sc-resistance") detail::cmd_sc_resistance(c, r);
        else if (k == "strip") detail::cmd_strip(c, r);
        else if (k == "quadrant") detail::cmd_quadrant(c, r);
        else if (k == "counterexample") detail::cmd_counterexample(c, r);
        else if (k == "constant-c") detail::cmd_constant_c(c, r);
        else throw UsageError("unknown command '" + k + "'");
        r.summary["status"] = "ok";
    } catch (const UsageError& e) {
        r.status = 2;
        r.files.clear();
        r.summary.erase("result");
        r.summary["status"] = "error";
        r.summary["error"] = {{"type", "usage"}, {"message", e.what()}};
    } catch (const Rejection& e) {
        r.status = 1;
        r.files.clear();
        r.summary.erase("result");
        r.summary["status"] = "error";
        r.summary["error"] = {{"type", "rejection"}, {"message", e.what()}};
    }
    return r;
}

/// Output directory: --out, else $TRACELAB_OUT, else the working directory.
inline std::filesystem::path output_dir(const ExperimentConfig& c)
{
    if (!c.out.empty()) return c.out;
    if (const char* env = std::getenv("TRACELAB_OUT"); env && *env) return env;
    return ".";
}

/// Runs the experiment, writes <command>.json and the CSV tables, and
/// prints the summary. Returns the exit status.
inline int run(const ExperimentConfig& c, std::ostream& out = std::cout)
{
    RunResult r = execute(c);
    const std::string summary = r.summary.dump(2) + "\n";
    if (r.status == 0) {
        const auto dir = output_dir(c);
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        r.files[c.command + ".json"] = summary;
        for (const auto& [name, body] : r.files) {
            std::ofstream f(dir / name, std::ios::binary);
            if (!f || !(f << body)) {
                nlohmann::json err = {{"schema_version", schema_version},
                                      {"command", c.command},
                                      {"status", "error"},
                                      {"error", {{"type", "io"}, {"message", "cannot write " + (dir / name).string()}}}};
                out << err.dump(2) << "\n";
                return 1;
            }
        }
    }
    out << summary;
    return r.status;
}

/// Parses argv and runs; usage problems print an error object and return 2.
inline int main(int argc, const char* const* argv, std::ostream& out = std::cout)
{
    ExperimentConfig c;
    try {
        c = parse_command_line(argc, argv);
    } catch (const HelpRequest& h) {
        out << h.what();
        return 0;
    } catch (const UsageError& e) {
        nlohmann::json err = {{"schema_version", schema_version},
                              {"status", "error"},
                              {"error", {{"type", "usage"}, {"message", e.what()}}},
                              {"commands", commands()}};
        out << err.dump(2) << "\n";
        return 2;
    }
    return run(c, out);
}

}  // namespace tracelab::cli
