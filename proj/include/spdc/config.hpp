#pragma once

#include <algorithm>
#include <cctype>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "spdc/dispersion.hpp"
#include "spdc/errors.hpp"
#include "spdc/io.hpp"
#include "spdc/jsa.hpp"
#include "spdc/phasematch.hpp"

namespace spdc {

enum class RunMode { jsa, temporal, schmidt, sweep_tp, sweep_lambda, spectra, panels };
enum class OutputFormat { csv, bin };

inline std::string_view to_string(RunMode m) {
    switch (m) {
        case RunMode::jsa: return "jsa";
        case RunMode::temporal: return "temporal";
        case RunMode::schmidt: return "schmidt";
        case RunMode::sweep_tp: return "sweep-tp";
        case RunMode::sweep_lambda: return "sweep-lambda";
        case RunMode::spectra: return "spectra";
        case RunMode::panels: return "panels";
    }
    return "?";
}

inline std::optional<RunMode> parse_run_mode(std::string_view s) {
    for (auto m : {RunMode::jsa, RunMode::temporal, RunMode::schmidt, RunMode::sweep_tp, RunMode::sweep_lambda,
                   RunMode::spectra, RunMode::panels})
        if (s == to_string(m)) return m;
    return std::nullopt;
}

// Declarative scenario: [crystal], [pump] and [run] blocks of `key = value` lines.
struct ScenarioConfig {
    // [crystal]
    Species species = Species::KTP;
    double length_mm = 10.0;
    double theta_deg = 90.0;
    std::optional<double> poling_period_nm;
    int qpm_order = 1;
    Geometry geometry = Geometry::co_propagating;
    PolarizationScheme polarization;
    std::optional<double> signal_hint_nm;
    // [pump]
    double wavelength_nm = 0.0;
    std::optional<double> duration_ps;
    double gain = 1.0;
    std::optional<double> tp_min_ps, tp_max_ps;
    int tp_points = 60;
    std::vector<double> tp_list;
    // [run]
    RunMode mode = RunMode::schmidt;
    long grid_n = 0;
    std::optional<double> window_s, window_i;
    double gamma = gamma_fwhm;
    JsaMode jsa_mode = JsaMode::exact_sinc_full;
    std::string output_dir = "out";
    int workers = 1;
    OutputFormat format = OutputFormat::csv;
    int exact_subsample = 15;
    bool check_convergence = false;
    std::optional<double> lambda_s_min_nm, lambda_s_max_nm;
    int lambda_points = 100;

    CrystalConfig crystal() const {
        CrystalConfig c;
        c.species = species;
        c.length_mm = length_mm;
        c.theta_deg = theta_deg;
        c.poling_period_nm = poling_period_nm;
        c.qpm_order = qpm_order;
        return c;
    }

    GridSpec grid_spec() const {
        GridSpec g;
        g.n = grid_n;
        g.window_s = window_s;
        g.window_i = window_i;
        return g;
    }
};

namespace detail {

inline std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

struct Entry {
    std::string value;
    int line;
};

inline double to_double(const Entry& e, const std::string& key) {
    try {
        double v = io::parse_num(e.value);
        if (!std::isfinite(v)) throw Error("ParseError", "not finite");
        return v;
    } catch (const Error&) {
        throw ConfigError(e.line, key, "expected a number, got '" + e.value + "'");
    }
}

inline long to_long(const Entry& e, const std::string& key) {
    double v = to_double(e, key);
    if (v != std::floor(v)) throw ConfigError(e.line, key, "expected an integer");
    return static_cast<long>(v);
}

inline bool to_bool(const Entry& e, const std::string& key) {
    if (e.value == "true" || e.value == "1" || e.value == "yes") return true;
    if (e.value == "false" || e.value == "0" || e.value == "no") return false;
    throw ConfigError(e.line, key, "expected true or false");
}

inline std::vector<double> to_list(const Entry& e, const std::string& key) {
    std::vector<double> out;
    for (auto part : io::detail::split(e.value, ',')) {
        Entry sub{trim(part), e.line};
        out.push_back(to_double(sub, key));
    }
    return out;
}

}  // namespace detail

inline ScenarioConfig parse_config(std::istream& is) {
    using Block = std::map<std::string, detail::Entry>;
    std::map<std::string, Block> blocks;
    std::map<std::string, int> block_line;
    std::string line, section;
    int ln = 0;
    static const std::set<std::string> known = {"crystal", "pump", "run"};
    while (std::getline(is, line)) {
        ++ln;
        auto hash = line.find_first_of("#;");
        std::string t = detail::trim(std::string_view(line).substr(0, hash));
        if (t.empty()) continue;
        if (t.front() == '[') {
            if (t.back() != ']') throw ConfigError(ln, t, "malformed section header");
            section = detail::trim(std::string_view(t).substr(1, t.size() - 2));
            if (!known.count(section)) throw ConfigError(ln, "[" + section + "]", "unknown block");
            if (blocks.count(section)) throw ConfigError(ln, "[" + section + "]", "duplicate block");
            blocks[section];
            block_line[section] = ln;
            continue;
        }
        auto eq = t.find('=');
        if (eq == std::string::npos) throw ConfigError(ln, t, "expected key = value");
        if (section.empty()) throw ConfigError(ln, t, "key outside any block");
        std::string key = detail::trim(std::string_view(t).substr(0, eq));
        std::string val = detail::trim(std::string_view(t).substr(eq + 1));
        if (key.empty()) throw ConfigError(ln, t, "empty key");
        if (blocks[section].count(key)) throw ConfigError(ln, section + "." + key, "duplicate key");
        blocks[section][key] = {val, ln};
    }
    for (const auto& b : known)
        if (!blocks.count(b)) throw ConfigError(0, "[" + b + "]", "missing block");

    ScenarioConfig c;
    auto take = [&](const std::string& blk, const std::string& key) -> std::optional<detail::Entry> {
        auto& m = blocks[blk];
        auto it = m.find(key);
        if (it == m.end()) return std::nullopt;
        auto e = it->second;
        m.erase(it);
        return e;
    };
    auto need = [&](const std::string& blk, const std::string& key) {
        auto e = take(blk, key);
        if (!e) throw ConfigError(block_line[blk], blk + "." + key, "required key missing");
        return *e;
    };

    {
        auto e = need("crystal", "species");
        auto s = parse_species(e.value);
        if (!s) throw ConfigError(e.line, "crystal.species", "expected KTP, KDP or BBO");
        c.species = *s;
    }
    c.length_mm = detail::to_double(need("crystal", "length_mm"), "crystal.length_mm");
    if (auto e = take("crystal", "theta_deg")) c.theta_deg = detail::to_double(*e, "crystal.theta_deg");
    if (auto e = take("crystal", "poling_period_nm")) c.poling_period_nm = detail::to_double(*e, "crystal.poling_period_nm");
    if (auto e = take("crystal", "qpm_order")) c.qpm_order = static_cast<int>(detail::to_long(*e, "crystal.qpm_order"));
    {
        auto e = need("crystal", "geometry");
        auto g = parse_geometry(e.value);
        if (!g) throw ConfigError(e.line, "crystal.geometry", "expected counter or co");
        c.geometry = *g;
    }
    {
        auto e = need("crystal", "polarization");
        auto p = PolarizationScheme::parse(e.value);
        if (!p) throw ConfigError(e.line, "crystal.polarization", "expected a pattern like e-oe");
        c.polarization = *p;
    }
    if (auto e = take("crystal", "signal_hint_nm")) c.signal_hint_nm = detail::to_double(*e, "crystal.signal_hint_nm");

    c.wavelength_nm = detail::to_double(need("pump", "wavelength_nm"), "pump.wavelength_nm");
    if (auto e = take("pump", "duration_ps")) c.duration_ps = detail::to_double(*e, "pump.duration_ps");
    if (auto e = take("pump", "gain")) c.gain = detail::to_double(*e, "pump.gain");
    if (auto e = take("pump", "tp_min_ps")) c.tp_min_ps = detail::to_double(*e, "pump.tp_min_ps");
    if (auto e = take("pump", "tp_max_ps")) c.tp_max_ps = detail::to_double(*e, "pump.tp_max_ps");
    if (auto e = take("pump", "tp_points")) c.tp_points = static_cast<int>(detail::to_long(*e, "pump.tp_points"));
    if (auto e = take("pump", "tp_list")) c.tp_list = detail::to_list(*e, "pump.tp_list");

    {
        auto e = need("run", "mode");
        auto m = parse_run_mode(e.value);
        if (!m) throw ConfigError(e.line, "run.mode", "expected jsa, temporal, schmidt, sweep-tp, sweep-lambda, spectra or panels");
        c.mode = *m;
    }
    if (auto e = take("run", "grid_n")) c.grid_n = detail::to_long(*e, "run.grid_n");
    if (auto e = take("run", "window_s")) c.window_s = detail::to_double(*e, "run.window_s");
    if (auto e = take("run", "window_i")) c.window_i = detail::to_double(*e, "run.window_i");
    if (auto e = take("run", "gamma")) c.gamma = detail::to_double(*e, "run.gamma");
    if (auto e = take("run", "jsa_mode")) {
        auto m = parse_jsa_mode(e->value);
        if (!m) throw ConfigError(e->line, "run.jsa_mode", "expected full, linearized or gaussian");
        c.jsa_mode = *m;
    }
    if (auto e = take("run", "output_dir")) c.output_dir = e->value;
    if (auto e = take("run", "workers")) c.workers = static_cast<int>(detail::to_long(*e, "run.workers"));
    if (auto e = take("run", "format")) {
        if (e->value == "csv") c.format = OutputFormat::csv;
        else if (e->value == "bin") c.format = OutputFormat::bin;
        else throw ConfigError(e->line, "run.format", "expected csv or bin");
    }
    if (auto e = take("run", "exact_subsample")) c.exact_subsample = static_cast<int>(detail::to_long(*e, "run.exact_subsample"));
    if (auto e = take("run", "check_convergence")) c.check_convergence = detail::to_bool(*e, "run.check_convergence");
    if (auto e = take("run", "lambda_s_min_nm")) c.lambda_s_min_nm = detail::to_double(*e, "run.lambda_s_min_nm");
    if (auto e = take("run", "lambda_s_max_nm")) c.lambda_s_max_nm = detail::to_double(*e, "run.lambda_s_max_nm");
    if (auto e = take("run", "lambda_points")) c.lambda_points = static_cast<int>(detail::to_long(*e, "run.lambda_points"));

    for (const auto& [blk, m] : blocks)
        if (!m.empty()) {
            const auto& [key, e] = *m.begin();
            throw ConfigError(e.line, blk + "." + key, "unknown key");
        }

    // cross-field validation
    if (!(c.length_mm > 0)) throw ConfigError(0, "crystal.length_mm", "must be positive");
    if (!(c.theta_deg >= 0 && c.theta_deg <= 90)) throw ConfigError(0, "crystal.theta_deg", "must lie in [0, 90]");
    if (c.qpm_order % 2 == 0) throw ConfigError(0, "crystal.qpm_order", "must be odd");
    if (c.geometry == Geometry::counter_propagating && !c.poling_period_nm)
        throw ConfigError(0, "crystal.poling_period_nm", "required for counter-propagating geometry");
    if (!(c.gain > 0)) throw ConfigError(0, "pump.gain", "must be positive");
    if (c.duration_ps && !(*c.duration_ps > 0)) throw ConfigError(0, "pump.duration_ps", "must be positive");
    bool needs_tp = c.mode == RunMode::jsa || c.mode == RunMode::temporal || c.mode == RunMode::schmidt ||
                    c.mode == RunMode::spectra;
    if (needs_tp && !c.duration_ps) throw ConfigError(0, "pump.duration_ps", "required for run mode " + std::string(to_string(c.mode)));
    if (c.mode == RunMode::sweep_tp && (!c.tp_min_ps || !c.tp_max_ps) && c.tp_list.empty())
        throw ConfigError(0, "pump.tp_min_ps", "sweep-tp needs tp_min_ps and tp_max_ps, or tp_list");
    if (c.mode == RunMode::panels && c.tp_list.empty()) throw ConfigError(0, "pump.tp_list", "panels needs tp_list");
    if (c.mode == RunMode::sweep_lambda && (!c.lambda_s_min_nm || !c.lambda_s_max_nm))
        throw ConfigError(0, "run.lambda_s_min_nm", "sweep-lambda needs lambda_s_min_nm and lambda_s_max_nm");
    if (c.grid_n < 0) throw ConfigError(0, "run.grid_n", "must be non-negative");
    if (c.grid_n > 0 && !numeric::is_pow2(c.grid_n)) throw ConfigError(0, "run.grid_n", "must be a power of two (or 0 for auto)");
    if (c.workers < 1) throw ConfigError(0, "run.workers", "must be at least 1");
    if (!(c.gamma > 0)) throw ConfigError(0, "run.gamma", "must be positive");
    return c;
}

inline ScenarioConfig parse_config_text(const std::string& text) {
    std::istringstream is(text);
    return parse_config(is);
}

// Canonical text form; parse_config(emit_config(c)) reproduces c.
inline std::string emit_config(const ScenarioConfig& c) {
    std::ostringstream os;
    auto num = io::num;
    auto list = [&](const std::vector<double>& v) {
        std::string s;
        for (std::size_t k = 0; k < v.size(); ++k) s += (k ? ", " : "") + num(v[k]);
        return s;
    };
    os << "[crystal]\n";
    os << "species = " << to_string(c.species) << "\n";
    os << "length_mm = " << num(c.length_mm) << "\n";
    os << "theta_deg = " << num(c.theta_deg) << "\n";
    if (c.poling_period_nm) os << "poling_period_nm = " << num(*c.poling_period_nm) << "\n";
    os << "qpm_order = " << c.qpm_order << "\n";
    os << "geometry = " << to_string(c.geometry) << "\n";
    os << "polarization = " << c.polarization.str() << "\n";
    if (c.signal_hint_nm) os << "signal_hint_nm = " << num(*c.signal_hint_nm) << "\n";
    os << "\n[pump]\n";
    os << "wavelength_nm = " << num(c.wavelength_nm) << "\n";
    if (c.duration_ps) os << "duration_ps = " << num(*c.duration_ps) << "\n";
    os << "gain = " << num(c.gain) << "\n";
    if (c.tp_min_ps) os << "tp_min_ps = " << num(*c.tp_min_ps) << "\n";
    if (c.tp_max_ps) os << "tp_max_ps = " << num(*c.tp_max_ps) << "\n";
    os << "tp_points = " << c.tp_points << "\n";
    if (!c.tp_list.empty()) os << "tp_list = " << list(c.tp_list) << "\n";
    os << "\n[run]\n";
    os << "mode = " << to_string(c.mode) << "\n";
    os << "grid_n = " << c.grid_n << "\n";
    if (c.window_s) os << "window_s = " << num(*c.window_s) << "\n";
    if (c.window_i) os << "window_i = " << num(*c.window_i) << "\n";
    os << "gamma = " << num(c.gamma) << "\n";
    os << "jsa_mode = " << to_string(c.jsa_mode) << "\n";
    os << "output_dir = " << c.output_dir << "\n";
    os << "workers = " << c.workers << "\n";
    os << "format = " << (c.format == OutputFormat::csv ? "csv" : "bin") << "\n";
    os << "exact_subsample = " << c.exact_subsample << "\n";
    os << "check_convergence = " << (c.check_convergence ? "true" : "false") << "\n";
    if (c.lambda_s_min_nm) os << "lambda_s_min_nm = " << num(*c.lambda_s_min_nm) << "\n";
    if (c.lambda_s_max_nm) os << "lambda_s_max_nm = " << num(*c.lambda_s_max_nm) << "\n";
    os << "lambda_points = " << c.lambda_points << "\n";
    return os.str();
}

// Configuration identity for output headers. Output location and worker count
// do not change results and are left out.
inline std::string config_hash(ScenarioConfig c) {
    c.output_dir = "";
    c.workers = 1;
    return io::fnv1a_hex(emit_config(c));
}

enum class Preset { ppktp_counter, kdp_asymmetric, bbo_symmetric };

inline std::optional<Preset> parse_preset(std::string_view s) {
    if (s == "ppktp_counter") return Preset::ppktp_counter;
    if (s == "kdp_asymmetric") return Preset::kdp_asymmetric;
    if (s == "bbo_symmetric") return Preset::bbo_symmetric;
    return std::nullopt;
}

inline std::string_view to_string(Preset p) {
    switch (p) {
        case Preset::ppktp_counter: return "ppktp_counter";
        case Preset::kdp_asymmetric: return "kdp_asymmetric";
        case Preset::bbo_symmetric: return "bbo_symmetric";
    }
    return "?";
}

// The three reference configurations: 10 mm crystals, Schmidt run at the optimal duration.
inline ScenarioConfig preset(Preset p) {
    ScenarioConfig c;
    c.length_mm = 10.0;
    c.mode = RunMode::schmidt;
    c.gain = 0.01;
    switch (p) {
        case Preset::ppktp_counter:
            c.species = Species::KTP;
            c.theta_deg = 90.0;
            c.poling_period_nm = 800.0;
            c.geometry = Geometry::counter_propagating;
            c.polarization = *PolarizationScheme::parse("e-ee");
            c.wavelength_nm = 821.4;
            c.duration_ps = 4.05;
            c.tp_min_ps = 0.1;
            c.tp_max_ps = 100.0;
            break;
        case Preset::kdp_asymmetric:
            c.species = Species::KDP;
            c.theta_deg = 67.8;
            c.geometry = Geometry::co_propagating;
            c.polarization = *PolarizationScheme::parse("e-oe");
            c.wavelength_nm = 415.0;
            c.duration_ps = 0.1;
            c.tp_min_ps = 0.01;
            c.tp_max_ps = 10.0;
            break;
        case Preset::bbo_symmetric:
            c.species = Species::BBO;
            c.theta_deg = 28.8;
            c.geometry = Geometry::co_propagating;
            c.polarization = *PolarizationScheme::parse("e-oe");
            c.wavelength_nm = 757.0;
            c.duration_ps = 0.147;
            // the sinc tails of the full dispersion relation run past the Sellmeier range here
            c.jsa_mode = JsaMode::exact_sinc_linearized;
            c.tp_min_ps = 0.01;
            c.tp_max_ps = 10.0;
            break;
    }
    return c;
}

inline ScenarioConfig preset(std::string_view name) {
    auto p = parse_preset(name);
    if (!p) throw UnknownPreset(std::string(name));
    return preset(*p);
}

inline InteractionGeometry resolve_geometry(const ScenarioConfig& c) {
    SolveOptions opt;
    opt.near_signal_nm = c.signal_hint_nm;
    return solve_phase_matching(c.crystal(), c.wavelength_nm, c.geometry, c.polarization, opt);
}

}  // namespace spdc
