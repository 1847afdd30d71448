#include "app.hpp"

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "spdc/heralded.hpp"
#include "spdc/io.hpp"
#include "spdc/schmidt.hpp"
#include "spdc/sweep.hpp"
#include "spdc/temporal.hpp"

namespace spdc::app {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string sha256_hex(const std::string& bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw Error("InternalError", "SHA-256 digest failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int k = 0; k < len; ++k) {
        out += hex[md[k] >> 4];
        out += hex[md[k] & 0xf];
    }
    return out;
}

namespace {

// A module failure annotated with the stage that raised it.
class ComputeError : public Error {
public:
    ComputeError(std::string stage, const Error& cause)
        : Error("ComputeError", stage + ": " + cause.what()), stage(std::move(stage)), cause_code(cause.code()) {}
    std::string stage;
    std::string cause_code;
};

template <class F>
auto stage(const std::string& name, F&& f) {
    try {
        return f();
    } catch (const ConfigError&) {
        throw;
    } catch (const ComputeError&) {
        throw;
    } catch (const Error& e) {
        throw ComputeError(name, e);
    }
}

class Writer {
public:
    Writer(fs::path dir, bool binary_grids, std::string hash)
        : dir_(std::move(dir)), binary_(binary_grids), hash_(std::move(hash)) {}

    // Render into memory, then temp file + rename so readers never see a partial file.
    void put(const std::string& name, const std::function<void(std::ostream&)>& render) {
        std::ostringstream buf(std::ios::binary);
        render(buf);
        std::string bytes = buf.str();
        fs::path target = dir_ / name, tmp = dir_ / (name + ".tmp");
        {
            std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
            if (!f) throw Error("IOError", "cannot open " + tmp.string());
            f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
            if (!f) throw Error("IOError", "write failed for " + tmp.string());
        }
        fs::rename(tmp, target);
        artifacts_.push_back({name, bytes.size(), sha256_hex(bytes)});
    }

    void grid(const std::string& stem, const AmplitudeGrid& g, io::Content c = io::Content::amplitude) {
        if (binary_)
            put(stem + ".bin", [&](std::ostream& os) { io::write_grid_bin(os, g, c); });
        else
            put(stem + ".csv", [&](std::ostream& os) { io::write_grid_csv(os, g, hash_, c); });
    }

    void series(const std::string& stem, const Series& s, std::string_view quantity, std::string_view xn,
                std::string_view yn) {
        put(stem + ".csv", [&](std::ostream& os) { io::write_series_csv(os, s, quantity, xn, yn, hash_); });
    }

    void json_file(const std::string& name, json j) {
        j["schema"] = "spdc-" + fs::path(name).stem().string() + "/1";
        j["config_hash"] = hash_;
        put(name, [&](std::ostream& os) { os << j.dump(2) << "\n"; });
    }

    const std::string& hash() const { return hash_; }

    std::vector<Artifact> finish() {
        std::sort(artifacts_.begin(), artifacts_.end(), [](auto& a, auto& b) { return a.name < b.name; });
        json files = json::array();
        for (const auto& a : artifacts_) files.push_back({{"name", a.name}, {"bytes", a.bytes}, {"sha256", a.sha256}});
        json m;
        m["schema"] = "spdc-manifest/1";
        m["config_hash"] = hash_;
        m["files"] = files;
        auto list = artifacts_;
        put("manifest.json", [&](std::ostream& os) { os << m.dump(2) << "\n"; });
        return list;
    }

private:
    fs::path dir_;
    bool binary_;
    std::string hash_;
    std::vector<Artifact> artifacts_;
};

json wave_json(const WaveSpec& w) {
    return {{"wavelength_nm", w.wavelength_nm},
            {"polarization", w.polarization == Polarization::ordinary ? "o" : "e"}};
}

json geometry_json(const InteractionGeometry& g, const ScenarioConfig& c) {
    json j;
    j["geometry"] = std::string(to_string(g.geometry));
    j["species"] = std::string(to_string(g.crystal.species));
    j["length_mm"] = g.crystal.length_mm;
    j["theta_deg"] = g.crystal.theta_deg;
    if (g.crystal.poling_period_nm) j["poling_period_nm"] = *g.crystal.poling_period_nm;
    j["pump"] = wave_json(g.pump);
    j["signal"] = wave_json(g.signal);
    j["idler"] = wave_json(g.idler);
    j["tau_s_ps"] = g.tau_s;
    j["tau_i_ps"] = g.tau_i;
    j["eta"] = g.eta;
    j["delta_tau_ps"] = g.delta_tau;
    j["t_As_ps"] = g.t_As;
    j["t_Ai_ps"] = g.t_Ai;
    j["t_Ap_ps"] = g.t_Ap;
    j["relabeled"] = g.relabeled;
    j["tp_min_closed_form_ps"] = closed_form_tp_min(g, c.gamma);
    j["kappa_min_gaussian"] = kappa_min_gaussian(g.eta);
    return j;
}

json report_json(const SchmidtReport& r, const PumpPulse& p, const InteractionGeometry& g) {
    json j;
    j["tp_ps"] = p.duration_ps;
    j["kappa_exact"] = r.kappa_exact;
    j["kappa_nb"] = r.kappa_nb;
    j["kappa_gaussian"] = r.kappa_gaussian;
    j["purity"] = r.purity;
    j["pair_number"] = r.pair_number;
    j["fluctuation_b"] = r.fluctuation_b;
    j["mode_spectrum"] = r.mode_spectrum;
    j["grid_diagnostics"] = {{"truncation_mass", r.truncation_mass},
                             {"convergence_delta", r.convergence_delta ? json(*r.convergence_delta) : json(nullptr)}};
    auto h = timing_heuristics(g, p);
    j["timing"] = {{"dt_cond_ps", h.dt_cond}, {"dt_uncond_ps", h.dt_uncond}, {"mode_estimate", h.mode_estimate},
                   {"regime", h.regime == TimingRegime::long_pump        ? "long_pump"
                              : h.regime == TimingRegime::ultrashort_pump ? "ultrashort_pump"
                                                                          : "intermediate"}};
    return j;
}

std::vector<double> pump_durations(const ScenarioConfig& c) {
    if (!c.tp_list.empty()) return c.tp_list;
    return numeric::logspace(*c.tp_min_ps, *c.tp_max_ps, static_cast<std::size_t>(c.tp_points));
}

PumpSweepOptions sweep_options(const ScenarioConfig& c) {
    PumpSweepOptions o;
    o.grid = c.grid_spec();
    o.mode = c.jsa_mode;
    o.gamma = c.gamma;
    o.gain = c.gain;
    o.exact_subsample = static_cast<std::size_t>(c.exact_subsample);
    o.workers = c.workers;
    return o;
}

}  // namespace

std::vector<Artifact> run_scenario(const ScenarioConfig& c, const fs::path& out_dir) {
    fs::create_directories(out_dir);
    Writer w(out_dir, c.format == OutputFormat::bin, config_hash(c));
    w.put("config.ini", [&](std::ostream& os) { os << emit_config(c); });

    if (c.mode == RunMode::sweep_lambda) {
        SignalSweepSetup s{c.crystal(), c.geometry, c.polarization, c.wavelength_nm,
                           c.poling_period_nm ? DesignKnob::poling_period : DesignKnob::tuning_angle};
        auto ls = numeric::linspace(*c.lambda_s_min_nm, *c.lambda_s_max_nm, static_cast<std::size_t>(c.lambda_points));
        auto rows = stage("sweep-lambda", [&] { return sweep_signal_wavelength(s, ls, c.gamma, c.workers); });
        const char* design = s.knob == DesignKnob::poling_period ? "poling_period_nm" : "theta_deg";
        w.put("sweep_lambda.csv", [&](std::ostream& os) { io::write_signal_sweep_csv(os, rows, design, w.hash()); });
        return w.finish();
    }

    auto g = stage("phasematch", [&] { return resolve_geometry(c); });
    w.json_file("geometry.json", geometry_json(g, c));
    auto spec = c.grid_spec();

    switch (c.mode) {
        case RunMode::jsa: {
            PumpPulse p{*c.duration_ps, c.gain};
            auto grid = stage("jsa", [&] { return build_jsa(g, p, spec, c.jsa_mode, c.gamma); });
            w.grid("jsa", grid);
            break;
        }
        case RunMode::temporal: {
            PumpPulse p{*c.duration_ps, c.gain};
            auto grid = stage("jsa", [&] { return build_jsa(g, p, spec, c.jsa_mode, c.gamma); });
            auto t = stage("temporal", [&] { return to_temporal(grid); });
            w.grid("jta", t);
            w.series("coincidence", coincidence_marginal(t), "coincidence_marginal", "delta_t_ps", "g2bar");
            break;
        }
        case RunMode::schmidt: {
            PumpPulse p{*c.duration_ps, c.gain};
            AnalyzeOptions ao;
            ao.grid = spec;
            ao.mode = c.jsa_mode;
            ao.gamma = c.gamma;
            ao.check_convergence = c.check_convergence;
            auto r = stage("schmidt", [&] { return analyze(g, p, ao); });
            w.put("report.csv", [&](std::ostream& os) { io::write_report_csv(os, r, w.hash()); });
            w.json_file("report.json", report_json(r, p, g));
            Series modes;
            modes.step = 1.0;
            for (std::size_t k = 0; k < r.mode_spectrum.size(); ++k) {
                modes.x.push_back(static_cast<double>(k));
                modes.y.push_back(r.mode_spectrum[k]);
            }
            w.series("modes", modes, "schmidt_mode_spectrum", "n", "lambda_n");
            break;
        }
        case RunMode::spectra: {
            PumpPulse p{*c.duration_ps, c.gain};
            auto grid = stage("jsa", [&] { return build_jsa(g, p, spec, c.jsa_mode, c.gamma); });
            auto t = stage("temporal", [&] { return to_temporal(grid); });
            w.series("spectrum_signal", spectrum(grid, Photon::signal), "spectrum_signal", "omega_rad_per_ps", "s");
            w.series("spectrum_idler", spectrum(grid, Photon::idler), "spectrum_idler", "omega_rad_per_ps", "s");
            w.series("intensity_signal", intensity_profile(t, Photon::signal), "intensity_signal", "t_ps", "i");
            w.series("intensity_idler", intensity_profile(t, Photon::idler), "intensity_idler", "t_ps", "i");
            for (auto ph : {Photon::signal, Photon::idler}) {
                AmplitudeGrid cg;
                cg.domain = Domain::temporal;
                cg.axis_s = cg.axis_i = ph == Photon::signal ? t.axis_s : t.axis_i;
                cg.values = g1_coherence(t, ph);
                w.grid(ph == Photon::signal ? "g1_signal" : "g1_idler", cg,
                       ph == Photon::signal ? io::Content::coherence_signal : io::Content::coherence_idler);
            }
            break;
        }
        case RunMode::sweep_tp: {
            auto rows = stage("sweep-tp", [&] { return sweep_pump_duration(g, pump_durations(c), sweep_options(c)); });
            w.put("sweep_tp.csv", [&](std::ostream& os) { io::write_pump_sweep_csv(os, rows, w.hash()); });
            break;
        }
        case RunMode::panels: {
            auto panels = stage("panels", [&] { return panel_study(g, c.tp_list, sweep_options(c)); });
            w.put("panels.csv", [&](std::ostream& os) {
                os << "# schema: spdc-panels/1\n# config_hash: " << w.hash() << "\n";
                os << "index,tp_ps,c_ss,c_ii,c_si,semi_major,semi_minor,angle_rad,kappa_gaussian,kappa_exact,error\n";
                for (std::size_t k = 0; k < panels.size(); ++k) {
                    const auto& p = panels[k];
                    os << k << ',' << io::num(p.tp) << ',' << io::num(p.gaussian.c_ss) << ',' << io::num(p.gaussian.c_ii)
                       << ',' << io::num(p.gaussian.c_si) << ',' << io::num(p.ellipse.semi_major) << ','
                       << io::num(p.ellipse.semi_minor) << ',' << io::num(p.ellipse.angle_rad) << ','
                       << io::num(p.kappa_gaussian) << ',' << io::num(p.kappa_exact) << ',' << p.error << "\n";
                }
            });
            for (std::size_t k = 0; k < panels.size(); ++k) {
                if (!panels[k].error.empty()) continue;
                w.grid("panel_" + std::to_string(k) + "_jsa", panels[k].spectral);
                w.grid("panel_" + std::to_string(k) + "_jta", panels[k].temporal);
            }
            break;
        }
        case RunMode::sweep_lambda: break;
    }
    return w.finish();
}

namespace {

json error_record(const Error& e) {
    json j;
    j["error"] = e.code();
    j["message"] = e.what();
    if (auto* ce = dynamic_cast<const ConfigError*>(&e)) {
        j["line"] = ce->line;
        j["field"] = ce->field;
    }
    if (auto* ce = dynamic_cast<const ComputeError*>(&e)) {
        j["stage"] = ce->stage;
        j["cause"] = ce->cause_code;
    }
    return j;
}

int exit_code(const Error& e) {
    if (e.code() == "ConfigError" || e.code() == "UnknownPreset") return 2;
    if (e.code() == "ComputeError") return 3;
    return 4;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError(0, path, "cannot open config file");
    return parse_config(f);
}

struct Overrides {
    std::string out;
    long grid_n = -1;
    double gamma = 0.0;
    int workers = 0;
    std::string format;

    ScenarioConfig apply(ScenarioConfig c) const {
        if (grid_n >= 0) c.grid_n = grid_n;
        if (gamma > 0) c.gamma = gamma;
        if (workers > 0) c.workers = workers;
        if (format == "csv") c.format = OutputFormat::csv;
        if (format == "bin") c.format = OutputFormat::bin;
        // re-run validation on the merged result
        return parse_config_text(emit_config(c));
    }
};

}  // namespace

int main(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App cli{"Pulsed parametric down-conversion: joint amplitudes, Schmidt numbers and sweeps.", "spdc"};
    cli.require_subcommand(1);
    Overrides ov;
    auto add_overrides = [&](CLI::App* sub) {
        sub->add_option("--out", ov.out, "Output directory (default: run.output_dir)");
        sub->add_option("--grid-n", ov.grid_n, "Samples per grid axis, a power of two; 0 sizes the grid automatically")
            ->check(CLI::NonNegativeNumber);
        sub->add_option("--gamma", ov.gamma, "Gaussian sinc-replacement constant (0.193 FWHM match, 1/6 moment match)")
            ->check(CLI::PositiveNumber);
        sub->add_option("--workers", ov.workers, "Concurrent sweep points")->check(CLI::PositiveNumber);
        sub->add_option("--format", ov.format, "Grid output format")->check(CLI::IsMember({"csv", "bin"}));
    };

    std::string config_path, preset_name, echo_path;
    bool emit = false;
    auto* run = cli.add_subcommand("run", "Run the scenario described by a config file");
    run->add_option("config", config_path, "Scenario config file")->required();
    add_overrides(run);
    auto* pre = cli.add_subcommand("preset", "Run (or print) one of the built-in reference scenarios");
    pre->add_option("name", preset_name, "ppktp_counter | kdp_asymmetric | bbo_symmetric")->required();
    pre->add_flag("--emit-config", emit, "Print the preset as a config file instead of running it");
    add_overrides(pre);
    auto* echo = cli.add_subcommand("echo-config", "Parse a config file and print its canonical form");
    echo->add_option("config", echo_path, "Scenario config file")->required();

    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return cli.exit(e, out, err);
    }

    fs::path out_dir = ov.out;
    try {
        ScenarioConfig cfg;
        if (echo->parsed()) {
            out << emit_config(load_config(echo_path));
            return 0;
        }
        if (pre->parsed()) {
            cfg = preset(preset_name);
            if (emit) {
                out << emit_config(ov.apply(cfg));
                return 0;
            }
        } else {
            cfg = load_config(config_path);
        }
        cfg = ov.apply(cfg);
        out_dir = ov.out.empty() ? fs::path(cfg.output_dir) : fs::path(ov.out);
        auto files = run_scenario(cfg, out_dir);
        for (const auto& a : files) out << (out_dir / a.name).string() << "\n";
        out << (out_dir / "manifest.json").string() << "\n";
        return 0;
    } catch (const Error& e) {
        auto rec = error_record(e);
        err << rec.dump() << "\n";
        if (!out_dir.empty()) {
            std::error_code ec;
            fs::create_directories(out_dir, ec);
            std::ofstream f(out_dir / "error.json");
            if (f) f << rec.dump(2) << "\n";
        }
        return exit_code(e);
    } catch (const std::exception& e) {
        json rec{{"error", "InternalError"}, {"message", e.what()}};
        err << rec.dump() << "\n";
        return 1;
    }
}

}  // namespace spdc::app
