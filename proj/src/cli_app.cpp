#include "qnf/cli_app.hpp"

#include "qnf/optimize.hpp"
#include "qnf/presets.hpp"
#include "qnf/ratfit.hpp"
#include "qnf/version.hpp"
#include "qnf/zpk_io.hpp"

#include "CLI11.hpp"

#include <cctype>
#include <chrono>
#include <clocale>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

namespace qnf {

namespace {

using nlohmann::json;
using steady_clock = std::chrono::steady_clock;

constexpr double two_pi = 2.0 * std::numbers::pi;

struct common_options {
    std::string config_path;
    std::string out_dir = ".";
    std::string delay = "exact";
    std::string losses = "on";
};

struct sweep_options : common_options {
    std::vector<std::string> gains;
    std::string preset;
    std::string band; // "LO:HI" in Hz
    int grid = 600;
    std::string homodyne = "per-frequency";
};

struct nyquist_options : common_options {
    std::string gain;
    double omega_max = 0.0; // rad/s, 0 = automatic
};

struct optimize_options_cli : common_options {
    std::string seed = "vectfit:3";
    int poles = 3;
    int iterations = 5000;
};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

delay_mode parse_delay(const std::string& s) {
    if (s == "exact") return delay_mode::exact;
    if (s == "second-order") return delay_mode::second_order;
    throw input_error("unknown delay mode \"" + s + "\"; use exact or second-order");
}

bool parse_losses(const std::string& s) {
    if (s == "on") return true;
    if (s == "off") return false;
    throw input_error("unknown losses switch \"" + s + "\"; use on or off");
}

interferometer_config resolve_config(const common_options& opt) {
    interferometer_config c;
    if (!opt.config_path.empty()) c = load_config(opt.config_path);
    else validate(c);
    if (!parse_losses(opt.losses)) {
        c.Lambda_o = 0.0;
        c.Lambda_f = 0.0;
        c.Lambda_s = 0.0;
    }
    return c;
}

std::pair<double, double> parse_band_hz(const std::string& s, double tau_s) {
    if (s.empty()) return {1e-2, 1.0 / (4.0 * tau_s)};
    const auto colon = s.find(':');
    if (colon == std::string::npos)
        throw input_error("band must be LO:HI in Hz, got \"" + s + "\"");
    double lo = 0.0, hi = 0.0;
    try {
        size_t used = 0;
        lo = std::stod(s.substr(0, colon), &used);
        if (used != colon) throw std::invalid_argument("");
        const std::string rest = s.substr(colon + 1);
        hi = std::stod(rest, &used);
        if (used != rest.size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
        throw input_error("band must be LO:HI in Hz, got \"" + s + "\"");
    }
    if (!(lo > 0.0) || !(hi > lo))
        throw input_error("band requires 0 < LO < HI, got \"" + s + "\"");
    return {lo, hi};
}

std::vector<double> split_numbers(const std::string& s, const std::string& what) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument("");
        } catch (const std::exception&) {
            throw input_error("cannot parse number \"" + item + "\" in " + what);
        }
    }
    return out;
}

gain_model parse_gain(const std::string& spec, const derived_rates& rates) {
    if (spec == "unity") return gain_unity{};
    if (spec == "optimal") return gain_optimal{};
    const auto colon = spec.find(':');
    const std::string head = spec.substr(0, colon);
    const std::string tail = colon == std::string::npos ? "" : spec.substr(colon + 1);
    if (head == "detuned") {
        const auto v = split_numbers(tail, "detuned gain spec");
        if (v.size() != 1)
            throw input_error("detuned gain needs one phase: detuned:<phi_rad>");
        return gain_detuned{v[0]};
    }
    if (head == "pt") {
        gain_pt_symmetric pt;
        if (!tail.empty()) {
            const auto v = split_numbers(tail, "pt gain spec");
            if (v.size() < 2 || v.size() > 3)
                throw input_error("pt gain spec is pt:<f_m_hz>,<Q_m>[,<g_rad_s>]");
            pt.f_m = v[0];
            pt.Q_m = v[1];
            if (v.size() == 3) pt.g = v[2];
        }
        if (!(pt.f_m > 0.0) || !(pt.Q_m > 0.0))
            throw input_error("pt gain requires f_m > 0 and Q_m > 0");
        if (pt.g == 0.0) pt.g = pt_condition_coupling(rates);
        return pt;
    }
    if (head == "zpk") {
        if (tail.empty()) throw input_error("zpk gain spec is zpk:<path>");
        return gain_rational{load_zpk(tail)};
    }
    if (head == "table1") {
        if (tail == "l2") return gain_rational{table1_lossless_2()};
        if (tail == "l3") return gain_rational{table1_lossless_3()};
        if (tail == "y2") return gain_rational{table1_lossy_2()};
        if (tail == "y3") return gain_rational{table1_lossy_3()};
        throw input_error("table1 gain spec is table1:<l2|l3|y2|y3>");
    }
    throw input_error("unknown gain spec \"" + spec +
                      "\"; use unity, detuned:<phi>, optimal, pt:<fm>,<Qm>[,<g>], "
                      "zpk:<path>, or table1:<row>");
}

std::string sanitize(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char ch : s)
        out.push_back(std::isalnum(static_cast<unsigned char>(ch)) ? ch : '_');
    return out;
}

std::filesystem::path prepare_out_dir(const std::string& dir) {
    std::filesystem::path p(dir.empty() ? "." : dir);
    std::filesystem::create_directories(p);
    return p;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw input_error("cannot write " + path.string());
    out << text;
}

void write_json(const std::filesystem::path& path, const json& j) {
    write_text(path, j.dump(2) + "\n");
}

void write_manifest(const std::filesystem::path& out_dir, const std::string& command,
                    const common_options& opt, const interferometer_config& config,
                    json options, const std::vector<std::string>& outputs,
                    steady_clock::time_point t0) {
    json j;
    j["command"] = command;
    j["config_path"] = opt.config_path.empty() ? "(default)" : opt.config_path;
    j["config"] = config_to_json(config);
    options["delay"] = opt.delay;
    options["losses"] = opt.losses;
    options["out"] = opt.out_dir;
    j["options"] = std::move(options);
    j["outputs"] = outputs;
    j["tool_version"] = tool_version;
    const double dt = std::chrono::duration<double>(steady_clock::now() - t0).count();
    j["wall_time_s"] = std::round(dt * 1000.0) / 1000.0;
    write_json(out_dir / (command + "_manifest.json"), j);
}

json verdict_json(const nyquist_report& rep) {
    json j;
    j["N"] = rep.N;
    j["P"] = rep.P;
    j["Z"] = rep.Z;
    j["rho_min"] = rep.rho_min;
    j["stable"] = rep.stable;
    return j;
}

int cmd_sweep(const sweep_options& opt) {
    const auto t0 = steady_clock::now();
    if (opt.preset.empty() && opt.gains.empty())
        throw input_error("sweep needs at least one --gain spec or a --preset; "
                          "see qnf sweep --help");
    if (!opt.preset.empty() && !opt.gains.empty())
        throw input_error("--preset and --gain are mutually exclusive");
    if (!opt.preset.empty() && !opt.config_path.empty())
        throw input_error("--preset carries its own configs; drop --config");
    if (opt.grid < 2) throw input_error("--grid must be at least 2");

    const delay_mode mode = parse_delay(opt.delay);
    const bool losses_on = parse_losses(opt.losses);

    std::vector<preset_curve> curves;
    interferometer_config manifest_config; // reference unless --config overrides
    if (!opt.preset.empty()) {
        curves = preset_curves(opt.preset);
        for (preset_curve& c : curves) {
            if (!losses_on) {
                c.config.Lambda_o = 0.0;
                c.config.Lambda_f = 0.0;
                c.config.Lambda_s = 0.0;
            }
            validate(c.config);
        }
    } else {
        manifest_config = resolve_config(opt);
        const derived_rates rates = derive_rates(manifest_config);
        int index = 0;
        for (const std::string& spec : opt.gains) {
            preset_curve c;
            c.label = "curve" + std::to_string(++index) + "_" + sanitize(spec);
            c.config = manifest_config;
            c.gain = parse_gain(spec, rates);
            curves.push_back(std::move(c));
        }
    }

    const auto out_dir = prepare_out_dir(opt.out_dir);
    std::vector<std::string> outputs;
    const std::string stem_prefix = opt.preset.empty() ? "sweep_" : opt.preset + "_";

    for (const preset_curve& curve : curves) {
        const derived_rates rates = derive_rates(curve.config);
        const auto [lo_hz, hi_hz] = parse_band_hz(opt.band, rates.tau_s);

        double phi_global = 0.0;
        if (!curve.is_approx && opt.homodyne == "global") {
            const frequency_band band{two_pi * lo_hz, two_pi * hi_hz};
            phi_global = integral_enhancement(curve.config, rates, curve.gain,
                                              homodyne_choice::global_optimal(), band,
                                              mode)
                             .phi_lo;
        } else if (!curve.is_approx && opt.homodyne != "per-frequency") {
            throw input_error("unknown homodyne mode \"" + opt.homodyne +
                              "\"; use global or per-frequency");
        }

        std::string csv = "frequency_hz,chi_db,phi_lo_rad\n";
        for (int i = 0; i < opt.grid; ++i) {
            const double f = lo_hz * std::pow(hi_hz / lo_hz,
                                              static_cast<double>(i) / (opt.grid - 1));
            const double omega = two_pi * f;
            double chi_db = 0.0, phi = 0.0;
            if (curve.is_approx) {
                chi_db = 20.0 * std::log10(chi_approx(curve.approx, rates, omega));
            } else if (opt.homodyne == "global") {
                phi = phi_global;
                chi_db = 10.0 * std::log10(
                    chi_sq_at(curve.config, rates, curve.gain, omega, phi, mode).chi_sq);
            } else {
                const auto [phi_star, chi_sq] =
                    optimal_homodyne_at(curve.config, rates, curve.gain, omega, mode);
                phi = phi_star;
                chi_db = 10.0 * std::log10(chi_sq);
            }
            csv += fmt(f) + "," + fmt(chi_db) + "," + fmt(phi) + "\n";
        }
        const auto path = out_dir / (stem_prefix + curve.label + ".csv");
        write_text(path, csv);
        outputs.push_back(path.string());

        if (curve.export_zpk) {
            const auto* rational = std::get_if<gain_rational>(&curve.gain);
            if (rational) {
                const auto zpath = out_dir / (stem_prefix + curve.label + "_zpk.json");
                write_json(zpath, zpk_to_json(rational->model, "hz"));
                outputs.push_back(zpath.string());
            }
        }
    }

    json options;
    options["preset"] = opt.preset;
    options["gains"] = opt.gains;
    options["band"] = opt.band.empty() ? "(default)" : opt.band;
    options["grid"] = opt.grid;
    options["homodyne"] = opt.homodyne;
    write_manifest(out_dir, "sweep", opt, manifest_config, std::move(options), outputs, t0);
    return 0;
}

int cmd_limits(const common_options& opt) {
    const auto t0 = steady_clock::now();
    const interferometer_config config = resolve_config(opt);
    const derived_rates r = derive_rates(config);

    json j;
    j["gamma_s_rad_s"] = r.gamma_s;
    j["gamma_s_hz"] = r.gamma_s / two_pi;
    j["gamma_f_rad_s"] = r.gamma_f;
    j["gamma_f_hz"] = r.gamma_f / two_pi;
    j["omega_nb_rad_s"] = r.gamma_s * r.t_IM * r.t_IM / 4.0;
    j["omega_bb_rad_s"] = 4.0 * r.gamma_s / (r.t_IM * r.t_IM);
    j["X_nb"] = 4.0 * std::numbers::sqrt2 / (r.t_IM * r.t_CM);
    j["X_bb"] = std::numbers::sqrt2 * r.t_IM / r.t_CM;
    j["I0_rad_s"] = std::numbers::pi / r.tau_s;
    j["I_opt_over_I0"] = 4.0 / (r.t_IM * r.t_IM);
    j["I_PT_over_I0"] = 1.0 / r.t_IM;

    const auto out_dir = prepare_out_dir(opt.out_dir);
    const auto path = out_dir / "limits.json";
    write_json(path, j);
    write_manifest(out_dir, "limits", opt, config, json::object(), {path.string()}, t0);
    return 0;
}

int cmd_nyquist(const nyquist_options& opt) {
    const auto t0 = steady_clock::now();
    if (opt.gain.empty()) throw input_error("nyquist needs a --gain spec");
    const interferometer_config config = resolve_config(opt);
    const derived_rates rates = derive_rates(config);
    const delay_mode mode = parse_delay(opt.delay);
    const gain_model gain = parse_gain(opt.gain, rates);

    contour_spec spec;
    spec.omega_max = opt.omega_max;
    spec.keep_contour = true;
    const nyquist_report rep = nyquist(config, rates, gain, spec, mode);

    std::string csv = "omega_rad_s,re,im\n";
    for (const auto& [omega, value] : rep.contour)
        csv += fmt(omega) + "," + fmt(value.real()) + "," + fmt(value.imag()) + "\n";

    const auto out_dir = prepare_out_dir(opt.out_dir);
    const auto csv_path = out_dir / "nyquist.csv";
    const auto verdict_path = out_dir / "nyquist_verdict.json";
    write_text(csv_path, csv);
    write_json(verdict_path, verdict_json(rep));

    json options;
    options["gain"] = opt.gain;
    options["omega_max"] = opt.omega_max;
    write_manifest(out_dir, "nyquist", opt, config, std::move(options),
                   {csv_path.string(), verdict_path.string()}, t0);
    return 0;
}

int cmd_optimize(const optimize_options_cli& opt) {
    const auto t0 = steady_clock::now();
    const interferometer_config config = resolve_config(opt);
    const derived_rates rates = derive_rates(config);
    if (opt.iterations < 1) throw input_error("--iterations must be positive");
    if (opt.poles < 1) throw input_error("--poles must be positive");

    const auto colon = opt.seed.find(':');
    const std::string head = opt.seed.substr(0, colon);
    const std::string tail = colon == std::string::npos ? "" : opt.seed.substr(colon + 1);

    zpk seed;
    json seed_echo;
    seed_echo["spec"] = opt.seed;
    if (head == "pt") {
        gain_pt_symmetric pt;
        if (!tail.empty()) {
            const auto v = split_numbers(tail, "pt seed spec");
            if (v.size() < 2 || v.size() > 3)
                throw input_error("pt seed spec is pt[:<f_m_hz>,<Q_m>[,<g_rad_s>]]");
            pt.f_m = v[0];
            pt.Q_m = v[1];
            if (v.size() == 3) pt.g = v[2];
        }
        if (!(pt.f_m > 0.0) || !(pt.Q_m > 0.0))
            throw input_error("pt seed requires f_m > 0 and Q_m > 0");
        if (pt.g == 0.0) pt.g = pt_condition_coupling(rates);
        seed = pt_to_zpk(pt.f_m, pt.Q_m, pt.g, rates.tau_f);
    } else if (head == "vectfit") {
        int n_poles = opt.poles;
        if (!tail.empty()) {
            try {
                size_t used = 0;
                n_poles = std::stoi(tail, &used);
                if (used != tail.size()) throw std::invalid_argument("");
            } catch (const std::exception&) {
                throw input_error("vectfit seed spec is vectfit:<n_poles>");
            }
        }
        if (n_poles < 1) throw input_error("vectfit seed needs at least one pole");
        const fit_result fit = seed_from_gopt(config, rates, n_poles);
        seed = fit.model;
        seed_echo["fit_max_rel_err"] = fit.max_rel_err;
        seed_echo["conjugate_repaired"] = fit.conjugate_repaired;
    } else if (head == "zpk") {
        if (tail.empty()) throw input_error("zpk seed spec is zpk:<path>");
        seed = load_zpk(tail);
    } else {
        throw input_error("unknown seed spec \"" + opt.seed +
                          "\"; use pt, vectfit:<n>, or zpk:<path>");
    }
    seed_echo["zpk"] = zpk_to_json(seed, "hz");

    optimize_options options;
    options.max_iterations = opt.iterations;
    options.mode = parse_delay(opt.delay);
    const optimization_result res = optimize_filter(config, rates, seed, options);

    json j;
    j["seed"] = std::move(seed_echo);
    j["zpk"] = zpk_to_json(res.model, "hz");
    j["phi_lo_rad"] = res.best.phi_lo;
    j["normalized_I"] = res.best.normalized_integral;
    j["normalized_I_db"] = 10.0 * std::log10(res.best.normalized_integral);
    j["cost"] = res.best.total;
    j["penalties"] = {{"n_unstable_gain", res.best.n_unstable_gain},
                      {"n_unstable_closed", res.best.n_unstable_closed},
                      {"rho_penalty", res.best.rho_penalty}};
    j["verdict"] = verdict_json(res.verdict);
    j["iterations"] = res.iterations;
    j["evaluations"] = res.evaluations;
    j["segments"] = res.segments;
    j["converged"] = res.converged;
    j["seed_feasible"] = res.seed_feasible;
    j["trace"] = json::array();
    for (const auto& [it, cost] : res.trace) j["trace"].push_back({it, cost});

    const auto out_dir = prepare_out_dir(opt.out_dir);
    const auto path = out_dir / "optimize_result.json";
    write_json(path, j);

    json options_echo;
    options_echo["seed"] = opt.seed;
    options_echo["poles"] = opt.poles;
    options_echo["iterations"] = opt.iterations;
    write_manifest(out_dir, "optimize", opt, config, std::move(options_echo),
                   {path.string()}, t0);

    if (!res.seed_feasible) {
        std::cerr << "optimize: seed violates the feasibility check (cost "
                  << fmt(res.best.total) << " is not below the penalty scale "
                  << fmt(options.weight) << "); closed loop unstable or margins lost\n";
        return 4;
    }
    return 0;
}

void add_common(CLI::App* cmd, common_options& opt) {
    cmd->add_option("--config", opt.config_path, "config JSON path (default: built-in reference)");
    cmd->add_option("--out", opt.out_dir, "output directory")->capture_default_str();
    cmd->add_option("--delay", opt.delay, "delay model: exact | second-order")
        ->capture_default_str();
    cmd->add_option("--losses", opt.losses, "apply config losses: on | off")
        ->capture_default_str();
}

} // namespace

int run_cli(const std::vector<std::string>& args) {
    std::setlocale(LC_ALL, "C");

    CLI::App app{"optically trapped interferometer response, stability, and filter design"};
    app.require_subcommand(0, 1);

    sweep_options sweep_opt;
    auto* sweep = app.add_subcommand("sweep", "write frequency-response curves as CSV");
    add_common(sweep, sweep_opt);
    sweep->add_option("--gain", sweep_opt.gains,
                      "gain spec: unity | detuned:<phi> | optimal | "
                      "pt:<fm>,<Qm>[,<g>] | zpk:<path> | table1:<row>");
    sweep->add_option("--preset", sweep_opt.preset,
                      "curve bundle: fig2 | fig3 | fig4 | fig5 | fig7 | table1");
    sweep->add_option("--band", sweep_opt.band, "sweep band LO:HI in Hz");
    sweep->add_option("--grid", sweep_opt.grid, "points per curve")->capture_default_str();
    sweep->add_option("--homodyne", sweep_opt.homodyne,
                      "readout angle rule: global | per-frequency")
        ->capture_default_str();

    common_options limits_opt;
    auto* limits = app.add_subcommand("limits", "write closed-form scales and bounds as JSON");
    add_common(limits, limits_opt);

    nyquist_options nyquist_opt;
    auto* nyq = app.add_subcommand("nyquist", "write the stability contour and verdict");
    add_common(nyq, nyquist_opt);
    nyq->add_option("--gain", nyquist_opt.gain, "gain spec (same grammar as sweep)");
    nyq->add_option("--omega-max", nyquist_opt.omega_max,
                    "axis truncation in rad/s (0 = two free spectral ranges)")
        ->capture_default_str();

    optimize_options_cli optimize_opt;
    auto* optimize = app.add_subcommand("optimize", "run the filter optimization from a seed");
    add_common(optimize, optimize_opt);
    optimize->add_option("--seed", optimize_opt.seed,
                         "seed spec: pt[:<fm>,<Qm>[,<g>]] | vectfit[:<n>] | zpk:<path>")
        ->capture_default_str();
    optimize->add_option("--poles", optimize_opt.poles,
                         "pole count for vectfit seeds without :<n>")
        ->capture_default_str();
    optimize->add_option("--iterations", optimize_opt.iterations,
                         "cumulative simplex iteration budget")
        ->capture_default_str();

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("qnf");
    for (const std::string& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "qnf: " << e.what() << "\n";
        return 2;
    }

    try {
        if (*sweep) return cmd_sweep(sweep_opt);
        if (*limits) return cmd_limits(limits_opt);
        if (*nyq) return cmd_nyquist(nyquist_opt);
        if (*optimize) return cmd_optimize(optimize_opt);
        std::cerr << app.help();
        return 2;
    } catch (const input_error& e) {
        std::cerr << "qnf: " << e.what() << "\n";
        return 2;
    } catch (const singular_evaluation& e) {
        std::cerr << "qnf: singular evaluation: " << e.what() << "\n";
        return 3;
    } catch (const indeterminate_verdict& e) {
        std::cerr << "qnf: " << e.what() << "\n";
        return 3;
    } catch (const ill_posed_fit& e) {
        std::cerr << "qnf: ill-posed fit: " << e.what() << "\n";
        return 3;
    }
}

} // namespace qnf
