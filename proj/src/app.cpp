#include "pbglaser/app.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <thread>

#include "pbglaser/checks.hpp"
#include "pbglaser/errors.hpp"

namespace pbglaser {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Runs f(i) for i in [0, n) on at most `threads` workers.
template <class F>
void parallel_for(std::size_t n, std::size_t threads, F&& f) {
    threads = std::max<std::size_t>(1, std::min(threads, n));
    if (threads == 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) f(i);
        });
    }
    for (auto& th : pool) th.join();
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DomainError("cannot write output file '" + path + "'");
    return out;
}

// Writes through `body` to `path`, or to standard output when it is empty.
template <class Body>
void emit(const std::string& path, Body&& body) {
    if (path.empty()) {
        body(std::cout);
        std::cout.flush();
        return;
    }
    std::ofstream out = open_output(path);
    body(out);
    if (!out) throw DomainError("failed writing '" + path + "'");
}

std::string with_suffix(const std::string& path, const std::string& suffix) {
    std::filesystem::path p(path);
    return (p.parent_path() / (p.stem().string() + suffix)).string();
}

json rates_json(const DressedRates& r) {
    json j = {{"cos2phi", r.cos2phi},
              {"gamma0", r.gamma0},
              {"gamma_plus", r.gamma_plus},
              {"gamma_minus", r.gamma_minus},
              {"g1", r.g1}};
    if (r.omega2) j["omega2"] = *r.omega2;
    return j;
}

json assumptions_json() {
    return {{"secular_approximation", true},
            {"coherence_dephasing_weight", kCoherenceDephasingWeight},
            {"no_gap_reading", "gamma_minus = gamma * sin^4(phi) with u_minus = 1"},
            {"band_edge", "ideal step"},
            {"rate_units", "gamma"}};
}

json solver_json(const SolverSettings& s) {
    return {{"N_override", s.n_override ? json(*s.n_override) : json(nullptr)},
            {"tail_tol", s.tail_tol},
            {"rel_tol", s.rel_tol}};
}

json metadata_json(const RunConfig& c) {
    return {{"library_version", kVersion},
            {"mode", to_string(c.mode)},
            {"gamma", c.params.gamma},
            {"parameters", params_to_json(c.params)},
            {"solver", solver_json(c.solver)},
            {"assumptions", assumptions_json()}};
}

std::string optional_real(const std::optional<double>& v) { return v ? format_real(*v) : std::string(); }

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

void write_text(const std::string& path, const std::string& text, std::ostream& log) {
    std::ofstream out = open_output(path);
    out << text;
    log << "wrote " << path << '\n';
}

}  // namespace

std::string format_real(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

PointSolution solve_point(const DressedRates& rates, double kappa, const SolverSettings& solver) {
    PointSolution out;
    if (solver.n_override) {
        LadderOptions opts;
        opts.tail_tol = solver.tail_tol;
        out.ladder = steady_state(rates, kappa, *solver.n_override, opts);
        out.residual = steady_state_residual(rates, kappa, out.ladder);
    } else {
        AdaptiveSolution s = solve_adaptive(rates, kappa, solver.tail_tol);
        out.ladder = std::move(s.ladder);
        out.residual = s.residual;
    }
    out.obs = observables(out.ladder);
    return out;
}

std::vector<SweepRecord> compute_sweep(const std::vector<SystemParams>& points, const SolverSettings& solver,
                                       std::size_t threads) {
    std::vector<SweepRecord> records(points.size());
    parallel_for(points.size(), threads, [&](std::size_t i) {
        const auto t0 = Clock::now();
        SweepRecord& r = records[i];
        const SystemParams& p = points[i];
        r.gap_config_label = gap_label(p.gap);
        try {
            const DressedRates rates = dressed_rates(p);
            r.cos4phi = rates.cos4phi();
            if (const auto* pump = std::get_if<PumpDrive>(&p.drive)) r.cos4phi = pump->cos4phi;
            r.gamma_plus = rates.gamma_plus / p.gamma;
            r.gamma_minus = rates.gamma_minus / p.gamma;
            r.gamma0 = rates.gamma0 / p.gamma;
            r.g1 = rates.g1 / p.gamma;
            PointSolution s = solve_point(rates, p.kappa, solver);
            r.mean_n = s.obs.mean_n;
            r.q_mandel = s.obs.q_mandel;
            r.n_used = s.ladder.n_max();
            r.residual = s.residual;
        } catch (const std::exception& e) {
            r.error = e.what();
            if (r.error.empty()) r.error = "unknown failure";
        }
        r.seconds = seconds_since(t0);
    });
    return records;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& records) {
    out << "cos4phi,gamma_plus,gamma_minus,gamma0,g1,mean_n,q_mandel,N_used,residual,gap_config_label,status\n";
    for (const auto& r : records) {
        out << format_real(r.cos4phi) << ',' << format_real(r.gamma_plus) << ',' << format_real(r.gamma_minus)
            << ',' << format_real(r.gamma0) << ',' << format_real(r.g1) << ',';
        if (r.ok()) {
            out << format_real(r.mean_n) << ',' << optional_real(r.q_mandel) << ',' << r.n_used << ','
                << format_real(r.residual);
        } else {
            out << ",,,";
        }
        out << ',' << r.gap_config_label << ',' << (r.ok() ? "ok" : "failed") << '\n';
    }
}

json sweep_records_json(const std::vector<SweepRecord>& records, bool with_timing) {
    json arr = json::array();
    for (const auto& r : records) {
        json j = {{"cos4phi", r.cos4phi},
                  {"gamma_plus", r.gamma_plus},
                  {"gamma_minus", r.gamma_minus},
                  {"gamma0", r.gamma0},
                  {"g1", r.g1},
                  {"gap_config_label", r.gap_config_label},
                  {"status", r.ok() ? "ok" : "failed"}};
        if (r.ok()) {
            j["mean_n"] = r.mean_n;
            j["q_mandel"] = optional_json(r.q_mandel);
            j["N_used"] = r.n_used;
            j["residual"] = r.residual;
        } else {
            j["error"] = r.error;
        }
        if (with_timing) j["seconds"] = r.seconds;
        arr.push_back(std::move(j));
    }
    return arr;
}

double default_tau_step(const DressedRates& rates, double mean_n, double omega_absmax) {
    const double rabi = 2.0 * rates.g1 * std::sqrt(std::max(mean_n, 0.0) + 1.0);
    const double fastest = std::max({rabi, rates.g1, omega_absmax, 1e-6});
    return 2.0 * std::numbers::pi / (16.0 * fastest);
}

std::vector<std::pair<std::string, SystemParams>> expand_panels(const RunConfig& config) {
    std::vector<std::pair<std::string, SystemParams>> out;
    if (config.spectrum.panels.empty()) {
        out.emplace_back("spectrum", config.params);
        return out;
    }
    const auto* laser = std::get_if<LaserDrive>(&config.params.drive);
    for (const auto& panel : config.spectrum.panels) {
        SystemParams p = config.params;
        LaserDrive d = laser ? *laser : LaserDrive{};
        if (panel.delta_a) d.delta_a = *panel.delta_a;
        p.drive = d;
        std::string label = panel.label;
        if (label.empty()) label = "delta_a=" + format_real(d.delta_a);
        out.emplace_back(label, p);
    }
    return out;
}

PanelResult compute_panel(const SystemParams& params, const SpectrumSettings& settings, const SpectrumPanel& panel,
                          const SolverSettings& solver, double g1_max) {
    const auto t0 = Clock::now();
    params.validate();
    PanelResult out;
    out.label = panel.label;
    out.params = params;
    out.rates = dressed_rates(params);
    const double kappa = params.kappa;

    out.n_used = solver.n_override ? *solver.n_override : choose_truncation(out.rates, kappa, solver.tail_tol);
    const Liouvillian l(out.rates, kappa, out.n_used);
    const DensityMatrix rho = steady_state_density(l);
    const std::vector<double> p = photon_distribution(rho, l.space());
    for (std::size_t n = 0; n < p.size(); ++n) out.mean_n += static_cast<double>(n) * p[n];

    const double doublet_half = 1.5 * std::max(g1_max, out.rates.g1);
    const double zoom_half = 20.0 * kappa;
    double absmax = 0.0;
    switch (settings.grid) {
        case OmegaGrid::automatic:
        case OmegaGrid::doublet: absmax = doublet_half; break;
        case OmegaGrid::zoom: absmax = zoom_half; break;
        case OmegaGrid::manual: absmax = std::max(std::abs(settings.omega_lo), std::abs(settings.omega_hi)); break;
    }
    out.tau_step = settings.tau_step ? *settings.tau_step : default_tau_step(out.rates, out.mean_n, absmax);
    out.horizon = panel.horizon ? *panel.horizon : settings.horizon;

    const std::vector<double> tau = uniform_tau_grid(out.tau_step, out.horizon);
    out.correlation = correlation(l, rho, tau);
    const Correlation& corr = out.correlation;
    out.horizon_ratio = corr.horizon_ratio;

    SpectrumOptions sopts;
    sopts.allow_undecayed = settings.allow_undecayed;
    auto on_grid = [&](double lo, double hi) {
        const std::vector<double> omega = uniform_grid(lo, hi, settings.omega_points);
        return spectrum(corr.g, corr.tau, omega, sopts);
    };
    switch (settings.grid) {
        case OmegaGrid::doublet:
            out.grid = "doublet";
            out.spectrum = on_grid(-doublet_half, doublet_half);
            break;
        case OmegaGrid::zoom:
            out.grid = "zoom";
            out.spectrum = on_grid(-zoom_half, zoom_half);
            break;
        case OmegaGrid::manual:
            out.grid = "manual";
            out.spectrum = on_grid(settings.omega_lo, settings.omega_hi);
            break;
        case OmegaGrid::automatic:
            out.grid = "doublet";
            out.spectrum = on_grid(-doublet_half, doublet_half);
            // A single line is resolved on the narrow grid around it.
            if (out.spectrum.peaks.size() == 1 && std::abs(out.spectrum.peaks[0].position) < zoom_half) {
                out.grid = "zoom";
                out.spectrum = on_grid(-zoom_half, zoom_half);
            }
            break;
    }
    out.seconds = seconds_since(t0);
    return out;
}

std::string sweep_plot_script(const std::string& csv_path) {
    std::ostringstream s;
    s << "#!/usr/bin/env python3\n"
         "# Mean photon number and Mandel Q against the pump parameter.\n"
         "import csv\n"
         "import sys\n"
         "import matplotlib\n"
         "matplotlib.use('Agg')\n"
         "import matplotlib.pyplot as plt\n\n"
         "path = sys.argv[1] if len(sys.argv) > 1 else "
      << json(csv_path).dump()
      << "\n"
         "series = {}\n"
         "with open(path, newline='') as f:\n"
         "    for row in csv.DictReader(f):\n"
         "        if row['status'] != 'ok':\n"
         "            continue\n"
         "        s = series.setdefault(row['gap_config_label'], ([], [], [], []))\n"
         "        s[0].append(float(row['cos4phi']))\n"
         "        s[1].append(float(row['mean_n']))\n"
         "        if row['q_mandel']:\n"
         "            s[2].append(float(row['cos4phi']))\n"
         "            s[3].append(float(row['q_mandel']))\n\n"
         "style = {'no_gap': '-', 'gap': '--'}\n"
         "fig, (ax_n, ax_q) = plt.subplots(2, 1, sharex=True, figsize=(6, 7))\n"
         "for label, (x, n, xq, q) in series.items():\n"
         "    ax_n.plot(x, n, style.get(label, ':'), color='k', label=label)\n"
         "    ax_q.plot(xq, q, style.get(label, ':'), color='k', label=label)\n"
         "ax_n.set_ylabel(r'$\\langle n \\rangle$')\n"
         "ax_q.set_ylabel('Q')\n"
         "ax_q.set_xlabel(r'$\\cos^4\\varphi$')\n"
         "ax_n.legend()\n"
         "ax_n.set_title('(a)', loc='left')\n"
         "ax_q.set_title('(b)', loc='left')\n"
         "fig.tight_layout()\n"
         "out = path.rsplit('.', 1)[0] + '.png'\n"
         "fig.savefig(out, dpi=150)\n"
         "print(out)\n";
    return s.str();
}

std::string spectrum_plot_script(const std::string& csv_path, const std::vector<std::string>& labels) {
    std::ostringstream s;
    s << "#!/usr/bin/env python3\n"
         "# Stationary cavity spectrum, one panel per configuration.\n"
         "import csv\n"
         "import sys\n"
         "import matplotlib\n"
         "matplotlib.use('Agg')\n"
         "import matplotlib.pyplot as plt\n\n"
         "path = sys.argv[1] if len(sys.argv) > 1 else "
      << json(csv_path).dump() << "\nlabels = " << json(labels).dump()
      << "\n"
         "data = {label: ([], []) for label in labels}\n"
         "with open(path, newline='') as f:\n"
         "    for row in csv.DictReader(f):\n"
         "        w, s = data.setdefault(row['panel'], ([], []))\n"
         "        w.append(float(row['omega']))\n"
         "        s.append(float(row['s']))\n\n"
         "fig, axes = plt.subplots(1, len(data), figsize=(5 * len(data), 4), squeeze=False)\n"
         "for ax, (tag, label) in zip(axes[0], zip('abcdefgh', data)):\n"
         "    w, s = data[label]\n"
         "    ax.plot(w, s, color='k')\n"
         "    ax.set_xlabel(r'$(\\omega - \\omega_L + 2\\Omega)/\\gamma$')\n"
         "    ax.set_ylabel('S (normalized)')\n"
         "    ax.set_title(f'({tag}) {label}', loc='left')\n"
         "fig.tight_layout()\n"
         "out = path.rsplit('.', 1)[0] + '.png'\n"
         "fig.savefig(out, dpi=150)\n"
         "print(out)\n";
    return s.str();
}

std::string dist_plot_script(const std::string& csv_path) {
    std::ostringstream s;
    s << "#!/usr/bin/env python3\n"
         "# Photon-number distribution, numeric against closed form.\n"
         "import csv\n"
         "import sys\n"
         "import matplotlib\n"
         "matplotlib.use('Agg')\n"
         "import matplotlib.pyplot as plt\n\n"
         "path = sys.argv[1] if len(sys.argv) > 1 else "
      << json(csv_path).dump()
      << "\n"
         "n, num, ana = [], [], []\n"
         "with open(path, newline='') as f:\n"
         "    for row in csv.DictReader(f):\n"
         "        n.append(int(row['n']))\n"
         "        num.append(float(row['p_numeric']))\n"
         "        ana.append(float(row['p_analytic']) if row['p_analytic'] else float('nan'))\n\n"
         "fig, ax = plt.subplots(figsize=(6, 4))\n"
         "ax.plot(n, num, color='k', label='numeric')\n"
         "ax.plot(n, ana, '--', color='tab:red', label='closed form')\n"
         "ax.set_xlabel('n')\n"
         "ax.set_ylabel(r'$P_n$')\n"
         "ax.legend()\n"
         "fig.tight_layout()\n"
         "out = path.rsplit('.', 1)[0] + '.png'\n"
         "fig.savefig(out, dpi=150)\n"
         "print(out)\n";
    return s.str();
}

int run_sweep(const RunConfig& config, std::ostream& log) {
    const auto t0 = Clock::now();
    const auto grid = pump_sweep_grid(config.sweep.points, config.sweep.lo, config.sweep.hi, config.params);
    const auto records = compute_sweep(grid, config.solver, config.threads);
    const auto failed = static_cast<std::size_t>(std::count_if(records.begin(), records.end(),
                                                               [](const SweepRecord& r) { return !r.ok(); }));
    const std::string& path = config.output.path;
    if (config.output.format == OutputFormat::csv) {
        emit(path, [&](std::ostream& out) { write_sweep_csv(out, records); });
    } else {
        emit(path, [&](std::ostream& out) {
            out << json{{"metadata", metadata_json(config)}, {"records", sweep_records_json(records, false)}}.dump(2)
                << '\n';
        });
    }
    if (!path.empty()) {
        json side = metadata_json(config);
        side["sweep"] = {{"points", config.sweep.points}, {"lo", config.sweep.lo}, {"hi", config.sweep.hi}};
        side["records"] = records.size();
        side["failed"] = failed;
        json timing = json::array();
        for (const auto& r : records) timing.push_back(r.seconds);
        side["seconds_per_point"] = timing;
        side["seconds_total"] = seconds_since(t0);
        if (config.output.format == OutputFormat::csv) {
            write_text(with_suffix(path, ".meta.json"), side.dump(2) + "\n", log);
        }
        if (config.output.emit_plot_script && config.output.format == OutputFormat::csv)
            write_text(with_suffix(path, "_plot.py"), sweep_plot_script(path), log);
    }
    log << "sweep: " << records.size() << " points, " << failed << " failed\n";
    for (const auto& r : records)
        if (!r.ok()) log << "  failed at cos4phi=" << format_real(r.cos4phi) << " (" << r.gap_config_label
                         << "): " << r.error << '\n';
    return kExitOk;
}

int run_spectrum(const RunConfig& config, std::ostream& log) {
    const auto panels = expand_panels(config);
    double g1_max = 0.0;
    for (const auto& [label, p] : panels) g1_max = std::max(g1_max, dressed_rates(p).g1);

    std::vector<PanelResult> results(panels.size());
    std::vector<std::string> errors(panels.size());
    parallel_for(panels.size(), config.threads, [&](std::size_t i) {
        SpectrumPanel panel = config.spectrum.panels.empty() ? SpectrumPanel{} : config.spectrum.panels[i];
        panel.label = panels[i].first;
        try {
            results[i] = compute_panel(panels[i].second, config.spectrum, panel, config.solver, g1_max);
        } catch (const HorizonError& e) {
            errors[i] = std::string(e.what()) + " (set spectrum.horizon or the panel horizon higher)";
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });
    bool failed = false;
    for (std::size_t i = 0; i < panels.size(); ++i) {
        if (!errors[i].empty()) {
            log << "spectrum panel '" << panels[i].first << "' failed: " << errors[i] << '\n';
            failed = true;
        }
    }
    if (failed) return kExitSolver;

    json meta = metadata_json(config);
    json jp = json::array();
    for (const auto& r : results) {
        json peaks = json::array();
        for (const auto& pk : r.spectrum.peaks)
            peaks.push_back({{"position", pk.position}, {"height", pk.height}, {"fwhm", optional_json(pk.fwhm)}});
        jp.push_back({{"label", r.label},
                      {"parameters", params_to_json(r.params)},
                      {"rates", rates_json(r.rates)},
                      {"N_used", r.n_used},
                      {"mean_n", r.mean_n},
                      {"tau_step", r.tau_step},
                      {"horizon", r.horizon},
                      {"horizon_ratio", r.horizon_ratio},
                      {"grid", r.grid},
                      {"scale", r.spectrum.scale},
                      {"integral", r.spectrum.integral},
                      {"fwhm", optional_json(r.spectrum.fwhm)},
                      {"peak_positions", r.spectrum.peak_positions},
                      {"peaks", peaks},
                      {"seconds", r.seconds}});
    }
    meta["panels"] = jp;
    meta["spectrum_settings"] = config_to_json(config)["spectrum"];

    const std::string& path = config.output.path;
    if (config.output.format == OutputFormat::csv) {
        emit(path, [&](std::ostream& out) {
            out << "panel,omega,s\n";
            for (const auto& r : results)
                for (std::size_t k = 0; k < r.spectrum.omega.size(); ++k)
                    out << r.label << ',' << format_real(r.spectrum.omega[k]) << ','
                        << format_real(r.spectrum.s[k]) << '\n';
        });
        if (!path.empty()) write_text(with_suffix(path, ".meta.json"), meta.dump(2) + "\n", log);
    } else {
        for (std::size_t i = 0; i < results.size(); ++i) {
            meta["panels"][i]["omega"] = results[i].spectrum.omega;
            meta["panels"][i]["s"] = results[i].spectrum.s;
        }
        emit(path, [&](std::ostream& out) { out << meta.dump(2) << '\n'; });
    }
    if (!path.empty() && config.output.emit_plot_script && config.output.format == OutputFormat::csv) {
        std::vector<std::string> labels;
        for (const auto& r : results) labels.push_back(r.label);
        write_text(with_suffix(path, "_plot.py"), spectrum_plot_script(path, labels), log);
    }
    for (const auto& r : results) {
        log << "panel " << r.label << ": N=" << r.n_used << " <n>=" << format_real(r.mean_n) << " peaks at";
        for (double w : r.spectrum.peak_positions) log << ' ' << format_real(w);
        if (r.spectrum.fwhm) log << ", fwhm " << format_real(*r.spectrum.fwhm);
        log << '\n';
    }
    return kExitOk;
}

int run_dist(const RunConfig& config, std::ostream& log) {
    const auto t0 = Clock::now();
    const DressedRates rates = dressed_rates(config.params);
    const double kappa = config.params.kappa;
    PointSolution s;
    try {
        s = solve_point(rates, kappa, config.solver);
    } catch (const Error& e) {
        log << "dist: solver failed: " << e.what() << '\n';
        return kExitSolver;
    }
    const std::size_t n_max = s.ladder.n_max();

    std::optional<AnalyticDistribution> ana;
    std::string ana_note;
    if (rates.gamma_plus > 0.0) {
        SeriesControl ctl;
        ctl.rel_tol = config.solver.rel_tol;
        try {
            ana = analytic_distribution(rates, kappa, n_max, Normalization::kummer, ctl);
            if (ana->degenerate) ana_note = "closed form undefined: g1 = 0";
        } catch (const Error& e) {
            ana_note = e.what();
        }
    } else {
        ana_note = "closed form undefined: gamma_plus = 0";
    }
    const bool have_ana = ana && !ana->degenerate;
    double tv = 0.0;
    if (have_ana) {
        for (std::size_t n = 0; n <= n_max; ++n) tv += std::abs(s.ladder.p1[n] - ana->p[n]);
        tv *= 0.5;
    }

    json meta = metadata_json(config);
    meta["rates"] = rates_json(rates);
    meta["N_used"] = n_max;
    meta["residual"] = s.residual;
    meta["mean_n"] = s.obs.mean_n;
    meta["q_mandel"] = optional_json(s.obs.q_mandel);
    meta["fano"] = optional_json(s.obs.fano);
    if (have_ana) {
        const FieldObservables ao = distribution_observables(ana->p);
        meta["analytic"] = {{"alpha", ana->alpha},
                            {"m", ana->m},
                            {"pump_ratio", ana->pump_ratio},
                            {"pump_dominates", ana->pump_dominates},
                            {"mean_n", ao.mean_n},
                            {"q_mandel", optional_json(ao.q_mandel)},
                            {"total_variation", tv}};
    } else {
        meta["analytic"] = {{"note", ana_note}};
    }
    meta["seconds"] = seconds_since(t0);

    const std::string& path = config.output.path;
    if (config.output.format == OutputFormat::csv) {
        emit(path, [&](std::ostream& out) {
            out << "n,p_numeric,p_analytic\n";
            for (std::size_t n = 0; n <= n_max; ++n) {
                out << n << ',' << format_real(s.ladder.p1[n]) << ',';
                if (have_ana) out << format_real(ana->p[n]);
                out << '\n';
            }
        });
        if (!path.empty()) write_text(with_suffix(path, ".meta.json"), meta.dump(2) + "\n", log);
        if (!path.empty() && config.output.emit_plot_script)
            write_text(with_suffix(path, "_plot.py"), dist_plot_script(path), log);
    } else {
        meta["p_numeric"] = s.ladder.p1;
        if (have_ana) meta["p_analytic"] = ana->p;
        emit(path, [&](std::ostream& out) { out << meta.dump(2) << '\n'; });
    }
    log << "dist: N=" << n_max << " <n>=" << format_real(s.obs.mean_n);
    if (s.obs.q_mandel) log << " Q=" << format_real(*s.obs.q_mandel);
    if (have_ana) log << " TV(analytic)=" << format_real(tv);
    log << '\n';
    return kExitOk;
}

int run_validate(const RunConfig& config, std::ostream& log) {
    ValidationOptions opts;
    opts.threads = config.threads;
    opts.sweep_points = config.sweep.points;
    opts.solver = config.solver;
    const auto checks = run_validation_suite(opts);

    json report = {{"library_version", kVersion}, {"checks", json::array()}};
    bool all = true;
    for (const auto& c : checks) {
        report["checks"].push_back(c.to_json());
        all = all && c.passed();
        log << (c.passed() ? "PASS " : "FAIL ") << c.id << ": " << c.title << '\n';
        for (const auto& m : c.measurements)
            log << "    " << (m.passed ? "ok   " : "FAIL ") << m.name << " = " << format_real(m.value) << ' '
                << m.relation << ' ' << format_real(m.tolerance) << '\n';
        if (!c.error.empty()) log << "    error: " << c.error << '\n';
    }
    report["passed"] = all;
    emit(config.output.path, [&](std::ostream& out) { out << report.dump(2) << '\n'; });
    return all ? kExitOk : kExitValidation;
}

int run(const RunConfig& config, std::ostream& log) {
    config.validate();
    switch (config.mode) {
        case Mode::sweep: return run_sweep(config, log);
        case Mode::spectrum: return run_spectrum(config, log);
        case Mode::dist: return run_dist(config, log);
        case Mode::validate: return run_validate(config, log);
    }
    return kExitUsage;
}

}  // namespace pbglaser
