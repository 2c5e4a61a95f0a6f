#include "pbglaser/config.hpp"

#include <fstream>
#include <initializer_list>
#include <string_view>

#include "pbglaser/errors.hpp"

namespace pbglaser {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, std::string_view table, std::initializer_list<std::string_view> keys) {
    if (!j.is_object()) throw DomainError("config: '" + std::string(table) + "' must be a table");
    for (const auto& [k, v] : j.items()) {
        bool known = false;
        for (auto key : keys) known = known || k == key;
        if (!known) throw DomainError("config: unknown key '" + k + "' in '" + std::string(table) + "'");
    }
}

template <class T>
void read(const json& j, const char* key, T& out) {
    if (auto it = j.find(key); it != j.end() && !it->is_null()) {
        try {
            out = it->get<T>();
        } catch (const json::exception& e) {
            throw DomainError(std::string("config: bad value for '") + key + "': " + e.what());
        }
    }
}

template <class T>
void read(const json& j, const char* key, std::optional<T>& out) {
    if (auto it = j.find(key); it != j.end() && !it->is_null()) {
        T v{};
        read(j, key, v);
        out = v;
    }
}

template <class T>
json opt(const std::optional<T>& v) {
    return v ? json(*v) : json(nullptr);
}

Mode parse_mode(const std::string& s) {
    if (s == "sweep") return Mode::sweep;
    if (s == "spectrum") return Mode::spectrum;
    if (s == "dist") return Mode::dist;
    if (s == "validate") return Mode::validate;
    throw DomainError("config: unknown mode '" + s + "'");
}

OutputFormat parse_format(const std::string& s) {
    if (s == "csv") return OutputFormat::csv;
    if (s == "json") return OutputFormat::json;
    throw DomainError("config: unknown output format '" + s + "'");
}

OmegaGrid parse_grid(const std::string& s) {
    if (s == "auto") return OmegaGrid::automatic;
    if (s == "doublet") return OmegaGrid::doublet;
    if (s == "zoom") return OmegaGrid::zoom;
    if (s == "manual") return OmegaGrid::manual;
    throw DomainError("config: unknown omega grid '" + s + "'");
}

std::string grid_name(OmegaGrid g) {
    switch (g) {
        case OmegaGrid::automatic: return "auto";
        case OmegaGrid::doublet: return "doublet";
        case OmegaGrid::zoom: return "zoom";
        case OmegaGrid::manual: return "manual";
    }
    return "auto";
}

}  // namespace

std::string to_string(Mode m) {
    switch (m) {
        case Mode::sweep: return "sweep";
        case Mode::spectrum: return "spectrum";
        case Mode::dist: return "dist";
        case Mode::validate: return "validate";
    }
    return "sweep";
}

std::string to_string(OutputFormat f) { return f == OutputFormat::csv ? "csv" : "json"; }

json params_to_json(const SystemParams& p) {
    json drive;
    if (const auto* laser = std::get_if<LaserDrive>(&p.drive)) {
        drive = {{"epsilon", laser->epsilon}, {"delta_a", laser->delta_a}};
    } else {
        drive = {{"cos4phi", std::get<PumpDrive>(p.drive).cos4phi}};
    }
    return {{"gamma", p.gamma},
            {"kappa", p.kappa},
            {"g", p.g},
            {"drive", drive},
            {"gap", {{"u_L", p.gap.u_L}, {"u_minus", p.gap.u_minus}, {"u_plus", p.gap.u_plus}}}};
}

SystemParams params_from_json(const json& j) {
    reject_unknown(j, "params", {"gamma", "kappa", "g", "drive", "gap"});
    SystemParams p;
    read(j, "gamma", p.gamma);
    read(j, "kappa", p.kappa);
    read(j, "g", p.g);
    if (auto it = j.find("drive"); it != j.end()) {
        reject_unknown(*it, "params.drive", {"cos4phi", "epsilon", "delta_a"});
        const bool pump = it->contains("cos4phi");
        const bool laser = it->contains("epsilon") || it->contains("delta_a");
        if (pump && laser) throw DomainError("config: drive takes either cos4phi or (epsilon, delta_a)");
        if (laser) {
            LaserDrive d;
            read(*it, "epsilon", d.epsilon);
            read(*it, "delta_a", d.delta_a);
            p.drive = d;
        } else if (pump) {
            PumpDrive d;
            read(*it, "cos4phi", d.cos4phi);
            p.drive = d;
        }
    }
    if (auto it = j.find("gap"); it != j.end()) {
        reject_unknown(*it, "params.gap", {"u_L", "u_minus", "u_plus"});
        read(*it, "u_L", p.gap.u_L);
        read(*it, "u_minus", p.gap.u_minus);
        read(*it, "u_plus", p.gap.u_plus);
    }
    return p;
}

RunConfig config_from_json(const json& j) {
    reject_unknown(j, "config", {"mode", "params", "sweep", "spectrum", "solver", "output", "threads"});
    RunConfig c;
    if (auto it = j.find("mode"); it != j.end()) c.mode = parse_mode(it->get<std::string>());
    if (auto it = j.find("params"); it != j.end()) c.params = params_from_json(*it);
    if (auto it = j.find("sweep"); it != j.end()) {
        reject_unknown(*it, "sweep", {"points", "lo", "hi"});
        read(*it, "points", c.sweep.points);
        read(*it, "lo", c.sweep.lo);
        read(*it, "hi", c.sweep.hi);
    }
    if (auto it = j.find("spectrum"); it != j.end()) {
        const json& s = *it;
        reject_unknown(s, "spectrum", {"panels", "horizon", "tau_step", "omega_points", "grid", "omega_lo",
                                       "omega_hi", "allow_undecayed"});
        read(s, "horizon", c.spectrum.horizon);
        read(s, "tau_step", c.spectrum.tau_step);
        read(s, "omega_points", c.spectrum.omega_points);
        if (auto g = s.find("grid"); g != s.end()) c.spectrum.grid = parse_grid(g->get<std::string>());
        read(s, "omega_lo", c.spectrum.omega_lo);
        read(s, "omega_hi", c.spectrum.omega_hi);
        read(s, "allow_undecayed", c.spectrum.allow_undecayed);
        if (auto p = s.find("panels"); p != s.end()) {
            if (!p->is_array()) throw DomainError("config: 'spectrum.panels' must be an array");
            for (const json& e : *p) {
                reject_unknown(e, "spectrum.panels[]", {"label", "delta_a", "horizon"});
                SpectrumPanel panel;
                read(e, "label", panel.label);
                read(e, "delta_a", panel.delta_a);
                read(e, "horizon", panel.horizon);
                c.spectrum.panels.push_back(panel);
            }
        }
    }
    if (auto it = j.find("solver"); it != j.end()) {
        reject_unknown(*it, "solver", {"N_override", "tail_tol", "rel_tol"});
        read(*it, "N_override", c.solver.n_override);
        read(*it, "tail_tol", c.solver.tail_tol);
        read(*it, "rel_tol", c.solver.rel_tol);
    }
    if (auto it = j.find("output"); it != j.end()) {
        reject_unknown(*it, "output", {"path", "format", "emit_plot_script"});
        read(*it, "path", c.output.path);
        if (auto f = it->find("format"); f != it->end()) c.output.format = parse_format(f->get<std::string>());
        read(*it, "emit_plot_script", c.output.emit_plot_script);
    }
    read(j, "threads", c.threads);
    return c;
}

json config_to_json(const RunConfig& c) {
    json panels = json::array();
    for (const auto& p : c.spectrum.panels)
        panels.push_back({{"label", p.label}, {"delta_a", opt(p.delta_a)}, {"horizon", opt(p.horizon)}});
    return {{"mode", to_string(c.mode)},
            {"params", params_to_json(c.params)},
            {"sweep", {{"points", c.sweep.points}, {"lo", c.sweep.lo}, {"hi", c.sweep.hi}}},
            {"spectrum",
             {{"panels", panels},
              {"horizon", c.spectrum.horizon},
              {"tau_step", opt(c.spectrum.tau_step)},
              {"omega_points", c.spectrum.omega_points},
              {"grid", grid_name(c.spectrum.grid)},
              {"omega_lo", c.spectrum.omega_lo},
              {"omega_hi", c.spectrum.omega_hi},
              {"allow_undecayed", c.spectrum.allow_undecayed}}},
            {"solver",
             {{"N_override", opt(c.solver.n_override)},
              {"tail_tol", c.solver.tail_tol},
              {"rel_tol", c.solver.rel_tol}}},
            {"output",
             {{"path", c.output.path},
              {"format", to_string(c.output.format)},
              {"emit_plot_script", c.output.emit_plot_script}}},
            {"threads", c.threads}};
}

void RunConfig::validate() const {
    if (!(solver.tail_tol > 0.0)) throw DomainError("config: solver.tail_tol must be > 0");
    if (!(solver.rel_tol > 0.0)) throw DomainError("config: solver.rel_tol must be > 0");
    if (solver.n_override && *solver.n_override < 2) throw DomainError("config: solver.N_override must be >= 2");
    if (threads == 0) throw DomainError("config: threads must be >= 1");
    switch (mode) {
        case Mode::sweep:
            if (sweep.points < 2) throw DomainError("config: sweep.points must be >= 2");
            if (!(sweep.lo >= 0.0 && sweep.lo < sweep.hi && sweep.hi <= 1.0))
                throw DomainError("config: sweep range must satisfy 0 <= lo < hi <= 1");
            {
                SystemParams probe = params;
                probe.drive = PumpDrive{sweep.lo};
                probe.validate();
            }
            break;
        case Mode::spectrum:
            if (!std::holds_alternative<LaserDrive>(params.drive))
                throw DomainError("config: spectrum mode needs a drive given by (epsilon, delta_a)");
            params.validate();
            if (!(spectrum.horizon > 0.0)) throw DomainError("config: spectrum.horizon must be > 0");
            if (spectrum.tau_step && !(*spectrum.tau_step > 0.0))
                throw DomainError("config: spectrum.tau_step must be > 0");
            if (spectrum.omega_points < 3) throw DomainError("config: spectrum.omega_points must be >= 3");
            if (spectrum.grid == OmegaGrid::manual && !(spectrum.omega_hi > spectrum.omega_lo))
                throw DomainError("config: spectrum.omega_hi must exceed omega_lo");
            for (const auto& p : spectrum.panels)
                if (p.horizon && !(*p.horizon > 0.0)) throw DomainError("config: panel horizon must be > 0");
            break;
        case Mode::dist:
            params.validate();
            break;
        case Mode::validate:
            break;
    }
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open config file '" + path + "'");
    json j;
    try {
        j = json::parse(in, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw DomainError("config '" + path + "': " + e.what());
    }
    return config_from_json(j);
}

}  // namespace pbglaser
