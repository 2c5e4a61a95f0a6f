// Python bindings. Parameters travel as plain dicts with the same layout as
// the "params" table of a run configuration.
#include <algorithm>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pbglaser/app.hpp"
#include "pbglaser/checks.hpp"
#include "pbglaser/config.hpp"
#include "pbglaser/errors.hpp"
#include "pbglaser/ladder.hpp"
#include "pbglaser/liouvillian.hpp"
#include "pbglaser/specfun.hpp"

namespace py = pybind11;
using namespace pbglaser;
using nlohmann::json;

namespace {

json to_json(const py::handle& obj) {
    const auto dumps = py::module_::import("json").attr("dumps");
    return json::parse(dumps(obj).cast<std::string>());
}

py::object from_json(const json& j) {
    return py::module_::import("json").attr("loads")(j.dump());
}

SystemParams params_of(const py::dict& d) { return params_from_json(to_json(d)); }

py::array_t<double> array(const std::vector<double>& v) {
    py::array_t<double> a(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), a.mutable_data());
    return a;
}

py::dict rates_dict(const DressedRates& r) {
    py::dict d;
    d["cos2phi"] = r.cos2phi;
    d["cos4phi"] = r.cos4phi();
    d["omega2"] = r.omega2 ? py::cast(*r.omega2) : py::none();
    d["gamma0"] = r.gamma0;
    d["gamma_plus"] = r.gamma_plus;
    d["gamma_minus"] = r.gamma_minus;
    d["g1"] = r.g1;
    return d;
}

py::dict obs_dict(const FieldObservables& o) {
    py::dict d;
    d["mean_n"] = o.mean_n;
    d["mean_n2"] = o.mean_n2;
    d["fano"] = o.fano ? py::cast(*o.fano) : py::none();
    d["q_mandel"] = o.q_mandel ? py::cast(*o.q_mandel) : py::none();
    return d;
}

SolverSettings solver_of(std::optional<std::size_t> n, double tail_tol) {
    SolverSettings s;
    s.n_override = n;
    s.tail_tol = tail_tol;
    return s;
}

CheckResult run_check(const std::string& name, std::size_t threads) {
    ValidationOptions o;
    o.threads = threads;
    if (name == "threshold_location") return check_threshold_location(o);
    if (name == "thresholdless_linearity") return check_thresholdless_linearity(o);
    if (name == "statistics_signatures") return check_statistics_signatures(o);
    if (name == "low_pump_regime") return check_low_pump_regime(o);
    if (name == "analytic_distribution") return check_analytic_distribution(o);
    if (name == "oracle_equivalence") return check_oracle_equivalence(o);
    if (name == "spectrum_below_threshold") return check_spectrum_below_threshold(o);
    if (name == "spectrum_above_threshold") return check_spectrum_above_threshold(o);
    if (name == "properties") return check_properties(o);
    if (name == "truncation") return check_truncation(o);
    throw DomainError("unknown check '" + name + "'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Dressed-atom laser in a photonic band-gap cavity";
    m.attr("__version__") = kVersion;

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<IterationLimitError>(m, "IterationLimitError", base.ptr());
    py::register_exception<SingularSystemError>(m, "SingularSystemError", base.ptr());
    py::register_exception<TruncationError>(m, "TruncationError", base.ptr());
    py::register_exception<StepSizeError>(m, "StepSizeError", base.ptr());
    py::register_exception<ResourceError>(m, "ResourceError", base.ptr());
    py::register_exception<DegenerateNullSpaceError>(m, "DegenerateNullSpaceError", base.ptr());
    py::register_exception<HorizonError>(m, "HorizonError", base.ptr());

    m.def("ln_gamma", &ln_gamma, py::arg("x"));
    m.def("kummer_1f1_a1", [](double b, double z) { return kummer_1f1_a1(b, z); }, py::arg("b"), py::arg("z"),
          "1F1(1; b; z) by direct summation");

    m.def("dressed_rates", [](const py::dict& p) { return rates_dict(dressed_rates(params_of(p))); },
          py::arg("params"));

    m.def(
        "steady_state",
        [](const py::dict& p, std::optional<std::size_t> n_max, double tail_tol) {
            const SystemParams sp = params_of(p);
            const auto pt = solve_point(dressed_rates(sp), sp.kappa, solver_of(n_max, tail_tol));
            py::dict d;
            d["p1"] = array(pt.ladder.p1);
            d["p2"] = array(pt.ladder.p2);
            d["p3"] = array(pt.ladder.p3);
            d["p4"] = array(pt.ladder.p4);
            d["n_max"] = pt.ladder.n_max();
            d["residual"] = pt.residual;
            d["observables"] = obs_dict(pt.obs);
            return d;
        },
        py::arg("params"), py::arg("n_max") = py::none(), py::arg("tail_tol") = 1e-12,
        "stationary photon ladder; adaptive truncation unless n_max is given");

    m.def(
        "analytic_distribution",
        [](const py::dict& p, std::size_t n_max) {
            const SystemParams sp = params_of(p);
            const auto a = analytic_distribution(dressed_rates(sp), sp.kappa, n_max);
            py::dict d;
            d["p"] = array(a.p);
            d["alpha"] = a.alpha;
            d["m"] = a.m;
            d["degenerate"] = a.degenerate;
            d["pump_dominates"] = a.pump_dominates;
            d["observables"] = a.degenerate ? py::none() : py::object(obs_dict(distribution_observables(a.p)));
            return d;
        },
        py::arg("params"), py::arg("n_max"));

    m.def(
        "sweep",
        [](const py::dict& p, std::size_t points, double lo, double hi, std::size_t threads) {
            const auto grid = pump_sweep_grid(points, lo, hi, params_of(p));
            std::vector<SweepRecord> recs;
            {
                py::gil_scoped_release nogil;
                recs = compute_sweep(grid, SolverSettings{}, threads);
            }
            return from_json(sweep_records_json(recs, false));
        },
        py::arg("params"), py::arg("points") = 101, py::arg("lo") = 0.0, py::arg("hi") = 1.0,
        py::arg("threads") = 1, "<n> and Q over cos^4 phi, each point with and without the gap");

    m.def(
        "spectrum",
        [](const py::dict& p, double horizon, std::optional<double> tau_step, const std::string& grid,
           std::size_t omega_points, bool allow_undecayed) {
            SpectrumSettings s;
            s.horizon = horizon;
            s.tau_step = tau_step;
            s.omega_points = omega_points;
            s.allow_undecayed = allow_undecayed;
            if (grid == "auto") s.grid = OmegaGrid::automatic;
            else if (grid == "doublet") s.grid = OmegaGrid::doublet;
            else if (grid == "zoom") s.grid = OmegaGrid::zoom;
            else throw DomainError("grid must be auto, doublet or zoom");
            const SystemParams sp = params_of(p);
            PanelResult r;
            {
                py::gil_scoped_release nogil;
                r = compute_panel(sp, s, SpectrumPanel{}, SolverSettings{}, 0.0);
            }
            py::dict d;
            d["omega"] = array(r.spectrum.omega);
            d["s"] = array(r.spectrum.s);
            d["fwhm"] = r.spectrum.fwhm ? py::cast(*r.spectrum.fwhm) : py::none();
            d["peaks"] = r.spectrum.peak_positions;
            d["integral"] = r.spectrum.integral;
            d["mean_n"] = r.mean_n;
            d["n_used"] = r.n_used;
            d["tau_step"] = r.tau_step;
            d["grid"] = r.grid;
            d["horizon_ratio"] = r.horizon_ratio;
            d["rates"] = rates_dict(r.rates);
            return d;
        },
        py::arg("params"), py::arg("horizon") = 5000.0, py::arg("tau_step") = py::none(),
        py::arg("grid") = "auto", py::arg("omega_points") = 4001, py::arg("allow_undecayed") = false,
        "stationary cavity spectrum; params need a laser drive");

    m.def(
        "run_check",
        [](const std::string& name, std::size_t threads) {
            CheckResult c;
            {
                py::gil_scoped_release nogil;
                c = run_check(name, threads);
            }
            return from_json(c.to_json());
        },
        py::arg("name"), py::arg("threads") = 1, "one check of the validation suite, as a dict");
}
