// sim: sweeps, spectra, photon distributions and the validation suite.
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "pbglaser/app.hpp"
#include "pbglaser/errors.hpp"

namespace {

struct Overrides {
    std::string config;
    std::optional<std::string> out;
    std::optional<std::string> format;
    std::optional<std::size_t> points;
    std::optional<std::size_t> threads;
    bool plot = false;
};

void add_common(CLI::App* sub, Overrides& o, bool config_required) {
    auto* c = sub->add_option("--config", o.config, "JSON run configuration")->check(CLI::ExistingFile);
    if (config_required) c->required();
    sub->add_option("--out", o.out, "output path (default: standard output)");
    sub->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--points", o.points, "number of sweep points")->check(CLI::Range(2, 1000000));
    sub->add_option("--threads", o.threads, "worker threads")->check(CLI::Range(1, 1024));
    sub->add_flag("--emit-plot-script", o.plot, "write a matplotlib script next to the output");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dressed-atom laser in a photonic band-gap cavity"};
    app.set_version_flag("--version", std::string(pbglaser::kVersion));
    app.require_subcommand(1);

    Overrides o;
    auto* sweep = app.add_subcommand("sweep", "<n> and Q against cos^4(phi), with and without the gap");
    auto* spectrum = app.add_subcommand("spectrum", "stationary cavity spectrum");
    auto* dist = app.add_subcommand("dist", "photon-number distribution, numeric and closed form");
    auto* validate = app.add_subcommand("validate", "run the validation suite");
    add_common(sweep, o, true);
    add_common(spectrum, o, true);
    add_common(dist, o, true);
    add_common(validate, o, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : pbglaser::kExitUsage;
    }

    pbglaser::RunConfig config;
    try {
        if (!o.config.empty()) config = pbglaser::load_config(o.config);
        if (sweep->parsed()) config.mode = pbglaser::Mode::sweep;
        if (spectrum->parsed()) config.mode = pbglaser::Mode::spectrum;
        if (dist->parsed()) config.mode = pbglaser::Mode::dist;
        if (validate->parsed()) config.mode = pbglaser::Mode::validate;
        if (o.out) config.output.path = *o.out;
        if (o.format) config.output.format = *o.format == "json" ? pbglaser::OutputFormat::json
                                                                 : pbglaser::OutputFormat::csv;
        if (o.points) config.sweep.points = *o.points;
        if (o.threads) config.threads = *o.threads;
        if (o.plot) config.output.emit_plot_script = true;
        config.validate();
    } catch (const pbglaser::Error& e) {
        std::cerr << "sim: " << e.what() << '\n';
        return pbglaser::kExitUsage;
    }

    try {
        return pbglaser::run(config, std::cerr);
    } catch (const pbglaser::DomainError& e) {
        std::cerr << "sim: " << e.what() << '\n';
        return pbglaser::kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "sim: " << e.what() << '\n';
        return pbglaser::kExitSolver;
    }
}
