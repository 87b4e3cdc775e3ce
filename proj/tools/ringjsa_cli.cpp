// Command-line driver: simulate -> synthesize -> reconstruct -> report.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ringjsa/pipeline.hpp"

namespace {

struct Overrides {
    std::string config;
    std::optional<std::uint64_t> seed;
    bool noiseless = false;
    std::string seed_order;
    std::string filter;
    std::optional<double> pump_bandwidth_pm;
};

void add_common(CLI::App* cmd, Overrides& o)
{
    cmd->add_option("--config", o.config, "JSON run configuration");
    cmd->add_option("--seed", o.seed, "top-level RNG seed");
    cmd->add_flag("--noiseless", o.noiseless, "emit expected values instead of Poisson counts");
    cmd->add_option("--seed-order", o.seed_order, "seeded resonance order relative to the pump")
        ->check(CLI::IsMember({"+1", "1", "-1"}));
    cmd->add_option("--filter", o.filter, "detection filter")->check(CLI::IsMember({"on-chip", "off-chip", "ideal"}));
    cmd->add_option("--pump-bandwidth", o.pump_bandwidth_pm, "pump FWHM in pm");
}

ringjsa::RunConfig resolve(const Overrides& o, const std::string& fallback_config)
{
    ringjsa::RunConfig cfg = ringjsa::RunConfig::defaults();
    if (!o.config.empty())
        cfg = ringjsa::load_run_config(o.config);
    else if (!fallback_config.empty())
        cfg = ringjsa::load_run_config(fallback_config);
    if (o.seed) {
        cfg.seed = *o.seed;
        cfg.campaign.rng_seed = *o.seed;
    }
    if (o.noiseless) cfg.campaign.noiseless = true;
    if (!o.seed_order.empty())
        cfg.campaign.seed_order = o.seed_order == "-1" ? ringjsa::SeedOrder::minus : ringjsa::SeedOrder::plus;
    if (!o.filter.empty()) cfg.set_filter(o.filter);
    if (o.pump_bandwidth_pm) cfg.set_pump_bandwidth_pm(*o.pump_bandwidth_pm);
    cfg.validate();
    return cfg;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"ringjsa: complex joint spectral amplitude of an add-drop ring"};
    app.require_subcommand(1);

    Overrides sim_o, syn_o;
    std::string sim_out = "truth", syn_truth, syn_out = "measurement", rec_in, rec_out = "result";
    std::string rep_in, rep_truth;
    std::size_t rep_trials = 200;
    std::uint64_t rep_seed = 42;

    auto* sim = app.add_subcommand("simulate", "ground-truth JSAs, transfer curves and previews");
    add_common(sim, sim_o);
    sim->add_option("--out", sim_out, "output directory");

    auto* syn = app.add_subcommand("synthesize", "synthetic measurement campaign from a truth directory");
    add_common(syn, syn_o);
    syn->add_option("--truth", syn_truth, "truth directory written by simulate")->required();
    syn->add_option("--out", syn_out, "output directory");

    auto* rec = app.add_subcommand("reconstruct", "recover JSI and JSP from a measurement directory");
    rec->add_option("--in", rec_in, "measurement directory")->required();
    rec->add_option("--out", rec_out, "output directory");

    auto* rep = app.add_subcommand("report", "Schmidt numbers, fidelities and heatmaps for a result directory");
    rep->add_option("--in", rep_in, "result directory")->required();
    rep->add_option("--truth", rep_truth, "truth directory (optional)");
    rep->add_option("--trials", rep_trials, "Monte-Carlo trials (0 disables)");
    rep->add_option("--seed", rep_seed, "Monte-Carlo seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        nlohmann::json summary;
        if (*sim) {
            summary = ringjsa::cmd_simulate(resolve(sim_o, ""), sim_out);
            summary.erase("config");
            summary.erase("campaign_grid");
        } else if (*syn) {
            summary = ringjsa::cmd_synthesize(resolve(syn_o, syn_truth + "/config.json"), syn_truth, syn_out);
        } else if (*rec) {
            summary = ringjsa::cmd_reconstruct(rec_in, rec_out);
        } else if (*rep) {
            summary = ringjsa::cmd_report(rep_in, rep_truth, rep_trials, rep_seed);
            summary.erase("images");
        }
        std::cout << summary.dump(2) << '\n';
    } catch (const ringjsa::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const ringjsa::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
