#include "ringjsa/pipeline.hpp"

#include <filesystem>
#include <fstream>

#include "ringjsa/heatmap.hpp"
#include "ringjsa/io.hpp"
#include "ringjsa/rng.hpp"

namespace ringjsa {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const char* order_tag(SeedOrder order) { return order == SeedOrder::plus ? "plus" : "minus"; }

template <class Matrix>
Matrix sample_columns(const Matrix& fine, const SimulationLayout& layout)
{
    const auto cols = static_cast<Eigen::Index>(layout.measurement.n_idler());
    Matrix out(fine.rows(), cols);
    for (Eigen::Index j = 0; j < cols; ++j) out.col(j) = fine.col(static_cast<Eigen::Index>(layout.fine_column(j)));
    return out;
}

json nm_axis(const std::vector<double>& omegas)
{
    json a = json::array();
    for (double w : omegas) a.push_back(units::omega_to_wavelength_nm(w));
    return a;
}

json schmidt_json(const SchmidtResult& s, std::size_t keep = 20)
{
    std::vector<double> head(s.singular_values.begin(),
                             s.singular_values.begin() + static_cast<std::ptrdiff_t>(std::min(keep, s.singular_values.size())));
    return {{"K", s.K}, {"rank", s.rank}, {"singular_values", head}};
}

void render(const fs::path& path, const RealMatrix& map, Colormap cmap, json& images)
{
    HeatmapOptions opts;
    opts.colormap = cmap;
    write_heatmap_png(path.string(), map, opts);
    images.push_back(path.filename().string());
}

RealMatrix mask_to_real(const MaskMatrix& m) { return m.cast<double>(); }

}  // namespace

TruthSet simulate_truth(const RunConfig& cfg)
{
    cfg.validate();
    TruthSet t;
    t.layout = simulation_layout(cfg.ring, cfg.campaign);
    const PumpSpectrum pump = cfg.pump.spectrum();
    const SeedOrder order = cfg.campaign.seed_order;
    t.ring = resonator_jsa(cfg.ring, pump, t.layout.fine, seeded_band(order), detected_band(order), cfg.quadrature);
    t.spiral = spiral_jsa(cfg.spiral, pump, t.layout.fine, cfg.quadrature);
    return t;
}

ComplexJSA campaign_truth(const RunConfig& cfg)
{
    return resonator_jsa(cfg.ring, cfg.pump.spectrum(), campaign_grid(cfg.ring, cfg.campaign), Band::signal,
                         Band::idler, cfg.quadrature);
}

SpectralGrid schmidt_grid(const RunConfig& cfg)
{
    const double h =
        cfg.schmidt_span_halfwidths * std::max(cfg.ring.signal.decay_rate(), cfg.ring.idler.decay_rate());
    const double s0 = cfg.ring.signal.omega0, i0 = cfg.ring.idler.omega0;
    return SpectralGrid::uniform(s0 - h, s0 + h, cfg.schmidt_points, i0 - h, i0 + h, cfg.schmidt_points);
}

ComplexJSA dense_truth(const RunConfig& cfg)
{
    return resonator_jsa(cfg.ring, cfg.pump.spectrum(), schmidt_grid(cfg), Band::signal, Band::idler, cfg.quadrature);
}

FilteredTruth filtered_truth(const TruthSet& truth, const CampaignConfig& cfg)
{
    const auto& axis = truth.layout.fine.idler();
    const ComplexMatrix& a = truth.ring.values;
    const ComplexMatrix& b = truth.spiral.values;
    RealMatrix jsi = sample_columns(convolve_filter_jsi(a.cwiseAbs2(), axis, cfg.filter), truth.layout);
    ComplexMatrix cross = sample_columns(convolve_filter(a.cwiseProduct(b.conjugate()), axis, cfg.filter), truth.layout);

    FilteredTruth out;
    out.grid = truth.layout.canonical;
    if (cfg.seed_order == SeedOrder::minus) {
        jsi = RealMatrix(jsi.transpose());
        cross = ComplexMatrix(cross.transpose());
    }
    out.jsi = jsi / (jsi.sum() * out.grid.cell_measure());
    out.phase = cross.unaryExpr([](cdouble z) { return std::arg(z); });
    ComplexMatrix values(jsi.rows(), jsi.cols());
    for (Eigen::Index k = 0; k < values.size(); ++k)
        values.data()[k] = std::polar(std::sqrt(out.jsi.data()[k]), out.phase.data()[k]);
    out.jsa = ComplexJSA(out.grid, std::move(values));
    out.jsa.normalize();
    out.jsa.provenance = "filtered truth";
    return out;
}

// ---------------------------------------------------------------- simulate

json cmd_simulate(const RunConfig& cfg, const std::string& out_dir)
{
    cfg.validate();
    const fs::path out(out_dir);
    fs::create_directories(out);
    io::write_json((out / "config.json").string(), to_json(cfg));

    json summary;
    json files = json::array();
    for (SeedOrder order : {SeedOrder::plus, SeedOrder::minus}) {
        RunConfig c = cfg;
        c.campaign.seed_order = order;
        const TruthSet t = simulate_truth(c);
        const std::string tag = order_tag(order);
        const json meta = {{"seed_order", static_cast<int>(order)},
                           {"rows_band", to_string(seeded_band(order))},
                           {"cols_band", to_string(detected_band(order))},
                           {"filter", filter_name(c.campaign.filter)},
                           {"stride", t.layout.stride},
                           {"pad", t.layout.pad}};
        io::write_jsa((out / ("ring_" + tag + ".bin")).string(), t.ring, meta);
        io::write_jsa((out / ("spiral_" + tag + ".bin")).string(), t.spiral, meta);
        files.push_back("ring_" + tag + ".bin");
        files.push_back("spiral_" + tag + ".bin");
    }

    const ComplexJSA ring = campaign_truth(cfg);
    const ComplexJSA spiral = spiral_jsa(cfg.spiral, cfg.pump.spectrum(), ring.grid, cfg.quadrature);
    io::write_jsa((out / "jsa_ring.bin").string(), ring, {{"rows_band", "signal"}, {"cols_band", "idler"}});
    io::write_jsa((out / "jsa_spiral.bin").string(), spiral, {{"rows_band", "signal"}, {"cols_band", "idler"}});

    const ComplexJSA dense = dense_truth(cfg);
    io::write_jsa((out / "jsa_dense.bin").string(), dense, {{"rows_band", "signal"}, {"cols_band", "idler"}});
    const SchmidtResult kc = schmidt_number(dense), ki = schmidt_number_intensity_only(dense);

    for (Band b : {Band::pump, Band::signal, Band::idler}) {
        const BandResonance& res = cfg.ring.band(b);
        const double span = cfg.campaign.transfer_span_linewidths * 2.0 * res.decay_rate();
        std::vector<double> omegas(cfg.campaign.transfer_points);
        for (std::size_t k = 0; k < omegas.size(); ++k)
            omegas[k] = res.omega0 - 0.5 * span + span * static_cast<double>(k) / static_cast<double>(omegas.size() - 1);
        io::write_transfer_csv((out / (std::string("t_h_") + to_string(b) + ".csv")).string(),
                               synthesize_transfer_scan(cfg.ring, b, omegas, 0.0, 0));
    }

    json images = json::array();
    render(out / "jsi_ring.png", ring.intensity(), Colormap::viridis, images);
    render(out / "jsp_ring.png", ring.phase(), Colormap::cyclic, images);
    render(out / "jsi_spiral.png", spiral.intensity(), Colormap::viridis, images);
    render(out / "jsp_spiral.png", spiral.phase(), Colormap::cyclic, images);
    {
        HeatmapOptions opts;
        opts.cell_px = 2;
        write_heatmap_png((out / "jsi_dense.png").string(), dense.intensity(), opts);
        images.push_back("jsi_dense.png");
    }

    summary["config"] = to_json(cfg);
    summary["filter"] = filter_name(cfg.campaign.filter);
    summary["fine_truth_files"] = files;
    summary["campaign_grid"] = {{"signal_nm", nm_axis(ring.grid.signal())}, {"idler_nm", nm_axis(ring.grid.idler())}};
    summary["dense_grid"] = {{"points_per_axis", cfg.schmidt_points},
                             {"span_halfwidths", cfg.schmidt_span_halfwidths}};
    summary["schmidt_dense"] = {{"K_complex", kc.K}, {"K_intensity_only", ki.K}};
    summary["schmidt_campaign_grid"] = {{"K_complex", schmidt_number(ring).K},
                                        {"K_intensity_only", schmidt_number_intensity_only(ring).K}};
    summary["normalization"] = {{"ring", ring.norm_squared()}, {"dense", dense.norm_squared()}};
    summary["images"] = images;
    io::write_json((out / "truth.json").string(), summary);
    return summary;
}

// ---------------------------------------------------------------- synthesize

json cmd_synthesize(const RunConfig& cfg, const std::string& truth_dir, const std::string& out_dir)
{
    cfg.validate();
    const fs::path td(truth_dir);
    const std::string tag = order_tag(cfg.campaign.seed_order);
    std::vector<std::string> missing;
    for (const std::string& name : {std::string("truth.json"), "ring_" + tag + ".bin", "spiral_" + tag + ".bin"})
        if (!fs::exists(td / name)) missing.push_back(name);
    if (!missing.empty()) {
        std::string list;
        for (const auto& f : missing) list += (list.empty() ? "" : ", ") + f;
        throw ConfigError("truth directory '" + truth_dir + "' is missing: " + list + " (run simulate first)");
    }
    const json truth_meta = io::read_json((td / "truth.json").string());
    const std::string truth_filter = truth_meta.value("filter", "");
    if (truth_filter != filter_name(cfg.campaign.filter))
        throw ConfigError("truth in '" + truth_dir + "' was simulated for the " + truth_filter +
                          " filter, campaign uses " + filter_name(cfg.campaign.filter) + "; rerun simulate");

    const ComplexJSA ring = io::read_jsa((td / ("ring_" + tag + ".bin")).string());
    const ComplexJSA spiral = io::read_jsa((td / ("spiral_" + tag + ".bin")).string());
    const MeasurementSet m = synthesize_campaign(ring, spiral, cfg.ring, cfg.campaign);
    json provenance = {{"run_config", to_json(cfg)}};
    io::write_measurement(out_dir, m, provenance);

    double total = 0.0;
    for (double v : m.fringe.counts) total += v;
    return {{"grid", {m.grid.n_signal(), m.grid.n_idler()}},
            {"phase_steps", m.fringe.schedule.size()},
            {"noiseless", cfg.campaign.noiseless},
            {"seed", cfg.campaign.rng_seed},
            {"seed_order", static_cast<int>(cfg.campaign.seed_order)},
            {"fringe_counts_total", total}};
}

// ---------------------------------------------------------------- reconstruct

json cmd_reconstruct(const std::string& measurement_dir, const std::string& out_dir, const ReconstructionOptions& opts)
{
    json cfg;
    const MeasurementSet m = io::read_measurement(measurement_dir, &cfg);
    const ReconstructionResult res = reconstruct(m, opts);

    const fs::path out(out_dir);
    fs::create_directories(out);
    const std::string corner = "signal_nm\\idler_nm";
    io::write_map_csv((out / "jsi.csv").string(), res.jsi, res.grid, false, corner);
    io::write_map_csv((out / "jsp.csv").string(), res.jsp, res.grid, false, corner);
    io::write_map_csv((out / "delta.csv").string(), res.delta.delta, res.grid, false, corner);
    io::write_map_csv((out / "sigma_delta.csv").string(), res.delta.sigma, res.grid, false, corner);
    io::write_map_csv((out / "abs_delta.csv").string(), res.abs_delta.delta, res.grid, false, corner);
    io::write_map_csv((out / "mask.csv").string(), mask_to_real(res.mask), res.grid, true, corner);
    io::write_jsa((out / "jsa.bin").string(), res.jsa, {{"rows_band", "signal"}, {"cols_band", "idler"}});
    {
        std::vector<TransferSample> curve;
        for (std::size_t k = 0; k < res.theta_fe.omega.size(); ++k)
            curve.push_back({res.theta_fe.omega[k], 0.0, res.theta_fe.theta[k]});
        std::ofstream f(out / "theta_fe.csv");
        f << "lambda_nm,omega_rad_per_s,theta_fe_rad\n";
        for (const auto& s : curve)
            f << io::format_number(units::omega_to_wavelength_nm(s.omega)) << ',' << io::format_number(s.omega) << ','
              << io::format_number(s.phase) << '\n';
    }
    io::write_json((out / "campaign.cfg").string(), cfg);

    const fs::path copy = out / "measurement";
    fs::remove_all(copy);
    fs::create_directories(copy);
    for (const char* name : {"campaign.cfg", "i_res.csv", "i_spi.csv", "i_int.csv", "fringes.bin", "t_h.csv"})
        fs::copy_file(fs::path(measurement_dir) / name, copy / name, fs::copy_options::overwrite_existing);

    const TransferFit& tf = res.transfer;
    std::vector<double> sig;
    for (Eigen::Index k = 0; k < res.delta.sigma.size(); ++k)
        if (res.mask.data()[k]) sig.push_back(res.delta.sigma.data()[k]);
    json cov = json::array();
    for (int r = 0; r < 6; ++r) {
        json row = json::array();
        for (int c = 0; c < 6; ++c) row.push_back(tf.covariance(r, c));
        cov.push_back(row);
    }
    const SchmidtResult kp = schmidt_number(res.jsa), ki = schmidt_number_intensity_only(res.jsa);

    json report;
    report["seed_order"] = static_cast<int>(res.seed_order);
    report["grid"] = {{"rows_band", "signal"},
                      {"cols_band", "idler"},
                      {"rows_nm", nm_axis(res.grid.signal())},
                      {"cols_nm", nm_axis(res.grid.idler())}};
    report["transfer_fit"] = {
        {"band", to_string(seeded_band(res.seed_order))},
        {"tau_e_ps", tf.tau_e * 1e12},
        {"tau_tot_ps", tf.tau_tot * 1e12},
        {"lambda0_nm", units::omega_to_wavelength_nm(tf.omega0)},
        {"omega0_rad_per_s", tf.omega0},
        {"amplitude", tf.amplitude},
        {"phase0_rad", tf.phase0},
        {"phase_slope_rad_per_rad_per_s", tf.phase_slope},
        {"omega_ref_rad_per_s", tf.omega_ref},
        {"sigma_tau_e_ps", std::sqrt(tf.covariance(3, 3)) * 1e12},
        {"sigma_tau_tot_ps", std::sqrt(tf.covariance(4, 4)) * 1e12},
        {"covariance_order", {"amplitude", "phase0", "phase_slope", "tau_e", "tau_tot", "omega0"}},
        {"covariance_si", cov},
        {"residual_norm", tf.residual_norm},
        {"samples", tf.samples},
        {"iterations", tf.iterations}};
    report["mask"] = {{"valid_points", res.mask.count()},
                      {"total_points", res.mask.size()},
                      {"snr_threshold", opts.snr_threshold},
                      {"rule", "fringe amplitude A >= snr_threshold * sigma_A"}};
    report["phase"] = {{"median_sigma_delta_rad", median(sig)},
                       {"max_sigma_delta_rad", sig.empty() ? 0.0 : *std::max_element(sig.begin(), sig.end())},
                       {"abs_delta_valid_points", res.abs_delta.valid.count()},
                       {"eps_clamp", opts.eps_clamp}};
    report["schmidt"] = {{"K_jsi", ki.K}, {"K_jsp", kp.K}};
    report["conventions"] = {{"jsp", res.phase_convention},
                             {"field_enhancement_phase_sign", kFieldEnhancementPhaseSign},
                             {"interference", "I = |exp(i dtheta) a + b|^2, delta = Arg(a b^*)"},
                             {"fringe_model", "A cos(dtheta + delta) + B, weights 1/max(counts, 1)"},
                             {"global_phase", "JSP = 0 at the JSI peak"}};
    report["rng"] = cfg.value("rng", json::object());
    report["integer_counts"] = m.integer_counts;
    io::write_json((out / "report.json").string(), report);
    return {{"valid_points", res.mask.count()}, {"K_jsi", ki.K}, {"K_jsp", kp.K}, {"tau_tot_ps", tf.tau_tot * 1e12}};
}

// ---------------------------------------------------------------- report

json cmd_report(const std::string& result_dir, const std::string& truth_dir, std::size_t trials, std::uint64_t seed)
{
    const fs::path rd(result_dir);
    std::vector<std::string> missing;
    for (const char* name : {"jsa.bin", "jsi.csv", "jsp.csv", "delta.csv", "report.json"})
        if (!fs::exists(rd / name)) missing.emplace_back(name);
    if (!missing.empty()) {
        std::string list;
        for (const auto& f : missing) list += (list.empty() ? "" : ", ") + f;
        throw ConfigError("result directory '" + result_dir + "' is incomplete, missing: " + list);
    }

    const ComplexJSA jsa = io::read_jsa((rd / "jsa.bin").string());
    const std::size_t rows = jsa.grid.n_signal(), cols = jsa.grid.n_idler();
    const RealMatrix jsi = io::read_map_csv((rd / "jsi.csv").string(), rows, cols);
    const RealMatrix jsp = io::read_map_csv((rd / "jsp.csv").string(), rows, cols);
    const RealMatrix delta = io::read_map_csv((rd / "delta.csv").string(), rows, cols);
    MaskMatrix mask(rows, cols);
    for (Eigen::Index k = 0; k < jsp.size(); ++k) mask.data()[k] = std::isfinite(jsp.data()[k]);

    const SchmidtResult kp = schmidt_number(jsa), ki = schmidt_number_intensity_only(jsa);
    json metrics;
    metrics["schmidt"] = {{"formula", "K = 1/sum(lambda_n^4), lambda_n normalized singular values of phi*sqrt(dws*dwi)"},
                          {"version", 1},
                          {"K_jsp", kp.K},
                          {"K_jsi", ki.K},
                          {"complex", schmidt_json(kp)},
                          {"intensity_only", schmidt_json(ki)},
                          {"K_jsp_ge_K_jsi", kp.K >= ki.K}};

    const FidelityResult self_i = fidelity_intensity(jsi, jsi);
    const FidelityResult self_c = fidelity_complex(jsa, jsa);
    metrics["fidelity"] = {{"intensity_formula", self_i.formula},
                           {"complex_formula", self_c.formula},
                           {"version", 1},
                           {"self_intensity", self_i.value},
                           {"self_complex", self_c.value},
                           {"vs_truth", nullptr}};

    const bool have_measurement = fs::exists(rd / "measurement" / "campaign.cfg");
    CampaignConfig campaign;
    MeasurementSet m;
    if (have_measurement) {
        m = io::read_measurement((rd / "measurement").string());
        campaign = m.campaign;
    }

    if (trials > 0 && have_measurement) {
        MonteCarloOptions mc;
        mc.trials = trials;
        mc.seed = seed;
        const MonteCarloSummary s = monte_carlo_errors(m, mc);
        json jm = json::object();
        for (const auto& [name, st] : s.metrics) jm[name] = {{"mean", st.mean}, {"std", st.std}, {"samples", st.samples}};
        metrics["monte_carlo"] = {{"trials", s.trials},
                                  {"failures", s.failures},
                                  {"seed", seed},
                                  {"rng", CounterRng::kName},
                                  {"resampling", "Poisson(observed) per count bin"},
                                  {"metrics", jm}};
        if (s.metrics.count("K_jsp")) metrics["schmidt"]["K_jsp_std"] = s.metrics.at("K_jsp").std;
        if (s.metrics.count("K_jsi")) metrics["schmidt"]["K_jsi_std"] = s.metrics.at("K_jsi").std;
    } else {
        metrics["monte_carlo"] = nullptr;
    }

    json images = json::array();
    render(rd / "jsi.png", jsi, Colormap::viridis, images);
    render(rd / "jsp.png", jsp, Colormap::cyclic, images);
    render(rd / "delta.png", delta, Colormap::cyclic, images);

    if (!truth_dir.empty()) {
        const fs::path td(truth_dir);
        if (!fs::exists(td / "truth.json") || !have_measurement) {
            metrics["fidelity"]["vs_truth_skipped"] = "truth.json or measurement copy not found";
        } else {
            RunConfig cfg = parse_run_config(io::read_json((td / "truth.json").string()).at("config"));
            cfg.campaign = campaign;
            cfg.filter_name = filter_name(campaign.filter);
            TruthSet truth;
            truth.layout = simulation_layout(cfg.ring, cfg.campaign);
            const std::string tag = order_tag(campaign.seed_order);
            bool loaded = false;
            if (fs::exists(td / ("ring_" + tag + ".bin")) && fs::exists(td / ("spiral_" + tag + ".bin"))) {
                truth.ring = io::read_jsa((td / ("ring_" + tag + ".bin")).string());
                truth.spiral = io::read_jsa((td / ("spiral_" + tag + ".bin")).string());
                loaded = truth.ring.grid.matches(truth.layout.fine) && truth.spiral.grid.matches(truth.layout.fine);
            }
            if (!loaded) truth = simulate_truth(cfg);
            const FilteredTruth ft = filtered_truth(truth, campaign);
            const FidelityResult fi = fidelity_intensity(jsi, ft.jsi);
            const FidelityResult fc = fidelity_complex(jsa.values, ft.jsa.values, mask);
            const PhaseComparison pc = compare_phase(jsp, ft.phase, mask);
            const ComplexJSA raw = campaign_truth(cfg);
            const PhaseComparison raw_pc = compare_phase(jsp, raw.phase(), mask);
            metrics["fidelity"]["vs_truth"] = {
                {"truth", "filter-convolved truth matched to the campaign"},
                {"intensity", fi.value},
                {"complex", fc.value},
                {"complex_phase_offset_rad", fc.phase_offset},
                {"jsp_max_error_rad", pc.max_error},
                {"jsp_offset_rad", pc.offset},
                {"jsp_max_error_vs_unfiltered_ring_phase_rad", raw_pc.max_error},
                {"truth_K_jsp", schmidt_number(ft.jsa).K},
                {"truth_K_jsi", schmidt_number_intensity_only(ft.jsa).K}};
            render(rd / "truth_jsi.png", ft.jsi, Colormap::viridis, images);
            RealMatrix truth_phase = ft.phase;
            for (Eigen::Index k = 0; k < truth_phase.size(); ++k)
                truth_phase.data()[k] = wrap_phase(truth_phase.data()[k] + pc.offset);
            render(rd / "truth_jsp.png", truth_phase, Colormap::cyclic, images);
        }
    }
    metrics["images"] = images;
    metrics["grid"] = {{"rows", rows}, {"cols", cols}};
    io::write_json((rd / "metrics.json").string(), metrics);
    return metrics;
}

}  // namespace ringjsa
