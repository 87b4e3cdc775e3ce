#include "ringjsa/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace ringjsa {

using nlohmann::json;

PumpSpectrum PumpConfig::spectrum() const
{
    switch (shape) {
    case PumpShape::gaussian: return PumpSpectrum::gaussian(center_omega, fwhm, chirp);
    case PumpShape::sech2: return PumpSpectrum::sech2(center_omega, fwhm, chirp);
    case PumpShape::tabulated: return PumpSpectrum::tabulated(table_omega, table_amplitude);
    }
    throw ConfigError("unknown pump shape");
}

RunConfig RunConfig::defaults()
{
    RunConfig cfg;
    cfg.ring = RingParams::reference_device();
    cfg.pump.shape = PumpShape::gaussian;
    cfg.pump.center_omega = cfg.ring.pump.omega0;
    cfg.set_pump_bandwidth_pm(250.0);
    cfg.spiral.length = 2.35e-3;
    cfg.spiral.expansion_omega = cfg.ring.pump.omega0;
    cfg.spiral.dispersion = {0.0, 0.0, 1e-24};  // k2 = 1 ps^2/m
    cfg.spiral.gamma_nl = 1.0;
    cfg.campaign = CampaignConfig{};
    cfg.set_filter("off-chip");
    return cfg;
}

void RunConfig::set_pump_bandwidth_pm(double pm)
{
    if (!(pm > 0.0)) throw ConfigError("pump bandwidth must be > 0 pm");
    pump.fwhm = units::wavelength_width_to_omega(pm, units::omega_to_wavelength_nm(pump.center_omega));
}

FilterSpec filter_by_name(const std::string& name)
{
    if (name == "on-chip") return FilterSpec::on_chip();
    if (name == "off-chip") return FilterSpec::off_chip();
    if (name == "ideal") return FilterSpec{FilterShape::ideal, 0.0};
    throw ConfigError("unknown filter '" + name + "' (expected on-chip, off-chip or ideal)");
}

std::string filter_name(const FilterSpec& f)
{
    const FilterSpec on = FilterSpec::on_chip(), off = FilterSpec::off_chip();
    if (f.shape == FilterShape::ideal) return "ideal";
    if (f.shape == on.shape && f.fwhm == on.fwhm) return "on-chip";
    if (f.shape == off.shape && f.fwhm == off.fwhm) return "off-chip";
    return "custom";
}

void RunConfig::set_filter(const std::string& name)
{
    campaign.filter = filter_by_name(name);
    filter_name = name;
}

void RunConfig::validate() const
{
    try {
        ring.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(std::string("ring: ") + e.what());
    }
    try {
        (void)pump.spectrum();
    } catch (const ConfigError& e) {
        throw ConfigError(std::string("pump: ") + e.what());
    }
    try {
        spiral.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(std::string("spiral: ") + e.what());
    }
    try {
        campaign.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(std::string("campaign: ") + e.what());
    }
    if (schmidt_points < 8) throw ConfigError("schmidt.grid_points: must be >= 8");
    if (!(schmidt_span_halfwidths > 0.0)) throw ConfigError("schmidt.span_halfwidths: must be > 0");
    if (!(quadrature.rel_tol > 0.0)) throw ConfigError("quadrature.rel_tol: must be > 0");
    if (quadrature.oversampling < 1) throw ConfigError("quadrature.oversampling: must be >= 1");
}

// ---------------------------------------------------------------- parsing

namespace {

/// Reads keys of one JSON object, remembering which were consumed so that
/// typos are reported instead of silently ignored.
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path))
    {
        if (!j_.is_object()) fail("", "must be an object");
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    double number(const std::string& key, double fallback)
    {
        if (!j_.contains(key)) return fallback;
        used_.insert(key);
        const json& v = j_.at(key);
        if (!v.is_number()) fail(key, "must be a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) fail(key, "must be finite");
        return x;
    }

    double positive(const std::string& key, double fallback)
    {
        const double x = number(key, fallback);
        if (!(x > 0.0)) fail(key, "must be > 0");
        return x;
    }

    double nonnegative(const std::string& key, double fallback)
    {
        const double x = number(key, fallback);
        if (!(x >= 0.0)) fail(key, "must be >= 0");
        return x;
    }

    std::uint64_t count(const std::string& key, std::uint64_t fallback)
    {
        if (!j_.contains(key)) return fallback;
        used_.insert(key);
        const json& v = j_.at(key);
        if (!v.is_number_integer() || v.get<long long>() < 0) fail(key, "must be a nonnegative integer");
        return v.get<std::uint64_t>();
    }

    bool flag(const std::string& key, bool fallback)
    {
        if (!j_.contains(key)) return fallback;
        used_.insert(key);
        if (!j_.at(key).is_boolean()) fail(key, "must be true or false");
        return j_.at(key).get<bool>();
    }

    std::string text(const std::string& key, const std::string& fallback)
    {
        if (!j_.contains(key)) return fallback;
        used_.insert(key);
        if (!j_.at(key).is_string()) fail(key, "must be a string");
        return j_.at(key).get<std::string>();
    }

    const json& raw(const std::string& key)
    {
        used_.insert(key);
        return j_.at(key);
    }

    Section child(const std::string& key)
    {
        static const json empty = json::object();
        if (!j_.contains(key)) return Section(empty, join(key));
        used_.insert(key);
        return Section(j_.at(key), join(key));
    }

    void finish() const
    {
        for (const auto& [key, value] : j_.items())
            if (!used_.count(key)) fail(key, "unknown key");
    }

    std::string join(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    [[noreturn]] void fail(const std::string& key, const std::string& what) const
    {
        throw ConfigError((key.empty() ? path_ : join(key)) + ": " + what);
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> used_;
};

void parse_band(Section& s, const char* tag, BandResonance& res)
{
    const std::string t(tag);
    const double lambda = s.positive("lambda_" + t + "_nm", units::omega_to_wavelength_nm(res.omega0));
    res.omega0 = units::wavelength_nm_to_omega(lambda);
    res.tau_e = s.positive("tau_e_" + t + "_ps", res.tau_e * 1e12) * 1e-12;
    res.tau_tot = s.positive("tau_tot_" + t + "_ps", res.tau_tot * 1e12) * 1e-12;
}

SeedOrder parse_order(Section& s, const std::string& key, SeedOrder fallback)
{
    const double v = s.number(key, static_cast<int>(fallback));
    if (v == 1.0) return SeedOrder::plus;
    if (v == -1.0) return SeedOrder::minus;
    s.fail(key, "must be +1 or -1");
}

}  // namespace

RunConfig parse_run_config(const json& j)
{
    RunConfig cfg = RunConfig::defaults();
    Section root(j, "");

    {
        Section s = root.child("ring");
        cfg.ring.perimeter = s.positive("perimeter_um", cfg.ring.perimeter * 1e6) * 1e-6;
        if (s.has("group_index") && s.has("fsr_ghz")) s.fail("group_index", "give either group_index or fsr_ghz");
        if (s.has("group_index"))
            cfg.ring.group_index = s.positive("group_index", cfg.ring.group_index);
        else
            cfg.ring.group_index = group_index_for_fsr(s.positive("fsr_ghz", 800.0) * 1e9, cfg.ring.perimeter);
        parse_band(s, "p", cfg.ring.pump);
        parse_band(s, "s", cfg.ring.signal);
        parse_band(s, "i", cfg.ring.idler);
        s.finish();
    }
    {
        Section s = root.child("pump");
        const std::string shape = s.text("shape", "gaussian");
        const double center_nm = s.positive("center_nm", units::omega_to_wavelength_nm(cfg.ring.pump.omega0));
        cfg.pump.center_omega = units::wavelength_nm_to_omega(center_nm);
        cfg.pump.chirp = s.number("chirp_ps2", 0.0) * 1e-24;
        if (shape == "gaussian" || shape == "sech2") {
            cfg.pump.shape = shape == "gaussian" ? PumpShape::gaussian : PumpShape::sech2;
            cfg.set_pump_bandwidth_pm(s.positive("fwhm_pm", 250.0));
        } else if (shape == "tabulated") {
            cfg.pump.shape = PumpShape::tabulated;
            if (!s.has("table")) s.fail("table", "required for a tabulated pump ([[lambda_nm, re, im], ...])");
            const json& table = s.raw("table");
            if (!table.is_array()) s.fail("table", "must be an array of [lambda_nm, re, im]");
            std::vector<std::pair<double, cdouble>> rows;
            for (std::size_t k = 0; k < table.size(); ++k) {
                const json& row = table[k];
                if (!row.is_array() || row.size() != 3 || !row[0].is_number() || !row[1].is_number() ||
                    !row[2].is_number())
                    s.fail("table[" + std::to_string(k) + "]", "must be [lambda_nm, re, im]");
                rows.emplace_back(units::wavelength_nm_to_omega(row[0].get<double>()),
                                  cdouble(row[1].get<double>(), row[2].get<double>()));
            }
            std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
            for (const auto& [w, a] : rows) {
                cfg.pump.table_omega.push_back(w);
                cfg.pump.table_amplitude.push_back(a);
            }
            try {
                (void)cfg.pump.spectrum();
            } catch (const ConfigError& e) {
                s.fail("table", e.what());
            }
        } else {
            s.fail("shape", "must be gaussian, sech2 or tabulated");
        }
        s.finish();
    }
    {
        Section s = root.child("spiral");
        cfg.spiral.length = s.positive("length_mm", 2.35) * 1e-3;
        cfg.spiral.expansion_omega =
            units::wavelength_nm_to_omega(s.positive("expansion_nm", units::omega_to_wavelength_nm(cfg.pump.center_omega)));
        const double k2 = s.number("k2_ps2_per_m", 1.0) * 1e-24;
        const double k3 = s.number("k3_ps3_per_m", 0.0) * 1e-36;
        const double k4 = s.number("k4_ps4_per_m", 0.0) * 1e-48;
        cfg.spiral.dispersion = {0.0, 0.0, k2};
        if (k3 != 0.0 || k4 != 0.0) cfg.spiral.dispersion.push_back(k3);
        if (k4 != 0.0) cfg.spiral.dispersion.push_back(k4);
        cfg.spiral.gamma_nl = s.positive("gamma_per_w_m", 1.0);
        s.finish();
    }
    {
        Section s = root.child("filter");
        const std::string kind = s.text("kind", "off-chip");
        if (kind == "custom") {
            const std::string shape = s.text("shape", "lorentzian");
            FilterSpec f;
            if (shape == "lorentzian")
                f.shape = FilterShape::lorentzian;
            else if (shape == "rect")
                f.shape = FilterShape::rect;
            else
                s.fail("shape", "must be lorentzian or rect");
            f.fwhm = s.positive("fwhm_grad_per_s", 40.0) * 1e9;
            cfg.campaign.filter = f;
            cfg.filter_name = "custom";
        } else {
            try {
                cfg.set_filter(kind);
            } catch (const ConfigError& e) {
                s.fail("kind", e.what());
            }
        }
        s.finish();
    }
    {
        Section s = root.child("campaign");
        auto& c = cfg.campaign;
        c.n_signal = s.count("n_signal", c.n_signal);
        c.n_idler = s.count("n_idler", c.n_idler);
        if (c.n_signal < 2) s.fail("n_signal", "must be >= 2");
        if (c.n_idler < 2) s.fail("n_idler", "must be >= 2");
        const double lam_s = units::omega_to_wavelength_nm(cfg.ring.signal.omega0);
        const double lam_i = units::omega_to_wavelength_nm(cfg.ring.idler.omega0);
        c.signal_span = units::wavelength_width_to_omega(s.nonnegative("signal_span_pm", 0.0), lam_s);
        c.idler_span = units::wavelength_width_to_omega(s.nonnegative("idler_span_pm", 0.0), lam_i);
        if (s.has("phase_schedule_rad")) {
            const json& sched = s.raw("phase_schedule_rad");
            if (!sched.is_array()) s.fail("phase_schedule_rad", "must be an array of numbers");
            c.phase_schedule.clear();
            for (const json& v : sched) {
                if (!v.is_number()) s.fail("phase_schedule_rad", "must be an array of numbers");
                c.phase_schedule.push_back(v.get<double>());
            }
        } else {
            c.phase_schedule = CampaignConfig::uniform_schedule(s.count("phase_steps", 30));
        }
        if (c.phase_schedule.size() < 4) s.fail("phase_steps", "need at least 4 phase steps");
        c.counts_scale = s.positive("counts_scale", c.counts_scale);
        c.dark_counts = s.nonnegative("dark_counts", c.dark_counts);
        c.filter_oversampling = static_cast<int>(s.count("filter_oversampling", 8));
        if (c.filter_oversampling < 3) s.fail("filter_oversampling", "must be >= 3");
        c.seed_order = parse_order(s, "seed_order", c.seed_order);
        c.noiseless = s.flag("noiseless", c.noiseless);
        c.spiral_balance = s.positive("spiral_balance", c.spiral_balance);
        c.splitter_imbalance = s.number("splitter_imbalance", c.splitter_imbalance);
        if (!(std::abs(c.splitter_imbalance) < 1.0)) s.fail("splitter_imbalance", "must be in (-1, 1)");
        c.background_scale = s.nonnegative("background_scale", c.background_scale);
        c.transfer_points = s.count("transfer_points", c.transfer_points);
        if (c.transfer_points < 8) s.fail("transfer_points", "must be >= 8");
        c.transfer_span_linewidths = s.positive("transfer_span_linewidths", c.transfer_span_linewidths);
        c.transfer_noise = s.nonnegative("transfer_noise", c.transfer_noise);
        c.transfer_phase_offset = s.number("transfer_phase_offset_rad", 0.0);
        c.transfer_phase_slope = s.number("transfer_phase_slope_rad_per_nm", 0.0);
        if (c.transfer_phase_slope != 0.0) {
            // rad/nm -> rad per rad/s at the seeded resonance
            const double lam = units::omega_to_wavelength_nm(cfg.ring.band(seeded_band(c.seed_order)).omega0);
            c.transfer_phase_slope /= units::wavelength_width_to_omega(1000.0, lam);
        }
        s.finish();
    }
    {
        Section s = root.child("schmidt");
        cfg.schmidt_points = s.count("grid_points", cfg.schmidt_points);
        cfg.schmidt_span_halfwidths = s.positive("span_halfwidths", cfg.schmidt_span_halfwidths);
        s.finish();
    }
    {
        Section s = root.child("quadrature");
        cfg.quadrature.rel_tol = s.positive("rel_tol", cfg.quadrature.rel_tol);
        cfg.quadrature.oversampling = static_cast<int>(s.count("oversampling", 8));
        cfg.quadrature.max_refinements = static_cast<int>(s.count("max_refinements", 10));
        s.finish();
    }
    cfg.seed = root.count("seed", cfg.seed);
    cfg.campaign.rng_seed = cfg.seed;
    root.finish();

    cfg.validate();
    return cfg;
}

RunConfig load_run_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_run_config(j);
}

json to_json(const RunConfig& cfg)
{
    auto nm = [](double w) { return units::omega_to_wavelength_nm(w); };
    json j;
    json& ring = j["ring"];
    ring["perimeter_um"] = cfg.ring.perimeter / 1e-6;
    ring["group_index"] = cfg.ring.group_index;
    for (auto [tag, band] : {std::pair{"p", Band::pump}, {"s", Band::signal}, {"i", Band::idler}}) {
        const BandResonance& r = cfg.ring.band(band);
        ring[std::string("lambda_") + tag + "_nm"] = nm(r.omega0);
        ring[std::string("tau_e_") + tag + "_ps"] = r.tau_e / 1e-12;
        ring[std::string("tau_tot_") + tag + "_ps"] = r.tau_tot / 1e-12;
    }

    json& pump = j["pump"];
    pump["shape"] = to_string(cfg.pump.shape);
    pump["center_nm"] = nm(cfg.pump.center_omega);
    pump["chirp_ps2"] = cfg.pump.chirp / 1e-24;
    if (cfg.pump.shape == PumpShape::tabulated) {
        json table = json::array();
        for (std::size_t k = 0; k < cfg.pump.table_omega.size(); ++k)
            table.push_back({nm(cfg.pump.table_omega[k]), cfg.pump.table_amplitude[k].real(),
                             cfg.pump.table_amplitude[k].imag()});
        pump["table"] = table;
    } else {
        pump["fwhm_pm"] = units::omega_width_to_wavelength_pm(cfg.pump.fwhm, nm(cfg.pump.center_omega));
    }

    json& spiral = j["spiral"];
    spiral["length_mm"] = cfg.spiral.length / 1e-3;
    spiral["expansion_nm"] = nm(cfg.spiral.expansion_omega);
    const auto& d = cfg.spiral.dispersion;
    spiral["k2_ps2_per_m"] = d.size() > 2 ? d[2] / 1e-24 : 0.0;
    if (d.size() > 3) spiral["k3_ps3_per_m"] = d[3] / 1e-36;
    if (d.size() > 4) spiral["k4_ps4_per_m"] = d[4] / 1e-48;
    spiral["gamma_per_w_m"] = cfg.spiral.gamma_nl;

    json& filter = j["filter"];
    filter["kind"] = cfg.filter_name;
    if (cfg.filter_name == "custom") {
        filter["shape"] = to_string(cfg.campaign.filter.shape);
        filter["fwhm_grad_per_s"] = cfg.campaign.filter.fwhm / 1e9;
    }

    const auto& c = cfg.campaign;
    json& camp = j["campaign"];
    camp["n_signal"] = c.n_signal;
    camp["n_idler"] = c.n_idler;
    camp["signal_span_pm"] = units::omega_width_to_wavelength_pm(c.signal_span, nm(cfg.ring.signal.omega0));
    camp["idler_span_pm"] = units::omega_width_to_wavelength_pm(c.idler_span, nm(cfg.ring.idler.omega0));
    camp["phase_schedule_rad"] = c.phase_schedule;
    camp["counts_scale"] = c.counts_scale;
    camp["dark_counts"] = c.dark_counts;
    camp["filter_oversampling"] = c.filter_oversampling;
    camp["seed_order"] = static_cast<int>(c.seed_order);
    camp["noiseless"] = c.noiseless;
    camp["spiral_balance"] = c.spiral_balance;
    camp["splitter_imbalance"] = c.splitter_imbalance;
    camp["background_scale"] = c.background_scale;
    camp["transfer_points"] = c.transfer_points;
    camp["transfer_span_linewidths"] = c.transfer_span_linewidths;
    camp["transfer_noise"] = c.transfer_noise;
    camp["transfer_phase_offset_rad"] = c.transfer_phase_offset;
    const double lam = nm(cfg.ring.band(seeded_band(c.seed_order)).omega0);
    camp["transfer_phase_slope_rad_per_nm"] = c.transfer_phase_slope * units::wavelength_width_to_omega(1000.0, lam);

    j["schmidt"] = {{"grid_points", cfg.schmidt_points}, {"span_halfwidths", cfg.schmidt_span_halfwidths}};
    j["quadrature"] = {{"rel_tol", cfg.quadrature.rel_tol},
                       {"oversampling", cfg.quadrature.oversampling},
                       {"max_refinements", cfg.quadrature.max_refinements}};
    j["seed"] = cfg.seed;
    return j;
}

// ---------------------------------------------------------------- campaign block (SI)

json campaign_to_json(const CampaignConfig& c)
{
    json j;
    j["n_signal"] = c.n_signal;
    j["n_idler"] = c.n_idler;
    j["signal_span_rad_per_s"] = c.signal_span;
    j["idler_span_rad_per_s"] = c.idler_span;
    j["phase_schedule_rad"] = c.phase_schedule;
    j["counts_scale"] = c.counts_scale;
    j["dark_counts"] = c.dark_counts;
    j["filter"] = {{"shape", to_string(c.filter.shape)}, {"fwhm_rad_per_s", c.filter.fwhm}};
    j["filter_oversampling"] = c.filter_oversampling;
    j["rng_seed"] = c.rng_seed;
    j["seed_order"] = static_cast<int>(c.seed_order);
    j["noiseless"] = c.noiseless;
    j["spiral_balance"] = c.spiral_balance;
    j["splitter_imbalance"] = c.splitter_imbalance;
    j["background_scale"] = c.background_scale;
    j["transfer_points"] = c.transfer_points;
    j["transfer_span_linewidths"] = c.transfer_span_linewidths;
    j["transfer_noise"] = c.transfer_noise;
    j["transfer_phase_offset_rad"] = c.transfer_phase_offset;
    j["transfer_phase_slope_rad_per_rad_per_s"] = c.transfer_phase_slope;
    return j;
}

CampaignConfig campaign_from_json(const json& j)
{
    Section s(j, "campaign");
    CampaignConfig c;
    c.n_signal = s.count("n_signal", c.n_signal);
    c.n_idler = s.count("n_idler", c.n_idler);
    c.signal_span = s.nonnegative("signal_span_rad_per_s", 0.0);
    c.idler_span = s.nonnegative("idler_span_rad_per_s", 0.0);
    if (s.has("phase_schedule_rad")) {
        const json& sched = s.raw("phase_schedule_rad");
        if (!sched.is_array()) s.fail("phase_schedule_rad", "must be an array");
        c.phase_schedule = sched.get<std::vector<double>>();
    }
    c.counts_scale = s.positive("counts_scale", c.counts_scale);
    c.dark_counts = s.nonnegative("dark_counts", c.dark_counts);
    {
        Section f = s.child("filter");
        const std::string shape = f.text("shape", "rect");
        if (shape == "ideal")
            c.filter.shape = FilterShape::ideal;
        else if (shape == "lorentzian")
            c.filter.shape = FilterShape::lorentzian;
        else if (shape == "rect")
            c.filter.shape = FilterShape::rect;
        else
            f.fail("shape", "must be ideal, lorentzian or rect");
        c.filter.fwhm = f.nonnegative("fwhm_rad_per_s", c.filter.fwhm);
        f.finish();
    }
    c.filter_oversampling = static_cast<int>(s.count("filter_oversampling", 8));
    c.rng_seed = s.count("rng_seed", c.rng_seed);
    c.seed_order = parse_order(s, "seed_order", c.seed_order);
    c.noiseless = s.flag("noiseless", c.noiseless);
    c.spiral_balance = s.positive("spiral_balance", c.spiral_balance);
    c.splitter_imbalance = s.number("splitter_imbalance", 0.0);
    c.background_scale = s.nonnegative("background_scale", 0.0);
    c.transfer_points = s.count("transfer_points", c.transfer_points);
    c.transfer_span_linewidths = s.positive("transfer_span_linewidths", c.transfer_span_linewidths);
    c.transfer_noise = s.nonnegative("transfer_noise", c.transfer_noise);
    c.transfer_phase_offset = s.number("transfer_phase_offset_rad", 0.0);
    c.transfer_phase_slope = s.number("transfer_phase_slope_rad_per_rad_per_s", 0.0);
    s.finish();
    try {
        c.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(std::string("campaign: ") + e.what());
    }
    return c;
}

}  // namespace ringjsa
