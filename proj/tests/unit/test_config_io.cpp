#include <doctest.h>

#include "helpers.hpp"
#include "ringjsa/io.hpp"
#include "ringjsa/pipeline.hpp"

using namespace ringjsa;
using nlohmann::json;

namespace {

std::string config_error(const json& j)
{
    try {
        parse_run_config(j);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("empty config reproduces the defaults")
{
    const RunConfig a = parse_run_config(json::object());
    const RunConfig d = RunConfig::defaults();
    CHECK(a.ring.signal.tau_e == doctest::Approx(d.ring.signal.tau_e).epsilon(1e-14));
    CHECK(a.ring.idler.omega0 == doctest::Approx(d.ring.idler.omega0).epsilon(1e-14));
    CHECK(a.pump.fwhm == doctest::Approx(d.pump.fwhm).epsilon(1e-14));
    CHECK(a.filter_name == "off-chip");
    CHECK(a.campaign.n_signal == 10);
    CHECK(a.campaign.n_idler == 20);
    CHECK(a.campaign.phase_schedule.size() == 30);
    CHECK(a.seed == 42);
}

TEST_CASE("config round trips through JSON")
{
    RunConfig cfg = RunConfig::defaults();
    cfg.set_pump_bandwidth_pm(120.0);
    cfg.set_filter("on-chip");
    cfg.campaign.seed_order = SeedOrder::minus;
    cfg.campaign.dark_counts = 3.0;
    cfg.seed = 7;
    const RunConfig back = parse_run_config(to_json(cfg));
    CHECK(back.pump.fwhm == doctest::Approx(cfg.pump.fwhm).epsilon(1e-12));
    CHECK(back.filter_name == "on-chip");
    CHECK(back.campaign.filter.shape == FilterShape::lorentzian);
    CHECK(back.campaign.seed_order == SeedOrder::minus);
    CHECK(back.campaign.dark_counts == 3.0);
    CHECK(back.seed == 7);
    CHECK(to_json(back) == to_json(cfg));

    const CampaignConfig c = campaign_from_json(campaign_to_json(cfg.campaign));
    CHECK(c.phase_schedule == cfg.campaign.phase_schedule);
    CHECK(c.filter.fwhm == cfg.campaign.filter.fwhm);
    CHECK(c.seed_order == cfg.campaign.seed_order);
}

TEST_CASE("config errors name the offending key")
{
    CHECK(config_error({{"ring", {{"tau_e_s_ps", -1.0}}}}) == "ring.tau_e_s_ps: must be > 0");
    CHECK(config_error({{"ring", {{"tau_e_x_ps", 1.0}}}}) == "ring.tau_e_x_ps: unknown key");
    CHECK(config_error({{"campaign", {{"n_signal", "ten"}}}}).rfind("campaign.n_signal:", 0) == 0);
    CHECK(config_error({{"campaign", {{"seed_order", 2}}}}) == "campaign.seed_order: must be +1 or -1");
    CHECK(config_error({{"filter", {{"kind", "none"}}}}).rfind("filter.kind:", 0) == 0);
    CHECK(config_error({{"pump", {{"shape", "tabulated"}}}}).rfind("pump.table:", 0) == 0);
    CHECK(config_error({{"bogus", 1}}) == "bogus: unknown key");
    CHECK(config_error({{"ring", {{"tau_tot_i_ps", 30.0}}}}).rfind("ring:", 0) == 0);
    CHECK_THROWS_AS(load_run_config("/nonexistent/run.json"), ConfigError);
}

TEST_CASE("binary containers round trip and reject foreign files")
{
    testutil::TempDir dir("io");
    const ComplexJSA jsa = campaign_truth(testutil::small_config());
    io::write_jsa(dir / "a.bin", jsa, json{{"source", "test"}});
    json header;
    const ComplexJSA back = io::read_jsa(dir / "a.bin", &header);
    CHECK(back.values == jsa.values);
    CHECK(back.grid.signal() == jsa.grid.signal());
    CHECK(back.grid.idler() == jsa.grid.idler());
    CHECK(header.at("source") == "test");

    std::ofstream(dir / "junk.bin") << "not a container";
    CHECK_THROWS_AS(io::read_jsa(dir / "junk.bin"), ConfigError);
    CHECK_THROWS_AS(io::read_jsa(dir / "missing.bin"), ConfigError);
}

TEST_CASE("CSV maps keep NaN and full precision")
{
    testutil::TempDir dir("csv");
    const SpectralGrid g = SpectralGrid::uniform(1.2e15, 1.21e15, 3, 1.22e15, 1.23e15, 4);
    RealMatrix m = RealMatrix::Random(3, 4);
    m(1, 2) = std::numeric_limits<double>::quiet_NaN();
    io::write_map_csv(dir / "m.csv", m, g, false, "lambda_s_nm\\lambda_i_nm");
    RealMatrix back = io::read_map_csv(dir / "m.csv", 3, 4);
    CHECK(std::isnan(back(1, 2)));
    m(1, 2) = back(1, 2) = 0.0;
    CHECK(back == m);
    CHECK(io::format_number(0.1) == "0.1");
    CHECK(io::format_number(std::numeric_limits<double>::quiet_NaN()) == "nan");
}

TEST_CASE("measurement directory round trip")
{
    testutil::TempDir dir("meas");
    const RunConfig cfg = testutil::small_config();
    const TruthSet t = simulate_truth(cfg);
    const MeasurementSet m = synthesize_campaign(t.ring, t.spiral, cfg.ring, cfg.campaign);
    io::write_measurement(dir / "m", m, json{{"seed", 42}});
    json side;
    const MeasurementSet back = io::read_measurement(dir / "m", &side);
    CHECK(back.i_res == m.i_res);
    CHECK(back.i_int == m.i_int);
    CHECK(back.fringe.counts == m.fringe.counts);
    CHECK(back.fringe.schedule == m.fringe.schedule);
    CHECK(back.transfer.size() == m.transfer.size());
    CHECK(back.transfer[7].phase == m.transfer[7].phase);
    CHECK(back.grid.matches(m.grid, 1e-12));
    CHECK(back.integer_counts);
    CHECK(side.at("rng").at("name") == "splitmix64-counter");

    std::filesystem::remove(dir.path() / "m" / "i_spi.csv");
    std::filesystem::remove(dir.path() / "m" / "t_h.csv");
    try {
        io::read_measurement(dir / "m");
        FAIL("expected an error");
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("i_spi.csv") != std::string::npos);
        CHECK(msg.find("t_h.csv") != std::string::npos);
    }
}
