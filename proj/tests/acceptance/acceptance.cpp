// Acceptance checks. `acceptance N` runs criterion N, no argument runs all.
// Prints one PASS/FAIL line per criterion; exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <sstream>
#include <string>

#include "../oracle/oracle_values.hpp"
#include "ringjsa/io.hpp"
#include "ringjsa/pipeline.hpp"

using namespace ringjsa;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

class Clock {
public:
    double seconds() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

RunConfig noiseless(const std::string& filter)
{
    RunConfig cfg = RunConfig::defaults();
    cfg.set_filter(filter);
    cfg.campaign.noiseless = true;
    return cfg;
}

ReconstructionResult run_chain(const RunConfig& cfg, TruthSet* truth_out = nullptr)
{
    TruthSet truth = simulate_truth(cfg);
    const MeasurementSet m = synthesize_campaign(truth.ring, truth.spiral, cfg.ring, cfg.campaign);
    ReconstructionResult rec = reconstruct(m);
    if (truth_out) *truth_out = std::move(truth);
    return rec;
}

// 1: (T_H + D_R)^* = FE^*/FE and the M-channel reduction, pointwise.
Outcome tcmt_identities()
{
    Clock clock;
    std::mt19937_64 gen(20240601);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    RingParams ring = RingParams::reference_device();
    for (Band b : {Band::pump, Band::signal, Band::idler}) ring.band(b).tau_e = 2.0 * ring.band(b).tau_tot;

    double worst_sum = 0.0;
    for (int k = 0; k < 10000; ++k) {
        const Band band = static_cast<Band>(k % 3);
        const BandResonance& res = ring.band(band);
        const double detuning = (unit(gen) - 0.5) * 40.0 * res.decay_rate();
        const SumIdentity id = sum_identity(ring, res.omega0 + detuning, band);
        if (!id.lossless) return {false, "lossless ring not recognised"};
        worst_sum = std::max(worst_sum, std::abs(id.sum_conj - id.fe_ratio));
    }

    double worst_multi = 0.0;
    for (int set = 0; set < 20; ++set) {
        const int m = 2 + static_cast<int>(unit(gen) * 5);
        std::vector<double> weights(m);
        double total_w = 0.0;
        for (double& w : weights) total_w += (w = 0.05 + unit(gen));
        ChannelSet ch;
        ch.tau_tot = (5.0 + 10.0 * unit(gen)) * 1e-12;
        ch.omega0 = 1.2e15 * (1.0 + 0.01 * unit(gen));
        for (double w : weights) ch.tau_e.push_back(ch.tau_tot * total_w / w);
        ch.seeded = static_cast<std::size_t>(unit(gen) * m);
        RingParams probe = RingParams::reference_device();
        probe.signal = {ch.omega0, 2.0 * ch.tau_tot, ch.tau_tot};
        for (int k = 0; k < 10000; ++k) {
            const double w = ch.omega0 + (unit(gen) - 0.5) * 40.0 / ch.tau_tot;
            const cdouble fe = field_enhancement(probe, w, Band::signal);
            worst_multi = std::max(worst_multi, std::abs(multichannel_stimulated_factor(ch, w) - std::conj(fe) / fe));
        }
    }
    const double t = clock.seconds();
    const bool pass = worst_sum < 1e-12 && worst_multi < 1e-12 && t < 1.0;
    return {pass, fmt("max |(T_H+D_R)^* - FE^*/FE| = %.2e over 1e4 detunings, M-channel max = %.2e over 20 sets, %.3f s",
                      worst_sum, worst_multi, t)};
}

// 2: noiseless round trip on the 10 x 20 reference campaign.
Outcome round_trip()
{
    Clock clock;
    const RunConfig cfg = noiseless("off-chip");
    TruthSet truth;
    const ReconstructionResult rec = run_chain(cfg, &truth);
    const FilteredTruth ft = filtered_truth(truth, cfg.campaign);
    const PhaseComparison pc = compare_phase(rec.jsp, ft.phase, rec.mask);
    const double fid = fidelity_intensity(rec.jsi, ft.jsi).value;
    const double t = clock.seconds();
    const bool grid_ok = rec.grid.n_signal() == 10 && rec.grid.n_idler() == 20;
    const bool pass = grid_ok && pc.points > 0 && pc.max_error < 1e-6 && fid > 99.99 && t < 120.0;
    return {pass, fmt("%zux%zu grid, %zu valid points, max JSP error %.2e rad, JSI fidelity %.10f, %.1f s",
                      rec.grid.n_signal(), rec.grid.n_idler(), pc.points, pc.max_error, fid, t)};
}

// 3: reconstructions seeded on either neighbouring resonance agree.
Outcome seed_order_invariance()
{
    RunConfig plus = noiseless("ideal");
    RunConfig minus = plus;
    minus.campaign.seed_order = SeedOrder::minus;
    const ReconstructionResult a = run_chain(plus), b = run_chain(minus);
    if (!a.grid.matches(b.grid)) return {false, "reconstructed grids differ"};
    const MaskMatrix both = a.mask.array() && b.mask.array();
    const double jsp_err = compare_phase(a.jsp, b.jsp, both).max_error;

    const auto& g = a.grid;
    RealMatrix analytic(g.n_signal(), g.n_idler());
    for (std::size_t r = 0; r < g.n_signal(); ++r)
        for (std::size_t c = 0; c < g.n_idler(); ++c)
            analytic(r, c) = 2.0 * (field_enhancement_phase(plus.ring.idler, g.idler()[c]) -
                                    field_enhancement_phase(plus.ring.signal, g.signal()[r]));
    const RealMatrix raw = a.delta.delta - b.delta.delta;
    const double delta_err = compare_phase(raw, analytic, both).max_error;
    const double spread = compare_phase(raw, RealMatrix::Zero(raw.rows(), raw.cols()), both).max_error;
    const bool pass = both.count() > 0 && jsp_err < 1e-6 && delta_err < 1e-6 && spread > 1e-3;
    return {pass, fmt("JSP(+1) vs JSP(-1) max %.2e rad; delta(+1) - delta(-1) vs 2(theta_i - theta_s) max %.2e rad "
                      "(raw delta maps differ by up to %.3f rad)",
                      jsp_err, delta_err, spread)};
}

// 4: K(complex) >= K(intensity only), pinned to the independent oracle.
Outcome schmidt_ordering()
{
    const RunConfig cfg = RunConfig::defaults();
    const ComplexJSA dense = dense_truth(cfg);
    const double kc = schmidt_number(dense).K, ki = schmidt_number_intensity_only(dense).K;
    const ReconstructionResult rec = run_chain(noiseless("off-chip"));
    const double rc = schmidt_number(rec.jsa).K, ri = schmidt_number_intensity_only(rec.jsa).K;
    const bool pinned = std::abs(kc - oracle::kDenseK250) < 1e-4 && std::abs(ki - oracle::kDenseKIntensity250) < 1e-4;
    const bool band = kc > 1.3 && kc < 1.8 && ki > 1.3 && ki < 1.8;
    const bool pass = pinned && band && kc >= ki && rc >= ri;
    return {pass, fmt("dense truth K_complex = %.6f (oracle %.6f), K_intensity = %.6f (oracle %.6f); "
                      "reconstructed campaign K_JSP = %.6f >= K_JSI = %.6f",
                      kc, oracle::kDenseK250, ki, oracle::kDenseKIntensity250, rc, ri)};
}

// 5: shot-noise calibration at 1e4 peak counts, 30 steps, 200 trials.
Outcome noise_calibration()
{
    Clock clock;
    RunConfig cfg = RunConfig::defaults();
    cfg.campaign.counts_scale = 1e4;
    cfg.campaign.phase_schedule = CampaignConfig::uniform_schedule(30);
    const TruthSet truth = simulate_truth(cfg);
    const MeasurementSet m = synthesize_campaign(truth.ring, truth.spiral, cfg.ring, cfg.campaign);
    const ReconstructionResult rec = reconstruct(m);

    std::vector<double> sig;
    for (Eigen::Index k = 0; k < rec.mask.size(); ++k)
        if (rec.mask.data()[k]) sig.push_back(rec.delta.sigma.data()[k]);
    const double med = median(sig);

    MonteCarloOptions opts;
    opts.trials = 200;
    opts.seed = cfg.seed;
    const MonteCarloSummary mc = monte_carlo_errors(m, opts);
    const double sj = mc.metrics.at("K_jsp").std, si = mc.metrics.at("K_jsi").std;
    const double t = clock.seconds();
    auto scale_ok = [](double s) { return s >= 1e-3 && s <= 1e-2; };
    const bool pass = med < 0.1 && scale_ok(sj) && scale_ok(si) && mc.failures == 0 && t < 600.0;
    return {pass, fmt("median sigma_delta %.4f rad over %zu points; MC std K_JSP %.4f, K_JSI %.4f "
                      "(%zu trials, %zu failed), %.1f s",
                      med, sig.size(), sj, si, mc.trials, mc.failures, t)};
}

// 6: pump bandwidth -> 0 drives K -> 1 monotonically.
Outcome separability_limit()
{
    RunConfig cfg = RunConfig::defaults();
    std::vector<double> k;
    for (double pm : {250.0, 50.0, 5.0}) {
        cfg.set_pump_bandwidth_pm(pm);
        k.push_back(schmidt_number(dense_truth(cfg)).K);
    }
    const bool monotone = k[0] > k[1] && k[1] > k[2];
    const bool pass = monotone && k[2] - 1.0 < 1e-3;
    return {pass, fmt("K(250 pm) = %.4f, K(50 pm) = %.4f, K(5 pm) = %.4f", k[0], k[1], k[2])};
}

// 7: fidelity metric properties.
Outcome fidelity_properties()
{
    const ComplexJSA truth = campaign_truth(RunConfig::defaults());
    const MaskMatrix all = MaskMatrix::Constant(truth.values.rows(), truth.values.cols(), true);
    const double self_i = fidelity_intensity(truth.intensity(), truth.intensity()).value;
    const double self_c = fidelity_complex(truth, truth).value;

    ComplexMatrix other = truth.values.unaryExpr([](cdouble z) { return z * std::polar(1.0, 3.0 * std::abs(z)); });
    const double f0 = fidelity_complex(truth.values, other, all).value;
    double phase_effect = 0.0;
    for (double c : {0.3, 1.7, -2.9})
        phase_effect = std::max(phase_effect, std::abs(fidelity_complex(truth.values, other * std::polar(1.0, c), all).value - f0));

    double shift_err = 0.0;
    const std::size_t n = 241;
    const double sigma = 7.0;
    for (double d : {0.5, 1.0, 1.5}) {
        RealMatrix p(n, n), q(n, n);
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < n; ++c) {
                const double x = static_cast<double>(r) - 120.0, y = static_cast<double>(c) - 120.0;
                p(r, c) = std::exp(-(x * x + y * y) / (2 * sigma * sigma));
                q(r, c) = std::exp(-((x - d * sigma) * (x - d * sigma) + y * y) / (2 * sigma * sigma));
            }
        shift_err = std::max(shift_err, std::abs(fidelity_intensity(p, q).value / (100.0 * std::exp(-d * d / 4)) - 1.0));
    }
    const bool pass = std::abs(self_i - 100.0) < 1e-9 && std::abs(self_c - 100.0) < 1e-9 && phase_effect < 1e-9 &&
                      shift_err < 1e-6;
    return {pass, fmt("self fidelity %.12f / %.12f, global-phase effect %.2e, gaussian-shift relative error %.2e",
                      self_i, self_c, phase_effect, shift_err)};
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// 8: two runs with the same seed are byte-identical.
Outcome determinism()
{
    const fs::path root = fs::temp_directory_path() / fmt("ringjsa_acceptance_%d", static_cast<int>(std::random_device{}() & 0xffff));
    fs::create_directories(root);
    const RunConfig cfg = RunConfig::defaults();
    cmd_simulate(cfg, (root / "truth").string());
    for (const char* run : {"1", "2"}) {
        cmd_synthesize(cfg, (root / "truth").string(), (root / (std::string("meas") + run)).string());
        cmd_reconstruct((root / (std::string("meas") + run)).string(), (root / (std::string("res") + run)).string());
    }
    std::size_t files = 0, differing = 0;
    for (const char* pair : {"meas", "res"}) {
        const fs::path a = root / (std::string(pair) + "1"), b = root / (std::string(pair) + "2");
        for (const auto& e : fs::recursive_directory_iterator(a)) {
            if (!e.is_regular_file()) continue;
            ++files;
            differing += slurp(e.path()) != slurp(b / fs::relative(e.path(), a));
        }
    }
    fs::remove_all(root);
    return {files > 0 && differing == 0, fmt("%zu campaign and reconstruction files compared, %zu differ", files, differing)};
}

}  // namespace

int main(int argc, char** argv)
{
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"TCMT identities", tcmt_identities},
        {"noiseless round trip", round_trip},
        {"seed-order invariance", seed_order_invariance},
        {"Schmidt ordering", schmidt_ordering},
        {"noise calibration", noise_calibration},
        {"separability limit", separability_limit},
        {"fidelity properties", fidelity_properties},
        {"determinism", determinism},
    };
    std::vector<int> which;
    for (int k = 1; k < argc; ++k) which.push_back(std::atoi(argv[k]));
    if (which.empty())
        for (int k = 1; k <= static_cast<int>(criteria.size()); ++k) which.push_back(k);

    bool all = true;
    for (int k : which) {
        if (k < 1 || k > static_cast<int>(criteria.size())) {
            std::fprintf(stderr, "unknown criterion %d\n", k);
            return 2;
        }
        Outcome o;
        try {
            o = criteria[k - 1].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("criterion %d (%s): %s  %s\n", k, criteria[k - 1].first, o.pass ? "PASS" : "FAIL", o.detail.c_str());
        std::fflush(stdout);
        all = all && o.pass;
    }
    return all ? 0 : 1;
}
