#include <doctest.h>

#include <numeric>
#include <random>

#include "helpers.hpp"
#include "ringjsa/pipeline.hpp"

using namespace ringjsa;

namespace {

RealMatrix gaussian_map(std::size_t n, double sigma, double shift)
{
    RealMatrix m(n, n);
    const double c = 0.5 * static_cast<double>(n - 1);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t k = 0; k < n; ++k) {
            const double x = static_cast<double>(r) - c - shift, y = static_cast<double>(k) - c;
            m(r, k) = std::exp(-(x * x + y * y) / (2 * sigma * sigma));
        }
    return m;
}

ComplexJSA random_jsa(std::size_t rows, std::size_t cols, unsigned seed)
{
    std::mt19937 gen(seed);
    std::normal_distribution<double> n;
    ComplexMatrix v(rows, cols);
    for (Eigen::Index k = 0; k < v.size(); ++k) v.data()[k] = {n(gen), n(gen)};
    ComplexJSA j(SpectralGrid::uniform(1.0, 2.0, rows, 3.0, 5.0, cols), v);
    j.normalize();
    return j;
}

}  // namespace

TEST_CASE("Schmidt number of separable and diagonal maps")
{
    const SpectralGrid g = SpectralGrid::uniform(0.0, 1.0, 7, 0.0, 2.0, 9);
    Eigen::VectorXcd f(7), h(9);
    for (int k = 0; k < 7; ++k) f[k] = std::polar(1.0 + k, 0.3 * k);
    for (int k = 0; k < 9; ++k) h[k] = std::polar(2.0 - 0.1 * k, -0.7 * k);
    ComplexJSA sep(g, f * h.transpose());
    sep.normalize();
    const SchmidtResult s = schmidt_number(sep);
    CHECK(s.K == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.rank == 1);

    const SpectralGrid sq = SpectralGrid::uniform(0.0, 1.0, 12, 0.0, 1.0, 12);
    ComplexJSA diag(sq, ComplexMatrix::Identity(12, 12));
    diag.normalize();
    CHECK(schmidt_number(diag).K == doctest::Approx(12.0).epsilon(1e-12));

    ComplexJSA zero(sq, ComplexMatrix::Zero(12, 12));
    CHECK_THROWS_AS(schmidt_number(zero), NumericalError);
}

TEST_CASE("Schmidt invariants")
{
    const ComplexJSA j = random_jsa(8, 11, 1);
    const SchmidtResult s = schmidt_number(j);
    CHECK(s.K >= 1.0);
    CHECK(s.K <= static_cast<double>(s.rank) + 1e-12);
    double total = 0.0;
    for (std::size_t k = 0; k < s.singular_values.size(); ++k) {
        total += s.singular_values[k] * s.singular_values[k];
        if (k > 0) CHECK(s.singular_values[k] <= s.singular_values[k - 1]);
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));

    ComplexJSA scaled = j;
    scaled.values *= std::polar(3.7, 1.9);
    CHECK(schmidt_number(scaled).K == doctest::Approx(s.K).epsilon(1e-12));

    std::vector<int> pr(8), pc(11);
    std::iota(pr.begin(), pr.end(), 0);
    std::iota(pc.begin(), pc.end(), 0);
    std::shuffle(pr.begin(), pr.end(), std::mt19937(2));
    std::shuffle(pc.begin(), pc.end(), std::mt19937(3));
    ComplexJSA perm = j;
    for (int r = 0; r < 8; ++r)
        for (int c = 0; c < 11; ++c) perm.values(r, c) = j.values(pr[r], pc[c]);
    CHECK(schmidt_number(perm).K == doctest::Approx(s.K).epsilon(1e-12));
}

TEST_CASE("intensity fidelity")
{
    const RealMatrix a = gaussian_map(41, 4.0, 0.0);
    CHECK(fidelity_intensity(a, a).value == doctest::Approx(100.0).epsilon(1e-14));
    CHECK(fidelity_intensity(a, 3.5 * a).value == doctest::Approx(100.0).epsilon(1e-14));

    RealMatrix left = RealMatrix::Zero(4, 4), right = RealMatrix::Zero(4, 4);
    left.leftCols(2).setOnes();
    right.rightCols(2).setOnes();
    CHECK(fidelity_intensity(left, right).value == 0.0);

    // closed form: (sum sqrt(pq))^2 = exp(-d^2 / 4) for a shift of d sigma
    for (double d : {0.5, 1.0, 2.0}) {
        const double sigma = 6.0;
        const RealMatrix p = gaussian_map(201, sigma, 0.0), q = gaussian_map(201, sigma, d * sigma);
        const FidelityResult f = fidelity_intensity(p, q);
        CHECK(f.value == doctest::Approx(100.0 * std::exp(-d * d / 4.0)).epsilon(1e-6));
        CHECK(fidelity_intensity(q, p).value == doctest::Approx(f.value).epsilon(1e-14));
    }
    CHECK_THROWS_AS(fidelity_intensity(RealMatrix::Zero(3, 3), a.topLeftCorner(3, 3)), NumericalError);
}

TEST_CASE("complex fidelity")
{
    const ComplexJSA a = random_jsa(6, 9, 4);
    const MaskMatrix all = MaskMatrix::Constant(6, 9, true);
    CHECK(fidelity_complex(a, a).value == doctest::Approx(100.0).epsilon(1e-14));

    ComplexJSA rotated = a;
    rotated.values *= std::polar(2.0, 1.3);
    const FidelityResult r = fidelity_complex(a.values, rotated.values, all);
    CHECK(r.value == doctest::Approx(100.0).epsilon(1e-12));
    CHECK(wrap_phase(r.phase_offset + 1.3) == doctest::Approx(0.0).epsilon(1e-12));

    // a constant added to one JSP changes nothing
    const ComplexJSA b = random_jsa(6, 9, 5);
    const double f0 = fidelity_complex(a.values, b.values, all).value;
    const double f1 = fidelity_complex(a.values, b.values * std::polar(1.0, 0.77), all).value;
    CHECK(std::abs(f1 - f0) < 1e-9);

    ComplexMatrix u = ComplexMatrix::Zero(6, 9), v = ComplexMatrix::Zero(6, 9);
    u(0, 0) = 1.0;
    v(0, 0) = cdouble{0.0, 1.0};
    u(1, 1) = 1.0;
    v(1, 1) = cdouble{0.0, -1.0};
    CHECK(fidelity_complex(u, v, all).value < 1e-12);
    CHECK_THROWS_AS(fidelity_complex(u, v, MaskMatrix::Constant(6, 9, false)), NumericalError);
}

TEST_CASE("dropping the JSP lowers the complex fidelity on the synthetic campaign")
{
    const RunConfig cfg = RunConfig::defaults();
    const ComplexJSA truth = campaign_truth(cfg);
    ComplexJSA flat = truth;
    flat.values = truth.values.cwiseAbs().cast<cdouble>();
    const double f = fidelity_complex(truth, flat).value;
    CHECK(f < 99.0);
    CHECK(f > 0.0);
    CHECK(schmidt_number(truth).K >= schmidt_number(flat).K);
}

TEST_CASE("phase comparison with one free offset")
{
    RealMatrix a(2, 3), b(2, 3);
    a << 0.1, 0.2, 3.1, -3.1, 0.0, 1.0;
    b = a.array() - 2.0;
    const MaskMatrix all = MaskMatrix::Constant(2, 3, true);
    const PhaseComparison p = compare_phase(a, b, all);
    CHECK(p.max_error < 1e-12);
    CHECK(wrap_phase(p.offset - 2.0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(p.points == 6);

    b(0, 0) += 0.2;
    CHECK(compare_phase(a, b, all).max_error == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("Monte Carlo errors")
{
    RunConfig cfg = testutil::small_config();
    cfg.campaign.noiseless = true;
    const TruthSet t = simulate_truth(cfg);
    const MeasurementSet exact = synthesize_campaign(t.ring, t.spiral, cfg.ring, cfg.campaign);

    MonteCarloOptions opts;
    opts.trials = 4;
    opts.resample = false;
    const MonteCarloSummary none = monte_carlo_errors(exact, opts);
    CHECK(none.failures == 0);
    for (const auto& [name, stat] : none.metrics) {
        INFO(name);
        CHECK(stat.std == 0.0);
    }

    cfg.campaign.noiseless = false;
    const MeasurementSet noisy = synthesize_campaign(t.ring, t.spiral, cfg.ring, cfg.campaign);
    opts.resample = true;
    opts.trials = 40;
    const MonteCarloSummary a = monte_carlo_errors(noisy, opts);
    const MonteCarloSummary b = monte_carlo_errors(noisy, opts);
    CHECK(a.metrics.at("K_jsp").mean == b.metrics.at("K_jsp").mean);
    CHECK(a.metrics.at("K_jsp").std > 0.0);
    CHECK_THROWS_AS(monte_carlo_errors(noisy, MonteCarloOptions{1}), ConfigError);
}

TEST_CASE("delta scatter follows Poisson scaling and the reported sigma")
{
    RunConfig cfg = testutil::small_config();
    cfg.set_filter("ideal");
    const TruthSet t = simulate_truth(cfg);
    MonteCarloOptions opts;
    opts.trials = 200;

    auto scatter = [&](double scale, MonteCarloSummary* out) {
        cfg.campaign.counts_scale = scale;
        const MeasurementSet m = synthesize_campaign(t.ring, t.spiral, cfg.ring, cfg.campaign);
        *out = monte_carlo_errors(m, opts);
        std::vector<double> v;
        for (Eigen::Index k = 0; k < out->delta_std.size(); ++k)
            if (out->baseline_mask.data()[k] && std::isfinite(out->delta_std.data()[k])) v.push_back(out->delta_std.data()[k]);
        return median(v);
    };
    MonteCarloSummary lo, hi;
    const double s1 = scatter(1e4, &lo);
    const double s2 = scatter(2e4, &hi);
    CHECK(s1 / s2 == doctest::Approx(std::sqrt(2.0)).epsilon(0.2));

    // empirical std within x1.5 of the reported sigma at >= 90% of points
    std::size_t ok = 0, n = 0;
    for (Eigen::Index k = 0; k < lo.delta_std.size(); ++k) {
        if (!lo.baseline_mask.data()[k]) continue;
        ++n;
        const double ratio = lo.delta_std.data()[k] / lo.sigma_mean.data()[k];
        ok += ratio > 1.0 / 1.5 && ratio < 1.5;
    }
    CHECK(static_cast<double>(ok) >= 0.9 * static_cast<double>(n));
}
