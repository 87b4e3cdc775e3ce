#include "ringjsa/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ringjsa/rng.hpp"

namespace ringjsa {

namespace {

SchmidtResult svd_schmidt(const ComplexMatrix& values, const SpectralGrid& grid)
{
    if (values.size() == 0) throw NumericalError("Schmidt decomposition of an empty map");
    const ComplexMatrix weighted = values * std::sqrt(grid.cell_measure());
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(weighted);
    const Eigen::VectorXd s = svd.singularValues();
    const double total = s.squaredNorm();
    if (!(total > 0.0) || !std::isfinite(total)) throw NumericalError("Schmidt decomposition of an all-zero map");

    SchmidtResult out;
    out.n_signal = grid.n_signal();
    out.n_idler = grid.n_idler();
    double p4 = 0.0;
    for (Eigen::Index k = 0; k < s.size(); ++k) {
        const double lambda = s[k] / std::sqrt(total);
        out.singular_values.push_back(lambda);
        p4 += lambda * lambda * lambda * lambda;
        if (s[k] > 1e-12 * s[0]) ++out.rank;
    }
    out.K = 1.0 / p4;
    return out;
}

}  // namespace

SchmidtResult schmidt_number(const ComplexJSA& jsa) { return svd_schmidt(jsa.values, jsa.grid); }

SchmidtResult schmidt_number_intensity_only(const ComplexJSA& jsa)
{
    return svd_schmidt(jsa.values.cwiseAbs().cast<cdouble>(), jsa.grid);
}

const char* to_string(FidelityKind kind) { return kind == FidelityKind::intensity ? "intensity" : "complex"; }

FidelityResult fidelity_intensity(const RealMatrix& a, const RealMatrix& b)
{
    return fidelity_intensity(a, b, MaskMatrix::Constant(a.rows(), a.cols(), true));
}

FidelityResult fidelity_intensity(const RealMatrix& a, const RealMatrix& b, const MaskMatrix& mask)
{
    if (a.rows() != b.rows() || a.cols() != b.cols() || mask.rows() != a.rows() || mask.cols() != a.cols())
        throw ConfigError("fidelity: maps do not share a grid");
    double sa = 0.0, sb = 0.0;
    for (Eigen::Index k = 0; k < a.size(); ++k) {
        if (!mask.data()[k]) continue;
        if (a.data()[k] < 0.0 || b.data()[k] < 0.0) throw ConfigError("fidelity: intensity maps must be nonnegative");
        sa += a.data()[k];
        sb += b.data()[k];
    }
    if (!(sa > 0.0) || !(sb > 0.0)) throw NumericalError("fidelity: zero-sum map");
    double overlap = 0.0;
    for (Eigen::Index k = 0; k < a.size(); ++k)
        if (mask.data()[k]) overlap += std::sqrt(a.data()[k] / sa * b.data()[k] / sb);
    FidelityResult f;
    f.kind = FidelityKind::intensity;
    f.value = std::clamp(100.0 * overlap * overlap, 0.0, 100.0);
    f.formula = "100*(sum sqrt(p*q))^2, p and q normalized to unit sum";
    return f;
}

FidelityResult fidelity_complex(const ComplexMatrix& a, const ComplexMatrix& b, const MaskMatrix& mask)
{
    if (a.rows() != b.rows() || a.cols() != b.cols() || mask.rows() != a.rows() || mask.cols() != a.cols())
        throw ConfigError("fidelity: maps do not share a grid");
    if (mask.count() == 0) throw NumericalError("fidelity: empty mask");
    cdouble inner{0.0, 0.0};
    double na = 0.0, nb = 0.0;
    for (Eigen::Index k = 0; k < a.size(); ++k) {
        if (!mask.data()[k]) continue;
        inner += std::conj(a.data()[k]) * b.data()[k];
        na += std::norm(a.data()[k]);
        nb += std::norm(b.data()[k]);
    }
    if (!(na > 0.0) || !(nb > 0.0)) throw NumericalError("fidelity: zero map on the mask");
    FidelityResult f;
    f.kind = FidelityKind::complex;
    f.value = std::clamp(100.0 * std::norm(inner) / (na * nb), 0.0, 100.0);
    f.phase_offset = -std::arg(inner);
    f.formula = "100*|<a|b>|^2/(<a|a><b|b>) on the shared mask, theta* = -Arg<a|b>";
    return f;
}

FidelityResult fidelity_complex(const ComplexJSA& a, const ComplexJSA& b)
{
    if (!a.grid.matches(b.grid)) throw ConfigError("fidelity: JSAs are on different grids");
    return fidelity_complex(a.values, b.values, MaskMatrix::Constant(a.values.rows(), a.values.cols(), true));
}

PhaseComparison compare_phase(const RealMatrix& measured, const RealMatrix& reference, const MaskMatrix& mask)
{
    if (measured.rows() != reference.rows() || measured.cols() != reference.cols() ||
        mask.rows() != measured.rows() || mask.cols() != measured.cols())
        throw ConfigError("phase comparison: maps do not share a grid");
    std::vector<double> d;
    for (Eigen::Index k = 0; k < measured.size(); ++k) {
        if (!mask.data()[k]) continue;
        const double m = measured.data()[k], r = reference.data()[k];
        if (!std::isfinite(m) || !std::isfinite(r)) continue;
        d.push_back(wrap_phase(m - r));
    }
    PhaseComparison out;
    out.points = d.size();
    if (d.size() < 2) {
        if (!d.empty()) out.offset = d.front();
        return out;
    }
    // the covering arc is the circle minus its largest empty gap
    std::sort(d.begin(), d.end());
    double gap = d.front() + kTwoPi - d.back();
    std::size_t start = 0;
    for (std::size_t k = 1; k < d.size(); ++k) {
        if (d[k] - d[k - 1] > gap) {
            gap = d[k] - d[k - 1];
            start = k;
        }
    }
    const double arc = kTwoPi - gap;
    out.offset = wrap_phase(d[start] + 0.5 * arc);
    out.max_error = 0.5 * arc;
    return out;
}

double median(std::vector<double> values)
{
    values.erase(std::remove_if(values.begin(), values.end(), [](double v) { return !std::isfinite(v); }),
                 values.end());
    if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
    const std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
    double m = values[mid];
    if (values.size() % 2 == 0) m = 0.5 * (m + *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid)));
    return m;
}

MonteCarloSummary monte_carlo_errors(const MeasurementSet& m, const MonteCarloOptions& opts)
{
    if (opts.trials < 2) throw ConfigError("Monte-Carlo needs at least 2 trials");
    const ReconstructionResult base = reconstruct(m, opts.reconstruction);
    const auto rows = base.delta.delta.rows(), cols = base.delta.delta.cols();

    MonteCarloSummary out;
    out.trials = opts.trials;
    out.baseline_mask = base.mask;
    RealMatrix dsum = RealMatrix::Zero(rows, cols), dsq = RealMatrix::Zero(rows, cols);
    RealMatrix ssum = RealMatrix::Zero(rows, cols), count = RealMatrix::Zero(rows, cols);
    std::map<std::string, std::vector<double>> samples;

    const std::uint64_t key = derive_stream(opts.seed, "monte_carlo");
    for (std::size_t trial = 0; trial < opts.trials; ++trial) {
        try {
            const MeasurementSet sample = opts.resample ? resample_counts(m, mix64(key + trial)) : m;
            const ReconstructionResult res = reconstruct(sample, opts.reconstruction);
            samples["K_jsp"].push_back(schmidt_number(res.jsa).K);
            samples["K_jsi"].push_back(schmidt_number_intensity_only(res.jsa).K);
            std::vector<double> sig;
            for (Eigen::Index r = 0; r < rows; ++r)
                for (Eigen::Index c = 0; c < cols; ++c) {
                    if (!res.mask(r, c)) continue;
                    sig.push_back(res.delta.sigma(r, c));
                    if (!base.mask(r, c)) continue;
                    const double d = wrap_phase(res.delta.delta(r, c) - base.delta.delta(r, c));
                    dsum(r, c) += d;
                    dsq(r, c) += d * d;
                    ssum(r, c) += res.delta.sigma(r, c);
                    count(r, c) += 1.0;
                }
            samples["median_sigma_delta"].push_back(median(sig));
            samples["tau_e_ps"].push_back(res.transfer.tau_e * 1e12);
            samples["tau_tot_ps"].push_back(res.transfer.tau_tot * 1e12);
            samples["valid_points"].push_back(static_cast<double>(res.mask.count()));
        } catch (const std::exception& e) {
            ++out.failures;
            if (out.failure_messages.size() < 10) out.failure_messages.emplace_back(e.what());
        }
    }

    for (auto& [name, v] : samples) {
        MetricStats st;
        st.samples = v.size();
        for (double x : v) st.mean += x;
        st.mean /= static_cast<double>(v.size());
        if (v.size() > 1) {
            double ss = 0.0;
            for (double x : v) ss += (x - st.mean) * (x - st.mean);
            st.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
        }
        out.metrics[name] = st;
    }

    const double nan = std::numeric_limits<double>::quiet_NaN();
    out.delta_std = RealMatrix::Constant(rows, cols, nan);
    out.sigma_mean = RealMatrix::Constant(rows, cols, nan);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) {
            const double n = count(r, c);
            if (n < 2.0) continue;
            const double mean = dsum(r, c) / n;
            out.delta_std(r, c) = std::sqrt(std::max(dsq(r, c) / n - mean * mean, 0.0) * n / (n - 1.0));
            out.sigma_mean(r, c) = ssum(r, c) / n;
        }
    return out;
}

}  // namespace ringjsa
