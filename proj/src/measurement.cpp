#include "ringjsa/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "ringjsa/rng.hpp"

namespace ringjsa {

std::vector<double> CampaignConfig::uniform_schedule(std::size_t steps)
{
    std::vector<double> s(steps);
    for (std::size_t k = 0; k < steps; ++k) s[k] = kTwoPi * static_cast<double>(k) / static_cast<double>(steps);
    return s;
}

void CampaignConfig::validate() const
{
    if (n_signal < 2 || n_idler < 2) throw ConfigError("campaign grid needs at least 2 x 2 points");
    if (phase_schedule.size() < 4) throw ConfigError("phase schedule needs at least 4 steps");
    for (double t : phase_schedule)
        if (!std::isfinite(t)) throw ConfigError("phase schedule values must be finite");
    if (!(counts_scale > 0.0)) throw ConfigError("counts scale must be > 0");
    if (!(dark_counts >= 0.0)) throw ConfigError("dark counts must be >= 0");
    if (!(signal_span >= 0.0) || !(idler_span >= 0.0)) throw ConfigError("grid spans must be >= 0");
    if (!(spiral_balance > 0.0)) throw ConfigError("spiral balance must be > 0");
    if (!(std::abs(splitter_imbalance) < 1.0)) throw ConfigError("splitter imbalance must be in (-1, 1)");
    if (!(background_scale >= 0.0)) throw ConfigError("background scale must be >= 0");
    if (filter_oversampling < 3) throw ConfigError("filter oversampling must be >= 3");
    if (transfer_points < 8) throw ConfigError("transfer scan needs at least 8 points");
    if (!(transfer_span_linewidths > 0.0)) throw ConfigError("transfer span must be > 0");
    if (!(transfer_noise >= 0.0)) throw ConfigError("transfer noise must be >= 0");
    filter.validate();
}

SpectralGrid campaign_grid(const RingParams& ring, const CampaignConfig& cfg)
{
    cfg.validate();
    // zero span means +-4 half-linewidths around the resonance
    const double ss = cfg.signal_span > 0.0 ? cfg.signal_span : 8.0 * ring.signal.decay_rate();
    const double is = cfg.idler_span > 0.0 ? cfg.idler_span : 8.0 * ring.idler.decay_rate();
    const double s0 = ring.signal.omega0, i0 = ring.idler.omega0;
    return SpectralGrid::uniform(s0 - 0.5 * ss, s0 + 0.5 * ss, cfg.n_signal, i0 - 0.5 * is, i0 + 0.5 * is,
                                 cfg.n_idler);
}

SimulationLayout simulation_layout(const RingParams& ring, const CampaignConfig& cfg)
{
    SimulationLayout layout;
    layout.canonical = campaign_grid(ring, cfg);
    layout.measurement =
        cfg.seed_order == SeedOrder::plus ? layout.canonical : layout.canonical.transposed();

    const auto& detected = layout.measurement.idler();
    const double step = layout.measurement.idler_step();
    if (cfg.filter.shape == FilterShape::ideal) {
        layout.fine = layout.measurement;
        return layout;
    }
    const double target = cfg.filter.fwhm / static_cast<double>(cfg.filter_oversampling);
    layout.stride = static_cast<std::size_t>(std::max(1.0, std::ceil(step / target)));
    const double fine_step = step / static_cast<double>(layout.stride);
    layout.pad = static_cast<std::size_t>(std::ceil(10.0 * cfg.filter.fwhm / fine_step));

    const std::size_t n_fine = (detected.size() - 1) * layout.stride + 1 + 2 * layout.pad;
    std::vector<double> fine(n_fine);
    for (std::size_t k = 0; k < n_fine; ++k)
        fine[k] = detected.front() + fine_step * (static_cast<double>(k) - static_cast<double>(layout.pad));
    // land exactly on the measured detected frequencies
    for (std::size_t j = 0; j < detected.size(); ++j) fine[layout.fine_column(j)] = detected[j];
    layout.fine = SpectralGrid(layout.measurement.signal(), std::move(fine));
    return layout;
}

FringeScan::FringeScan(std::vector<double> sched, std::size_t r, std::size_t c)
    : schedule(std::move(sched)), rows(r), cols(c), counts(r * c * schedule.size(), 0.0)
{
}

std::span<double> FringeScan::point(std::size_t r, std::size_t c)
{
    return {counts.data() + (r * cols + c) * schedule.size(), schedule.size()};
}

std::span<const double> FringeScan::point(std::size_t r, std::size_t c) const
{
    return {counts.data() + (r * cols + c) * schedule.size(), schedule.size()};
}

void FringeScan::validate() const
{
    if (schedule.empty()) throw ConfigError("fringe scan has an empty phase schedule");
    if (counts.size() != rows * cols * schedule.size())
        throw ConfigError("fringe scan counts do not match schedule length x grid size");
}

std::vector<double> transfer_scan_grid(const RingParams& ring, const CampaignConfig& cfg)
{
    const BandResonance& res = ring.band(seeded_band(cfg.seed_order));
    const double span = cfg.transfer_span_linewidths * 2.0 * res.decay_rate();
    std::vector<double> omegas(cfg.transfer_points);
    for (std::size_t k = 0; k < omegas.size(); ++k)
        omegas[k] = res.omega0 - 0.5 * span + span * static_cast<double>(k) / static_cast<double>(omegas.size() - 1);
    return omegas;
}

std::vector<TransferSample> synthesize_transfer_scan(const RingParams& ring, Band band,
                                                     std::span<const double> omegas, double noise,
                                                     std::uint64_t stream_key, double phase_offset,
                                                     double phase_slope)
{
    double mean = 0.0;
    for (double w : omegas) mean += w;
    if (!omegas.empty()) mean /= static_cast<double>(omegas.size());

    std::vector<TransferSample> out;
    out.reserve(omegas.size());
    for (std::size_t k = 0; k < omegas.size(); ++k) {
        const cdouble t = through_transfer(ring, omegas[k], band);
        TransferSample s{omegas[k], std::abs(t), std::arg(t)};
        const double background = phase_offset + phase_slope * (omegas[k] - mean);
        if (background != 0.0) s.phase = wrap_phase(s.phase + background);
        if (noise > 0.0) {
            CounterRng rng(stream_key, k);
            std::normal_distribution<double> normal(0.0, 1.0);
            s.modulus *= 1.0 + noise * normal(rng);
            s.phase = wrap_phase(s.phase + noise * normal(rng));
        }
        out.push_back(s);
    }
    return out;
}

namespace {

ComplexMatrix pick_columns(const ComplexMatrix& fine, const SimulationLayout& layout)
{
    const auto cols = static_cast<Eigen::Index>(layout.measurement.n_idler());
    ComplexMatrix out(fine.rows(), cols);
    for (Eigen::Index j = 0; j < cols; ++j) out.col(j) = fine.col(static_cast<Eigen::Index>(layout.fine_column(j)));
    return out;
}

RealMatrix pick_columns(const RealMatrix& fine, const SimulationLayout& layout)
{
    const auto cols = static_cast<Eigen::Index>(layout.measurement.n_idler());
    RealMatrix out(fine.rows(), cols);
    for (Eigen::Index j = 0; j < cols; ++j) out.col(j) = fine.col(static_cast<Eigen::Index>(layout.fine_column(j)));
    return out;
}

double poisson_draw(CounterRng& rng, double mean)
{
    if (!(mean > 0.0)) return 0.0;
    std::poisson_distribution<long long> dist(mean);
    return static_cast<double>(dist(rng));
}

RealMatrix sample_map(const RealMatrix& expected, std::uint64_t key)
{
    RealMatrix out(expected.rows(), expected.cols());
    for (Eigen::Index r = 0; r < expected.rows(); ++r)
        for (Eigen::Index c = 0; c < expected.cols(); ++c) {
            CounterRng rng(key, static_cast<std::uint64_t>(r * expected.cols() + c));
            out(r, c) = poisson_draw(rng, expected(r, c));
        }
    return out;
}

}  // namespace

ExpectedMaps expected_maps(const ComplexJSA& truth_ring, const ComplexJSA& truth_spiral, const RingParams& ring,
                           const CampaignConfig& cfg)
{
    cfg.validate();
    const SimulationLayout layout = simulation_layout(ring, cfg);
    if (!truth_ring.grid.matches(layout.fine) || !truth_spiral.grid.matches(layout.fine))
        throw ConfigError("truth JSAs are not on the simulation grid of this campaign "
                          "(check grid size, spans, filter and seed order)");

    const SeedSpec seed{cfg.seed_order, {1.0, 0.0}};
    ComplexMatrix a = ring_stimulated_amplitude(truth_ring, ring, seed).amplitude;
    const ComplexMatrix b = spiral_stimulated_amplitude(truth_spiral, seed).amplitude;

    if (cfg.background_scale > 0.0) {
        Eigen::Index pr = 0, pc = 0;
        a.cwiseAbs().maxCoeff(&pr, &pc);
        const double bref = std::abs(b(pr, pc));
        if (bref > 0.0) a += (cfg.background_scale * std::abs(a(pr, pc)) / bref) * b;
    }

    const auto& axis = layout.fine.idler();
    const RealMatrix ring_raw = pick_columns(convolve_filter_jsi(a.cwiseAbs2(), axis, cfg.filter), layout);
    const RealMatrix spiral_raw = pick_columns(convolve_filter_jsi(b.cwiseAbs2(), axis, cfg.filter), layout);
    const ComplexMatrix cross_raw = pick_columns(convolve_filter(a.cwiseProduct(b.conjugate()), axis, cfg.filter), layout);

    Eigen::Index pr = 0, pc = 0;
    const double ring_peak = ring_raw.maxCoeff(&pr, &pc);
    if (!(ring_peak > 0.0)) throw NumericalError("ring intensity vanishes on the campaign grid");
    if (!(spiral_raw(pr, pc) > 0.0)) throw NumericalError("spiral intensity vanishes at the ring peak");
    const double sa = cfg.counts_scale / ring_peak;
    const double sb = cfg.spiral_balance * cfg.counts_scale / spiral_raw(pr, pc);

    const double eta = cfg.splitter_imbalance;
    ExpectedMaps maps;
    maps.intensity_scale = sa;
    maps.ring = (1.0 + eta) * sa * ring_raw;
    maps.spiral = (1.0 - eta) * sb * spiral_raw;
    maps.cross = std::sqrt((1.0 - eta * eta) * sa * sb) * cross_raw;
    return maps;
}

RealMatrix expected_interference(const ExpectedMaps& maps, double delta_theta)
{
    const cdouble rot = std::polar(1.0, delta_theta);
    RealMatrix out = maps.ring + maps.spiral + 2.0 * (rot * maps.cross).real();
    return out.cwiseMax(0.0);
}

MeasurementSet synthesize_campaign(const ComplexJSA& truth_ring, const ComplexJSA& truth_spiral,
                                   const RingParams& ring, const CampaignConfig& cfg)
{
    const ExpectedMaps maps = expected_maps(truth_ring, truth_spiral, ring, cfg);
    const SimulationLayout layout = simulation_layout(ring, cfg);

    MeasurementSet m;
    m.grid = layout.measurement;
    m.campaign = cfg;
    m.integer_counts = !cfg.noiseless;

    const double dark = cfg.dark_counts;
    const RealMatrix e_res = maps.ring.array() + dark;
    const RealMatrix e_spi = maps.spiral.array() + dark;
    const RealMatrix e_int = expected_interference(maps, 0.0).array() + dark;

    m.fringe = FringeScan(cfg.phase_schedule, m.grid.n_signal(), m.grid.n_idler());
    std::vector<RealMatrix> e_fringe;
    e_fringe.reserve(cfg.phase_schedule.size());
    for (double t : cfg.phase_schedule) e_fringe.push_back(expected_interference(maps, t).array() + dark);

    if (cfg.noiseless) {
        m.i_res = e_res;
        m.i_spi = e_spi;
        m.i_int = e_int;
        for (std::size_t r = 0; r < m.fringe.rows; ++r)
            for (std::size_t c = 0; c < m.fringe.cols; ++c) {
                auto pt = m.fringe.point(r, c);
                for (std::size_t k = 0; k < pt.size(); ++k) pt[k] = e_fringe[k](r, c);
            }
    } else {
        const std::uint64_t seed = cfg.rng_seed;
        m.i_res = sample_map(e_res, derive_stream(seed, "i_res"));
        m.i_spi = sample_map(e_spi, derive_stream(seed, "i_spi"));
        m.i_int = sample_map(e_int, derive_stream(seed, "i_int"));
        const std::uint64_t key = derive_stream(seed, "fringe");
        for (std::size_t r = 0; r < m.fringe.rows; ++r)
            for (std::size_t c = 0; c < m.fringe.cols; ++c) {
                CounterRng rng(key, r * m.fringe.cols + c);
                auto pt = m.fringe.point(r, c);
                for (std::size_t k = 0; k < pt.size(); ++k) pt[k] = poisson_draw(rng, e_fringe[k](r, c));
            }
    }

    const std::vector<double> omegas = transfer_scan_grid(ring, cfg);
    m.transfer = synthesize_transfer_scan(ring, seeded_band(cfg.seed_order), omegas,
                                          cfg.noiseless ? 0.0 : cfg.transfer_noise,
                                          derive_stream(cfg.rng_seed, "transfer"), cfg.transfer_phase_offset,
                                          cfg.transfer_phase_slope);
    return m;
}

MeasurementSet resample_counts(const MeasurementSet& m, std::uint64_t stream_key)
{
    MeasurementSet out = m;
    out.integer_counts = true;
    out.i_res = sample_map(m.i_res, mix64(stream_key ^ fnv1a("i_res")));
    out.i_spi = sample_map(m.i_spi, mix64(stream_key ^ fnv1a("i_spi")));
    out.i_int = sample_map(m.i_int, mix64(stream_key ^ fnv1a("i_int")));
    const std::uint64_t key = mix64(stream_key ^ fnv1a("fringe"));
    for (std::size_t r = 0; r < m.fringe.rows; ++r)
        for (std::size_t c = 0; c < m.fringe.cols; ++c) {
            CounterRng rng(key, r * m.fringe.cols + c);
            auto src = m.fringe.point(r, c);
            auto dst = out.fringe.point(r, c);
            for (std::size_t k = 0; k < src.size(); ++k) dst[k] = poisson_draw(rng, src[k]);
        }
    return out;
}

}  // namespace ringjsa
