#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ringjsa/stimulated.hpp"

namespace ringjsa {

/// Acquisition settings for one synthetic campaign. The canonical grid has
/// `n_signal` rows across the signal resonance and `n_idler` columns across
/// the idler resonance, each centred on its resonance frequency.
struct CampaignConfig {
    std::size_t n_signal = 10;
    std::size_t n_idler = 20;
    double signal_span = 0.0;  // rad/s, full width
    double idler_span = 0.0;   // rad/s, full width
    std::vector<double> phase_schedule = uniform_schedule(30);
    double counts_scale = 1e4;  // expected ring-only counts at the brightest grid point
    double dark_counts = 0.0;   // expected dark counts per bin
    FilterSpec filter = FilterSpec::off_chip();
    int filter_oversampling = 8;  // fine idler samples per filter FWHM
    std::uint64_t rng_seed = 42;
    SeedOrder seed_order = SeedOrder::plus;
    bool noiseless = false;

    double spiral_balance = 1.0;      // spiral / ring intensity at the ring peak
    double splitter_imbalance = 0.0;  // (|t|^2 - |r|^2) of the final splitter
    double background_scale = 0.0;    // coherent spiral-like background on the ring arm

    std::size_t transfer_points = 201;
    double transfer_span_linewidths = 8.0;  // full span in units of 2/tau_tot
    double transfer_noise = 0.005;          // relative modulus and absolute phase (rad) noise
    double transfer_phase_offset = 0.0;     // rad, reference-relative phase background
    double transfer_phase_slope = 0.0;      // rad per rad/s

    static std::vector<double> uniform_schedule(std::size_t steps);
    void validate() const;
};

/// Fine simulation lattice behind a campaign: the measurement grid with its
/// detected axis refined by `stride` and padded by `pad` samples per side so
/// the filter can be applied before sampling.
struct SimulationLayout {
    SpectralGrid canonical;    // rows signal band, columns idler band
    SpectralGrid measurement;  // rows seed axis, columns detected axis
    SpectralGrid fine;         // rows seed axis, columns refined detected axis
    std::size_t stride = 1;
    std::size_t pad = 0;

    std::size_t fine_column(std::size_t measurement_column) const { return pad + stride * measurement_column; }
};

SpectralGrid campaign_grid(const RingParams& ring, const CampaignConfig& cfg);
SimulationLayout simulation_layout(const RingParams& ring, const CampaignConfig& cfg);

/// Per grid point intensity versus interferometer phase.
struct FringeScan {
    std::vector<double> schedule;  // rad
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> counts;    // [row][col][step]

    FringeScan() = default;
    FringeScan(std::vector<double> sched, std::size_t r, std::size_t c);

    std::span<double> point(std::size_t r, std::size_t c);
    std::span<const double> point(std::size_t r, std::size_t c) const;
    void validate() const;
};

struct TransferSample {
    double omega = 0.0;    // rad/s
    double modulus = 0.0;
    double phase = 0.0;    // rad, relative to the reference path
};

struct MeasurementSet {
    SpectralGrid grid;  // measurement orientation: rows seed axis
    RealMatrix i_res;
    RealMatrix i_spi;
    RealMatrix i_int;   // at dtheta = 0
    FringeScan fringe;
    std::vector<TransferSample> transfer;
    CampaignConfig campaign;
    bool integer_counts = true;  // false: noiseless expected values
};

/// Evaluates the ring transfer function on `omegas`, perturbed by gaussian
/// noise (relative on the modulus, absolute in radians on the phase).
std::vector<TransferSample> synthesize_transfer_scan(const RingParams& ring, Band band,
                                                     std::span<const double> omegas, double noise,
                                                     std::uint64_t stream_key, double phase_offset = 0.0,
                                                     double phase_slope = 0.0);

/// Frequencies of the transfer-function scan over the seeded resonance.
std::vector<double> transfer_scan_grid(const RingParams& ring, const CampaignConfig& cfg);

/// Noiseless forward intensities on the measurement grid, before dark counts.
struct ExpectedMaps {
    RealMatrix ring;            // filtered |a|^2 (through the splitter)
    RealMatrix spiral;          // filtered |b|^2
    ComplexMatrix cross;        // filtered a b^* (times the splitter factor)
    double intensity_scale = 1.0;
};

/// Truth JSAs must live on simulation_layout(ring, cfg).fine, rows on the seeded band.
ExpectedMaps expected_maps(const ComplexJSA& truth_ring, const ComplexJSA& truth_spiral,
                           const RingParams& ring, const CampaignConfig& cfg);

RealMatrix expected_interference(const ExpectedMaps& maps, double delta_theta);

MeasurementSet synthesize_campaign(const ComplexJSA& truth_ring, const ComplexJSA& truth_spiral,
                                   const RingParams& ring, const CampaignConfig& cfg);

/// Poisson resampling of every count bin around its recorded value.
MeasurementSet resample_counts(const MeasurementSet& m, std::uint64_t stream_key);

}  // namespace ringjsa
