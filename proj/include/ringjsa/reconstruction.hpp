#pragma once

#include <span>
#include <string>
#include <vector>

#include "ringjsa/measurement.hpp"

namespace ringjsa {

/// Relative phase delta = Arg(a b^*) per grid point.
struct PhaseMap {
    SpectralGrid grid;
    RealMatrix delta;      // rad, (-pi, pi]; NaN where invalid
    RealMatrix sigma;      // rad
    MaskMatrix valid;
    RealMatrix amplitude;  // fringe amplitude A (fit) or clamp distance (abs_delta)
    RealMatrix background; // fringe background B (fit only)

    std::size_t valid_count() const { return static_cast<std::size_t>(valid.count()); }
    PhaseMap transposed() const;
};

/// |delta| from the three intensity maps at dtheta = 0. `dark` is the known
/// dark rate contained in every map. Arguments past +-(1 + eps_clamp) are masked;
/// `amplitude` holds the clamping distance.
PhaseMap abs_delta(const RealMatrix& i_int, const RealMatrix& i_res, const RealMatrix& i_spi,
                   const SpectralGrid& grid, double dark = 0.0, double eps_clamp = 0.05);

struct FringePointFit {
    double amplitude = 0.0;   // A >= 0
    double background = 0.0;  // B
    double delta = 0.0;       // rad, (-pi, pi]
    double sigma_amplitude = 0.0;
    double sigma_background = 0.0;
    double sigma_delta = 0.0;
};

/// Weighted linear least squares of counts ~ A cos(dtheta + delta) + B in the
/// basis {cos, sin, 1}, weights 1/max(counts, 1). Throws NumericalError on a
/// schedule that cannot separate the three basis functions.
FringePointFit fit_fringe_point(std::span<const double> schedule, std::span<const double> counts);

/// Per-point fringe fits; points with A < snr_threshold * sigma_A are masked.
PhaseMap fit_fringe(const FringeScan& scan, const SpectralGrid& grid, double snr_threshold = 3.0);

/// Fitted model T(w) = C exp(i(p0 + p1 (w - w_ref))) (1 - b / (a - i(w - w0))),
/// with b = 2/tau_e and a = 1/tau_tot.
struct TransferFit {
    double tau_e = 0.0;    // s
    double tau_tot = 0.0;  // s
    double omega0 = 0.0;   // rad/s
    double amplitude = 1.0;
    double phase0 = 0.0;       // rad
    double phase_slope = 0.0;  // rad per rad/s
    double omega_ref = 0.0;    // rad/s
    // order: amplitude, phase0, phase_slope, tau_e, tau_tot, omega0 (SI units)
    Eigen::Matrix<double, 6, 6> covariance = Eigen::Matrix<double, 6, 6>::Zero();
    double residual_norm = 0.0;
    std::size_t samples = 0;
    int iterations = 0;

    cdouble model(double omega) const;
    /// Resonance without the reference-path background.
    cdouble intrinsic(double omega) const;
    BandResonance resonance() const { return {omega0, tau_e, tau_tot}; }
};

/// Nonlinear least squares on the complex samples. Throws NumericalError when
/// no resonance is visible, the scan spans fewer than 3 linewidths, or the
/// solver stops without converging.
TransferFit fit_transfer(std::span<const TransferSample> samples);

/// Field-enhancement phase from a transfer fit, (0, pi), continuous.
struct FieldPhaseCurve {
    std::vector<double> omega;  // rad/s, where the curve was tabulated
    std::vector<double> theta;  // rad
    double omega0 = 0.0;
    double decay_rate = 0.0;    // 1/tau_tot
    double lo = 0.0;            // covered range
    double hi = 0.0;

    /// Evaluates the fitted curve; throws ConfigError outside [lo, hi].
    double at(double omega) const;
};

FieldPhaseCurve fe_phase_curve(const TransferFit& fit, std::span<const double> omegas);

/// theta_phi = delta - kFieldEnhancementPhaseSign * 2 theta_FE(row), offset so the
/// value at the brightest valid `jsi` point is zero, wrapped. NaN off the mask.
RealMatrix assemble_jsp(const PhaseMap& delta, const FieldPhaseCurve& theta_fe, const RealMatrix& jsi,
                        int sign = kFieldEnhancementPhaseSign);

/// sqrt(JSI) exp(i JSP) on the mask, zero elsewhere, normalized.
ComplexJSA assemble_complex_jsa(const SpectralGrid& grid, const RealMatrix& jsi, const RealMatrix& jsp,
                                const MaskMatrix& mask);

struct ReconstructionOptions {
    double snr_threshold = 3.0;
    double eps_clamp = 0.05;
};

struct ReconstructionResult {
    SpectralGrid grid;       // canonical: rows signal band, columns idler band
    RealMatrix jsi;          // normalized over the full grid
    RealMatrix jsp;          // rad, NaN off the mask
    MaskMatrix mask;
    ComplexJSA jsa;
    PhaseMap delta;          // fringe fit, canonical orientation
    PhaseMap abs_delta;      // intensity-only estimate, canonical orientation
    TransferFit transfer;
    FieldPhaseCurve theta_fe;
    SeedOrder seed_order = SeedOrder::plus;
    std::string phase_convention;
};

ReconstructionResult reconstruct(const MeasurementSet& m, const ReconstructionOptions& opts = {});

}  // namespace ringjsa
