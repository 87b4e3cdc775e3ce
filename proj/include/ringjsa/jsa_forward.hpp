#pragma once

#include <optional>
#include <vector>

#include "ringjsa/resonator.hpp"
#include "ringjsa/spectral.hpp"

namespace ringjsa {

enum class PumpShape { gaussian, sech2, tabulated };

/// Complex pump field spectrum A_p(w), normalized so that int |A_p|^2 dw = 1.
class PumpSpectrum {
public:
    /// `fwhm` is the full width at half maximum of |A_p|^2 in rad/s; `chirp`
    /// multiplies the field by exp(i chirp (w - w_c)^2).
    static PumpSpectrum gaussian(double center_omega, double fwhm, double chirp = 0.0);
    static PumpSpectrum sech2(double center_omega, double fwhm, double chirp = 0.0);
    /// Piecewise-linear interpolation of tabulated samples; zero outside the table.
    static PumpSpectrum tabulated(std::vector<double> omegas, std::vector<cdouble> amplitudes);

    cdouble amplitude(double omega) const;

    PumpShape shape() const { return shape_; }
    double center() const { return center_; }
    double fwhm() const { return fwhm_; }
    double chirp() const { return chirp_; }
    /// Half-width outside which the amplitude is below ~1e-16 of its peak.
    double support_half_width() const;
    /// Smallest spectral feature the quadrature has to resolve.
    double feature_scale() const;

    const std::vector<double>& table_omegas() const { return table_omega_; }
    const std::vector<cdouble>& table_amplitudes() const { return table_amp_; }

private:
    PumpShape shape_ = PumpShape::gaussian;
    double center_ = 0.0;
    double fwhm_ = 0.0;
    double chirp_ = 0.0;
    double width_ = 0.0;  // gaussian: sigma of |A|^2; sech2: sech argument scale
    double norm_ = 1.0;
    std::vector<double> table_omega_;
    std::vector<cdouble> table_amp_;
};

/// Straight or spiral waveguide source.
struct SpiralParams {
    double length = 0.0;              // m
    double expansion_omega = 0.0;     // rad/s, Taylor expansion point of k(w)
    std::vector<double> dispersion;   // k_n in s^n/m, n = 0, 1, 2, ...
    double gamma_nl = 0.0;            // 1/(W m); carried for bookkeeping, only ratios matter

    /// k(w) - k(w_ref) - k1 (w - w_ref), i.e. the part that survives in the mismatch.
    double curvature_part(double omega) const;
    /// k(w_p1) + k(w_p2) - k(w_s) - k(w_i)
    double phase_mismatch(double omega_p1, double omega_p2, double omega_s, double omega_i) const;
    void validate() const;
};

enum class FilterShape { ideal, lorentzian, rect };

/// Power response |G|^2 of the tunable filter in front of the detector.
struct FilterSpec {
    FilterShape shape = FilterShape::ideal;
    double fwhm = 0.0;  // rad/s; unused for the ideal (delta) response

    double power_response(double detuning) const;
    void validate() const;

    static FilterSpec on_chip();   // Lorentzian, 110e9 rad/s
    static FilterSpec off_chip();  // box, 40e9 rad/s
};

const char* to_string(FilterShape shape);
const char* to_string(PumpShape shape);

struct QuadratureOptions {
    double rel_tol = 1e-10;      // Richardson estimate relative to int |integrand|
    int oversampling = 8;        // initial nodes per feature scale
    int max_refinements = 10;
};

struct QuadratureResult {
    cdouble value{0.0, 0.0};
    double error_estimate = 0.0;
    double abs_integral = 0.0;
    std::size_t evaluations = 0;
};

/// int FE_p(S - w') FE_p(w') A_p(S - w') A_p(w') dw' (FE_p factors dropped when
/// `ring` is null). Throws NumericalError if the trapezoid/Richardson estimate
/// does not reach the tolerance.
cdouble pump_autoconvolution(const PumpSpectrum& pump, double omega_sum, const RingParams* ring,
                             const QuadratureOptions& opts = {});
QuadratureResult pump_autoconvolution_detailed(const PumpSpectrum& pump, double omega_sum,
                                               const RingParams* ring, const QuadratureOptions& opts = {});

/// Ring JSA FE_s(ws) FE_i(wi) * autoconvolution, normalized. Rows use
/// `row_band`, columns `column_band` (swap them for the other seeding order).
ComplexJSA resonator_jsa(const RingParams& ring, const PumpSpectrum& pump, const SpectralGrid& grid,
                         Band row_band = Band::signal, Band column_band = Band::idler,
                         const QuadratureOptions& opts = {});

/// Waveguide JSA: int exp(i dk L/2) sinc(dk L/2) A_p A_p dw', normalized.
ComplexJSA spiral_jsa(const SpiralParams& spiral, const PumpSpectrum& pump, const SpectralGrid& grid,
                      const QuadratureOptions& opts = {});

/// Convolution of a map with the filter power response along the idler
/// (column) axis. The kernel is cut at +-10 FWHM and renormalized per output
/// point. Throws ConfigError if the filter has fewer than 3 samples per FWHM.
RealMatrix convolve_filter_jsi(const RealMatrix& jsi, const std::vector<double>& idler_axis,
                               const FilterSpec& filter);
ComplexMatrix convolve_filter(const ComplexMatrix& map, const std::vector<double>& idler_axis,
                              const FilterSpec& filter);

}  // namespace ringjsa
