#pragma once

#include "ringjsa/jsa_forward.hpp"

namespace ringjsa {

/// Sign of the field-enhancement phase in the stimulated amplitude,
/// gamma ~ |phi| exp(i (theta_phi + kFieldEnhancementPhaseSign * 2 theta_FE)).
/// The (T_H + D_R)^* = FE^*/FE factor fixes it to -1.
inline constexpr int kFieldEnhancementPhaseSign = -1;

/// Which neighbouring resonance the seed laser sweeps. `plus` seeds the ring's
/// signal band (rows of the canonical grid), `minus` the idler band.
enum class SeedOrder { plus = 1, minus = -1 };

inline Band seeded_band(SeedOrder order) { return order == SeedOrder::plus ? Band::signal : Band::idler; }
inline Band detected_band(SeedOrder order) { return order == SeedOrder::plus ? Band::idler : Band::signal; }

/// Monochromatic seed; the map's row axis is the seed wavelength sweep.
struct SeedSpec {
    SeedOrder order = SeedOrder::plus;
    cdouble amplitude{1.0, 0.0};  // gamma_sI at the Input port, arbitrary units
};

enum class SourceTag { ring, spiral, combined };
const char* to_string(SourceTag tag);

/// Complex idler amplitude at the output, rows = seed frequency, columns = idler.
struct StimulatedMap {
    SpectralGrid grid;
    ComplexMatrix amplitude;
    SourceTag tag = SourceTag::ring;
};

/// gamma = conj(seed) * phi * FE^*/FE(w_seed). `jsa` rows must be the seeded band.
StimulatedMap ring_stimulated_amplitude(const ComplexJSA& jsa, const RingParams& ring, const SeedSpec& seed);

/// gamma = conj(seed) * phi; no resonant correction for a waveguide.
StimulatedMap spiral_stimulated_amplitude(const ComplexJSA& jsa, const SeedSpec& seed);

/// |exp(i dtheta) a + b|^2 = |a|^2 + |b|^2 + 2|a||b| cos(dtheta + Arg a - Arg b).
RealMatrix interference_intensity(const StimulatedMap& a, const StimulatedMap& b, double delta_theta);

/// Phase-resolved output of an unbalanced splitter:
/// (1 + e)|a|^2 + (1 - e)|b|^2 + 2 sqrt(1 - e^2) Re(exp(i dtheta) a b^*).
RealMatrix interference_intensity(const StimulatedMap& a, const StimulatedMap& b, double delta_theta,
                                  double splitter_imbalance);

}  // namespace ringjsa
