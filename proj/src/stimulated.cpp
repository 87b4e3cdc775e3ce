#include "ringjsa/stimulated.hpp"

#include <cmath>

namespace ringjsa {

const char* to_string(SourceTag tag)
{
    switch (tag) {
    case SourceTag::ring: return "ring";
    case SourceTag::spiral: return "spiral";
    case SourceTag::combined: return "combined";
    }
    return "?";
}

StimulatedMap ring_stimulated_amplitude(const ComplexJSA& jsa, const RingParams& ring, const SeedSpec& seed)
{
    const Band band = seeded_band(seed.order);
    const BandResonance& res = ring.band(band);
    const auto& rows = jsa.grid.signal();
    if (rows.empty()) throw ConfigError("empty seed axis");

    StimulatedMap out{jsa.grid, ComplexMatrix(jsa.values.rows(), jsa.values.cols()), SourceTag::ring};
    const cdouble seed_conj = std::conj(seed.amplitude);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        // FE^*/FE = exp(-2i theta_FE); the sign lives in kFieldEnhancementPhaseSign
        const double theta_fe = field_enhancement_phase(res, rows[r]);
        const cdouble correction = std::polar(1.0, kFieldEnhancementPhaseSign * 2.0 * theta_fe);
        out.amplitude.row(r) = seed_conj * correction * jsa.values.row(r);
    }
    return out;
}

StimulatedMap spiral_stimulated_amplitude(const ComplexJSA& jsa, const SeedSpec& seed)
{
    return {jsa.grid, std::conj(seed.amplitude) * jsa.values, SourceTag::spiral};
}

RealMatrix interference_intensity(const StimulatedMap& a, const StimulatedMap& b, double delta_theta)
{
    return interference_intensity(a, b, delta_theta, 0.0);
}

RealMatrix interference_intensity(const StimulatedMap& a, const StimulatedMap& b, double delta_theta,
                                  double splitter_imbalance)
{
    if (!a.grid.matches(b.grid)) throw std::invalid_argument("interference_intensity: maps are on different grids");
    if (!(std::abs(splitter_imbalance) < 1.0)) throw ConfigError("splitter imbalance must be in (-1, 1)");
    const double ta = std::sqrt(1.0 + splitter_imbalance);
    const double tb = std::sqrt(1.0 - splitter_imbalance);
    const cdouble rot = std::polar(1.0, delta_theta);
    return ((ta * rot) * a.amplitude + tb * b.amplitude).cwiseAbs2();
}

}  // namespace ringjsa
