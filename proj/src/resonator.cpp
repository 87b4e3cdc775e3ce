#include "ringjsa/resonator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <utility>

namespace ringjsa {

namespace {

constexpr double kLosslessTolerance = 1e-9;

void require_finite(double omega)
{
    if (!std::isfinite(omega)) throw std::invalid_argument("frequency must be finite");
}

// i sqrt(2/tau_e) / (1/tau_tot - i(w - w0)); equals sqrt(tau_rt) * FE.
cdouble normalized_enhancement(const BandResonance& res, double omega)
{
    const cdouble i{0.0, 1.0};
    return i * std::sqrt(res.bus_rate()) / cdouble{res.decay_rate(), -(omega - res.omega0)};
}

}  // namespace

const char* to_string(Band band)
{
    switch (band) {
    case Band::pump: return "pump";
    case Band::signal: return "signal";
    case Band::idler: return "idler";
    }
    return "?";
}

const BandResonance& RingParams::band(Band b) const
{
    switch (b) {
    case Band::pump: return pump;
    case Band::signal: return signal;
    case Band::idler: return idler;
    }
    throw std::invalid_argument("unknown band");
}

BandResonance& RingParams::band(Band b)
{
    return const_cast<BandResonance&>(std::as_const(*this).band(b));
}

void RingParams::validate() const
{
    if (!(perimeter > 0.0)) throw ConfigError("ring perimeter must be > 0");
    if (!(group_index > 0.0)) throw ConfigError("ring group index must be > 0");
    for (Band b : {Band::pump, Band::signal, Band::idler}) {
        const BandResonance& r = band(b);
        std::ostringstream where;
        where << "ring " << to_string(b) << " band: ";
        if (!(r.omega0 > 0.0) || !std::isfinite(r.omega0))
            throw ConfigError(where.str() + "resonance frequency must be finite and > 0");
        if (!(r.tau_e > 0.0)) throw ConfigError(where.str() + "tau_e must be > 0");
        if (!(r.tau_tot > 0.0)) throw ConfigError(where.str() + "tau_tot must be > 0");
        // total decay must at least cover the two bus channels
        if (r.decay_rate() < r.bus_rate() * (1.0 - kLosslessTolerance))
            throw ConfigError(where.str() + "1/tau_tot must be >= 2/tau_e");
    }
    const double eps = 1e-12;
    if (std::abs(pump.omega0 - signal.omega0) < eps * pump.omega0 ||
        std::abs(pump.omega0 - idler.omega0) < eps * pump.omega0 ||
        std::abs(signal.omega0 - idler.omega0) < eps * pump.omega0)
        throw ConfigError("ring resonances must be distinct");
}

double group_index_for_fsr(double fsr_hz, double perimeter_m)
{
    return kSpeedOfLight / (fsr_hz * perimeter_m);
}

RingParams RingParams::reference_device()
{
    RingParams ring;
    ring.perimeter = 92.12e-6;
    ring.group_index = group_index_for_fsr(800e9, ring.perimeter);
    ring.pump = {units::wavelength_nm_to_omega(1555.32), 24.8e-12, 9.6e-12};
    ring.signal = {units::wavelength_nm_to_omega(1561.60), 23.7e-12, 9.3e-12};
    ring.idler = {units::wavelength_nm_to_omega(1549.08), 25.9e-12, 10.0e-12};
    return ring;
}

cdouble field_enhancement(const RingParams& ring, double omega, Band band)
{
    require_finite(omega);
    return normalized_enhancement(ring.band(band), omega) / std::sqrt(ring.round_trip_time());
}

cdouble drop_transfer(const RingParams& ring, double omega, Band band)
{
    require_finite(omega);
    const BandResonance& res = ring.band(band);
    const cdouble i{0.0, 1.0};
    return i * std::sqrt(res.bus_rate()) * normalized_enhancement(res, omega);
}

cdouble through_transfer(const RingParams& ring, double omega, Band band)
{
    return 1.0 + drop_transfer(ring, omega, band);
}

double field_enhancement_phase(const BandResonance& res, double omega)
{
    return 0.5 * kPi + std::atan2(omega - res.omega0, res.decay_rate());
}

SumIdentity sum_identity(const RingParams& ring, double omega, Band band)
{
    const BandResonance& res = ring.band(band);
    const cdouble fe = field_enhancement(ring, omega, band);
    SumIdentity out;
    out.sum_conj = std::conj(through_transfer(ring, omega, band) + drop_transfer(ring, omega, band));
    out.fe_ratio = std::conj(fe) / fe;
    out.lossless = std::abs(res.decay_rate() - res.bus_rate()) <= kLosslessTolerance * res.decay_rate();
    return out;
}

FieldEnhancementRecovery fe_from_through(std::span<const cdouble> through,
                                         std::span<const double> omegas,
                                         const RingParams& ring, Band band)
{
    if (through.size() != omegas.size())
        throw std::invalid_argument("fe_from_through: sample and frequency counts differ");
    const BandResonance& res = ring.band(band);
    const cdouble i{0.0, 1.0};
    const cdouble scale = -i * std::sqrt(res.tau_e / (2.0 * ring.round_trip_time()));

    FieldEnhancementRecovery out;
    out.fe.reserve(through.size());
    for (std::size_t k = 0; k < through.size(); ++k) {
        require_finite(omegas[k]);
        out.fe.push_back(scale * (through[k] - 1.0));
    }
    if (!omegas.empty()) {
        const auto [lo, hi] = std::minmax_element(omegas.begin(), omegas.end());
        out.covers_resonance = *lo <= res.omega0 && res.omega0 <= *hi;
    }
    return out;
}

double ChannelSet::channel_rate_sum() const
{
    return std::accumulate(tau_e.begin(), tau_e.end(), 0.0,
                           [](double acc, double t) { return acc + 1.0 / t; });
}

void ChannelSet::validate() const
{
    if (tau_e.size() < 2) throw ConfigError("channel set needs at least two channels");
    if (seeded >= tau_e.size()) throw ConfigError("seeded channel index out of range");
    if (!(tau_tot > 0.0)) throw ConfigError("channel set tau_tot must be > 0");
    for (double t : tau_e)
        if (!(t > 0.0)) throw ConfigError("channel lifetimes must be > 0");
    if (channel_rate_sum() > (1.0 + kLosslessTolerance) / tau_tot)
        throw ConfigError("channel decay rates exceed the total decay rate");
}

ChannelSet ChannelSet::with_phantom_loss() const
{
    validate();
    ChannelSet out = *this;
    const double residual = 1.0 / tau_tot - channel_rate_sum();
    if (residual > kLosslessTolerance / tau_tot) out.tau_e.push_back(1.0 / residual);
    return out;
}

cdouble multichannel_stimulated_factor(const ChannelSet& channels, double omega)
{
    require_finite(omega);
    channels.validate();
    const double total = 1.0 / channels.tau_tot;
    if (std::abs(channels.channel_rate_sum() - total) > kLosslessTolerance * total)
        throw ConfigError("channel rates do not account for the total decay rate; "
                          "add a phantom loss channel");

    // 2/tau_e,I + sum_{m != T} 2/tau_e,m, with Input and Through on the seeded bus
    double coupled = 2.0 / channels.tau_e[channels.seeded];
    for (std::size_t m = 0; m < channels.tau_e.size(); ++m)
        if (m != channels.seeded) coupled += 2.0 / channels.tau_e[m];

    const cdouble detuning{0.0, -(omega - channels.omega0)};
    return std::conj((detuning + total - coupled) / (detuning + total));
}

}  // namespace ringjsa
