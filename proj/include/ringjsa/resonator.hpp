#pragma once

#include <span>
#include <vector>

#include "ringjsa/common.hpp"

namespace ringjsa {

enum class Band { pump, signal, idler };

const char* to_string(Band band);

/// One resonance order of the ring: its centre frequency and the two photon
/// lifetimes (coupling to one bus, and total).
struct BandResonance {
    double omega0 = 0.0;   // rad/s
    double tau_e = 0.0;    // s, extrinsic lifetime of one bus coupler
    double tau_tot = 0.0;  // s, total lifetime (1/tau_tot is the half-linewidth rate)

    double decay_rate() const { return 1.0 / tau_tot; }
    double bus_rate() const { return 2.0 / tau_e; }
};

/// Add-drop ring with two identical bus couplers.
struct RingParams {
    double perimeter = 0.0;    // m
    double group_index = 0.0;  // round trip time = n_g L / c
    BandResonance pump;
    BandResonance signal;
    BandResonance idler;

    double round_trip_time() const { return group_index * perimeter / kSpeedOfLight; }
    double fsr_hz() const { return 1.0 / round_trip_time(); }

    const BandResonance& band(Band b) const;
    BandResonance& band(Band b);

    /// Throws ConfigError describing the first violated invariant.
    void validate() const;

    /// Device parameters of the measured ring; group index set for an 800 GHz FSR.
    static RingParams reference_device();
};

/// Group index giving the requested free spectral range for a perimeter.
double group_index_for_fsr(double fsr_hz, double perimeter_m);

// Convention (used everywhere below): with u(w) = i sqrt(2/tau_e) / (1/tau_tot - i(w - w0)),
//   FE  = u / sqrt(tau_rt)
//   D_R = i sqrt(2/tau_e) sqrt(tau_rt) FE
//   T_H = 1 + D_R
// so T_H -> 1 away from resonance and FE = -i sqrt(tau_e / (2 tau_rt)) (T_H - 1) exactly.

cdouble field_enhancement(const RingParams& ring, double omega, Band band);
cdouble through_transfer(const RingParams& ring, double omega, Band band);
cdouble drop_transfer(const RingParams& ring, double omega, Band band);

/// Phase of the field enhancement, continuous in (0, pi); pi/2 on resonance.
double field_enhancement_phase(const BandResonance& res, double omega);

struct SumIdentity {
    cdouble sum_conj;  // (T_H + D_R)^*
    cdouble fe_ratio;  // FE^* / FE
    bool lossless;     // 1/tau_tot == 2/tau_e within 1e-9 relative
};

/// Evaluates both sides of (T_H + D_R)^* = FE^*/FE. They only agree when the
/// `lossless` flag is set.
SumIdentity sum_identity(const RingParams& ring, double omega, Band band);

struct FieldEnhancementRecovery {
    std::vector<cdouble> fe;
    bool covers_resonance = false;  // false: the grid does not bracket omega0
};

/// Inverts the through transfer function into the internal field enhancement.
FieldEnhancementRecovery fe_from_through(std::span<const cdouble> through,
                                         std::span<const double> omegas,
                                         const RingParams& ring, Band band);

/// Resonator coupled to M >= 2 channels. `seeded` is the channel whose bus
/// carries both the Input and the Through port.
struct ChannelSet {
    std::vector<double> tau_e;  // s, per channel
    std::size_t seeded = 0;
    double tau_tot = 0.0;       // s
    double omega0 = 0.0;        // rad/s

    double channel_rate_sum() const;  // sum_m 1/tau_e,m
    void validate() const;

    /// Adds a loss channel absorbing whatever part of 1/tau_tot is not channelized.
    ChannelSet with_phantom_loss() const;
};

/// Bracketed factor multiplying phi in the M-channel stimulated amplitude.
/// Requires all loss to be channelized (sum_m 1/tau_e,m == 1/tau_tot); throws
/// ConfigError otherwise. The result then equals FE^*/FE.
cdouble multichannel_stimulated_factor(const ChannelSet& channels, double omega);

}  // namespace ringjsa
