#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "ringjsa/measurement.hpp"

namespace ringjsa {

struct PumpConfig {
    PumpShape shape = PumpShape::gaussian;
    double center_omega = 0.0;  // rad/s
    double fwhm = 0.0;          // rad/s, of |A_p|^2
    double chirp = 0.0;         // s^2
    std::vector<double> table_omega;
    std::vector<cdouble> table_amplitude;

    PumpSpectrum spectrum() const;
};

/// Everything a run needs. Defaults reproduce the reference device.
struct RunConfig {
    RingParams ring;
    PumpConfig pump;
    SpiralParams spiral;
    CampaignConfig campaign;
    std::string filter_name = "off-chip";  // on-chip | off-chip | ideal | custom
    std::size_t schmidt_points = 201;      // per axis of the dense truth grid
    double schmidt_span_halfwidths = 16.0; // half span in units of 1/tau_tot
    QuadratureOptions quadrature;
    std::uint64_t seed = 42;

    static RunConfig defaults();
    void validate() const;

    /// Sets pump FWHM from a wavelength width in pm at the pump centre.
    void set_pump_bandwidth_pm(double pm);
    /// on-chip | off-chip | ideal
    void set_filter(const std::string& name);
};

/// Throws ConfigError with the offending key path, e.g. "ring.tau_e_s_ps: must be > 0".
RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::string& path);
nlohmann::json to_json(const RunConfig& cfg);

/// Campaign block in exact SI units, as stored next to measurements.
nlohmann::json campaign_to_json(const CampaignConfig& cfg);
CampaignConfig campaign_from_json(const nlohmann::json& j);

FilterSpec filter_by_name(const std::string& name);
std::string filter_name(const FilterSpec& f);

}  // namespace ringjsa
