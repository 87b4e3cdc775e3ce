#pragma once

#include <string>

#include <json.hpp>

#include "ringjsa/config.hpp"
#include "ringjsa/metrics.hpp"

namespace ringjsa {

/// Ring and spiral truths on the fine simulation lattice of a campaign
/// (measurement orientation: rows are the seeded band).
struct TruthSet {
    SimulationLayout layout;
    ComplexJSA ring;
    ComplexJSA spiral;
};

TruthSet simulate_truth(const RunConfig& cfg);

/// Canonical-orientation ring JSA on the campaign grid, no filter.
ComplexJSA campaign_truth(const RunConfig& cfg);

/// Square lattice with equal spacing for converged Schmidt numbers.
SpectralGrid schmidt_grid(const RunConfig& cfg);
ComplexJSA dense_truth(const RunConfig& cfg);

/// What a perfect reconstruction of this campaign returns: filtered JSI and
/// the phase of the filtered ring x spiral^* cross term, canonical orientation.
struct FilteredTruth {
    SpectralGrid grid;
    RealMatrix jsi;    // normalized
    RealMatrix phase;  // rad, wrapped
    ComplexJSA jsa;
};

FilteredTruth filtered_truth(const TruthSet& truth, const CampaignConfig& cfg);

// File-level commands behind the CLI. Each returns a short JSON summary.
nlohmann::json cmd_simulate(const RunConfig& cfg, const std::string& out_dir);
nlohmann::json cmd_synthesize(const RunConfig& cfg, const std::string& truth_dir, const std::string& out_dir);
nlohmann::json cmd_reconstruct(const std::string& measurement_dir, const std::string& out_dir,
                               const ReconstructionOptions& opts = {});
nlohmann::json cmd_report(const std::string& result_dir, const std::string& truth_dir, std::size_t trials,
                          std::uint64_t seed);

}  // namespace ringjsa
