#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ringjsa/reconstruction.hpp"

namespace ringjsa {

struct SchmidtResult {
    std::vector<double> singular_values;  // normalized, sum of squares 1, nonincreasing
    double K = 1.0;
    std::size_t rank = 0;  // singular values above 1e-12 of the largest
    std::size_t n_signal = 0;
    std::size_t n_idler = 0;
};

/// K = 1 / sum(lambda^4) from the SVD of phi sqrt(dws dwi).
SchmidtResult schmidt_number(const ComplexJSA& jsa);
/// Same on |phi|, i.e. the lower bound available from the JSI alone.
SchmidtResult schmidt_number_intensity_only(const ComplexJSA& jsa);

enum class FidelityKind { intensity, complex };
const char* to_string(FidelityKind kind);

struct FidelityResult {
    double value = 0.0;  // [0, 100]
    FidelityKind kind = FidelityKind::intensity;
    double phase_offset = 0.0;  // complex kind: theta* aligning exp(i theta*) b with a
    std::string formula;
};

/// 100 (sum sqrt(p q))^2 with p, q normalized to unit sum.
FidelityResult fidelity_intensity(const RealMatrix& a, const RealMatrix& b);
FidelityResult fidelity_intensity(const RealMatrix& a, const RealMatrix& b, const MaskMatrix& mask);

/// 100 max_theta |<a| exp(i theta) b>|^2 / (|a|^2 |b|^2) on the mask.
FidelityResult fidelity_complex(const ComplexMatrix& a, const ComplexMatrix& b, const MaskMatrix& mask);
FidelityResult fidelity_complex(const ComplexJSA& a, const ComplexJSA& b);

/// Largest |wrap(measured - reference - offset)| over the mask, minimized over
/// one global offset.
struct PhaseComparison {
    double max_error = 0.0;
    double offset = 0.0;
    std::size_t points = 0;
};
PhaseComparison compare_phase(const RealMatrix& measured, const RealMatrix& reference, const MaskMatrix& mask);

struct MetricStats {
    double mean = 0.0;
    double std = 0.0;
    std::size_t samples = 0;
};

struct MonteCarloOptions {
    std::size_t trials = 200;
    std::uint64_t seed = 42;
    bool resample = true;  // false: rerun on the recorded counts
    ReconstructionOptions reconstruction;
};

struct MonteCarloSummary {
    std::map<std::string, MetricStats> metrics;  // K_jsi, K_jsp, median_sigma_delta, ...
    std::size_t trials = 0;
    std::size_t failures = 0;
    std::vector<std::string> failure_messages;
    RealMatrix delta_std;    // empirical std of delta per point (canonical orientation), NaN if < 2 samples
    RealMatrix sigma_mean;   // mean reported sigma_delta per point
    MaskMatrix baseline_mask;
};

/// Poisson-resamples every count bin, reruns reconstruction and metrics.
/// Failed trials are counted and excluded.
MonteCarloSummary monte_carlo_errors(const MeasurementSet& m, const MonteCarloOptions& opts);

double median(std::vector<double> values);

}  // namespace ringjsa
