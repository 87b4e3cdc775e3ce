#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace ringjsa {

using cdouble = std::complex<double>;

// Maps are indexed (seed/signal row, detected/idler column), row-major so the
// in-memory layout matches the on-disk containers.
using RealMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ComplexMatrix = Eigen::Matrix<cdouble, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MaskMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Invalid user input or configuration. Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A numerical procedure failed (quadrature, fit, degenerate data). Exit code 3.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace units {

inline double wavelength_nm_to_omega(double lambda_nm) { return kTwoPi * kSpeedOfLight / (lambda_nm * 1e-9); }
inline double omega_to_wavelength_nm(double omega) { return kTwoPi * kSpeedOfLight / omega * 1e9; }

/// Angular-frequency width of a wavelength interval centred at lambda.
inline double wavelength_width_to_omega(double width_pm, double center_nm)
{
    const double lambda = center_nm * 1e-9;
    return kTwoPi * kSpeedOfLight * width_pm * 1e-12 / (lambda * lambda);
}

inline double omega_width_to_wavelength_pm(double width, double center_nm)
{
    const double lambda = center_nm * 1e-9;
    return width * lambda * lambda / (kTwoPi * kSpeedOfLight) * 1e12;
}

}  // namespace units

/// Wrap an angle to (-pi, pi].
inline double wrap_phase(double x)
{
    double y = std::remainder(x, kTwoPi);
    if (y <= -kPi) y += kTwoPi;
    return y;
}

}  // namespace ringjsa
