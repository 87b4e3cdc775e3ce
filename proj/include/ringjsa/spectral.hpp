#pragma once

#include <string>
#include <vector>

#include "ringjsa/common.hpp"

namespace ringjsa {

/// Uniform signal x idler frequency lattice (rad/s). Rows follow the signal
/// (seeded) axis, columns the idler (detected) axis.
class SpectralGrid {
public:
    SpectralGrid() = default;
    SpectralGrid(std::vector<double> signal, std::vector<double> idler);

    static SpectralGrid uniform(double signal_lo, double signal_hi, std::size_t n_signal,
                                double idler_lo, double idler_hi, std::size_t n_idler);

    const std::vector<double>& signal() const { return signal_; }
    const std::vector<double>& idler() const { return idler_; }
    std::size_t n_signal() const { return signal_.size(); }
    std::size_t n_idler() const { return idler_.size(); }
    double signal_step() const { return signal_step_; }
    double idler_step() const { return idler_step_; }
    double cell_measure() const { return signal_step_ * idler_step_; }

    SpectralGrid transposed() const { return SpectralGrid(idler_, signal_); }

    /// Same axes to within `rel_tol` of the local spacing.
    bool matches(const SpectralGrid& other, double rel_tol = 1e-9) const;

private:
    std::vector<double> signal_;
    std::vector<double> idler_;
    double signal_step_ = 0.0;
    double idler_step_ = 0.0;
};

/// Complex joint spectral amplitude sampled on a grid.
struct ComplexJSA {
    SpectralGrid grid;
    ComplexMatrix values;
    bool normalized = false;
    std::string provenance;

    ComplexJSA() = default;
    ComplexJSA(SpectralGrid g, ComplexMatrix v, bool norm = false);

    /// sum |phi|^2 dws dwi
    double norm_squared() const;
    /// Rescales so norm_squared() == 1. Throws NumericalError on an all-zero map.
    ComplexJSA& normalize();

    RealMatrix intensity() const { return values.cwiseAbs2(); }
    RealMatrix phase() const { return values.unaryExpr([](cdouble z) { return std::arg(z); }); }

    ComplexJSA transposed() const;
};

}  // namespace ringjsa
