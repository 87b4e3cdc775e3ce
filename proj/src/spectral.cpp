#include "ringjsa/spectral.hpp"

#include <cmath>

namespace ringjsa {

namespace {

double checked_step(const std::vector<double>& axis, const char* name)
{
    if (axis.size() < 2) throw ConfigError(std::string(name) + " axis needs at least two points");
    const double step = (axis.back() - axis.front()) / static_cast<double>(axis.size() - 1);
    if (!(step > 0.0) || !std::isfinite(step))
        throw ConfigError(std::string(name) + " axis must be strictly increasing");
    for (std::size_t k = 1; k < axis.size(); ++k) {
        const double d = axis[k] - axis[k - 1];
        if (!(d > 0.0)) throw ConfigError(std::string(name) + " axis must be strictly increasing");
        const double expected = axis.front() + step * static_cast<double>(k);
        if (std::abs(axis[k] - expected) > 1e-9 * std::abs(axis[k]) &&
            std::abs(d - step) > 1e-9 * step)
            throw ConfigError(std::string(name) + " axis spacing is not uniform");
    }
    return step;
}

}  // namespace

SpectralGrid::SpectralGrid(std::vector<double> signal, std::vector<double> idler)
    : signal_(std::move(signal)), idler_(std::move(idler))
{
    signal_step_ = checked_step(signal_, "signal");
    idler_step_ = checked_step(idler_, "idler");
}

SpectralGrid SpectralGrid::uniform(double signal_lo, double signal_hi, std::size_t n_signal,
                                   double idler_lo, double idler_hi, std::size_t n_idler)
{
    auto linspace = [](double lo, double hi, std::size_t n) {
        std::vector<double> v(n);
        for (std::size_t k = 0; k < n; ++k)
            v[k] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
        return v;
    };
    return SpectralGrid(linspace(signal_lo, signal_hi, n_signal), linspace(idler_lo, idler_hi, n_idler));
}

bool SpectralGrid::matches(const SpectralGrid& other, double rel_tol) const
{
    if (n_signal() != other.n_signal() || n_idler() != other.n_idler()) return false;
    for (std::size_t k = 0; k < n_signal(); ++k)
        if (std::abs(signal_[k] - other.signal_[k]) > rel_tol * signal_step_) return false;
    for (std::size_t k = 0; k < n_idler(); ++k)
        if (std::abs(idler_[k] - other.idler_[k]) > rel_tol * idler_step_) return false;
    return true;
}

ComplexJSA::ComplexJSA(SpectralGrid g, ComplexMatrix v, bool norm)
    : grid(std::move(g)), values(std::move(v)), normalized(norm)
{
    if (values.rows() != static_cast<Eigen::Index>(grid.n_signal()) ||
        values.cols() != static_cast<Eigen::Index>(grid.n_idler()))
        throw std::invalid_argument("ComplexJSA: value shape does not match grid");
}

double ComplexJSA::norm_squared() const
{
    return values.squaredNorm() * grid.cell_measure();
}

ComplexJSA& ComplexJSA::normalize()
{
    const double n2 = norm_squared();
    if (!(n2 > 0.0) || !std::isfinite(n2)) throw NumericalError("cannot normalize an all-zero or non-finite JSA");
    values /= std::sqrt(n2);
    normalized = true;
    return *this;
}

ComplexJSA ComplexJSA::transposed() const
{
    ComplexJSA out(grid.transposed(), values.transpose(), normalized);
    out.provenance = provenance;
    return out;
}

}  // namespace ringjsa
