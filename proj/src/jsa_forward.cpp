#include "ringjsa/jsa_forward.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>

namespace ringjsa {

// ---------------------------------------------------------------- pump

PumpSpectrum PumpSpectrum::gaussian(double center_omega, double fwhm, double chirp)
{
    if (!(fwhm > 0.0)) throw ConfigError("pump bandwidth must be > 0");
    PumpSpectrum p;
    p.shape_ = PumpShape::gaussian;
    p.center_ = center_omega;
    p.fwhm_ = fwhm;
    p.chirp_ = chirp;
    p.width_ = fwhm / (2.0 * std::sqrt(2.0 * std::log(2.0)));
    p.norm_ = 1.0 / std::sqrt(p.width_ * std::sqrt(kTwoPi));
    return p;
}

PumpSpectrum PumpSpectrum::sech2(double center_omega, double fwhm, double chirp)
{
    if (!(fwhm > 0.0)) throw ConfigError("pump bandwidth must be > 0");
    PumpSpectrum p;
    p.shape_ = PumpShape::sech2;
    p.center_ = center_omega;
    p.fwhm_ = fwhm;
    p.chirp_ = chirp;
    p.width_ = fwhm / (2.0 * std::acosh(std::sqrt(2.0)));
    p.norm_ = 1.0 / std::sqrt(2.0 * p.width_);
    return p;
}

PumpSpectrum PumpSpectrum::tabulated(std::vector<double> omegas, std::vector<cdouble> amplitudes)
{
    if (omegas.size() != amplitudes.size() || omegas.size() < 3)
        throw ConfigError("tabulated pump needs >= 3 (omega, amplitude) samples");
    for (std::size_t k = 1; k < omegas.size(); ++k)
        if (!(omegas[k] > omegas[k - 1])) throw ConfigError("tabulated pump frequencies must increase");

    // exact integral of |A|^2 for linear interpolation
    double energy = 0.0, first_moment = 0.0;
    for (std::size_t k = 1; k < omegas.size(); ++k) {
        const cdouble a = amplitudes[k - 1], b = amplitudes[k];
        const double h = omegas[k] - omegas[k - 1];
        const double seg = h * (std::norm(a) + std::norm(b) + std::real(a * std::conj(b))) / 3.0;
        energy += seg;
        first_moment += seg * 0.5 * (omegas[k] + omegas[k - 1]);
    }
    if (!(energy > 0.0)) throw ConfigError("tabulated pump has zero energy");

    PumpSpectrum p;
    p.shape_ = PumpShape::tabulated;
    p.center_ = first_moment / energy;
    p.norm_ = 1.0 / std::sqrt(energy);
    p.table_omega_ = std::move(omegas);
    p.table_amp_ = std::move(amplitudes);

    // half-maximum width of |A|^2 on the samples
    double peak = 0.0;
    for (const cdouble& a : p.table_amp_) peak = std::max(peak, std::norm(a));
    double lo = p.table_omega_.back(), hi = p.table_omega_.front();
    for (std::size_t k = 0; k < p.table_omega_.size(); ++k) {
        if (std::norm(p.table_amp_[k]) >= 0.5 * peak) {
            lo = std::min(lo, p.table_omega_[k]);
            hi = std::max(hi, p.table_omega_[k]);
        }
    }
    p.fwhm_ = hi - lo;
    return p;
}

cdouble PumpSpectrum::amplitude(double omega) const
{
    const double x = omega - center_;
    switch (shape_) {
    case PumpShape::gaussian: {
        const double a = norm_ * std::exp(-x * x / (4.0 * width_ * width_));
        return chirp_ == 0.0 ? cdouble{a, 0.0} : std::polar(a, chirp_ * x * x);
    }
    case PumpShape::sech2: {
        const double a = norm_ / std::cosh(x / width_);
        return chirp_ == 0.0 ? cdouble{a, 0.0} : std::polar(a, chirp_ * x * x);
    }
    case PumpShape::tabulated: {
        if (omega < table_omega_.front() || omega > table_omega_.back()) return {0.0, 0.0};
        auto it = std::upper_bound(table_omega_.begin(), table_omega_.end(), omega);
        if (it == table_omega_.end()) return norm_ * table_amp_.back();
        const std::size_t k = static_cast<std::size_t>(it - table_omega_.begin());
        const double t = (omega - table_omega_[k - 1]) / (table_omega_[k] - table_omega_[k - 1]);
        return norm_ * ((1.0 - t) * table_amp_[k - 1] + t * table_amp_[k]);
    }
    }
    return {0.0, 0.0};
}

double PumpSpectrum::support_half_width() const
{
    switch (shape_) {
    case PumpShape::gaussian: return 13.0 * width_;
    case PumpShape::sech2: return 40.0 * width_;
    case PumpShape::tabulated:
        return std::max(center_ - table_omega_.front(), table_omega_.back() - center_);
    }
    return 0.0;
}

double PumpSpectrum::feature_scale() const
{
    switch (shape_) {
    case PumpShape::gaussian: {
        double scale = std::sqrt(2.0) * width_;
        // a chirped field oscillates over the support; resolve the fastest fringe
        if (chirp_ != 0.0) scale = std::min(scale, kPi / (2.0 * std::abs(chirp_) * support_half_width()));
        return scale;
    }
    case PumpShape::sech2: {
        double scale = width_;
        if (chirp_ != 0.0) scale = std::min(scale, kPi / (2.0 * std::abs(chirp_) * support_half_width()));
        return scale;
    }
    case PumpShape::tabulated: {
        double d = table_omega_.back() - table_omega_.front();
        for (std::size_t k = 1; k < table_omega_.size(); ++k) d = std::min(d, table_omega_[k] - table_omega_[k - 1]);
        return d;
    }
    }
    return 0.0;
}

const char* to_string(PumpShape shape)
{
    switch (shape) {
    case PumpShape::gaussian: return "gaussian";
    case PumpShape::sech2: return "sech2";
    case PumpShape::tabulated: return "tabulated";
    }
    return "?";
}

// ---------------------------------------------------------------- spiral

double SpiralParams::curvature_part(double omega) const
{
    const double x = omega - expansion_omega;
    double term = x;  // x^n / n!, starting at n = 1
    double sum = 0.0;
    for (std::size_t n = 2; n < dispersion.size(); ++n) {
        term *= x / static_cast<double>(n);
        sum += dispersion[n] * term;
    }
    return sum;
}

double SpiralParams::phase_mismatch(double omega_p1, double omega_p2, double omega_s, double omega_i) const
{
    // k0 and k1 cancel identically under energy conservation
    return curvature_part(omega_p1) + curvature_part(omega_p2) - curvature_part(omega_s) - curvature_part(omega_i);
}

void SpiralParams::validate() const
{
    if (!(length > 0.0)) throw ConfigError("spiral length must be > 0");
    if (!(expansion_omega > 0.0)) throw ConfigError("spiral dispersion expansion frequency must be > 0");
    for (double k : dispersion)
        if (!std::isfinite(k)) throw ConfigError("spiral dispersion coefficients must be finite");
}

// ---------------------------------------------------------------- filter

double FilterSpec::power_response(double detuning) const
{
    switch (shape) {
    case FilterShape::ideal: return detuning == 0.0 ? 1.0 : 0.0;
    case FilterShape::lorentzian: {
        const double half = 0.5 * fwhm;
        return half * half / (half * half + detuning * detuning);
    }
    case FilterShape::rect:
        return std::abs(detuning) <= 0.5 * fwhm * (1.0 + 1e-12) ? 1.0 : 0.0;
    }
    return 0.0;
}

void FilterSpec::validate() const
{
    if (shape != FilterShape::ideal && !(fwhm > 0.0)) throw ConfigError("filter FWHM must be > 0");
}

FilterSpec FilterSpec::on_chip() { return {FilterShape::lorentzian, 110e9}; }
FilterSpec FilterSpec::off_chip() { return {FilterShape::rect, 40e9}; }

const char* to_string(FilterShape shape)
{
    switch (shape) {
    case FilterShape::ideal: return "ideal";
    case FilterShape::lorentzian: return "lorentzian";
    case FilterShape::rect: return "rect";
    }
    return "?";
}

// ---------------------------------------------------------------- quadrature

namespace {

/// Trapezoid rule with successive halving. The integrand vanishes (to double
/// precision) at both ends, so the rule converges faster than any power.
/// `bound` caps |integral| over all arguments; errors below 1e-6 rel_tol bound
/// are accepted even where the integral itself is negligible.
template <class Integrand>
QuadratureResult refine_trapezoid(Integrand&& f, double lo, double hi, double feature,
                                  const QuadratureOptions& opts, double bound)
{
    QuadratureResult res;
    if (!(hi > lo)) return res;

    const double target_step = feature / std::max(1, opts.oversampling);
    std::size_t n = static_cast<std::size_t>(std::ceil((hi - lo) / target_step));
    n = std::max<std::size_t>(n, 16);

    double h = (hi - lo) / static_cast<double>(n);
    cdouble sum = 0.5 * (f(lo) + f(hi));
    double abs_sum = 0.5 * (std::abs(f(lo)) + std::abs(f(hi)));
    res.evaluations = 2;
    for (std::size_t k = 1; k < n; ++k) {
        const cdouble v = f(lo + h * static_cast<double>(k));
        sum += v;
        abs_sum += std::abs(v);
    }
    res.evaluations += n - 1;
    cdouble previous = sum * h;

    for (int level = 0; level < opts.max_refinements; ++level) {
        cdouble mid{0.0, 0.0};
        double abs_mid = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const cdouble v = f(lo + h * (static_cast<double>(k) + 0.5));
            mid += v;
            abs_mid += std::abs(v);
        }
        res.evaluations += n;
        sum += mid;
        abs_sum += abs_mid;
        n *= 2;
        h *= 0.5;
        const cdouble current = sum * h;
        res.abs_integral = abs_sum * h;
        res.error_estimate = std::abs(current - previous);
        res.value = current;
        if (res.error_estimate <= opts.rel_tol * std::max(res.abs_integral, 1e-6 * bound) || res.abs_integral == 0.0)
            return res;
        previous = current;
    }

    std::ostringstream msg;
    msg << "pump quadrature did not converge: estimated error " << res.error_estimate
        << " vs tolerance " << opts.rel_tol * res.abs_integral << " after " << res.evaluations
        << " evaluations on [" << lo << ", " << hi << "] rad/s";
    throw NumericalError(msg.str());
}

/// Interval where both A_p(w') and A_p(S - w') are inside the pump support.
std::pair<double, double> pair_support(const PumpSpectrum& pump, double omega_sum)
{
    const double c = pump.center();
    const double h = pump.support_half_width();
    return {std::max(c - h, omega_sum - c - h), std::min(c + h, omega_sum - c + h)};
}

}  // namespace

QuadratureResult pump_autoconvolution_detailed(const PumpSpectrum& pump, double omega_sum,
                                               const RingParams* ring, const QuadratureOptions& opts)
{
    if (!std::isfinite(omega_sum)) throw std::invalid_argument("frequency must be finite");
    const auto [lo, hi] = pair_support(pump, omega_sum);
    double feature = pump.feature_scale();
    if (ring == nullptr) {
        auto f = [&](double w) { return pump.amplitude(omega_sum - w) * pump.amplitude(w); };
        return refine_trapezoid(f, lo, hi, feature, opts, 1.0);
    }
    feature = std::min(feature, ring->pump.decay_rate());
    auto f = [&](double w) {
        return field_enhancement(*ring, omega_sum - w, Band::pump) * field_enhancement(*ring, w, Band::pump) *
               pump.amplitude(omega_sum - w) * pump.amplitude(w);
    };
    // Cauchy-Schwarz with int |A_p|^2 = 1
    const double bound = std::norm(field_enhancement(*ring, ring->pump.omega0, Band::pump));
    return refine_trapezoid(f, lo, hi, feature, opts, bound);
}

cdouble pump_autoconvolution(const PumpSpectrum& pump, double omega_sum, const RingParams* ring,
                             const QuadratureOptions& opts)
{
    return pump_autoconvolution_detailed(pump, omega_sum, ring, opts).value;
}

ComplexJSA resonator_jsa(const RingParams& ring, const PumpSpectrum& pump, const SpectralGrid& grid,
                         Band row_band, Band column_band, const QuadratureOptions& opts)
{
    ring.validate();
    const auto& rows = grid.signal();
    const auto& cols = grid.idler();
    ComplexMatrix values(rows.size(), cols.size());

    std::vector<cdouble> fe_rows(rows.size()), fe_cols(cols.size());
    for (std::size_t r = 0; r < rows.size(); ++r) fe_rows[r] = field_enhancement(ring, rows[r], row_band);
    for (std::size_t c = 0; c < cols.size(); ++c) fe_cols[c] = field_enhancement(ring, cols[c], column_band);

    // On a lattice with equal spacings the sum frequency only depends on r + c.
    const bool shared_step = std::abs(grid.signal_step() - grid.idler_step()) <= 1e-12 * grid.signal_step();
    std::unordered_map<std::size_t, cdouble> by_diagonal;

    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < cols.size(); ++c) {
            cdouble conv;
            if (shared_step) {
                auto it = by_diagonal.find(r + c);
                if (it == by_diagonal.end())
                    it = by_diagonal.emplace(r + c, pump_autoconvolution(pump, rows[r] + cols[c], &ring, opts)).first;
                conv = it->second;
            } else {
                conv = pump_autoconvolution(pump, rows[r] + cols[c], &ring, opts);
            }
            values(r, c) = fe_rows[r] * fe_cols[c] * conv;
        }
    }
    ComplexJSA jsa(grid, std::move(values));
    jsa.normalize();
    jsa.provenance = "resonator";
    return jsa;
}

ComplexJSA spiral_jsa(const SpiralParams& spiral, const PumpSpectrum& pump, const SpectralGrid& grid,
                      const QuadratureOptions& opts)
{
    spiral.validate();
    const auto& rows = grid.signal();
    const auto& cols = grid.idler();
    const double half_length = 0.5 * spiral.length;
    ComplexMatrix values(rows.size(), cols.size());

    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < cols.size(); ++c) {
            const double ws = rows[r], wi = cols[c], sum = ws + wi;
            const double ks = spiral.curvature_part(ws) + spiral.curvature_part(wi);
            auto f = [&](double w) {
                const double x = (spiral.curvature_part(sum - w) + spiral.curvature_part(w) - ks) * half_length;
                const double sinc = std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
                return std::polar(sinc, x) * pump.amplitude(sum - w) * pump.amplitude(w);
            };
            const auto [lo, hi] = pair_support(pump, sum);
            values(r, c) = refine_trapezoid(f, lo, hi, pump.feature_scale(), opts, 1.0).value;
        }
    }
    ComplexJSA jsa(grid, std::move(values));
    jsa.normalize();
    jsa.provenance = "spiral";
    return jsa;
}

// ---------------------------------------------------------------- filter convolution

namespace {

template <class Matrix>
Matrix convolve_columns(const Matrix& map, const std::vector<double>& axis, const FilterSpec& filter)
{
    filter.validate();
    if (map.cols() != static_cast<Eigen::Index>(axis.size()))
        throw std::invalid_argument("filter convolution: axis length does not match map columns");
    if (filter.shape == FilterShape::ideal) return map;
    if (axis.size() < 2) throw ConfigError("filter convolution needs at least two idler samples");

    const double step = (axis.back() - axis.front()) / static_cast<double>(axis.size() - 1);
    if (filter.fwhm < 3.0 * step) {
        std::ostringstream msg;
        msg << "filter FWHM " << filter.fwhm << " rad/s is under-resolved by idler spacing " << step
            << " rad/s (need >= 3 samples per FWHM)";
        throw ConfigError(msg.str());
    }

    const double cutoff = 10.0 * filter.fwhm;
    const auto n = static_cast<Eigen::Index>(axis.size());
    Matrix out = Matrix::Zero(map.rows(), map.cols());
    Eigen::VectorXd weights(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        double total = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) {
            const double d = axis[k] - axis[j];
            weights[k] = std::abs(d) <= cutoff ? filter.power_response(d) : 0.0;
            total += weights[k];
        }
        weights /= total;
        for (Eigen::Index k = 0; k < n; ++k)
            if (weights[k] != 0.0) out.col(j) += weights[k] * map.col(k);
    }
    return out;
}

}  // namespace

RealMatrix convolve_filter_jsi(const RealMatrix& jsi, const std::vector<double>& idler_axis,
                               const FilterSpec& filter)
{
    return convolve_columns(jsi, idler_axis, filter);
}

ComplexMatrix convolve_filter(const ComplexMatrix& map, const std::vector<double>& idler_axis,
                              const FilterSpec& filter)
{
    return convolve_columns(map, idler_axis, filter);
}

}  // namespace ringjsa
