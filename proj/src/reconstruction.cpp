#include "ringjsa/reconstruction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>

#include <unsupported/Eigen/LevenbergMarquardt>

namespace ringjsa {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_shape(const RealMatrix& m, const SpectralGrid& grid, const char* name)
{
    if (m.rows() != static_cast<Eigen::Index>(grid.n_signal()) ||
        m.cols() != static_cast<Eigen::Index>(grid.n_idler())) {
        std::ostringstream msg;
        msg << name << " is " << m.rows() << "x" << m.cols() << ", grid is " << grid.n_signal() << "x"
            << grid.n_idler();
        throw ConfigError(msg.str());
    }
}

}  // namespace

PhaseMap PhaseMap::transposed() const
{
    PhaseMap t;
    t.grid = grid.transposed();
    t.delta = delta.transpose();
    t.sigma = sigma.transpose();
    t.valid = valid.transpose();
    t.amplitude = amplitude.transpose();
    t.background = background.transpose();
    return t;
}

// ---------------------------------------------------------------- |delta|

PhaseMap abs_delta(const RealMatrix& i_int, const RealMatrix& i_res, const RealMatrix& i_spi,
                   const SpectralGrid& grid, double dark, double eps_clamp)
{
    require_shape(i_int, grid, "I_int");
    require_shape(i_res, grid, "I_res");
    require_shape(i_spi, grid, "I_spi");

    const auto rows = i_int.rows(), cols = i_int.cols();
    PhaseMap out;
    out.grid = grid;
    out.delta = RealMatrix::Constant(rows, cols, kNaN);
    out.sigma = RealMatrix::Constant(rows, cols, kNaN);
    out.valid = MaskMatrix::Constant(rows, cols, false);
    out.amplitude = RealMatrix::Zero(rows, cols);
    out.background = RealMatrix::Zero(rows, cols);

    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) {
            const double res = i_res(r, c) - dark;
            const double spi = i_spi(r, c) - dark;
            if (!(res > 0.0) || !(spi > 0.0)) continue;
            const double den = 2.0 * std::sqrt(res * spi);
            const double arg = (i_int(r, c) - i_res(r, c) - i_spi(r, c) + dark) / den;
            const double overshoot = std::max(0.0, std::abs(arg) - 1.0);
            out.amplitude(r, c) = overshoot;
            if (overshoot > eps_clamp || !std::isfinite(arg)) continue;
            const double clamped = std::clamp(arg, -1.0, 1.0);
            out.delta(r, c) = std::acos(clamped);
            // shot-noise estimate of the cosine, pushed through arccos
            const double sigma_arg =
                std::sqrt(std::max(i_int(r, c), 0.0) + std::max(i_res(r, c), 0.0) + std::max(i_spi(r, c), 0.0)) / den;
            const double slope = std::sqrt(std::max(1.0 - clamped * clamped, sigma_arg));
            out.sigma(r, c) = sigma_arg / slope;
            out.valid(r, c) = true;
        }
    }
    return out;
}

// ---------------------------------------------------------------- fringe fits

FringePointFit fit_fringe_point(std::span<const double> schedule, std::span<const double> counts)
{
    if (schedule.size() != counts.size()) throw ConfigError("fringe schedule and counts differ in length");
    const auto n = static_cast<Eigen::Index>(schedule.size());
    Eigen::MatrixXd x(n, 3);
    Eigen::VectorXd y(n), w(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        x(k, 0) = std::cos(schedule[k]);
        x(k, 1) = std::sin(schedule[k]);
        x(k, 2) = 1.0;
        y[k] = counts[k];
        w[k] = 1.0 / std::max(counts[k], 1.0);
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    qr.setThreshold(1e-10);
    if (qr.rank() < 3)
        throw NumericalError("fringe schedule is degenerate: cos, sin and constant are not separable");

    const Eigen::Matrix3d normal = x.transpose() * w.asDiagonal() * x;
    const Eigen::Vector3d rhs = x.transpose() * w.asDiagonal() * y;
    const Eigen::LDLT<Eigen::Matrix3d> ldlt(normal);
    const Eigen::Vector3d coef = ldlt.solve(rhs);
    const Eigen::Matrix3d cov = ldlt.solve(Eigen::Matrix3d::Identity());

    const double c1 = coef[0], c2 = coef[1];
    FringePointFit fit;
    fit.amplitude = std::hypot(c1, c2);
    fit.background = coef[2];
    fit.delta = wrap_phase(std::atan2(-c2, c1));
    fit.sigma_background = std::sqrt(std::max(cov(2, 2), 0.0));
    if (fit.amplitude > 0.0) {
        const double a = fit.amplitude;
        const Eigen::Vector3d ja(c1 / a, c2 / a, 0.0);
        const Eigen::Vector3d jd(c2 / (a * a), -c1 / (a * a), 0.0);
        fit.sigma_amplitude = std::sqrt(std::max(ja.dot(cov * ja), 0.0));
        fit.sigma_delta = std::sqrt(std::max(jd.dot(cov * jd), 0.0));
    } else {
        fit.sigma_amplitude = std::sqrt(std::max(0.5 * (cov(0, 0) + cov(1, 1)), 0.0));
        fit.sigma_delta = std::numeric_limits<double>::infinity();
    }
    return fit;
}

PhaseMap fit_fringe(const FringeScan& scan, const SpectralGrid& grid, double snr_threshold)
{
    scan.validate();
    if (scan.rows != grid.n_signal() || scan.cols != grid.n_idler())
        throw ConfigError("fringe scan size does not match the measurement grid");
    if (!(snr_threshold >= 0.0)) throw ConfigError("SNR threshold must be >= 0");

    const auto rows = static_cast<Eigen::Index>(scan.rows), cols = static_cast<Eigen::Index>(scan.cols);
    PhaseMap out;
    out.grid = grid;
    out.delta = RealMatrix::Constant(rows, cols, kNaN);
    out.sigma = RealMatrix::Constant(rows, cols, kNaN);
    out.valid = MaskMatrix::Constant(rows, cols, false);
    out.amplitude = RealMatrix::Zero(rows, cols);
    out.background = RealMatrix::Zero(rows, cols);

    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) {
            const FringePointFit fit = fit_fringe_point(scan.schedule, scan.point(r, c));
            out.amplitude(r, c) = fit.amplitude;
            out.background(r, c) = fit.background;
            const bool ok = fit.amplitude > 0.0 && fit.amplitude >= snr_threshold * fit.sigma_amplitude &&
                            std::isfinite(fit.sigma_delta);
            if (!ok) continue;
            out.delta(r, c) = fit.delta;
            out.sigma(r, c) = fit.sigma_delta;
            out.valid(r, c) = true;
        }
    }
    return out;
}

// ---------------------------------------------------------------- transfer fit

cdouble TransferFit::intrinsic(double omega) const
{
    return 1.0 - (2.0 / tau_e) / (1.0 / tau_tot - cdouble(0.0, omega - omega0));
}

cdouble TransferFit::model(double omega) const
{
    return std::polar(amplitude, phase0 + phase_slope * (omega - omega_ref)) * intrinsic(omega);
}

namespace {

// Parameters scaled by the initial linewidth u = 1/a0:
// p = (C, p0, p1 / u, b u, a u, (w0 - w_ref) / u), x = (w - w_ref) / u.
struct TransferResidual : Eigen::DenseFunctor<double> {
    std::vector<double> x;
    std::vector<cdouble> data;

    TransferResidual(std::vector<double> xs, std::vector<cdouble> d)
        : Eigen::DenseFunctor<double>(6, static_cast<int>(2 * xs.size())), x(std::move(xs)), data(std::move(d))
    {
    }

    int operator()(const InputType& p, ValueType& f) const
    {
        for (std::size_t k = 0; k < x.size(); ++k) {
            const cdouble e = p[0] * std::polar(1.0, p[1] + p[2] * x[k]);
            const cdouble d(p[4], -(x[k] - p[5]));
            const cdouble r = e * (1.0 - p[3] / d) - data[k];
            f[2 * k] = r.real();
            f[2 * k + 1] = r.imag();
        }
        return 0;
    }

    int df(const InputType& p, JacobianType& jac) const
    {
        const cdouble i(0.0, 1.0);
        for (std::size_t k = 0; k < x.size(); ++k) {
            const cdouble e = p[0] * std::polar(1.0, p[1] + p[2] * x[k]);
            const cdouble d(p[4], -(x[k] - p[5]));
            const cdouble t = e * (1.0 - p[3] / d);
            const cdouble g[6] = {
                std::polar(1.0, p[1] + p[2] * x[k]) * (1.0 - p[3] / d),
                i * t,
                i * x[k] * t,
                -e / d,
                e * p[3] / (d * d),
                i * e * p[3] / (d * d),
            };
            for (int j = 0; j < 6; ++j) {
                jac(2 * static_cast<Eigen::Index>(k), j) = g[j].real();
                jac(2 * static_cast<Eigen::Index>(k) + 1, j) = g[j].imag();
            }
        }
        return 0;
    }
};

double local_slope(const std::vector<double>& xs, const std::vector<double>& ys)
{
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(ys.size());
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        sxy += (xs[k] - mx) * (ys[k] - my);
        sxx += (xs[k] - mx) * (xs[k] - mx);
    }
    return sxx > 0.0 ? sxy / sxx : 0.0;
}

std::vector<double> unwrapped(std::vector<double> phase)
{
    for (std::size_t k = 1; k < phase.size(); ++k) phase[k] = phase[k - 1] + wrap_phase(phase[k] - phase[k - 1]);
    return phase;
}

}  // namespace

TransferFit fit_transfer(std::span<const TransferSample> input)
{
    std::vector<TransferSample> s(input.begin(), input.end());
    if (s.size() < 8) throw NumericalError("transfer fit needs at least 8 samples");
    std::sort(s.begin(), s.end(), [](const auto& a, const auto& b) { return a.omega < b.omega; });
    for (const auto& v : s)
        if (!std::isfinite(v.omega) || !std::isfinite(v.modulus) || !std::isfinite(v.phase))
            throw NumericalError("transfer samples contain non-finite values");

    const std::size_t n = s.size();
    const double omega_ref = std::accumulate(s.begin(), s.end(), 0.0, [](double a, const auto& v) { return a + v.omega; }) /
                             static_cast<double>(n);
    std::vector<cdouble> t(n);
    for (std::size_t k = 0; k < n; ++k) t[k] = std::polar(s[k].modulus, s[k].phase);

    // background from the wings
    const std::size_t wing = std::max<std::size_t>(3, n / 10);
    std::vector<double> lx, lp, rx, rp;
    double c0 = 0.0;
    for (std::size_t k = 0; k < wing; ++k) {
        lx.push_back(s[k].omega - omega_ref);
        lp.push_back(s[k].phase);
        rx.push_back(s[n - wing + k].omega - omega_ref);
        rp.push_back(s[n - wing + k].phase);
        c0 += s[k].modulus + s[n - wing + k].modulus;
    }
    c0 /= static_cast<double>(2 * wing);
    const double slope0 = 0.5 * (local_slope(lx, unwrapped(lp)) + local_slope(rx, unwrapped(rp)));
    cdouble phasor{0.0, 0.0};
    for (std::size_t k = 0; k < wing; ++k) {
        phasor += t[k] * std::polar(1.0, -slope0 * lx[k]);
        phasor += t[n - wing + k] * std::polar(1.0, -slope0 * rx[k]);
    }
    const double phase0 = std::arg(phasor);
    if (!(c0 > 0.0)) throw NumericalError("transfer scan has zero modulus in the wings");

    // resonance from D = 1 - T / background
    std::vector<double> dip(n);
    for (std::size_t k = 0; k < n; ++k) {
        const cdouble bg = std::polar(c0, phase0 + slope0 * (s[k].omega - omega_ref));
        dip[k] = std::abs(1.0 - t[k] / bg);
    }
    const auto peak_it = std::max_element(dip.begin(), dip.end());
    const std::size_t kp = static_cast<std::size_t>(peak_it - dip.begin());
    const double dmax = *peak_it;
    double wing_mean = 0.0, wing_sq = 0.0;
    for (std::size_t k = 0; k < wing; ++k)
        for (double v : {dip[k], dip[n - wing + k]}) {
            wing_mean += v;
            wing_sq += v * v;
        }
    wing_mean /= static_cast<double>(2 * wing);
    const double wing_std = std::sqrt(std::max(wing_sq / static_cast<double>(2 * wing) - wing_mean * wing_mean, 0.0));
    if (dmax < 0.02 || dmax < 10.0 * wing_std) {
        std::ostringstream msg;
        msg << "no resonance found in the transfer scan (peak |1 - T| = " << dmax << ")";
        throw NumericalError(msg.str());
    }

    const double half_power = 0.5 * dmax * dmax;
    auto crossing = [&](int dir) -> std::optional<double> {
        for (std::size_t k = kp; dir < 0 ? k > 0 : k + 1 < n; dir < 0 ? --k : ++k) {
            const std::size_t j = dir < 0 ? k - 1 : k + 1;
            const double a = dip[k] * dip[k], b = dip[j] * dip[j];
            if (b <= half_power) {
                const double f = (a - half_power) / (a - b);
                return std::abs(s[k].omega + f * (s[j].omega - s[k].omega) - s[kp].omega);
            }
        }
        return std::nullopt;
    };
    const auto left = crossing(-1), right = crossing(+1);
    if (!left && !right) throw NumericalError("transfer scan does not resolve the resonance half width");
    const double hwhm = left && right ? 0.5 * (*left + *right) : (left ? *left : *right);
    if (!(hwhm > 0.0)) throw NumericalError("transfer scan does not resolve the resonance half width");

    const double span = s.back().omega - s.front().omega;
    if (span < 3.0 * 2.0 * hwhm) {
        std::ostringstream msg;
        msg << "transfer scan spans " << span / (2.0 * hwhm) << " linewidths, need at least 3";
        throw NumericalError(msg.str());
    }

    const double u = 1.0 / hwhm;
    std::vector<double> x(n);
    for (std::size_t k = 0; k < n; ++k) x[k] = (s[k].omega - omega_ref) * u;
    TransferResidual functor(x, t);
    Eigen::VectorXd p(6);
    p << c0, phase0, slope0 / u, dmax, 1.0, (s[kp].omega - omega_ref) * u;

    Eigen::LevenbergMarquardt<TransferResidual> lm(functor);
    lm.setXtol(1e-14);
    lm.setFtol(1e-14);
    lm.setGtol(0.0);
    lm.setMaxfev(4000);
    const auto status = lm.minimize(p);
    using namespace Eigen::LevenbergMarquardtSpace;
    if (status == ImproperInputParameters || status == TooManyFunctionEvaluation || !p.allFinite()) {
        std::ostringstream msg;
        msg << "transfer fit did not converge (status " << static_cast<int>(status) << "); last iterate: C=" << p[0]
            << " tau_e=" << 2.0 / (p[3] / u) << " s tau_tot=" << 1.0 / (p[4] / u)
            << " s omega0=" << omega_ref + p[5] / u << " rad/s";
        throw NumericalError(msg.str());
    }
    if (!(p[3] > 0.0) || !(p[4] > 0.0) || !(p[0] > 0.0))
        throw NumericalError("transfer fit converged to a non-physical resonance");

    TransferFit fit;
    fit.amplitude = p[0];
    fit.phase0 = wrap_phase(p[1]);
    fit.phase_slope = p[2] * u;
    fit.tau_e = 2.0 * u / p[3];
    fit.tau_tot = u / p[4];
    fit.omega0 = omega_ref + p[5] / u;
    fit.omega_ref = omega_ref;
    fit.samples = n;
    fit.iterations = static_cast<int>(lm.iterations());

    Eigen::VectorXd f(2 * n);
    functor(p, f);
    fit.residual_norm = f.norm();
    Eigen::MatrixXd jac(2 * n, 6);
    functor.df(p, jac);
    const double dof = static_cast<double>(2 * n) - 6.0;
    const Eigen::MatrixXd scaled_cov =
        (jac.transpose() * jac).ldlt().solve(Eigen::MatrixXd::Identity(6, 6)) * (f.squaredNorm() / dof);
    Eigen::Matrix<double, 6, 1> g;
    g << 1.0, 1.0, u, -2.0 * u / (p[3] * p[3]), -u / (p[4] * p[4]), 1.0 / u;
    fit.covariance = g.asDiagonal() * scaled_cov * g.asDiagonal();
    return fit;
}

// ---------------------------------------------------------------- theta_FE

double FieldPhaseCurve::at(double omega) const
{
    const double tol = 1e-9 * std::max(hi - lo, 1.0);
    if (omega < lo - tol || omega > hi + tol) {
        std::ostringstream msg;
        msg << "field-enhancement phase curve covers [" << lo << ", " << hi << "] rad/s, requested " << omega;
        throw ConfigError(msg.str());
    }
    return kPi / 2.0 + std::atan2(omega - omega0, decay_rate);
}

FieldPhaseCurve fe_phase_curve(const TransferFit& fit, std::span<const double> omegas)
{
    if (omegas.empty()) throw ConfigError("empty frequency grid for the field-enhancement phase");
    FieldPhaseCurve curve;
    curve.omega0 = fit.omega0;
    curve.decay_rate = 1.0 / fit.tau_tot;
    curve.omega.assign(omegas.begin(), omegas.end());
    std::sort(curve.omega.begin(), curve.omega.end());
    curve.lo = curve.omega.front();
    curve.hi = curve.omega.back();
    curve.theta.reserve(curve.omega.size());
    for (double w : curve.omega) curve.theta.push_back(field_enhancement_phase(fit.resonance(), w));
    return curve;
}

// ---------------------------------------------------------------- assembly

RealMatrix assemble_jsp(const PhaseMap& delta, const FieldPhaseCurve& theta_fe, const RealMatrix& jsi, int sign)
{
    require_shape(jsi, delta.grid, "JSI");
    if (delta.valid_count() == 0) throw NumericalError("no valid phase points to assemble a JSP from");

    const auto& rows = delta.grid.signal();
    RealMatrix jsp = RealMatrix::Constant(delta.delta.rows(), delta.delta.cols(), kNaN);
    Eigen::Index pr = -1, pc = -1;
    double best = -std::numeric_limits<double>::infinity();
    for (Eigen::Index r = 0; r < jsp.rows(); ++r) {
        const double correction = -static_cast<double>(sign) * 2.0 * theta_fe.at(rows[r]);
        for (Eigen::Index c = 0; c < jsp.cols(); ++c) {
            if (!delta.valid(r, c)) continue;
            jsp(r, c) = delta.delta(r, c) + correction;
            if (jsi(r, c) > best) {
                best = jsi(r, c);
                pr = r;
                pc = c;
            }
        }
    }
    const double reference = jsp(pr, pc);
    for (Eigen::Index r = 0; r < jsp.rows(); ++r)
        for (Eigen::Index c = 0; c < jsp.cols(); ++c)
            if (delta.valid(r, c)) jsp(r, c) = wrap_phase(jsp(r, c) - reference);
    return jsp;
}

ComplexJSA assemble_complex_jsa(const SpectralGrid& grid, const RealMatrix& jsi, const RealMatrix& jsp,
                                const MaskMatrix& mask)
{
    require_shape(jsi, grid, "JSI");
    require_shape(jsp, grid, "JSP");
    if (mask.rows() != jsi.rows() || mask.cols() != jsi.cols()) throw ConfigError("mask does not match the grid");
    if (mask.count() == 0) throw NumericalError("empty validity mask");

    ComplexMatrix values = ComplexMatrix::Zero(jsi.rows(), jsi.cols());
    for (Eigen::Index r = 0; r < jsi.rows(); ++r)
        for (Eigen::Index c = 0; c < jsi.cols(); ++c) {
            if (!mask(r, c)) continue;
            if (jsi(r, c) < 0.0) throw ConfigError("JSI must be nonnegative");
            values(r, c) = std::polar(std::sqrt(jsi(r, c)), jsp(r, c));
        }
    ComplexJSA jsa(grid, std::move(values));
    jsa.normalize();
    jsa.provenance = "reconstruction";
    return jsa;
}

ReconstructionResult reconstruct(const MeasurementSet& m, const ReconstructionOptions& opts)
{
    require_shape(m.i_res, m.grid, "I_res");
    require_shape(m.i_spi, m.grid, "I_spi");
    require_shape(m.i_int, m.grid, "I_int");
    const double dark = m.campaign.dark_counts;

    const RealMatrix jsi_m = (m.i_res.array() - dark).cwiseMax(0.0).matrix();
    PhaseMap absd = abs_delta(m.i_int, m.i_res, m.i_spi, m.grid, dark, opts.eps_clamp);
    PhaseMap fringe = fit_fringe(m.fringe, m.grid, opts.snr_threshold);

    ReconstructionResult out;
    out.seed_order = m.campaign.seed_order;
    out.transfer = fit_transfer(m.transfer);
    std::vector<double> omegas;
    omegas.reserve(m.transfer.size());
    for (const auto& s : m.transfer) omegas.push_back(s.omega);
    out.theta_fe = fe_phase_curve(out.transfer, omegas);

    RealMatrix jsp_m = assemble_jsp(fringe, out.theta_fe, jsi_m);
    RealMatrix jsi = jsi_m;
    if (out.seed_order == SeedOrder::minus) {
        out.grid = m.grid.transposed();
        jsi = jsi_m.transpose();
        out.jsp = jsp_m.transpose();
        out.delta = fringe.transposed();
        out.abs_delta = absd.transposed();
    } else {
        out.grid = m.grid;
        out.jsp = std::move(jsp_m);
        out.delta = std::move(fringe);
        out.abs_delta = std::move(absd);
    }
    out.mask = out.delta.valid;

    const double total = jsi.sum() * out.grid.cell_measure();
    if (!(total > 0.0)) throw NumericalError("resonator intensity map is empty");
    out.jsi = jsi / total;
    out.jsa = assemble_complex_jsa(out.grid, out.jsi, out.jsp, out.mask);

    std::ostringstream conv;
    conv << "JSP = delta " << (kFieldEnhancementPhaseSign < 0 ? "+" : "-")
         << " 2 theta_FE(seed), zero at the JSI peak, wrapped to (-pi, pi]";
    out.phase_convention = conv.str();
    return out;
}

}  // namespace ringjsa
