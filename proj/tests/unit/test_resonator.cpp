#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "ringjsa/resonator.hpp"

using namespace ringjsa;

TEST_CASE("field enhancement on resonance is positive imaginary")
{
    const RingParams ring = RingParams::reference_device();
    for (Band b : {Band::pump, Band::signal, Band::idler}) {
        const cdouble fe = field_enhancement(ring, ring.band(b).omega0, b);
        CHECK(std::abs(fe.real()) < 1e-12 * std::abs(fe));
        CHECK(fe.imag() > 0.0);
        CHECK(std::arg(fe) == doctest::Approx(kPi / 2).epsilon(1e-14));
    }
}

TEST_CASE("field enhancement at half linewidth has half the peak intensity")
{
    const RingParams ring = RingParams::reference_device();
    const auto& s = ring.signal;
    const double peak = std::norm(field_enhancement(ring, s.omega0, Band::signal));
    for (double sgn : {-1.0, 1.0}) {
        const double half = std::norm(field_enhancement(ring, s.omega0 + sgn / s.tau_tot, Band::signal));
        CHECK(half / peak == doctest::Approx(0.5).epsilon(1e-12));
    }
    // |FE|^2 on resonance = (2/tau_e) tau_tot^2 / tau_rt
    CHECK(peak == doctest::Approx(2.0 / s.tau_e * s.tau_tot * s.tau_tot / ring.round_trip_time()).epsilon(1e-13));
    CHECK(std::abs(field_enhancement(ring, s.omega0 + 1e17, Band::signal)) < 1e-4 * std::sqrt(peak));
}

TEST_CASE("reference device round trip time gives an 800 GHz FSR")
{
    const RingParams ring = RingParams::reference_device();
    CHECK(ring.fsr_hz() == doctest::Approx(800e9).epsilon(1e-12));
    CHECK(ring.group_index == doctest::Approx(4.0681).epsilon(1e-4));
}

TEST_CASE("Lorentzian symmetry and phase antisymmetry")
{
    const RingParams ring = RingParams::reference_device();
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> det(-5e12, 5e12);
    for (int k = 0; k < 1000; ++k) {
        const double d = det(gen);
        const cdouble up = field_enhancement(ring, ring.idler.omega0 + d, Band::idler);
        const cdouble dn = field_enhancement(ring, ring.idler.omega0 - d, Band::idler);
        CHECK(std::abs(up) == doctest::Approx(std::abs(dn)).epsilon(1e-12));
        CHECK(wrap_phase(std::arg(up) + std::arg(dn) - kPi) == doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("field enhancement phase is continuous and sweeps from 0 to pi")
{
    const BandResonance& s = RingParams::reference_device().signal;
    CHECK(field_enhancement_phase(s, s.omega0) == doctest::Approx(kPi / 2));
    CHECK(field_enhancement_phase(s, s.omega0 + 1.0 / s.tau_tot) == doctest::Approx(3 * kPi / 4));
    CHECK(field_enhancement_phase(s, s.omega0 - 1.0 / s.tau_tot) == doctest::Approx(kPi / 4));
    CHECK(field_enhancement_phase(s, s.omega0 - 1e16) < 1e-3);
    CHECK(field_enhancement_phase(s, s.omega0 + 1e16) > kPi - 1e-3);
}

TEST_CASE("through and drop limits")
{
    const RingParams ring = RingParams::reference_device();
    const double far = ring.signal.omega0 + 1e17;
    CHECK(std::abs(through_transfer(ring, far, Band::signal) - 1.0) < 1e-4);
    CHECK(std::abs(drop_transfer(ring, far, Band::signal)) < 1e-4);

    // lossy device: through dips, drop peaks on resonance
    const auto& s = ring.signal;
    const double rho = s.bus_rate() * s.tau_tot;
    const cdouble t0 = through_transfer(ring, s.omega0, Band::signal);
    CHECK(t0.real() == doctest::Approx(1.0 - rho).epsilon(1e-13));
    CHECK(std::abs(t0.imag()) < 1e-13);
    CHECK(std::norm(drop_transfer(ring, ring.idler.omega0, Band::idler)) ==
          doctest::Approx(std::pow(ring.idler.bus_rate() * ring.idler.tau_tot, 2)).epsilon(1e-13));
    const double er_db = 10.0 * std::log10(std::norm(t0));
    CHECK(er_db < -5.0);
    CHECK(er_db > -40.0);
}

TEST_CASE("lossless unitarity |T|^2 + |D|^2 = 1")
{
    const RingParams ring = testutil::lossless_ring();
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> det(-2e12, 2e12);
    for (int k = 0; k < 2000; ++k) {
        const double w = ring.pump.omega0 + det(gen);
        const double sum = std::norm(through_transfer(ring, w, Band::pump)) + std::norm(drop_transfer(ring, w, Band::pump));
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
    // lossless add-drop: the through port is fully extinguished on resonance
    CHECK(std::abs(through_transfer(ring, ring.pump.omega0, Band::pump)) < 1e-12);
}

TEST_CASE("sum identity holds on the lossless manifold")
{
    const RingParams ring = testutil::lossless_ring();
    const SumIdentity at0 = sum_identity(ring, ring.signal.omega0, Band::signal);
    CHECK(at0.lossless);
    CHECK(std::abs(at0.sum_conj + 1.0) < 1e-12);
    CHECK(std::abs(at0.fe_ratio + 1.0) < 1e-12);
    const SumIdentity far = sum_identity(ring, ring.signal.omega0 + 1e17, Band::signal);
    CHECK(std::abs(far.sum_conj - 1.0) < 1e-4);

    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> det(-3e12, 3e12);
    double worst = 0.0;
    for (int k = 0; k < 5000; ++k) {
        const SumIdentity id = sum_identity(ring, ring.signal.omega0 + det(gen), Band::signal);
        worst = std::max(worst, std::abs(id.sum_conj - id.fe_ratio));
    }
    CHECK(worst < 1e-12);

    const SumIdentity lossy = sum_identity(RingParams::reference_device(), ring.signal.omega0, Band::signal);
    CHECK_FALSE(lossy.lossless);
}

TEST_CASE("fe_from_through inverts through_transfer")
{
    const RingParams ring = RingParams::reference_device();
    std::vector<double> w;
    std::vector<cdouble> t;
    for (int k = -200; k <= 200; ++k) {
        w.push_back(ring.idler.omega0 + 2.5e9 * k);
        t.push_back(through_transfer(ring, w.back(), Band::idler));
    }
    const auto rec = fe_from_through(t, w, ring, Band::idler);
    CHECK(rec.covers_resonance);
    for (std::size_t k = 0; k < w.size(); ++k) {
        const cdouble fe = field_enhancement(ring, w[k], Band::idler);
        CHECK(std::abs(rec.fe[k] - fe) < 1e-10 * std::abs(fe));
        CHECK(std::abs(wrap_phase(std::arg(rec.fe[k]) - std::arg(fe))) < 1e-10);
    }
    CHECK(std::arg(rec.fe[200]) == doctest::Approx(kPi / 2).epsilon(1e-12));

    const std::vector<cdouble> flat(3, cdouble{1.0, 0.0});
    const std::vector<double> wings{ring.idler.omega0 + 1e13, ring.idler.omega0 + 2e13, ring.idler.omega0 + 3e13};
    const auto none = fe_from_through(flat, wings, ring, Band::idler);
    CHECK_FALSE(none.covers_resonance);
    for (cdouble z : none.fe) CHECK(std::abs(z) == 0.0);
}

TEST_CASE("multichannel factor")
{
    const RingParams lossless = testutil::lossless_ring();
    const auto& s = lossless.signal;
    ChannelSet two{{s.tau_e, s.tau_e}, 0, s.tau_tot, s.omega0};
    for (double d : {-3e11, -1e11, 0.0, 4e10, 2e11}) {
        const SumIdentity id = sum_identity(lossless, s.omega0 + d, Band::signal);
        CHECK(std::abs(multichannel_stimulated_factor(two, s.omega0 + d) - id.sum_conj) < 1e-12);
    }

    const auto& r = RingParams::reference_device().signal;
    ChannelSet lossy{{r.tau_e, r.tau_e}, 0, r.tau_tot, r.omega0};
    CHECK_THROWS_AS(multichannel_stimulated_factor(lossy, r.omega0), ConfigError);
    const ChannelSet three = lossy.with_phantom_loss();
    CHECK(three.tau_e.size() == 3);
    CHECK(std::abs(multichannel_stimulated_factor(three, r.omega0) + 1.0) < 1e-12);
}

TEST_CASE("ring validation")
{
    RingParams ring = RingParams::reference_device();
    CHECK_NOTHROW(ring.validate());
    ring.signal.tau_tot = -1.0;
    CHECK_THROWS_AS(ring.validate(), ConfigError);
    ring = RingParams::reference_device();
    ring.idler.tau_tot = ring.idler.tau_e;  // decay slower than the two buses allow
    CHECK_THROWS_AS(ring.validate(), ConfigError);
    ring = RingParams::reference_device();
    ring.idler.omega0 = ring.signal.omega0;
    CHECK_THROWS_AS(ring.validate(), ConfigError);
}
